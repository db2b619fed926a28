#pragma once

#include <optional>
#include <string>

#include "ph/brackets.hpp"

namespace ph {

enum class Integrator { ImplicitMidpoint, RK4 };

struct InflowSpec {
    double amplitude = 0.0;    // peak normal velocity density on the selected edges
    double t_center = 0.0;     // Gaussian pulse center
    double t_width = 0.0;      // Gaussian width; amplitude 0 disables
    std::string on = "bottom"; // "bottom" or "all" Gamma edges
};

struct Scenario {
    std::string mesh_path;
    std::string model = "potential";  // "potential" or "rotational"
    PhysParams params;
    std::string init = "zero";        // "standing_wave", "taylor_green", "zero"
    double amplitude = 0.0;
    int mode = 1;
    InflowSpec inflow;
    double dt = 0.0;
    double t_end = 0.0;
    Integrator integrator = Integrator::ImplicitMidpoint;
    int output_every = 1;
    double fp_tol = 1e-11;
    int fp_maxit = 50;
    bool sigma_snapshots = false;

    void validate() const {
        if (!(dt > 0.0)) throw DataError("scenario: dt must be positive");
        if (!(t_end >= 0.0)) throw DataError("scenario: t_end must be nonnegative");
        params.validate();
    }
};

struct TrajectoryRecord {
    std::vector<double> t, H, H_kin, H_grav, H_surf, port_flux, area, div_residual;
    std::vector<std::pair<int, std::vector<Vec2>>> sigma_snapshots;
};

void write_trajectory_csv(const TrajectoryRecord& rec, const std::string& path);

// Mixed pressure solve: Dirichlet tau*k/rho at Sigma vertices, natural data
// gdot_loads at the remaining rows; rhs from the advective and Bernoulli
// terms of the momentum equation.
Cochain pressure_solve(const HodgeSystem& H, const Cochain& v, const SurfaceState& S,
                       const PhysParams& P, const Vec& gdot_loads);

// Move Sigma vertices along their motion directions by dt*speed (values
// indexed by vertex id); returns per-vertex displacements. Guards against
// displacements larger than 0.4 of the local edge length.
std::vector<Vec2> advance_surface(const SimplicialComplex& m, const SurfaceState& S,
                                  const Vec& speed, double dt);

// Harmonic extension of a boundary displacement; throws GeometryError with a
// dt reduction hint on inversion.
MeshPtr deform_mesh(const HodgeSystem& H, const std::vector<Vec2>& boundary_displacement);

// Potential-flow free-surface state: Dirichlet potential on Sigma plus the
// surface geometry carried by the mesh itself.
struct PotentialState {
    MeshPtr mesh;
    Vec phi_sigma;   // vertex-length, support on Sigma vertices (corners included)
    double time = 0.0;
};

struct RotationalState {
    MeshPtr mesh;
    Cochain v;
    double time = 0.0;
};

class PotentialStepper {
public:
    PotentialStepper(MeshPtr mesh, const Scenario& sc, Vec phi_sigma0 = Vec());
    void step();
    const PotentialState& state() const { return state_; }
    HamiltonianValue energy() const;
    double area() const { return state_.mesh->total_area(); }
    double last_port_term() const { return last_port_term_; }
    double divergence_residual() const;
    // Elevation of the Sigma vertex nearest to x (for wave probes).
    double surface_height_at(double x) const;

private:
    struct Rates {
        std::vector<Vec2> xdot;  // per Sigma vertex id
        Vec phidot;              // vertex-length
    };
    Rates rates(const PotentialState& s, const HodgeSystem& baseH, double t_eval) const;
    PotentialState advanced(const PotentialState& base, const HodgeSystem& baseH,
                            const PotentialState& at, double dt, double t_eval) const;

    Scenario sc_;
    PotentialState state_;
    double last_port_term_ = 0.0;
};

class RotationalStepper {
public:
    RotationalStepper(MeshPtr mesh, const Scenario& sc, Cochain v0);
    void step();
    const RotationalState& state() const { return state_; }
    HamiltonianValue energy() const;
    double area() const { return state_.mesh->total_area(); }
    double divergence_residual() const;
    double surface_height_at(double x) const;

private:
    Scenario sc_;
    RotationalState state_;
};

// Gamma inflow loads at time t (vertex-length load vector).
Vec inflow_loads(const HodgeSystem& H, const InflowSpec& inflow, double t);
// Time derivative of the inflow loads (analytic).
Vec inflow_loads_dt(const HodgeSystem& H, const InflowSpec& inflow, double t);

TrajectoryRecord run_scenario(const Scenario& sc);

// Initial conditions.
MeshPtr standing_wave_mesh(MeshPtr mesh, double amplitude, int mode);
Cochain taylor_green_velocity(const HodgeSystem& H, double strength);

} // namespace ph
