#pragma once

#include <functional>
#include <map>

#include "ph/elliptic.hpp"

namespace ph {

struct PhysParams {
    double rho = 1.0;
    double tau = 0.0;
    double g0 = 0.0;
    double p_bar = 0.0;  // atmospheric pressure, only p - p_bar is ever used
    void validate() const {
        if (!(rho > 0.0) || tau < 0.0 || g0 < 0.0) throw DataError("invalid physical parameters");
    }
};

// One vertex of the discrete free surface, in boundary-loop order.
struct SurfaceVertex {
    int v = -1;
    bool corner = false;     // Sigma meets Gamma here
    int prev = -1, next = -1;  // boundary neighbors (may lie on Gamma at corners)
    Vec2 normal;             // unit outward, chord-based
    Vec2 motion_dir;         // normal, or wall tangent at corners
    double kappa = 0.0;      // turning-angle curvature, outward-bulging positive
    double m_energy = 0.0;   // half-sum of adjacent Sigma edge lengths
    double mu_kin = 0.0;     // exact area-derivative coefficient along motion_dir
};

struct SurfaceState {
    std::vector<SurfaceVertex> verts;  // all vertices incident to a Sigma edge
    std::map<int, int> index_of;       // vertex id -> index into verts
    double length = 0.0;               // total Sigma length
};

// Build the Sigma surface structure; checks unit normals and (optionally)
// that the Sigma polyline is simple.
SurfaceState build_surface(const SimplicialComplex& m, bool check_simple = true);

// Per-Sigma-vertex curvature in the order of S.verts.
Vec curvature(const SurfaceState& S);

struct HamiltonianValue {
    double total = 0.0, kinetic = 0.0, gravity = 0.0, surface = 0.0;
};

HamiltonianValue hamiltonian_v(const HodgeSystem& H, const Cochain& v, const SurfaceState& S,
                               const PhysParams& P);
// phi_boundary: vertex-length vector, boundary entries are tr(phi).
HamiltonianValue hamiltonian_eta(const HodgeSystem& H, const Cochain& eta, const Vec& phi_boundary,
                                 const SurfaceState& S, const PhysParams& P);
HamiltonianValue hamiltonian_omega(const HodgeSystem& H, const Cochain& omega, const Vec& phi_boundary,
                                   const SurfaceState& S, const PhysParams& P);

enum class Formulation { VSigma, EtaPhi, OmegaPhi };

// Functional-derivative tuple in the storage conventions of this code:
// 1-form efforts are held through their Hodge star (w for dF/dv, s for
// dF/deta), dF/dphi as boundary vertex loads, dF/dSigma as vertex values
// supported on Sigma-interior vertices.
struct FunctionalDerivs {
    Formulation form = Formulation::VSigma;
    Cochain w;       // VSigma
    Cochain s;       // EtaPhi
    Cochain c;       // OmegaPhi (0-cochain, zero at boundary vertices)
    Vec phi_loads;   // EtaPhi / OmegaPhi
    Vec sigma;       // all formulations; full vertex length, Sigma-interior support
};

FunctionalDerivs func_derivs_H_v(const HodgeSystem& H, const Cochain& v, const SurfaceState& S,
                                 const PhysParams& P);
FunctionalDerivs func_derivs_H_eta(const HodgeSystem& H, const Cochain& eta, const Vec& phi_boundary,
                                   const SurfaceState& S, const PhysParams& P);
FunctionalDerivs func_derivs_H_omega(const HodgeSystem& H, const Cochain& omega, const Vec& phi_boundary,
                                     const SurfaceState& S, const PhysParams& P);

// Area-weighted vertex value of the Whitney field of a 1-cochain.
Vec2 vertex_field_value(const HodgeSystem& H, const Cochain& c1, int vertex);

// Harmonic extension of a boundary displacement into the interior; throws
// GeometryError when triangles invert.
MeshPtr harmonic_deform(const HodgeSystem& H, const std::vector<Vec2>& boundary_displacement);

struct ShapeAudit {
    double fd_derivative = 0.0;
    double paired_derivative = 0.0;
    double residual = 0.0;
};

// Compare a finite-difference shape derivative of `functional` against the
// pairing of `sigma_density` (values at Sigma vertices) with the normal
// displacement `dsigma` (values at Sigma-interior vertices, zero at Gamma).
ShapeAudit shape_derivative_audit(const HodgeSystem& H, const SurfaceState& S,
                                  const std::function<double(MeshPtr)>& functional,
                                  const Vec& sigma_density, const Vec& dsigma, double h_fd,
                                  bool central = true);

} // namespace ph
