#include "ph/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace ph {

void write_trajectory_csv(const TrajectoryRecord& rec, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write '" + tmp + "'");
        out.precision(17);
        out << std::scientific;
        out << "t,H,H_kin,H_grav,H_surf,port_flux,area,div_residual\n";
        for (size_t i = 0; i < rec.t.size(); ++i)
            out << rec.t[i] << "," << rec.H[i] << "," << rec.H_kin[i] << "," << rec.H_grav[i] << ","
                << rec.H_surf[i] << "," << rec.port_flux[i] << "," << rec.area[i] << ","
                << rec.div_residual[i] << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot rename '" + tmp + "'");
}

Vec inflow_loads(const HodgeSystem& H, const InflowSpec& inflow, double t) {
    const auto& m = H.mesh();
    Vec loads = Vec::Zero(m.nv());
    if (inflow.amplitude == 0.0 || inflow.t_width <= 0.0) return loads;
    double u = (t - inflow.t_center) / inflow.t_width;
    double g = inflow.amplitude * std::exp(-u * u);
    for (const auto& be : m.boundary) {
        if (be.label != BoundaryLabel::Gamma) continue;
        Vec2 dir = m.positions[be.head] - m.positions[be.tail];
        double len = norm(dir);
        Vec2 n{dir.y / len, -dir.x / len};
        if (inflow.on == "bottom" && n.y > -0.9) continue;
        loads[be.tail] += 0.5 * len * g;
        loads[be.head] += 0.5 * len * g;
    }
    return loads;
}

Vec inflow_loads_dt(const HodgeSystem& H, const InflowSpec& inflow, double t) {
    Vec loads = inflow_loads(H, inflow, t);
    if (inflow.t_width <= 0.0) return loads;
    double u = (t - inflow.t_center) / inflow.t_width;
    return loads * (-2.0 * u / inflow.t_width);
}

Cochain pressure_solve(const HodgeSystem& H, const Cochain& v, const SurfaceState& S,
                       const PhysParams& P, const Vec& gdot_loads) {
    const auto& m = H.mesh();
    QPScalar zeta = p0_density(H, d(H, v));
    Cochain adv = project_1form(H, scaled(zeta, rotated(whitney_field(H, v))));
    Vec bern(m.nv());
    for (int i = 0; i < m.nv(); ++i) {
        Vec2 u = vertex_field_value(H, v, i);
        bern[i] = 0.5 * dot(u, u) + P.g0 * m.positions[i].y;
    }
    Vec rhs = -(m.d0.transpose() * (H.M1() * adv.values)) - H.stiffness() * bern - gdot_loads;

    if (!S.verts.empty()) {
        std::vector<uint8_t> mask(m.nv(), 0);
        Vec pvals = Vec::Zero(m.nv());
        for (const auto& sv : S.verts) {
            mask[sv.v] = 1;
            pvals[sv.v] = P.tau * sv.kappa / P.rho;
        }
        return Cochain(0, H.solve_stiffness_dirichlet(mask, pvals, rhs), m);
    }
    double total = rhs.sum();
    double scale = rhs.cwiseAbs().sum() + 1e-300;
    if (std::abs(total) > 1e-8 * scale && std::abs(total) > 1e-10)
        throw DataError("pressure_solve: incompatible Neumann data");
    return Cochain(0, H.solve_stiffness_zero_mean(rhs), m);
}

namespace {

void check_displacement(const SimplicialComplex& m, const std::vector<Vec2>& disp, double dt) {
    for (const auto& be : m.boundary) {
        double len = norm(m.positions[be.head] - m.positions[be.tail]);
        for (int v : {be.tail, be.head}) {
            if (norm(disp[v]) > 0.4 * len)
                throw GeometryError("surface displacement exceeds 0.4 of the local edge length; "
                                    "step rejected, suggest dt <= " + std::to_string(0.5 * dt));
        }
    }
}

} // namespace

std::vector<Vec2> advance_surface(const SimplicialComplex& m, const SurfaceState& S,
                                  const Vec& speed, double dt) {
    if (!(dt > 0.0)) throw DataError("advance_surface: dt must be positive");
    std::vector<Vec2> disp(m.nv(), Vec2{0, 0});
    for (const auto& sv : S.verts) {
        double s = speed[sv.v];
        if (!std::isfinite(s)) throw DataError("advance_surface: non-finite speed");
        disp[sv.v] = sv.motion_dir * (dt * s);
    }
    check_displacement(m, disp, dt);
    return disp;
}

MeshPtr deform_mesh(const HodgeSystem& H, const std::vector<Vec2>& boundary_displacement) {
    try {
        return harmonic_deform(H, boundary_displacement);
    } catch (const GeometryError& e) {
        throw GeometryError(std::string(e.what()) + "; reduce the time step");
    }
}

// --- potential-flow stepper ---------------------------------------------------

namespace {

struct PotentialEval {
    std::shared_ptr<HodgeSystem> H;
    SurfaceState S;
    Vec phi_full;
    Vec g_loads;
};

PotentialEval evaluate_potential(const MeshPtr& mesh, const Vec& phi_sigma, const Scenario& sc,
                                 double t, bool check_simple) {
    PotentialEval ev;
    ev.H = std::make_shared<HodgeSystem>(mesh);
    ev.S = build_surface(*mesh, check_simple);
    if (ev.S.verts.empty()) throw DataError("potential model needs a nonempty free surface");
    std::vector<uint8_t> mask(mesh->nv(), 0);
    for (int i : mesh->sigma_vertices) mask[i] = 1;
    ev.g_loads = inflow_loads(*ev.H, sc.inflow, t);
    ev.phi_full = ev.H->solve_stiffness_dirichlet(mask, phi_sigma, ev.g_loads);
    return ev;
}

// Exact derivative of H = 1/2 phi^T K(x) phi + g0 int_Omega y + tau/rho |Sigma|
// with respect to every vertex position, at fixed nodal phi.
std::vector<Vec2> energy_shape_gradient(const HodgeSystem& H, const Vec& phi, const PhysParams& P) {
    const auto& m = H.mesh();
    std::vector<Vec2> g(m.nv(), Vec2{0, 0});
    for (int t = 0; t < m.nt(); ++t) {
        const TriGeom& ge = H.geom()[t];
        const auto& tr = m.triangles[t];
        Vec2 gphi{0, 0};
        for (int k = 0; k < 3; ++k) gphi += ge.grad[k] * phi[tr[k]];
        double g2 = dot(gphi, gphi);
        double ybar = (ge.p[0].y + ge.p[1].y + ge.p[2].y) / 3.0;
        for (int v = 0; v < 3; ++v) {
            Vec2 chord = ge.p[(v + 1) % 3] - ge.p[(v + 2) % 3];
            Vec2 dA{0.5 * chord.y, -0.5 * chord.x};
            // d(1/2 A |grad phi|^2)/dp_v
            double dphi = phi[tr[(v + 1) % 3]] - phi[tr[(v + 2) % 3]];
            Vec2 kin = dA * (-0.5 * g2) - rot90(gphi) * (0.5 * dphi);
            // d(g0 A ybar)/dp_v
            Vec2 grav = (dA * ybar + Vec2{0.0, ge.area / 3.0}) * P.g0;
            g[tr[v]] += kin + grav;
        }
    }
    if (P.tau != 0.0) {
        for (const auto& be : m.boundary) {
            if (be.label != BoundaryLabel::Sigma) continue;
            Vec2 d = m.positions[be.head] - m.positions[be.tail];
            Vec2 t = d * (1.0 / norm(d));
            g[be.head] += t * (P.tau / P.rho);
            g[be.tail] += t * (-P.tau / P.rho);
        }
    }
    return g;
}

// Total surface-vertex gradient: the explicit part plus the chain through
// the harmonic interior extension of the base mesh.
std::vector<Vec2> chained_gradient(const HodgeSystem& baseH, const std::vector<Vec2>& grad) {
    const auto& m = baseH.mesh();
    std::vector<uint8_t> mask(m.nv(), 0);
    for (int i = 0; i < m.nv(); ++i) mask[i] = m.vertex_on_boundary[i] ? 1 : 0;
    Vec rx = Vec::Zero(m.nv()), ry = Vec::Zero(m.nv());
    for (int i = 0; i < m.nv(); ++i) {
        if (!m.vertex_on_boundary[i]) {
            rx[i] = grad[i].x;
            ry[i] = grad[i].y;
        }
    }
    Vec px = baseH.solve_stiffness_dirichlet(mask, Vec::Zero(m.nv()), rx);
    Vec py = baseH.solve_stiffness_dirichlet(mask, Vec::Zero(m.nv()), ry);
    Vec cx = baseH.stiffness() * px, cy = baseH.stiffness() * py;
    std::vector<Vec2> out(grad);
    for (int i = 0; i < m.nv(); ++i) {
        if (m.vertex_on_boundary[i]) {
            // interior solve leaves -K_bi K_ii^{-1} r on the boundary rows
            out[i] += Vec2{-cx[i], -cy[i]};
        } else {
            out[i] = Vec2{0, 0};
        }
    }
    return out;
}

} // namespace

PotentialStepper::PotentialStepper(MeshPtr mesh, const Scenario& sc, Vec phi_sigma0) : sc_(sc) {
    sc_.validate();
    state_.mesh = std::move(mesh);
    if (phi_sigma0.size() == 0) phi_sigma0 = Vec::Zero(state_.mesh->nv());
    if (phi_sigma0.size() != state_.mesh->nv())
        throw DataError("initial potential must be vertex-length");
    state_.phi_sigma = std::move(phi_sigma0);
    state_.time = 0.0;
}

PotentialStepper::Rates PotentialStepper::rates(const PotentialState& s, const HodgeSystem& baseH,
                                                double t_eval) const {
    PotentialEval ev = evaluate_potential(s.mesh, s.phi_sigma, sc_, t_eval, false);
    const auto& m = *s.mesh;
    const HodgeSystem& H = *ev.H;
    Vec flux = H.stiffness() * ev.phi_full - ev.g_loads;

    // Exact discrete energy gradient with respect to the surface vertex
    // positions, chained through the interior mesh extension. Pairing it
    // against the same measure as the kinematic update makes the
    // semi-discrete system conserve the discrete Hamiltonian exactly.
    std::vector<Vec2> grad = chained_gradient(baseH, energy_shape_gradient(H, ev.phi_full, sc_.params));

    Rates r;
    r.xdot.assign(m.nv(), Vec2{0, 0});
    r.phidot = Vec::Zero(m.nv());
    for (const auto& sv : ev.S.verts) {
        if (std::abs(sv.mu_kin) < 1e-14)
            throw GeometryError("degenerate surface measure at vertex " + std::to_string(sv.v));
        double speed = flux[sv.v] / sv.mu_kin;
        r.xdot[sv.v] = sv.motion_dir * speed;
        r.phidot[sv.v] = -dot(grad[sv.v], sv.motion_dir) / sv.mu_kin;
    }
    return r;
}

PotentialState PotentialStepper::advanced(const PotentialState& base, const HodgeSystem& baseH,
                                          const PotentialState& at, double dt, double t_eval) const {
    Rates r = rates(at, baseH, t_eval);
    std::vector<Vec2> disp(base.mesh->nv(), Vec2{0, 0});
    for (int i : base.mesh->sigma_vertices) disp[i] = r.xdot[i] * dt;
    check_displacement(*base.mesh, disp, dt);
    PotentialState out;
    out.mesh = deform_mesh(baseH, disp);
    out.phi_sigma = base.phi_sigma + dt * r.phidot;
    out.time = base.time + dt;
    return out;
}

void PotentialStepper::step() {
    const double dt = sc_.dt;
    const double t_mid = state_.time + 0.5 * dt;
    const bool open_port = sc_.inflow.amplitude != 0.0;
    HodgeSystem baseH(state_.mesh);
    Vec phi_start;
    if (open_port)
        phi_start = evaluate_potential(state_.mesh, state_.phi_sigma, sc_, state_.time, false).phi_full;
    PotentialState next;
    if (sc_.integrator == Integrator::RK4) {
        PotentialState s1 = advanced(state_, baseH, state_, 0.5 * dt, state_.time);
        PotentialState s2 = advanced(state_, baseH, s1, 0.5 * dt, t_mid);
        PotentialState s3 = advanced(state_, baseH, s2, dt, t_mid);
        Rates k1 = rates(state_, baseH, state_.time);
        Rates k2 = rates(s1, baseH, t_mid);
        Rates k3 = rates(s2, baseH, t_mid);
        Rates k4 = rates(s3, baseH, state_.time + dt);
        std::vector<Vec2> disp(state_.mesh->nv(), Vec2{0, 0});
        Vec dphi = Vec::Zero(state_.mesh->nv());
        for (int i : state_.mesh->sigma_vertices) {
            Vec2 x = (k1.xdot[i] + (k2.xdot[i] + k3.xdot[i]) * 2.0 + k4.xdot[i]) * (dt / 6.0);
            disp[i] = x;
        }
        dphi = (k1.phidot + 2.0 * k2.phidot + 2.0 * k3.phidot + k4.phidot) * (dt / 6.0);
        check_displacement(*state_.mesh, disp, dt);
        next.mesh = deform_mesh(baseH, disp);
        next.phi_sigma = state_.phi_sigma + dphi;
        next.time = state_.time + dt;
    } else {
        // Implicit midpoint by fixed-point iteration on the midpoint state.
        PotentialState Y = advanced(state_, baseH, state_, 0.5 * dt, t_mid);
        int it = 0;
        for (; it < sc_.fp_maxit; ++it) {
            PotentialState Ynew = advanced(state_, baseH, Y, 0.5 * dt, t_mid);
            double delta = (Ynew.phi_sigma - Y.phi_sigma).cwiseAbs().maxCoeff();
            for (int i : state_.mesh->sigma_vertices) {
                Vec2 dp = Ynew.mesh->positions[i] - Y.mesh->positions[i];
                delta = std::max(delta, std::max(std::abs(dp.x), std::abs(dp.y)));
            }
            Y = Ynew;
            double scale = 1.0 + state_.phi_sigma.cwiseAbs().maxCoeff();
            if (delta <= sc_.fp_tol * scale) break;
        }
        if (it >= sc_.fp_maxit)
            throw SolverError("implicit midpoint fixed point did not converge in " +
                              std::to_string(sc_.fp_maxit) + " iterations");
        next = advanced(state_, baseH, Y, dt, t_mid);
    }

    // Surface validity check once per step; with an open port also record
    // the power diagnostic tr(h) = -phi_t at Gamma against the midpoint loads.
    PotentialEval end = evaluate_potential(next.mesh, next.phi_sigma, sc_, next.time, true);
    last_port_term_ = 0.0;
    if (open_port) {
        Vec gmid = inflow_loads(baseH, sc_.inflow, t_mid);
        double port = 0.0;
        for (int i : state_.mesh->boundary_vertices) {
            if (state_.mesh->vertex_on_sigma[i]) continue;
            port += -((end.phi_full[i] - phi_start[i]) / dt) * gmid[i];
        }
        last_port_term_ = port;
    }
    state_ = next;
}

HamiltonianValue PotentialStepper::energy() const {
    PotentialEval ev = evaluate_potential(state_.mesh, state_.phi_sigma, sc_, state_.time, false);
    const HodgeSystem& H = *ev.H;
    HamiltonianValue hv;
    hv.kinetic = 0.5 * ev.phi_full.dot(H.stiffness() * ev.phi_full);
    double gacc = 0.0;
    for (int t = 0; t < state_.mesh->nt(); ++t) {
        const TriGeom& g = H.geom()[t];
        gacc += g.area * (g.p[0].y + g.p[1].y + g.p[2].y) / 3.0;
    }
    hv.gravity = sc_.params.g0 * gacc;
    hv.surface = sc_.params.tau / sc_.params.rho * ev.S.length;
    hv.total = hv.kinetic + hv.gravity + hv.surface;
    return hv;
}

double PotentialStepper::divergence_residual() const {
    PotentialEval ev = evaluate_potential(state_.mesh, state_.phi_sigma, sc_, state_.time, false);
    Vec r = ev.H->stiffness() * ev.phi_full - ev.g_loads;
    double acc = 0.0;
    for (int i = 0; i < state_.mesh->nv(); ++i)
        if (!state_.mesh->vertex_on_boundary[i]) acc += r[i] * r[i];
    return std::sqrt(acc) / (ev.phi_full.norm() + 1.0);
}

double PotentialStepper::surface_height_at(double x) const {
    double best = 1e300, height = 0.0;
    for (int i : state_.mesh->sigma_vertices) {
        double dx = std::abs(state_.mesh->positions[i].x - x);
        if (dx < best) {
            best = dx;
            height = state_.mesh->positions[i].y;
        }
    }
    return height;
}

// --- rotational stepper -------------------------------------------------------

RotationalStepper::RotationalStepper(MeshPtr mesh, const Scenario& sc, Cochain v0) : sc_(sc) {
    sc_.validate();
    state_.mesh = std::move(mesh);
    state_.v = std::move(v0);
    state_.time = 0.0;
}

namespace {

struct RotRates {
    Vec vdot;
    std::vector<Vec2> xdot;
};

RotRates rot_rates(const MeshPtr& mesh, const Cochain& v, const Scenario& sc, double t) {
    HodgeSystem H(mesh);
    const auto& m = *mesh;
    SurfaceState S = build_surface(m, false);
    Vec gdot = inflow_loads_dt(H, sc.inflow, t);
    Cochain p = pressure_solve(H, v, S, sc.params, gdot);

    QPScalar zeta = p0_density(H, d(H, v));
    Cochain adv = project_1form(H, scaled(zeta, rotated(whitney_field(H, v))));
    Vec bern(m.nv());
    for (int i = 0; i < m.nv(); ++i) {
        Vec2 u = vertex_field_value(H, v, i);
        bern[i] = 0.5 * dot(u, u) + sc.params.g0 * m.positions[i].y;
    }
    Vec vdot = -adv.values - m.d0 * (bern + p.values);

    // Solenoidal projection: interior rows zero, Gamma flux rate matched.
    Vec r = m.d0.transpose() * (H.M1() * vdot) - gdot;
    if (!S.verts.empty()) {
        std::vector<uint8_t> mask(m.nv(), 0);
        for (int i : m.sigma_vertices) mask[i] = 1;
        Vec q = H.solve_stiffness_dirichlet(mask, Vec::Zero(m.nv()), r);
        vdot -= m.d0 * q;
    } else {
        Vec q = H.solve_stiffness_zero_mean(r);
        vdot -= m.d0 * q;
    }

    RotRates out;
    out.vdot = vdot;
    out.xdot.assign(m.nv(), Vec2{0, 0});
    if (!S.verts.empty()) {
        Vec flux = m.d0.transpose() * (H.M1() * v.values);
        for (const auto& sv : S.verts) out.xdot[sv.v] = sv.motion_dir * (flux[sv.v] / sv.mu_kin);
    }
    return out;
}

} // namespace

void RotationalStepper::step() {
    const double dt = sc_.dt;
    const double t_mid = state_.time + 0.5 * dt;
    const auto& m0 = *state_.mesh;
    HodgeSystem Hb(state_.mesh);

    auto apply = [&](const RotRates& r, double h) {
        std::vector<Vec2> disp(m0.nv(), Vec2{0, 0});
        for (int i : m0.sigma_vertices) disp[i] = r.xdot[i] * h;
        check_displacement(m0, disp, h > 0 ? h : dt);
        RotationalState out;
        out.mesh = deform_mesh(Hb, disp);
        out.v = Cochain(1, state_.v.values + h * r.vdot, *out.mesh);
        out.time = state_.time + h;
        return out;
    };

    if (sc_.integrator == Integrator::RK4) {
        RotRates k1 = rot_rates(state_.mesh, state_.v, sc_, state_.time);
        RotationalState s1 = apply(k1, 0.5 * dt);
        RotRates k2 = rot_rates(s1.mesh, s1.v, sc_, t_mid);
        RotationalState s2 = apply(k2, 0.5 * dt);
        RotRates k3 = rot_rates(s2.mesh, s2.v, sc_, t_mid);
        RotationalState s3 = apply(k3, dt);
        RotRates k4 = rot_rates(s3.mesh, s3.v, sc_, state_.time + dt);
        RotRates avg;
        avg.vdot = (k1.vdot + 2.0 * k2.vdot + 2.0 * k3.vdot + k4.vdot) / 6.0;
        avg.xdot.assign(m0.nv(), Vec2{0, 0});
        for (int i : m0.sigma_vertices)
            avg.xdot[i] = (k1.xdot[i] + (k2.xdot[i] + k3.xdot[i]) * 2.0 + k4.xdot[i]) * (1.0 / 6.0);
        state_ = apply(avg, dt);
    } else {
        RotRates k = rot_rates(state_.mesh, state_.v, sc_, t_mid);
        RotationalState Y = apply(k, 0.5 * dt);
        int it = 0;
        for (; it < sc_.fp_maxit; ++it) {
            RotRates kn = rot_rates(Y.mesh, Y.v, sc_, t_mid);
            RotationalState Yn = apply(kn, 0.5 * dt);
            double delta = (Yn.v.values - Y.v.values).cwiseAbs().maxCoeff();
            for (int i : m0.sigma_vertices) {
                Vec2 dp = Yn.mesh->positions[i] - Y.mesh->positions[i];
                delta = std::max(delta, std::max(std::abs(dp.x), std::abs(dp.y)));
            }
            Y = Yn;
            double scale = 1.0 + state_.v.values.cwiseAbs().maxCoeff();
            if (delta <= sc_.fp_tol * scale) break;
        }
        if (it >= sc_.fp_maxit)
            throw SolverError("implicit midpoint fixed point did not converge (rotational)");
        RotRates k_final = rot_rates(Y.mesh, Y.v, sc_, t_mid);
        state_ = apply(k_final, dt);
    }
}

HamiltonianValue RotationalStepper::energy() const {
    HodgeSystem H(state_.mesh);
    SurfaceState S = build_surface(*state_.mesh, false);
    return hamiltonian_v(H, state_.v, S, sc_.params);
}

double RotationalStepper::divergence_residual() const {
    HodgeSystem H(state_.mesh);
    return solenoidal_residual(H, state_.v);
}

double RotationalStepper::surface_height_at(double x) const {
    double best = 1e300, height = 0.0;
    for (int i : state_.mesh->sigma_vertices) {
        double dx = std::abs(state_.mesh->positions[i].x - x);
        if (dx < best) {
            best = dx;
            height = state_.mesh->positions[i].y;
        }
    }
    return height;
}

// --- scenario driver ----------------------------------------------------------

MeshPtr standing_wave_mesh(MeshPtr mesh, double amplitude, int mode) {
    if (amplitude == 0.0) return mesh;
    double xmin = 1e300, xmax = -1e300;
    for (int i : mesh->sigma_vertices) {
        xmin = std::min(xmin, mesh->positions[i].x);
        xmax = std::max(xmax, mesh->positions[i].x);
    }
    if (!(xmax > xmin)) throw DataError("standing wave needs a horizontal free surface extent");
    double k = mode * M_PI / (xmax - xmin);
    HodgeSystem H(mesh);
    std::vector<Vec2> disp(mesh->nv(), Vec2{0, 0});
    for (int i : mesh->sigma_vertices)
        disp[i] = Vec2{0.0, amplitude * std::cos(k * (mesh->positions[i].x - xmin))};
    return harmonic_deform(H, disp);
}

Cochain taylor_green_velocity(const HodgeSystem& H, double strength) {
    const auto& m = H.mesh();
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& p : m.positions) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    double kx = M_PI / (xmax - xmin), ky = M_PI / (ymax - ymin);
    QPField f;
    f.v.resize(m.nt());
    for (int t = 0; t < m.nt(); ++t) {
        for (int q = 0; q < TriQuadrature::NQ; ++q) {
            const Vec2& p = H.geom()[t].qp[q];
            double sx = std::sin(kx * (p.x - xmin)), cx = std::cos(kx * (p.x - xmin));
            double sy = std::sin(ky * (p.y - ymin)), cy = std::cos(ky * (p.y - ymin));
            f.v[t][q] = Vec2{strength * sx * cy, -strength * (kx / ky) * cx * sy};
        }
    }
    return project_coexact(H, project_1form(H, f));
}

TrajectoryRecord run_scenario(const Scenario& sc) {
    sc.validate();
    MeshPtr mesh = load_mesh(sc.mesh_path);
    TrajectoryRecord rec;
    int nsteps = static_cast<int>(std::llround(sc.t_end / sc.dt));

    auto record_sigma = [&](const MeshPtr& m, int step) {
        if (!sc.sigma_snapshots) return;
        std::vector<Vec2> pts;
        for (const auto& be : m->boundary)
            if (be.label == BoundaryLabel::Sigma) pts.push_back(m->positions[be.tail]);
        rec.sigma_snapshots.emplace_back(step, std::move(pts));
    };

    if (sc.model == "potential") {
        mesh = standing_wave_mesh(mesh, sc.init == "standing_wave" ? sc.amplitude : 0.0, sc.mode);
        Vec phi0 = Vec::Zero(mesh->nv());
        if (sc.init == "phi_impulse") {
            double xmin = 1e300, xmax = -1e300;
            for (int i : mesh->sigma_vertices) {
                xmin = std::min(xmin, mesh->positions[i].x);
                xmax = std::max(xmax, mesh->positions[i].x);
            }
            if (!(xmax > xmin)) throw DataError("phi_impulse needs a horizontal free surface extent");
            double k = sc.mode * M_PI / (xmax - xmin);
            for (int i : mesh->sigma_vertices)
                phi0[i] = sc.amplitude * std::cos(k * (mesh->positions[i].x - xmin));
        }
        PotentialStepper stepper(mesh, sc, phi0);
        auto record = [&](int step) {
            HamiltonianValue hv = stepper.energy();
            rec.t.push_back(stepper.state().time);
            rec.H.push_back(hv.total);
            rec.H_kin.push_back(hv.kinetic);
            rec.H_grav.push_back(hv.gravity);
            rec.H_surf.push_back(hv.surface);
            rec.port_flux.push_back(stepper.last_port_term());
            rec.area.push_back(stepper.area());
            rec.div_residual.push_back(stepper.divergence_residual());
            record_sigma(stepper.state().mesh, step);
        };
        record(0);
        for (int s = 1; s <= nsteps; ++s) {
            stepper.step();
            if (s % sc.output_every == 0 || s == nsteps) record(s);
        }
    } else if (sc.model == "rotational") {
        HodgeSystem H0(mesh);
        Cochain v0 = Cochain::zero(1, *mesh);
        if (sc.init == "taylor_green") v0 = taylor_green_velocity(H0, sc.amplitude);
        RotationalStepper stepper(mesh, sc, v0);
        auto record = [&](int step) {
            HamiltonianValue hv = stepper.energy();
            rec.t.push_back(stepper.state().time);
            rec.H.push_back(hv.total);
            rec.H_kin.push_back(hv.kinetic);
            rec.H_grav.push_back(hv.gravity);
            rec.H_surf.push_back(hv.surface);
            rec.port_flux.push_back(0.0);
            rec.area.push_back(stepper.area());
            rec.div_residual.push_back(stepper.divergence_residual());
            record_sigma(stepper.state().mesh, step);
        };
        record(0);
        for (int s = 1; s <= nsteps; ++s) {
            stepper.step();
            if (s % sc.output_every == 0 || s == nsteps) record(s);
        }
    } else {
        throw DataError("unknown model '" + sc.model + "'");
    }
    return rec;
}

} // namespace ph
