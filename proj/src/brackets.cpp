#include "ph/brackets.hpp"

#include <cmath>

#include <Eigen/QR>

namespace ph {

namespace {

QPScalar density_of_d(const HodgeSystem& H, const Cochain& one_form) {
    return p0_density(H, d(H, one_form));
}

void require_form(const FunctionalDerivs& F, Formulation form, const char* where) {
    if (F.form != form) throw DataError(std::string(where) + ": tuple formulation mismatch");
}

} // namespace

BracketKernel make_kernel_v(const HodgeSystem& H, const Cochain& v) {
    v.check_shape(H.mesh());
    if (v.degree != 1) throw DegreeError("state v must be a 1-cochain");
    BracketKernel K;
    K.form = Formulation::VSigma;
    K.H = &H;
    K.zeta = density_of_d(H, v);
    return K;
}

BracketKernel make_kernel_eta(const HodgeSystem& H, const Cochain& eta) {
    eta.check_shape(H.mesh());
    BracketKernel K;
    K.form = Formulation::EtaPhi;
    K.H = &H;
    K.zeta = density_of_d(H, eta);
    K.eta = eta;
    K.has_eta = true;
    return K;
}

BracketKernel make_kernel_omega(const HodgeSystem& H, const Cochain& omega) {
    omega.check_shape(H.mesh());
    if (omega.degree != 2) throw DegreeError("state omega must be a 2-cochain");
    BracketKernel K;
    K.form = Formulation::OmegaPhi;
    K.H = &H;
    K.zeta = p0_density(H, omega);
    K.eta = solve_Nbeta(H, omega).eta;
    K.has_eta = true;
    return K;
}

EffortData prepare_effort(const BracketKernel& K, const FunctionalDerivs& F) {
    const HodgeSystem& H = *K.H;
    const auto& m = H.mesh();
    EffortData out;
    out.sigma = F.sigma.size() ? extend_by_zero(m, F.sigma) : Vec::Zero(m.nv());
    out.q = Vec::Zero(m.nv());

    if (F.form == Formulation::VSigma) {
        out.u_tot = whitney_field(H, F.w);
        out.phi = Cochain::zero(0, m);
        out.phi_loads = weak_flux_loads(H, F.w);
        for (int i = 0; i < m.nv(); ++i)
            if (!m.vertex_on_boundary[i]) out.phi_loads[i] = 0.0;
        return out;
    }

    // Potential part from the phi-effort loads.
    if (F.phi_loads.size() != m.nv()) throw DataError("phi effort loads must be vertex-length");
    double total = F.phi_loads.sum();
    double scale = F.phi_loads.cwiseAbs().sum() + 1e-300;
    if (std::abs(total) > 1e-8 * scale && std::abs(total) > 1e-12)
        throw DataError("phi effort loads are incompatible (net flux " + std::to_string(total) + ")");
    out.phi_loads = F.phi_loads;
    out.phi = Cochain(0, H.solve_stiffness_zero_mean(F.phi_loads), m);
    QPField gphi = gradient_field(H, out.phi);

    if (F.form == Formulation::EtaPhi) {
        out.u_tot = added(whitney_field(H, F.s), gphi);
    } else {
        // u_tot = -R grad(c) + grad(phi), both exact per-element fields.
        QPField rc = rotated(gradient_field(H, F.c));
        out.u_tot = gphi;
        for (size_t t = 0; t < out.u_tot.v.size(); ++t)
            for (int q = 0; q < TriQuadrature::NQ; ++q) out.u_tot.v[t][q] = out.u_tot.v[t][q] - rc.v[t][q];
    }

    if (K.has_eta) {
        Cochain dphi = d(H, out.phi);
        for (int i : m.boundary_vertices)
            out.q[i] = dot(vertex_field_value(H, dphi, i), vertex_field_value(H, K.eta, i));
    }
    return out;
}

double bracket_from_data(const BracketKernel& K, const EffortData& F, const EffortData& G, bool port) {
    const HodgeSystem& H = *K.H;
    const auto& m = H.mesh();
    double val = integrate_scalar_cross(H, K.zeta, F.u_tot, G.u_tot);
    const std::vector<int>& verts = port ? m.boundary_vertices : m.sigma_interior_vertices;
    for (int i : verts)
        val += (F.sigma[i] + F.q[i]) * G.phi_loads[i] - (G.sigma[i] + G.q[i]) * F.phi_loads[i];
    return val;
}

double bracket_vS(const BracketKernel& K, const FunctionalDerivs& F, const FunctionalDerivs& G, bool port) {
    if (K.form != Formulation::VSigma) throw DataError("bracket_vS: kernel formulation mismatch");
    require_form(F, Formulation::VSigma, "bracket_vS");
    require_form(G, Formulation::VSigma, "bracket_vS");
    return bracket_from_data(K, prepare_effort(K, F), prepare_effort(K, G), port);
}

double bracket_eta(const BracketKernel& K, const FunctionalDerivs& F, const FunctionalDerivs& G, bool port) {
    if (K.form != Formulation::EtaPhi) throw DataError("bracket_eta: kernel formulation mismatch");
    require_form(F, Formulation::EtaPhi, "bracket_eta");
    require_form(G, Formulation::EtaPhi, "bracket_eta");
    return bracket_from_data(K, prepare_effort(K, F), prepare_effort(K, G), port);
}

double bracket_omega(const BracketKernel& K, const FunctionalDerivs& F, const FunctionalDerivs& G, bool port) {
    if (K.form != Formulation::OmegaPhi) throw DataError("bracket_omega: kernel formulation mismatch");
    require_form(F, Formulation::OmegaPhi, "bracket_omega");
    require_form(G, Formulation::OmegaPhi, "bracket_omega");
    return bracket_from_data(K, prepare_effort(K, F), prepare_effort(K, G), port);
}

FunctionalDerivs map_v_to_eta(const HodgeSystem& H, const BracketKernel& K_eta,
                              const FunctionalDerivs& Fv) {
    require_form(Fv, Formulation::VSigma, "map_v_to_eta");
    const auto& m = H.mesh();
    HodgeSplit split = hodge_decompose(H, Fv.w, 1e-7);
    FunctionalDerivs out;
    out.form = Formulation::EtaPhi;
    out.s = split.delta_beta;
    out.phi_loads = weak_flux_loads(H, Fv.w);
    for (int i = 0; i < m.nv(); ++i)
        if (!m.vertex_on_boundary[i]) out.phi_loads[i] = 0.0;
    out.sigma = Fv.sigma;
    if (K_eta.has_eta) {
        Cochain dphi = d(H, split.phi);
        for (int i : m.sigma_interior_vertices)
            out.sigma[i] -= dot(vertex_field_value(H, dphi, i), vertex_field_value(H, K_eta.eta, i));
    }
    return out;
}

namespace {

// Pack/unpack state perturbations per formulation (surface frozen).
struct JacobiWork {
    const HodgeSystem* H;
    Formulation form;
    const FunctionalDerivs *A, *B, *C;
};

double inner_bracket(const JacobiWork& w, const Cochain& state, const FunctionalDerivs& F,
                     const FunctionalDerivs& G) {
    switch (w.form) {
        case Formulation::VSigma: return bracket_vS(make_kernel_v(*w.H, state), F, G);
        case Formulation::EtaPhi: return bracket_eta(make_kernel_eta(*w.H, state), F, G);
        default: return bracket_omega(make_kernel_omega(*w.H, state), F, G);
    }
}

} // namespace

JacobiResult jacobi_fd(const HodgeSystem& H, Formulation form, const Cochain& state,
                       const FunctionalDerivs& F, const FunctionalDerivs& G,
                       const FunctionalDerivs& Kf, double h_fd) {
    if (!(h_fd > 0.0)) throw DataError("jacobi_fd: step must be positive");
    const auto& m = H.mesh();
    JacobiWork w{&H, form, &F, &G, &Kf};

    auto project_state = [&](const Cochain& s) -> Cochain {
        if (form == Formulation::VSigma) return project_interior_solenoidal(H, s);
        if (form == Formulation::EtaPhi) return project_coexact(H, s);
        return s;
    };

    // Central-difference gradient of S(state) = {A,B}(state).
    auto gradient = [&](const FunctionalDerivs& A, const FunctionalDerivs& B) {
        int n = static_cast<int>(state.values.size());
        Vec g(n);
        for (int i = 0; i < n; ++i) {
            Cochain sp = state, sm = state;
            sp.values[i] += h_fd;
            sm.values[i] -= h_fd;
            double vp = inner_bracket(w, project_state(sp), A, B);
            double vm = inner_bracket(w, project_state(sm), A, B);
            g[i] = (vp - vm) / (2.0 * h_fd);
        }
        return g;
    };

    double recon_residual = 0.0;
    // Turn a state gradient into an effort tuple of the formulation.
    auto tuple_of_gradient = [&](const Vec& g) {
        FunctionalDerivs T;
        T.form = form;
        T.sigma = Vec::Zero(m.nv());
        if (form == Formulation::VSigma) {
            T.w = project_interior_solenoidal(H, Cochain(1, H.solve_M1(g), m));
        } else if (form == Formulation::EtaPhi) {
            T.s = project_coexact(H, Cochain(1, H.solve_M1(g), m));
            T.phi_loads = Vec::Zero(m.nv());
        } else {
            // Least-squares vertex reconstruction of the triangle means,
            // interior vertices only (the V* trace condition).
            std::vector<int> interior;
            for (int i = 0; i < m.nv(); ++i)
                if (!m.vertex_on_boundary[i]) interior.push_back(i);
            const int ni = static_cast<int>(interior.size());
            Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m.nt(), ni);
            std::vector<int> col_of(m.nv(), -1);
            for (int k = 0; k < ni; ++k) col_of[interior[k]] = k;
            for (int t = 0; t < m.nt(); ++t)
                for (int k = 0; k < 3; ++k) {
                    int c = col_of[m.triangles[t][k]];
                    if (c >= 0) P(t, c) += 1.0 / 3.0;
                }
            Vec sol = ni > 0 ? Vec(P.colPivHouseholderQr().solve(g)) : Vec();
            T.c = Cochain::zero(0, m);
            for (int k = 0; k < ni; ++k) T.c.values[interior[k]] = sol[k];
            recon_residual = ni > 0 ? (P * sol - g).norm() / (g.norm() + 1e-300) : 0.0;
            T.phi_loads = Vec::Zero(m.nv());
        }
        return T;
    };

    auto outer = [&](const FunctionalDerivs& A, const FunctionalDerivs& B, const FunctionalDerivs& C) {
        // {A, {B,C}} with the inner bracket's derivative tuple from FD.
        FunctionalDerivs T = tuple_of_gradient(gradient(B, C));
        return inner_bracket(w, state, A, T);
    };

    JacobiResult r;
    double t1 = outer(F, G, Kf);
    double t2 = outer(G, Kf, F);
    double t3 = outer(Kf, F, G);
    r.cyclic_sum = t1 + t2 + t3;
    r.scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), 1e-300});
    r.normalized = std::abs(r.cyclic_sum) / r.scale;
    r.reconstruction_residual = recon_residual;
    return r;
}

} // namespace ph
