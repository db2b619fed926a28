#include "ph/dirac.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

namespace ph {

namespace {

QPScalar ones_scalar(const HodgeSystem& H) {
    QPScalar s;
    s.v.assign(H.mesh().nt(), {});
    for (auto& row : s.v) row.fill(1.0);
    return s;
}

// Adjoint of the boundary-vertex sampling q_i = <grad(phi)(x_i), eta(x_i)>,
// both factors area-averaged over the vertex star: r_j = sum_i loads_i dq_i/dphi_j.
Vec q_sampling_adjoint(const HodgeSystem& H, const Cochain& eta, const Vec& boundary_loads) {
    const auto& m = H.mesh();
    Vec r = Vec::Zero(m.nv());
    for (int i : m.boundary_vertices) {
        double li = boundary_loads[i];
        if (li == 0.0) continue;
        Vec2 ueta = vertex_field_value(H, eta, i);
        double wsum = 0.0;
        for (int t : m.vertex_tris[i]) wsum += H.geom()[t].area;
        for (int t : m.vertex_tris[i]) {
            const TriGeom& g = H.geom()[t];
            double wt = g.area / wsum;
            for (int k = 0; k < 3; ++k) r[m.triangles[t][k]] += li * wt * dot(g.grad[k], ueta);
        }
    }
    return r;
}

struct PhiFlow {
    Vec values;
    double residual = 0.0;
};

// Boundary potential flow: tr of the zero-mean solve of (z1 - r2), plus the
// surface/correction effort values.
PhiFlow phi_flow(const HodgeSystem& H, const BracketKernel& K, const EffortData& G, const QPField& Z) {
    const auto& m = H.mesh();
    Vec rhs = vertex_grad_loads(H, ones_scalar(H), Z);
    if (K.has_eta) rhs -= q_sampling_adjoint(H, K.eta, G.phi_loads);
    Vec p = H.solve_stiffness_zero_mean(rhs);
    PhiFlow out;
    out.residual = (H.stiffness() * p - rhs).norm() / (rhs.norm() + 1e-300);
    out.values = Vec::Zero(m.nv());
    for (int i : m.boundary_vertices) out.values[i] = p[i] + G.sigma[i] + G.q[i];
    return out;
}

// Gamma vertices are exactly the boundary vertices that are not
// Sigma-interior (corner convention).
Vec gamma_port_loads(const SimplicialComplex& m, const Vec& phi_loads) {
    Vec f = Vec::Zero(m.nv());
    for (int i : m.boundary_vertices)
        if (!m.vertex_sigma_interior[i]) f[i] = -phi_loads[i];
    return f;
}

Vec sigma_flow_loads(const SimplicialComplex& m, const Vec& phi_loads) {
    Vec f = Vec::Zero(m.nv());
    for (int i : m.sigma_interior_vertices) f[i] = -phi_loads[i];
    return f;
}

double paired(const HodgeSystem& H, const EffortTuple& e, const FlowTuple& f) {
    const auto& m = H.mesh();
    double val = 0.0;
    switch (e.form) {
        case Formulation::VSigma:
            val += e.w.values.dot(H.M1() * f.f_main.values);
            break;
        case Formulation::EtaPhi:
            val += e.s.values.dot(H.M1() * f.f_main.values);
            val += e.phi_loads.dot(f.f_phi);
            break;
        default: {
            for (int t = 0; t < m.nt(); ++t) {
                const auto& tr = m.triangles[t];
                double mean = (e.c.values[tr[0]] + e.c.values[tr[1]] + e.c.values[tr[2]]) / 3.0;
                val += mean * f.f_main.values[t];
            }
            val += e.phi_loads.dot(f.f_phi);
            break;
        }
    }
    for (int i : m.sigma_interior_vertices) val += e.sigma[i] * f.f_sigma_loads[i];
    return val;
}

double port_paired(const SimplicialComplex& m, const DiracTuple& a, const DiracTuple& b) {
    double val = 0.0;
    for (int i : m.boundary_vertices)
        if (!m.vertex_sigma_interior[i]) val += a.f.e_b_values[i] * b.f.f_b_loads[i];
    return val;
}

} // namespace

DiracTuple d1_map(const BracketKernel& K, const EffortTuple& e) {
    if (K.form != Formulation::VSigma || e.form != Formulation::VSigma)
        throw DataError("d1_map expects the (v,Sigma) formulation");
    const HodgeSystem& H = *K.H;
    const auto& m = H.mesh();
    double closed_res = solenoidal_residual(H, e.w);
    if (closed_res > 1e-7)
        throw DataError("d1_map: e_v not closed (residual " + std::to_string(closed_res) + ")");

    EffortData G = prepare_effort(K, e);
    QPField Z = scaled(K.zeta, rotated(G.u_tot));
    Vec lift = extend_by_zero(m, G.sigma);

    DiracTuple t;
    t.e = e;
    t.f.form = Formulation::VSigma;
    Cochain raw(1, project_1form(H, Z).values + m.d0 * lift, m);
    t.f.f_main = project_interior_solenoidal(H, raw);
    t.f.f_phi = Vec::Zero(m.nv());
    t.f.f_sigma_loads = sigma_flow_loads(m, G.phi_loads);
    t.f.f_b_loads = gamma_port_loads(m, G.phi_loads);
    t.f.e_b_values = Vec::Zero(m.nv());
    return t;
}

DiracTuple d2_map(const BracketKernel& K, const EffortTuple& e) {
    if (K.form != Formulation::EtaPhi || e.form != Formulation::EtaPhi)
        throw DataError("d2_map expects the (eta,phi,Sigma) formulation");
    const HodgeSystem& H = *K.H;
    const auto& m = H.mesh();
    EffortData G = prepare_effort(K, e);
    QPField Z = scaled(K.zeta, rotated(G.u_tot));

    DiracTuple t;
    t.e = e;
    t.f.form = Formulation::EtaPhi;
    t.f.f_main = project_coexact(H, project_1form(H, Z));
    PhiFlow pf = phi_flow(H, K, G, Z);
    t.f.f_phi = pf.values;
    t.f.recovery_residual = pf.residual;
    if (pf.residual > 1e-7)
        throw SolverError("d2_map: phi-flow recovery residual " + std::to_string(pf.residual));
    t.f.f_sigma_loads = sigma_flow_loads(m, G.phi_loads);
    t.f.f_b_loads = gamma_port_loads(m, G.phi_loads);
    t.f.e_b_values = Vec::Zero(m.nv());

    // Diagnostic: non-gradient content of the transport form of the phi-row.
    Cochain dphi = d(H, G.phi);
    QPField ue = whitney_field(H, K.eta), up = whitney_field(H, dphi);
    Vec z2(m.nt());
    for (int t = 0; t < m.nt(); ++t) {
        double acc = 0.0;
        for (int q = 0; q < TriQuadrature::NQ; ++q)
            acc += H.tri_rule().weight[q] * cross(ue.v[t][q], up.v[t][q]);
        z2[t] = acc * H.geom()[t].area;
    }
    Cochain lie = codifferential(H, Cochain(2, z2, m));
    lie.values *= -1.0;  // [eta, d phi] = -delta(eta ^ d phi) in 2D
    Vec liftvals = extend_by_zero(m, G.sigma) + G.q;
    Cochain rho(1, project_1form(H, Z).values + lie.values + m.d0 * harmonic_lift(H, liftvals).values, m);
    Vec p = H.solve_stiffness_zero_mean(weak_flux_loads(H, rho));
    Cochain res(1, rho.values - m.d0 * p, m);
    t.f.nongradient_norm = l2norm(H, res) / (l2norm(H, rho) + 1e-300);
    return t;
}

DiracTuple d3_map(const BracketKernel& K, const EffortTuple& e) {
    if (K.form != Formulation::OmegaPhi || e.form != Formulation::OmegaPhi)
        throw DataError("d3_map expects the (omega,phi,Sigma) formulation");
    const HodgeSystem& H = *K.H;
    const auto& m = H.mesh();
    for (int i : m.boundary_vertices)
        if (e.c.values[i] != 0.0) throw DataError("d3_map: e_omega must vanish at boundary vertices");

    EffortData G = prepare_effort(K, e);
    QPField Z = scaled(K.zeta, rotated(G.u_tot));

    // f_omega: minimal (1/area)-norm representative of the exact pairing
    // conditions sum_{T in star(i)} f_T/3 = beta_i at interior vertices.
    std::vector<int> interior;
    for (int i = 0; i < m.nv(); ++i)
        if (!m.vertex_on_boundary[i]) interior.push_back(i);
    const int ni = static_cast<int>(interior.size());
    Vec beta = vertex_grad_loads(H, K.zeta, G.u_tot);
    beta = -beta;

    Vec f_omega = Vec::Zero(m.nt());
    if (ni > 0) {
        std::vector<int> row_of(m.nv(), -1);
        for (int k = 0; k < ni; ++k) row_of[interior[k]] = k;
        std::vector<Eigen::Triplet<double>> trip;
        for (int t = 0; t < m.nt(); ++t) {
            const auto& tr = m.triangles[t];
            double a = H.geom()[t].area;
            for (int kk = 0; kk < 3; ++kk) {
                int ri = row_of[tr[kk]];
                if (ri < 0) continue;
                for (int jj = 0; jj < 3; ++jj) {
                    int rj = row_of[tr[jj]];
                    if (rj < 0) continue;
                    trip.emplace_back(ri, rj, a / 9.0);
                }
            }
        }
        SpMat A(ni, ni);
        A.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<SpMat> ldlt;
        ldlt.compute(A);
        if (ldlt.info() != Eigen::Success) throw SolverError("d3_map: pairing system factorization failed");
        Vec bi(ni);
        for (int k = 0; k < ni; ++k) bi[k] = beta[interior[k]];
        Vec y = ldlt.solve(bi);
        for (int t = 0; t < m.nt(); ++t) {
            const auto& tr = m.triangles[t];
            double acc = 0.0;
            for (int kk = 0; kk < 3; ++kk)
                if (row_of[tr[kk]] >= 0) acc += y[row_of[tr[kk]]] / 3.0;
            f_omega[t] = H.geom()[t].area * acc;
        }
    }

    DiracTuple t;
    t.e = e;
    t.f.form = Formulation::OmegaPhi;
    t.f.f_main = Cochain(2, f_omega, m);
    PhiFlow pf = phi_flow(H, K, G, Z);
    t.f.f_phi = pf.values;
    t.f.recovery_residual = pf.residual;
    if (pf.residual > 1e-7)
        throw SolverError("d3_map: phi-flow recovery residual " + std::to_string(pf.residual));
    t.f.f_sigma_loads = sigma_flow_loads(m, G.phi_loads);
    t.f.f_b_loads = gamma_port_loads(m, G.phi_loads);
    t.f.e_b_values = Vec::Zero(m.nv());
    return t;
}

DiracTuple dirac_map(const BracketKernel& K, const EffortTuple& e) {
    switch (K.form) {
        case Formulation::VSigma: return d1_map(K, e);
        case Formulation::EtaPhi: return d2_map(K, e);
        default: return d3_map(K, e);
    }
}

double bilinear_form(const HodgeSystem& H, const DiracTuple& a, const DiracTuple& b) {
    if (a.e.form != b.e.form) throw DataError("bilinear_form: formulation mismatch");
    return paired(H, a.e, b.f) + paired(H, b.e, a.f) + port_paired(H.mesh(), a, b) +
           port_paired(H.mesh(), b, a);
}

PowerBalance power_balance(const HodgeSystem& H, const DiracTuple& t) {
    PowerBalance pb;
    pb.interior = paired(H, t.e, t.f);
    pb.port = port_paired(H.mesh(), t, t);
    return pb;
}

// --- deterministic random sampling -------------------------------------------

namespace {

struct Rng {
    uint64_t s;
    explicit Rng(uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    double uniform() {  // in [-1, 1], platform-independent
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return 2.0 * (static_cast<double>(s >> 11) / 9007199254740992.0) - 1.0;
    }
};

} // namespace

Cochain random_state_v(const HodgeSystem& H, uint64_t seed) {
    Rng rng(seed);
    Vec v(H.mesh().ne());
    for (int i = 0; i < v.size(); ++i) v[i] = rng.uniform();
    return project_interior_solenoidal(H, Cochain(1, v, H.mesh()));
}

Cochain random_state_eta(const HodgeSystem& H, uint64_t seed) {
    Rng rng(seed);
    Vec v(H.mesh().ne());
    for (int i = 0; i < v.size(); ++i) v[i] = rng.uniform();
    return project_coexact(H, Cochain(1, v, H.mesh()));
}

Cochain random_state_omega(const HodgeSystem& H, uint64_t seed) {
    Rng rng(seed);
    const auto& m = H.mesh();
    Vec w(m.nt());
    for (int t = 0; t < m.nt(); ++t) w[t] = rng.uniform() * H.geom()[t].area;
    return Cochain(2, w, m);
}

EffortTuple random_effort(const BracketKernel& K, uint64_t seed) {
    const HodgeSystem& H = *K.H;
    const auto& m = H.mesh();
    Rng rng(seed);
    EffortTuple e;
    e.form = K.form;
    e.sigma = Vec::Zero(m.nv());
    for (int i : m.sigma_interior_vertices) e.sigma[i] = rng.uniform();

    if (K.form == Formulation::VSigma) {
        Vec w(m.ne());
        for (int i = 0; i < w.size(); ++i) w[i] = rng.uniform();
        e.w = project_interior_solenoidal(H, Cochain(1, w, m));
        return e;
    }

    Vec loads = Vec::Zero(m.nv());
    for (int i : m.boundary_vertices) loads[i] = rng.uniform();
    double mean = loads.sum() / static_cast<double>(m.boundary_vertices.size());
    for (int i : m.boundary_vertices) loads[i] -= mean;
    e.phi_loads = loads;

    if (K.form == Formulation::EtaPhi) {
        Vec z(m.nt());
        for (int t = 0; t < m.nt(); ++t) z[t] = rng.uniform() * H.geom()[t].area;
        e.s = codifferential(H, Cochain(2, z, m));
    } else {
        e.c = Cochain::zero(0, m);
        for (int i = 0; i < m.nv(); ++i)
            if (!m.vertex_on_boundary[i]) e.c.values[i] = rng.uniform();
    }
    return e;
}

namespace {

double tuple_norm(const HodgeSystem& H, const DiracTuple& t) {
    double n2 = 0.0;
    auto add = [&](const Vec& v) { n2 += v.squaredNorm(); };
    switch (t.e.form) {
        case Formulation::VSigma: add(t.e.w.values); break;
        case Formulation::EtaPhi: add(t.e.s.values); add(t.e.phi_loads); break;
        default: add(t.e.c.values); add(t.e.phi_loads); break;
    }
    add(t.e.sigma);
    add(t.f.f_main.values);
    add(t.f.f_phi);
    add(t.f.f_sigma_loads);
    add(t.f.f_b_loads);
    (void)H;
    return std::sqrt(n2);
}

bool spd_rank_full(const SpMat& A) {
    Eigen::SimplicialLDLT<SpMat> ldlt;
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success) return false;
    Vec dvec = ldlt.vectorD();
    double dmax = dvec.cwiseAbs().maxCoeff();
    return dvec.minCoeff() > 1e-12 * dmax;
}

} // namespace

AuditResult self_orthogonality_audit(const BracketKernel& K, int samples, uint64_t seed) {
    const HodgeSystem& H = *K.H;
    const auto& m = H.mesh();
    AuditResult out;

    std::vector<DiracTuple> tuples;
    tuples.reserve(samples);
    for (int s = 0; s < samples; ++s)
        tuples.push_back(dirac_map(K, random_effort(K, seed + 1000003ull * (s + 1))));

    for (int i = 0; i < samples; ++i) {
        for (int j = i; j < samples; ++j) {
            double b = bilinear_form(H, tuples[i], tuples[j]);
            double r = std::abs(b) / (tuple_norm(H, tuples[i]) * tuple_norm(H, tuples[j]) + 1e-300);
            out.pair_residuals.push_back(r);
            out.max_normalized_residual = std::max(out.max_normalized_residual, r);
        }
    }

    // Dimension identity dim D = dim F: independent effort parameters versus
    // the constrained flow-space dimension, certified by factorization ranks.
    int n_int = 0;
    for (int i = 0; i < m.nv(); ++i)
        if (!m.vertex_on_boundary[i]) ++n_int;
    int n_b = static_cast<int>(m.boundary_vertices.size());
    int n_sig = static_cast<int>(m.sigma_interior_vertices.size());
    auto [b0, b1] = betti_numbers(m);

    bool ranks = true;
    {
        // interior gradient dofs have full rank iff the interior Dirichlet
        // stiffness block is SPD
        std::vector<Eigen::Triplet<double>> trip;
        std::vector<int> row_of(m.nv(), -1);
        int k = 0;
        for (int i = 0; i < m.nv(); ++i)
            if (!m.vertex_on_boundary[i]) row_of[i] = k++;
        const SpMat& Kf = H.stiffness();
        for (int c = 0; c < Kf.outerSize(); ++c)
            for (SpMat::InnerIterator it(Kf, c); it; ++it)
                if (row_of[it.row()] >= 0 && row_of[it.col()] >= 0)
                    trip.emplace_back(row_of[it.row()], row_of[it.col()], it.value());
        SpMat Kint(n_int, n_int);
        Kint.setFromTriplets(trip.begin(), trip.end());
        if (n_int > 0) ranks = ranks && spd_rank_full(Kint);
    }

    switch (K.form) {
        case Formulation::VSigma:
            out.dim_effort = (m.ne() - n_int) + n_sig;
            out.dim_flow = (m.ne() - n_int) + n_sig;
            break;
        case Formulation::EtaPhi: {
            int dim_coexact = m.ne() - (m.nv() - b0);
            out.dim_effort = dim_coexact + (n_b - 1) + n_sig;
            out.dim_flow = dim_coexact + (n_b - 1) + n_sig;
            break;
        }
        default: {
            out.dim_effort = n_int + (n_b - 1) + n_sig;
            out.dim_flow = n_int + (n_b - 1) + n_sig;
            // the f_omega pairing system must be nonsingular for the flow
            // slot to carry exactly n_int independent directions
            if (n_int > 0) {
                std::vector<int> row_of(m.nv(), -1);
                int k = 0;
                for (int i = 0; i < m.nv(); ++i)
                    if (!m.vertex_on_boundary[i]) row_of[i] = k++;
                std::vector<Eigen::Triplet<double>> trip;
                for (int t = 0; t < m.nt(); ++t) {
                    const auto& tr = m.triangles[t];
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b)
                            if (row_of[tr[a]] >= 0 && row_of[tr[b]] >= 0)
                                trip.emplace_back(row_of[tr[a]], row_of[tr[b]],
                                                  H.geom()[t].area / 9.0);
                }
                SpMat A(n_int, n_int);
                A.setFromTriplets(trip.begin(), trip.end());
                ranks = ranks && spd_rank_full(A);
            }
            break;
        }
    }
    out.rank_ok = ranks && (out.dim_effort == out.dim_flow);
    return out;
}

} // namespace ph
