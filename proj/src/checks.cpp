#include "ph/checks.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace ph {

namespace {

struct Rng {
    uint64_t s;
    explicit Rng(uint64_t seed) : s(seed ? seed : 0x2545f4914f6cdd1dull) {}
    double uniform() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return 2.0 * (static_cast<double>(s >> 11) / 9007199254740992.0) - 1.0;
    }
    Vec vec(int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform();
        return v;
    }
};

Cochain uniform_field_cochain(const HodgeSystem& H, const Vec2& u) {
    const auto& m = H.mesh();
    Vec v(m.ne());
    for (int e = 0; e < m.ne(); ++e)
        v[e] = dot(u, m.positions[m.edges[e][1]] - m.positions[m.edges[e][0]]);
    return Cochain(1, v, m);
}

void push(std::vector<CheckResult>& out, const std::string& name, double value, double threshold) {
    out.push_back({name, value, threshold, value <= threshold});
}

} // namespace

std::vector<CheckResult> check_forms(MeshPtr mesh, uint64_t seed) {
    std::vector<CheckResult> out;
    HodgeSystem H(mesh);
    const auto& m = *mesh;
    Rng rng(seed);

    // Exact integer exactness of the complex.
    SpMat dd = m.d1 * m.d0;
    double ddmax = 0.0;
    for (int c = 0; c < dd.outerSize(); ++c)
        for (SpMat::InnerIterator it(dd, c); it; ++it) ddmax = std::max(ddmax, std::abs(it.value()));
    push(out, "d1_d0_zero", ddmax, 0.0);

    // Discrete Stokes for a random 1-cochain.
    Cochain a(1, rng.vec(m.ne()), m);
    double lhs = (m.d1 * a.values).sum();
    double rhs = trace(H, a).sum();
    push(out, "stokes_residual", std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1.0), 1e-13);

    // Galerkin adjointness of the codifferential.
    Cochain mu(1, rng.vec(m.ne()), m);
    Cochain lam(0, rng.vec(m.nv()), m);
    double adj = inner(H, d(H, lam), mu) - inner(H, lam, codifferential(H, mu));
    push(out, "adjointness", std::abs(adj) / (l2norm(H, mu) * l2norm(H, lam) + 1e-300), 1e-11);

    Cochain c2(2, rng.vec(m.nt()), m);
    Cochain ddc = codifferential(H, codifferential(H, c2));
    push(out, "delta_delta_zero", l2norm(H, ddc) / (l2norm(H, c2) + 1e-300), 1e-11);

    Cochain b(1, rng.vec(m.ne()), m);
    double w1 = wedge_pair(H, a, b), w2 = wedge_pair(H, b, a);
    push(out, "wedge_antisymmetry", std::abs(w1 + w2) / (std::abs(w1) + 1e-300), 1e-12);

    // Star of a uniform field is its rotation, exactly representable.
    Cochain ex = uniform_field_cochain(H, {1, 0});
    Cochain ey = uniform_field_cochain(H, {0, 1});
    Cochain sx = star_rep(H, ex);
    push(out, "star_uniform_rotation", l2norm(H, Cochain(1, sx.values - ey.values, m)) / l2norm(H, ey),
         1e-11);

    Cochain ones(0, Vec::Ones(m.nv()), m);
    Cochain vol = star_rep(H, ones);
    double verr = 0.0;
    for (int t = 0; t < m.nt(); ++t) verr = std::max(verr, std::abs(vol.values[t] - m.tri_area(t)));
    push(out, "star_constant_volume", verr, 1e-13);

    // Interior product of a uniform field with the unit volume form.
    Vec volform(m.nt());
    for (int t = 0; t < m.nt(); ++t) volform[t] = m.tri_area(t);
    VectorProxy X;
    X.geometry_id = m.geometry_id;
    X.per_tri.assign(m.nt(), Vec2{1, 0});
    Cochain ic = interior_product(H, X, Cochain(2, volform, m));
    push(out, "interior_product_uniform", l2norm(H, Cochain(1, ic.values - ey.values, m)) / l2norm(H, ey),
         1e-11);

    // Lie bracket antisymmetry on solenoidal inputs.
    Cochain sa = project_coexact(H, Cochain(1, rng.vec(m.ne()), m));
    Cochain sb = project_coexact(H, Cochain(1, rng.vec(m.ne()), m));
    Cochain lab = lie_bracket_1(H, sa, sb);
    Cochain lba = lie_bracket_1(H, sb, sa);
    push(out, "lie_antisymmetry", l2norm(H, Cochain(1, lab.values + lba.values, m)) /
         (l2norm(H, lab) + 1e-300), 1e-11);
    push(out, "lie_self_zero", l2norm(H, lie_bracket_1(H, sa, sa)) / (l2norm(H, sa) + 1e-300), 1e-11);
    return out;
}

std::vector<CheckResult> check_elliptic(MeshPtr mesh, uint64_t seed) {
    std::vector<CheckResult> out;
    HodgeSystem H(mesh);
    const auto& m = *mesh;
    Rng rng(seed);

    // Zero data gives the zero potential.
    Cochain phi0 = solve_Nphi(H, NeumannData::from_vertex_loads(H, Vec::Zero(m.nv())));
    push(out, "nphi_zero", phi0.values.norm(), 1e-12);

    // phi* = x is in the finite element space: exact recovery.
    Vec density(m.boundary.size());
    for (size_t i = 0; i < m.boundary.size(); ++i) {
        const auto& be = m.boundary[i];
        Vec2 dir = m.positions[be.head] - m.positions[be.tail];
        double len = norm(dir);
        density[i] = dir.y / len;  // n_x
    }
    Cochain phix = solve_Nphi(H, NeumannData::from_edge_density(H, density));
    Vec xs(m.nv());
    for (int i = 0; i < m.nv(); ++i) xs[i] = m.positions[i].x;
    Vec w = H.M0() * Vec::Ones(m.nv());
    xs -= Vec::Ones(m.nv()) * (w.dot(xs) / w.sum());
    push(out, "nphi_linear_exact", (phix.values - xs).norm() / xs.norm(), 1e-10);

    // Stream solve: curl reproduced exactly, weakly tangent result.
    Cochain omega(2, rng.vec(m.nt()), m);
    BetaSolution bs = solve_Nbeta(H, omega);
    push(out, "nbeta_curl", (m.d1 * bs.eta.values - omega.values).norm() / omega.values.norm(), 1e-10);
    push(out, "nbeta_flux_free", weak_flux_loads(H, bs.eta).norm() / (l2norm(H, bs.eta) + 1e-300), 1e-10);

    // Hodge decomposition of random solenoidal fields.
    double rec = 0.0, orth = 0.0, harm = 0.0;
    for (int k = 0; k < 5; ++k) {
        Cochain v = project_interior_solenoidal(H, Cochain(1, rng.vec(m.ne()), m));
        HodgeSplit hs = hodge_decompose(H, v);
        double nv = l2norm(H, v) + 1e-300;
        rec = std::max(rec, l2norm(H, Cochain(1, v.values - hs.d_phi.values - hs.delta_beta.values, m)) / nv);
        orth = std::max(orth, std::abs(inner(H, hs.d_phi, hs.delta_beta)) / (nv * nv));
        harm = std::max(harm, l2norm(H, hs.harmonic) / nv);
    }
    push(out, "hodge_reconstruction", rec, 1e-9);
    push(out, "hodge_orthogonality", orth, 1e-10);
    push(out, "hodge_harmonic", harm, 1e-8);

    // Lifts.
    Vec mu = Vec::Zero(m.nv());
    for (int i : m.boundary_vertices) mu[i] = rng.uniform();
    Cochain lift = harmonic_lift(H, mu);
    double terr = 0.0;
    for (int i : m.boundary_vertices) terr = std::max(terr, std::abs(lift.values[i] - mu[i]));
    push(out, "lift_trace_exact", terr, 1e-14);

    Vec sig = Vec::Zero(m.nv());
    for (int i : m.sigma_interior_vertices) sig[i] = rng.uniform();
    Vec ext = extend_by_zero(m, sig);
    double gerr = 0.0;
    for (int i : m.boundary_vertices)
        if (!m.vertex_sigma_interior[i]) gerr = std::max(gerr, std::abs(ext[i]));
    for (int i : m.sigma_interior_vertices) gerr = std::max(gerr, std::abs(ext[i] - sig[i]));
    push(out, "extend_by_zero", gerr, 0.0);
    return out;
}

std::vector<CheckResult> check_energetics(MeshPtr mesh, uint64_t seed) {
    std::vector<CheckResult> out;
    HodgeSystem H(mesh);
    const auto& m = *mesh;
    SurfaceState S = build_surface(m);
    Rng rng(seed);
    PhysParams P;
    P.rho = 1.0;
    P.tau = 0.02;
    P.g0 = 1.0;

    // Formulation equivalence on a random admissible state.
    Cochain eta = project_coexact(H, Cochain(1, rng.vec(m.ne()), m));
    Vec phib = Vec::Zero(m.nv());
    for (int i : m.boundary_vertices) phib[i] = rng.uniform();
    Cochain phi = harmonic_lift(H, phib);
    Cochain v(1, d(H, phi).values + eta.values, m);
    HamiltonianValue hv = hamiltonian_v(H, v, S, P);
    HamiltonianValue he = hamiltonian_eta(H, eta, phib, S, P);
    push(out, "equivalence_eta", std::abs(hv.total - he.total) / (std::abs(hv.total) + 1e-300), 1e-9);
    // the vorticity determines eta only on simply connected meshes
    if (betti_numbers(m).second == 0) {
        HamiltonianValue ho = hamiltonian_omega(H, d(H, eta), phib, S, P);
        push(out, "equivalence_omega", std::abs(hv.total - ho.total) / (std::abs(hv.total) + 1e-300),
             1e-9);
    }

    if (!S.verts.empty()) {
        // Shape-derivative audits for the geometric functionals.
        Vec dsig = Vec::Zero(m.nv());
        for (int i : m.sigma_interior_vertices) dsig[i] = 1.0;
        double h_fd = 1e-5;
        PhysParams Pg;
        Pg.g0 = 1.0;

        auto area_fn = [](MeshPtr mm) { return mm->total_area(); };
        Vec ones_density = Vec::Zero(m.nv());
        for (int i : m.sigma_interior_vertices) ones_density[i] = 1.0;
        ShapeAudit a1 = shape_derivative_audit(H, S, area_fn, ones_density, dsig, h_fd);
        push(out, "shape_area", a1.residual / (std::abs(a1.fd_derivative) + 1.0),
             std::max(1e-6, 5.0 * H.mesh_size() * H.mesh_size()));

        auto len_fn = [](MeshPtr mm) { return build_surface(*mm, false).length; };
        Vec kap = Vec::Zero(m.nv());
        for (const auto& sv : S.verts)
            if (!sv.corner) kap[sv.v] = sv.kappa;
        ShapeAudit a2 = shape_derivative_audit(H, S, len_fn, kap, dsig, h_fd);
        push(out, "shape_length_curvature", a2.residual / (std::abs(a2.fd_derivative) + 1.0),
             std::max(1e-5, 5.0 * H.mesh_size()));

        auto grav_fn = [&Pg](MeshPtr mm) {
            HodgeSystem Hm(mm);
            SurfaceState Sm = build_surface(*mm, false);
            return hamiltonian_v(Hm, Cochain::zero(1, *mm), Sm, Pg).gravity;
        };
        Vec phi_density = Vec::Zero(m.nv());
        for (int i : m.sigma_interior_vertices) phi_density[i] = Pg.g0 * m.positions[i].y;
        ShapeAudit a3 = shape_derivative_audit(H, S, grav_fn, phi_density, dsig, h_fd);
        push(out, "shape_gravity", a3.residual / (std::abs(a3.fd_derivative) + 1.0),
             std::max(1e-5, 5.0 * H.mesh_size() * H.mesh_size()));
    }
    return out;
}

std::vector<CheckResult> check_brackets(MeshPtr mesh, uint64_t seed) {
    std::vector<CheckResult> out;
    HodgeSystem H(mesh);
    Rng rng(seed);
    const int n_tuples = 25;

    Cochain v = random_state_v(H, seed + 11);
    Cochain eta_state = random_state_eta(H, seed + 12);
    Cochain omega = random_state_omega(H, seed + 13);
    BracketKernel Kv = make_kernel_v(H, v);
    BracketKernel Ke = make_kernel_eta(H, eta_state);
    BracketKernel Ko = make_kernel_omega(H, omega);

    auto skew_and_linear = [&](const BracketKernel& K, const char* name) {
        double skew = 0.0, lin = 0.0;
        for (int k = 0; k < n_tuples; ++k) {
            EffortTuple F = random_effort(K, seed + 101 * (k + 1));
            EffortTuple G = random_effort(K, seed + 977 * (k + 1));
            EffortTuple F2 = random_effort(K, seed + 1303 * (k + 1));
            double fg = bracket_from_data(K, prepare_effort(K, F), prepare_effort(K, G), false);
            double gf = bracket_from_data(K, prepare_effort(K, G), prepare_effort(K, F), false);
            double scale = std::abs(fg) + std::abs(gf) + 1e-300;
            skew = std::max(skew, std::abs(fg + gf) / scale);
            // linear combination aF + bF2 against G
            double aa = rng.uniform(), bb = rng.uniform();
            EffortTuple Fc = F;
            if (K.form == Formulation::VSigma) Fc.w.values = aa * F.w.values + bb * F2.w.values;
            if (K.form == Formulation::EtaPhi) Fc.s.values = aa * F.s.values + bb * F2.s.values;
            if (K.form == Formulation::OmegaPhi) Fc.c.values = aa * F.c.values + bb * F2.c.values;
            if (K.form != Formulation::VSigma)
                Fc.phi_loads = aa * F.phi_loads + bb * F2.phi_loads;
            Fc.sigma = aa * F.sigma + bb * F2.sigma;
            double comb = bracket_from_data(K, prepare_effort(K, Fc), prepare_effort(K, G), false);
            double f2g = bracket_from_data(K, prepare_effort(K, F2), prepare_effort(K, G), false);
            lin = std::max(lin, std::abs(comb - aa * fg - bb * f2g) /
                                    (std::abs(comb) + std::abs(fg) + std::abs(f2g) + 1e-300));
        }
        push(out, std::string(name) + "_skew", skew, 1e-11);
        push(out, std::string(name) + "_bilinear", lin, 1e-12);
    };
    skew_and_linear(Kv, "vS");
    skew_and_linear(Ke, "eta");
    skew_and_linear(Ko, "omega");

    // Cross-formulation consistency: v tuples mapped through the Hodge split.
    HodgeSplit hs = hodge_decompose(H, v);
    BracketKernel Kev = make_kernel_eta(H, hs.delta_beta);
    double cross = 0.0;
    for (int k = 0; k < 8; ++k) {
        EffortTuple F = random_effort(Kv, seed + 3001 * (k + 1));
        EffortTuple G = random_effort(Kv, seed + 4001 * (k + 1));
        double bv = bracket_vS(Kv, F, G);
        double be = bracket_eta(Kev, map_v_to_eta(H, Kev, F), map_v_to_eta(H, Kev, G));
        cross = std::max(cross, std::abs(bv - be) / (std::abs(bv) + std::abs(be) + 1e-300));
    }
    push(out, "cross_v_eta", cross, 1e-8);

    // omega tuples against the eta kernel of delta N_beta(omega).
    double cross2 = 0.0;
    BracketKernel Keo = make_kernel_eta(H, Ko.eta);
    for (int k = 0; k < 8; ++k) {
        EffortTuple F = random_effort(Ko, seed + 5001 * (k + 1));
        EffortTuple G = random_effort(Ko, seed + 6007 * (k + 1));
        double bo = bracket_omega(Ko, F, G);
        double be = bracket_from_data(Keo, prepare_effort(Ko, F), prepare_effort(Ko, G), false);
        cross2 = std::max(cross2, std::abs(bo - be) / (std::abs(bo) + std::abs(be) + 1e-300));
    }
    push(out, "cross_omega_eta", cross2, 1e-8);
    return out;
}

std::vector<CheckResult> check_dirac(MeshPtr mesh, uint64_t seed, const std::string& audit_csv) {
    std::vector<CheckResult> out;
    HodgeSystem H(mesh);

    std::ofstream csv;
    if (!audit_csv.empty()) {
        csv.open(audit_csv + ".tmp");
        csv.precision(17);
        csv << "formulation,state_id,pair_id,normalized_residual\n";
    }

    const int n_states = 2, n_samples = 10;
    auto run = [&](Formulation form, const char* name) {
        double worst = 0.0;
        bool rank_ok = true;
        for (int s = 0; s < n_states; ++s) {
            BracketKernel K;
            if (form == Formulation::VSigma) K = make_kernel_v(H, random_state_v(H, seed + 17 * (s + 1)));
            else if (form == Formulation::EtaPhi)
                K = make_kernel_eta(H, random_state_eta(H, seed + 19 * (s + 1)));
            else K = make_kernel_omega(H, random_state_omega(H, seed + 23 * (s + 1)));
            AuditResult a = self_orthogonality_audit(K, n_samples, seed + 29 * (s + 1));
            worst = std::max(worst, a.max_normalized_residual);
            rank_ok = rank_ok && a.rank_ok;
            if (csv.is_open())
                for (size_t p = 0; p < a.pair_residuals.size(); ++p)
                    csv << name << "," << s << "," << p << "," << a.pair_residuals[p] << "\n";
        }
        push(out, std::string(name) + "_self_orthogonality", worst, 1e-9);
        push(out, std::string(name) + "_rank_identity", rank_ok ? 0.0 : 1.0, 0.0);
    };
    run(Formulation::VSigma, "D1");
    run(Formulation::EtaPhi, "D2");
    run(Formulation::OmegaPhi, "D3");

    if (csv.is_open()) {
        double worst = 0.0;
        for (const auto& r : out) worst = std::max(worst, r.value);
        csv << "summary,max,all," << worst << "\n";
        csv.close();
        if (std::rename((audit_csv + ".tmp").c_str(), audit_csv.c_str()) != 0)
            throw Error("cannot rename audit csv");
    }
    return out;
}

void write_checks_csv(const std::vector<CheckResult>& results, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write '" + tmp + "'");
        out.precision(17);
        out << "check,value,threshold,pass\n";
        for (const auto& r : results)
            out << r.name << "," << r.value << "," << r.threshold << "," << (r.pass ? 1 : 0) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot rename '" + tmp + "'");
}

bool all_pass(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

} // namespace ph
