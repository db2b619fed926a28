#include "ph/elliptic.hpp"

#include <cmath>

#include <Eigen/SparseLU>

namespace ph {

NeumannData NeumannData::from_vertex_loads(const HodgeSystem& H, Vec loads) {
    if (loads.size() != H.mesh().nv()) throw DataError("Neumann loads must be vertex-length");
    return NeumannData{std::move(loads)};
}

NeumannData NeumannData::from_edge_density(const HodgeSystem& H, const Vec& density) {
    const auto& m = H.mesh();
    if (density.size() != static_cast<Eigen::Index>(m.boundary.size()))
        throw DataError("edge density must match boundary edge count");
    Vec loads = Vec::Zero(m.nv());
    for (size_t i = 0; i < m.boundary.size(); ++i) {
        const auto& be = m.boundary[i];
        double len = norm(m.positions[be.head] - m.positions[be.tail]);
        loads[be.tail] += 0.5 * len * density[i];
        loads[be.head] += 0.5 * len * density[i];
    }
    return NeumannData{std::move(loads)};
}

NeumannData NeumannData::from_edge_flux(const HodgeSystem& H, const Vec& flux) {
    const auto& m = H.mesh();
    if (flux.size() != static_cast<Eigen::Index>(m.boundary.size()))
        throw DataError("edge flux must match boundary edge count");
    Vec loads = Vec::Zero(m.nv());
    for (size_t i = 0; i < m.boundary.size(); ++i) {
        const auto& be = m.boundary[i];
        loads[be.tail] += 0.5 * flux[i];
        loads[be.head] += 0.5 * flux[i];
    }
    return NeumannData{std::move(loads)};
}

Cochain solve_Nphi(const HodgeSystem& H, const NeumannData& g, double compat_tol) {
    double total = g.total();
    double scale = std::max(g.scale(), 1e-300);
    if (std::abs(total) > compat_tol * scale && std::abs(total) > compat_tol)
        throw DataError("incompatible Neumann data: net flux " + std::to_string(total));
    return Cochain(0, H.solve_stiffness_zero_mean(g.loads), H.mesh());
}

BetaSolution solve_Nbeta(const HodgeSystem& H, const Cochain& omega) {
    omega.check_shape(H.mesh());
    if (omega.degree != 2) throw DegreeError("solve_Nbeta expects a 2-cochain");
    const auto& m = H.mesh();
    const int ne = m.ne(), nt = m.nt();

    // Saddle system for (eta, q = M2 beta):
    //   M1 eta - d1^T q = 0,   d1 eta = omega.
    std::vector<Eigen::Triplet<double>> trip;
    for (int c = 0; c < H.M1().outerSize(); ++c)
        for (SpMat::InnerIterator it(H.M1(), c); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    const SpMat& d1 = m.d1;
    for (int c = 0; c < d1.outerSize(); ++c) {
        for (SpMat::InnerIterator it(d1, c); it; ++it) {
            int t = static_cast<int>(it.row()), e = static_cast<int>(it.col());
            trip.emplace_back(e, ne + t, -it.value());
            trip.emplace_back(ne + t, e, it.value());
        }
    }
    SpMat A(ne + nt, ne + nt);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<SpMat> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw SolverError("stream-form saddle factorization failed");
    Vec b = Vec::Zero(ne + nt);
    b.tail(nt) = omega.values;
    Vec x = lu.solve(b);
    Vec eta = x.head(ne), q = x.tail(nt);

    double rel = (d1 * eta - omega.values).norm() / (omega.values.norm() + 1e-300);
    if (!(rel < 1e-9)) throw SolverError("stream-form solve residual " + std::to_string(rel));

    Vec beta = q.cwiseQuotient(H.M2diag());  // beta = M2^{-1} q
    return BetaSolution{Cochain(2, beta, m), Cochain(1, eta, m)};
}

HodgeSplit hodge_decompose(const HodgeSystem& H, const Cochain& v, double solenoidal_tol) {
    v.check_shape(H.mesh());
    if (v.degree != 1) throw DegreeError("hodge_decompose expects a 1-cochain");
    const auto& m = H.mesh();

    auto [b0, b1] = betti_numbers(m);
    if (b0 != 1 || b1 != 0)
        throw DataError("harmonic component unsupported: mesh has (b0,b1)=(" + std::to_string(b0) +
                        "," + std::to_string(b1) + ")");
    double res = solenoidal_residual(H, v);
    if (res > solenoidal_tol)
        throw DataError("hodge_decompose: input not solenoidal (residual " + std::to_string(res) + ")");

    // Exact part from the weak flux data of v (exact Galerkin orthogonality).
    NeumannData g = NeumannData::from_vertex_loads(H, weak_flux_loads(H, v));
    Cochain phi = solve_Nphi(H, g, 1e-8);
    Cochain dphi = d(H, phi);

    BetaSolution bs = solve_Nbeta(H, d(H, v));
    Cochain alpha(1, v.values - dphi.values - bs.eta.values, m);
    return HodgeSplit{dphi, bs.eta, alpha, phi, bs.beta};
}

Cochain harmonic_lift(const HodgeSystem& H, const Vec& boundary_values) {
    const auto& m = H.mesh();
    if (boundary_values.size() != m.nv()) throw DataError("harmonic_lift expects vertex-length values");
    std::vector<uint8_t> mask(m.nv(), 0);
    for (int i = 0; i < m.nv(); ++i) mask[i] = m.vertex_on_boundary[i] ? 1 : 0;
    Vec phi = H.solve_stiffness_dirichlet(mask, boundary_values, Vec::Zero(m.nv()));
    return Cochain(0, phi, m);
}

Cochain zero_extension_lift(const HodgeSystem& H, const Vec& boundary_values) {
    const auto& m = H.mesh();
    if (boundary_values.size() != m.nv()) throw DataError("lift expects vertex-length values");
    Vec phi = Vec::Zero(m.nv());
    for (int i = 0; i < m.nv(); ++i)
        if (m.vertex_on_boundary[i]) phi[i] = boundary_values[i];
    return Cochain(0, phi, m);
}

Vec extend_by_zero(const SimplicialComplex& m, const Vec& sigma_values) {
    if (sigma_values.size() != m.nv()) throw DataError("extend_by_zero expects vertex-length values");
    Vec out = Vec::Zero(m.nv());
    for (int v : m.sigma_interior_vertices) out[v] = sigma_values[v];
    return out;
}

} // namespace ph
