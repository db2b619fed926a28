#pragma once

#include "ph/hodge.hpp"

namespace ph {

// Boundary flux data for the pure-Neumann potential problem. Stored as
// variational vertex loads l_i = \int tr(hat_i) ^ g; per-edge densities are
// assembled exactly for piecewise-constant g.
struct NeumannData {
    Vec loads;  // full vertex-length vector supported on boundary vertices

    static NeumannData from_vertex_loads(const HodgeSystem& H, Vec loads);
    // densities indexed like mesh().boundary (constant per boundary edge)
    static NeumannData from_edge_density(const HodgeSystem& H, const Vec& density);
    // per-edge integrated fluxes indexed like mesh().boundary
    static NeumannData from_edge_flux(const HodgeSystem& H, const Vec& flux);

    double total() const { return loads.sum(); }
    double scale() const { return loads.cwiseAbs().sum(); }
};

struct HodgeSplit {
    Cochain d_phi;       // exact part
    Cochain delta_beta;  // co-exact part
    Cochain harmonic;    // residual, ~0 on simply connected meshes
    Cochain phi;         // potential (zero weighted mean)
    Cochain beta;        // stream 2-cochain
};

struct BetaSolution {
    Cochain beta;  // 2-cochain with tr(*beta) = 0 enforced weakly
    Cochain eta;   // delta beta, exactly weakly solenoidal and flux-free
};

// Neumann-Laplace solution operator N_phi (zero weighted mean).
Cochain solve_Nphi(const HodgeSystem& H, const NeumannData& g, double compat_tol = 1e-10);

// Stream-form solve N_beta: <delta beta, delta gamma> = <omega, gamma>,
// delta the adjoint codifferential (natural tr(*beta) = 0).
BetaSolution solve_Nbeta(const HodgeSystem& H, const Cochain& omega);

// v = d phi + delta beta + alpha for interior-solenoidal v.
HodgeSplit hodge_decompose(const HodgeSystem& H, const Cochain& v, double solenoidal_tol = 1e-9);

// Harmonic Dirichlet extension of boundary vertex data (full-length vector,
// only boundary entries read).
Cochain harmonic_lift(const HodgeSystem& H, const Vec& boundary_values);

// Zero-extension lift: boundary values at boundary vertices, zero interior.
Cochain zero_extension_lift(const HodgeSystem& H, const Vec& boundary_values);

// Values on Sigma-interior vertices copied, zero on every Gamma vertex
// (corners included). Input and output are full vertex-length vectors.
Vec extend_by_zero(const SimplicialComplex& m, const Vec& sigma_values);

} // namespace ph
