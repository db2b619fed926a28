#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/SparseCholesky>

#include "ph/cochain.hpp"
#include "ph/mesh.hpp"

namespace ph {

// Triangle quadrature, exact for polynomials of degree 5.
struct TriQuadrature {
    static constexpr int NQ = 7;
    std::array<std::array<double, 3>, NQ> bary;
    std::array<double, NQ> weight;  // sums to 1, scale by area
    TriQuadrature();
};

// 3-point Gauss rule on [0,1], exact for degree 5.
struct EdgeQuadrature {
    static constexpr int NQ = 3;
    std::array<double, NQ> t, weight;
    EdgeQuadrature();
};

// Per-triangle geometry cache: barycentric gradients and quadrature points.
struct TriGeom {
    double area;
    std::array<Vec2, 3> p;
    std::array<Vec2, 3> grad;                          // grad of hat functions
    std::array<Vec2, TriQuadrature::NQ> qp;            // world coordinates
    std::array<std::array<double, 3>, TriQuadrature::NQ> lambda;
};

// Vector field sampled at the triangle quadrature points.
struct QPField {
    std::vector<std::array<Vec2, TriQuadrature::NQ>> v;
};

// Scalar field sampled at the triangle quadrature points.
struct QPScalar {
    std::vector<std::array<double, TriQuadrature::NQ>> v;
};

// Piecewise-constant-per-triangle vector field (sharp of a 1-cochain).
struct VectorProxy {
    std::vector<Vec2> per_tri;
    uint64_t geometry_id = 0;
};

// Galerkin (Whitney) mass operators and codifferential machinery tied to one
// mesh configuration. Rebuild after any deformation.
class HodgeSystem {
public:
    explicit HodgeSystem(MeshPtr mesh);

    const SimplicialComplex& mesh() const { return *mesh_; }
    MeshPtr mesh_ptr() const { return mesh_; }

    const SpMat& M0() const { return m0_; }
    const SpMat& M1() const { return m1_; }
    const Vec& M2diag() const { return m2_; }
    const SpMat& stiffness() const { return k_; }  // d0^T M1 d0

    const std::vector<TriGeom>& geom() const { return geom_; }
    const TriQuadrature& tri_rule() const { return tri_rule_; }
    const EdgeQuadrature& edge_rule() const { return edge_rule_; }

    Vec solve_M0(const Vec& rhs) const;
    Vec solve_M1(const Vec& rhs) const;

    // Zero-mean Neumann solve: stiffness * phi = rhs with (M0*1)^T phi = 0.
    // rhs must have zero sum (enforced by caller); implemented with a
    // Lagrange multiplier on the weighted mean.
    Vec solve_stiffness_zero_mean(const Vec& rhs) const;

    // Dirichlet solve on the vertex set marked by `dirichlet`: rows not in the
    // set satisfy stiffness*phi = rhs, marked rows take the given values.
    Vec solve_stiffness_dirichlet(const std::vector<uint8_t>& dirichlet,
                                  const Vec& dirichlet_values, const Vec& rhs) const;

    double mesh_size() const { return h_; }

private:
    MeshPtr mesh_;
    TriQuadrature tri_rule_;
    EdgeQuadrature edge_rule_;
    std::vector<TriGeom> geom_;
    SpMat m0_, m1_, k_;
    Vec m2_;
    double h_ = 0.0;

    mutable std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> m0_solver_, m1_solver_;
    mutable std::unique_ptr<Eigen::SparseLU<SpMat>> neumann_solver_;
    struct DirichletCache {
        std::vector<uint8_t> mask;
        std::vector<int> free_of_full, full_of_free;
        Eigen::SimplicialLDLT<SpMat> solver;
        SpMat coupling;  // free x constrained block
    };
    mutable std::vector<std::unique_ptr<DirichletCache>> dirichlet_cache_;
};

// --- field construction -----------------------------------------------------

QPField whitney_field(const HodgeSystem& H, const Cochain& c1);
QPField gradient_field(const HodgeSystem& H, const Cochain& c0);
QPField rotated(const QPField& f);
QPField scaled(const QPScalar& s, const QPField& f);
QPField added(const QPField& a, const QPField& b);
QPScalar p0_density(const HodgeSystem& H, const Cochain& c2);  // exact star of a 2-cochain
QPScalar p1_values(const HodgeSystem& H, const Cochain& c0);

// --- quadrature pairings ----------------------------------------------------

double integrate_dot(const HodgeSystem& H, const QPField& a, const QPField& b);
double integrate_cross(const HodgeSystem& H, const QPField& a, const QPField& b);
double integrate_scalar_cross(const HodgeSystem& H, const QPScalar& f, const QPField& a,
                              const QPField& b);
double integrate_scalar(const HodgeSystem& H, const QPScalar& f);

// Edge loads L_e = \int <W_e, A> (Galerkin right-hand side for 1-cochains).
Vec edge_loads(const HodgeSystem& H, const QPField& a);
// Vertex loads L_i = \int f <grad hat_i, A>.
Vec vertex_grad_loads(const HodgeSystem& H, const QPScalar& f, const QPField& a);
// L2 projection of a sampled field onto Whitney 1-cochains.
Cochain project_1form(const HodgeSystem& H, const QPField& a);

// --- forms operations --------------------------------------------------------

// Exterior derivative (signed incidence, exact).
Cochain d(const HodgeSystem& H, const Cochain& c);
// L2 inner product a^T Mk b.
double inner(const HodgeSystem& H, const Cochain& a, const Cochain& b);
double l2norm(const HodgeSystem& H, const Cochain& a);
// Adjoint codifferential M_{k-1}^{-1} D_{k-1}^T M_k.
Cochain codifferential(const HodgeSystem& H, const Cochain& c);
// \int a ^ b for degrees summing to 2, by Whitney interpolation + quadrature.
double wedge_pair(const HodgeSystem& H, const Cochain& a, const Cochain& b);
// Galerkin Hodge representative: (2-k)-cochain s with <mu,s> = \int c ^ mu.
Cochain star_rep(const HodgeSystem& H, const Cochain& c);

// Tangential trace: degree 0 -> per-boundary-vertex values (ordered as
// mesh().boundary_vertices); degree 1 -> per-boundary-edge circulation with
// the induced orientation (ordered as mesh().boundary).
Vec trace(const HodgeSystem& H, const Cochain& c);
// Per-boundary-edge integral of <whitney(v), N> (quadrature normal flux).
Vec normal_trace(const HodgeSystem& H, const Cochain& v);
// Variational boundary flux d0^T M1 v as a full vertex-length load vector;
// for a discretely solenoidal v its interior entries vanish and the boundary
// entries integrate tr(psi) ^ *n(v) exactly against hat functions.
Vec weak_flux_loads(const HodgeSystem& H, const Cochain& v);

// Sharp of a 1-cochain: per-triangle average of the Whitney field.
VectorProxy sharp(const HodgeSystem& H, const Cochain& c1);
// Flat: L2 projection of the piecewise-constant field back to a 1-cochain.
Cochain flat(const HodgeSystem& H, const VectorProxy& x);

// Interior product i_X c for a 2-cochain c, pointwise contraction route.
Cochain interior_product(const HodgeSystem& H, const VectorProxy& x, const Cochain& c2);
// Same contraction through the star-wedge-star route of the star identity;
// agrees with interior_product up to projection error.
Cochain interior_product_star_route(const HodgeSystem& H, const VectorProxy& x, const Cochain& c2);

// Lie bracket of discretely solenoidal 1-cochains:
// (-1)^(n-1) delta(a ^ b); inputs checked against `solenoidal_tol`.
Cochain lie_bracket_1(const HodgeSystem& H, const Cochain& a, const Cochain& b,
                      double solenoidal_tol = 1e-9);

// Relative interior-divergence residual used by solenoidal preconditions.
double solenoidal_residual(const HodgeSystem& H, const Cochain& v);

// Project onto {interior rows of d0^T M1 v = 0} by subtracting a gradient of
// an interior-supported potential (the discrete P* class).
Cochain project_interior_solenoidal(const HodgeSystem& H, const Cochain& v);
// Project onto the M1-orthogonal complement of all gradients (discrete Z*
// class: weakly solenoidal with zero weak boundary flux).
Cochain project_coexact(const HodgeSystem& H, const Cochain& v);

} // namespace ph
