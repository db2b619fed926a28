#include "ph/hodge.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/SparseLU>

namespace ph {

TriQuadrature::TriQuadrature() {
    // 7-point rule, exact to degree 5.
    const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
    bary[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    weight[0] = 0.225;
    bary[1] = {a1, b1, b1}; bary[2] = {b1, a1, b1}; bary[3] = {b1, b1, a1};
    weight[1] = weight[2] = weight[3] = w1;
    bary[4] = {a2, b2, b2}; bary[5] = {b2, a2, b2}; bary[6] = {b2, b2, a2};
    weight[4] = weight[5] = weight[6] = w2;
}

EdgeQuadrature::EdgeQuadrature() {
    const double off = 0.5 * std::sqrt(3.0 / 5.0);
    t = {0.5 - off, 0.5, 0.5 + off};
    weight = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
}

HodgeSystem::HodgeSystem(MeshPtr mesh) : mesh_(std::move(mesh)) {
    const auto& m = *mesh_;
    const int nv = m.nv(), ne = m.ne(), nt = m.nt();

    geom_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        TriGeom& g = geom_[t];
        const auto& tr = m.triangles[t];
        for (int k = 0; k < 3; ++k) g.p[k] = m.positions[tr[k]];
        g.area = m.tri_area(t);
        for (int k = 0; k < 3; ++k)
            g.grad[k] = rot90(g.p[(k + 2) % 3] - g.p[(k + 1) % 3]) * (1.0 / (2.0 * g.area));
        for (int q = 0; q < TriQuadrature::NQ; ++q) {
            const auto& l = tri_rule_.bary[q];
            g.lambda[q] = l;
            g.qp[q] = g.p[0] * l[0] + g.p[1] * l[1] + g.p[2] * l[2];
        }
    }

    h_ = 0.0;
    for (int e = 0; e < ne; ++e)
        h_ = std::max(h_, norm(m.positions[m.edges[e][1]] - m.positions[m.edges[e][0]]));

    // M0 and M1 by quadrature (exact for the quadratic integrands).
    std::vector<Eigen::Triplet<double>> t0, t1;
    t0.reserve(9 * nt);
    t1.reserve(9 * nt);
    for (int t = 0; t < nt; ++t) {
        const TriGeom& g = geom_[t];
        const auto& tr = m.triangles[t];
        // Local Whitney 1-form bases for edges (v0,v1),(v1,v2),(v2,v0).
        std::array<std::array<Vec2, TriQuadrature::NQ>, 3> w;
        for (int k = 0; k < 3; ++k) {
            int p = k, q = (k + 1) % 3;
            double s = m.tri_edge_signs[t][k];
            for (int iq = 0; iq < TriQuadrature::NQ; ++iq)
                w[k][iq] = (g.grad[q] * g.lambda[iq][p] - g.grad[p] * g.lambda[iq][q]) * s;
        }
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                double s0 = 0.0, s1 = 0.0;
                for (int iq = 0; iq < TriQuadrature::NQ; ++iq) {
                    double wq = tri_rule_.weight[iq] * g.area;
                    s0 += wq * g.lambda[iq][a] * g.lambda[iq][b];
                    s1 += wq * dot(w[a][iq], w[b][iq]);
                }
                t0.emplace_back(tr[a], tr[b], s0);
                t1.emplace_back(m.tri_edges[t][a], m.tri_edges[t][b], s1);
            }
        }
    }
    m0_.resize(nv, nv);
    m0_.setFromTriplets(t0.begin(), t0.end());
    m1_.resize(ne, ne);
    m1_.setFromTriplets(t1.begin(), t1.end());

    m2_.resize(nt);
    for (int t = 0; t < nt; ++t) m2_[t] = 1.0 / geom_[t].area;

    k_ = SpMat(m.d0.transpose() * m1_ * m.d0);
    k_.makeCompressed();
}

Vec HodgeSystem::solve_M0(const Vec& rhs) const {
    if (!m0_solver_) {
        m0_solver_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
        m0_solver_->compute(m0_);
        if (m0_solver_->info() != Eigen::Success) throw SolverError("M0 factorization failed");
    }
    return m0_solver_->solve(rhs);
}

Vec HodgeSystem::solve_M1(const Vec& rhs) const {
    if (!m1_solver_) {
        m1_solver_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
        m1_solver_->compute(m1_);
        if (m1_solver_->info() != Eigen::Success) throw SolverError("M1 factorization failed");
    }
    return m1_solver_->solve(rhs);
}

Vec HodgeSystem::solve_stiffness_zero_mean(const Vec& rhs) const {
    const int nv = mesh_->nv();
    if (!neumann_solver_) {
        Vec w = m0_ * Vec::Ones(nv);
        std::vector<Eigen::Triplet<double>> trip;
        for (int c = 0; c < k_.outerSize(); ++c)
            for (SpMat::InnerIterator it(k_, c); it; ++it)
                trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        for (int i = 0; i < nv; ++i) {
            trip.emplace_back(i, nv, w[i]);
            trip.emplace_back(nv, i, w[i]);
        }
        SpMat bordered(nv + 1, nv + 1);
        bordered.setFromTriplets(trip.begin(), trip.end());
        neumann_solver_ = std::make_unique<Eigen::SparseLU<SpMat>>();
        neumann_solver_->compute(bordered);
        if (neumann_solver_->info() != Eigen::Success)
            throw SolverError("Neumann stiffness factorization failed");
    }
    Vec b(nv + 1);
    b.head(nv) = rhs;
    b[nv] = 0.0;
    Vec x = neumann_solver_->solve(b);
    Vec phi = x.head(nv);
    double rel = (k_ * phi + (m0_ * Vec::Ones(nv)) * x[nv] - rhs).norm() / (rhs.norm() + 1e-300);
    if (!(rel < 1e-9)) throw SolverError("Neumann solve residual " + std::to_string(rel));
    return phi;
}

Vec HodgeSystem::solve_stiffness_dirichlet(const std::vector<uint8_t>& dirichlet,
                                           const Vec& dirichlet_values, const Vec& rhs) const {
    const int nv = mesh_->nv();
    DirichletCache* cache = nullptr;
    for (auto& c : dirichlet_cache_)
        if (c->mask == dirichlet) { cache = c.get(); break; }
    if (!cache) {
        auto c = std::make_unique<DirichletCache>();
        c->mask = dirichlet;
        c->full_of_free.clear();
        c->free_of_full.assign(nv, -1);
        for (int i = 0; i < nv; ++i) {
            if (!dirichlet[i]) {
                c->free_of_full[i] = static_cast<int>(c->full_of_free.size());
                c->full_of_free.push_back(i);
            }
        }
        const int nf = static_cast<int>(c->full_of_free.size());
        std::vector<Eigen::Triplet<double>> tff, tfc;
        for (int col = 0; col < k_.outerSize(); ++col) {
            for (SpMat::InnerIterator it(k_, col); it; ++it) {
                int r = static_cast<int>(it.row()), cc = static_cast<int>(it.col());
                if (!dirichlet[r] && !dirichlet[cc])
                    tff.emplace_back(c->free_of_full[r], c->free_of_full[cc], it.value());
                else if (!dirichlet[r] && dirichlet[cc])
                    tfc.emplace_back(c->free_of_full[r], cc, it.value());
            }
        }
        SpMat kff(nf, nf), kfc(nf, nv);
        kff.setFromTriplets(tff.begin(), tff.end());
        kfc.setFromTriplets(tfc.begin(), tfc.end());
        c->coupling = kfc;
        c->solver.compute(kff);
        if (c->solver.info() != Eigen::Success) throw SolverError("Dirichlet stiffness factorization failed");
        dirichlet_cache_.push_back(std::move(c));
        cache = dirichlet_cache_.back().get();
    }
    const int nf = static_cast<int>(cache->full_of_free.size());
    Vec bc = Vec::Zero(nv);
    for (int i = 0; i < nv; ++i)
        if (dirichlet[i]) bc[i] = dirichlet_values[i];
    Vec bf(nf);
    for (int f = 0; f < nf; ++f) bf[f] = rhs[cache->full_of_free[f]];
    bf -= cache->coupling * bc;
    Vec xf = cache->solver.solve(bf);
    Vec x = bc;
    for (int f = 0; f < nf; ++f) x[cache->full_of_free[f]] = xf[f];
    return x;
}

// --- field construction -----------------------------------------------------

QPField whitney_field(const HodgeSystem& H, const Cochain& c1) {
    c1.check_shape(H.mesh());
    if (c1.degree != 1) throw DegreeError("whitney_field expects a 1-cochain");
    const auto& m = H.mesh();
    QPField f;
    f.v.resize(m.nt());
    for (int t = 0; t < m.nt(); ++t) {
        const TriGeom& g = H.geom()[t];
        for (int q = 0; q < TriQuadrature::NQ; ++q) {
            Vec2 u{0, 0};
            for (int k = 0; k < 3; ++k) {
                int p = k, r = (k + 1) % 3;
                double c = c1.values[m.tri_edges[t][k]] * m.tri_edge_signs[t][k];
                u += (g.grad[r] * g.lambda[q][p] - g.grad[p] * g.lambda[q][r]) * c;
            }
            f.v[t][q] = u;
        }
    }
    return f;
}

QPField gradient_field(const HodgeSystem& H, const Cochain& c0) {
    c0.check_shape(H.mesh());
    if (c0.degree != 0) throw DegreeError("gradient_field expects a 0-cochain");
    const auto& m = H.mesh();
    QPField f;
    f.v.resize(m.nt());
    for (int t = 0; t < m.nt(); ++t) {
        const TriGeom& g = H.geom()[t];
        Vec2 u{0, 0};
        for (int k = 0; k < 3; ++k) u += g.grad[k] * c0.values[m.triangles[t][k]];
        for (int q = 0; q < TriQuadrature::NQ; ++q) f.v[t][q] = u;
    }
    return f;
}

QPField rotated(const QPField& f) {
    QPField r;
    r.v.resize(f.v.size());
    for (size_t t = 0; t < f.v.size(); ++t)
        for (int q = 0; q < TriQuadrature::NQ; ++q) r.v[t][q] = rot90(f.v[t][q]);
    return r;
}

QPField scaled(const QPScalar& s, const QPField& f) {
    QPField r;
    r.v.resize(f.v.size());
    for (size_t t = 0; t < f.v.size(); ++t)
        for (int q = 0; q < TriQuadrature::NQ; ++q) r.v[t][q] = f.v[t][q] * s.v[t][q];
    return r;
}

QPField added(const QPField& a, const QPField& b) {
    QPField r;
    r.v.resize(a.v.size());
    for (size_t t = 0; t < a.v.size(); ++t)
        for (int q = 0; q < TriQuadrature::NQ; ++q) r.v[t][q] = a.v[t][q] + b.v[t][q];
    return r;
}

QPScalar p0_density(const HodgeSystem& H, const Cochain& c2) {
    c2.check_shape(H.mesh());
    if (c2.degree != 2) throw DegreeError("p0_density expects a 2-cochain");
    QPScalar s;
    s.v.resize(H.mesh().nt());
    for (int t = 0; t < H.mesh().nt(); ++t) {
        double d = c2.values[t] / H.geom()[t].area;
        for (int q = 0; q < TriQuadrature::NQ; ++q) s.v[t][q] = d;
    }
    return s;
}

QPScalar p1_values(const HodgeSystem& H, const Cochain& c0) {
    c0.check_shape(H.mesh());
    if (c0.degree != 0) throw DegreeError("p1_values expects a 0-cochain");
    const auto& m = H.mesh();
    QPScalar s;
    s.v.resize(m.nt());
    for (int t = 0; t < m.nt(); ++t) {
        const TriGeom& g = H.geom()[t];
        for (int q = 0; q < TriQuadrature::NQ; ++q) {
            double v = 0.0;
            for (int k = 0; k < 3; ++k) v += g.lambda[q][k] * c0.values[m.triangles[t][k]];
            s.v[t][q] = v;
        }
    }
    return s;
}

// --- quadrature pairings ----------------------------------------------------

double integrate_dot(const HodgeSystem& H, const QPField& a, const QPField& b) {
    double s = 0.0;
    for (size_t t = 0; t < a.v.size(); ++t) {
        const TriGeom& g = H.geom()[t];
        double e = 0.0;
        for (int q = 0; q < TriQuadrature::NQ; ++q)
            e += H.tri_rule().weight[q] * dot(a.v[t][q], b.v[t][q]);
        s += e * g.area;
    }
    return s;
}

double integrate_cross(const HodgeSystem& H, const QPField& a, const QPField& b) {
    double s = 0.0;
    for (size_t t = 0; t < a.v.size(); ++t) {
        const TriGeom& g = H.geom()[t];
        double e = 0.0;
        for (int q = 0; q < TriQuadrature::NQ; ++q)
            e += H.tri_rule().weight[q] * cross(a.v[t][q], b.v[t][q]);
        s += e * g.area;
    }
    return s;
}

double integrate_scalar_cross(const HodgeSystem& H, const QPScalar& f, const QPField& a,
                              const QPField& b) {
    double s = 0.0;
    for (size_t t = 0; t < a.v.size(); ++t) {
        const TriGeom& g = H.geom()[t];
        double e = 0.0;
        for (int q = 0; q < TriQuadrature::NQ; ++q)
            e += H.tri_rule().weight[q] * f.v[t][q] * cross(a.v[t][q], b.v[t][q]);
        s += e * g.area;
    }
    return s;
}

double integrate_scalar(const HodgeSystem& H, const QPScalar& f) {
    double s = 0.0;
    for (size_t t = 0; t < f.v.size(); ++t) {
        double e = 0.0;
        for (int q = 0; q < TriQuadrature::NQ; ++q) e += H.tri_rule().weight[q] * f.v[t][q];
        s += e * H.geom()[t].area;
    }
    return s;
}

Vec edge_loads(const HodgeSystem& H, const QPField& a) {
    const auto& m = H.mesh();
    Vec L = Vec::Zero(m.ne());
    for (int t = 0; t < m.nt(); ++t) {
        const TriGeom& g = H.geom()[t];
        for (int k = 0; k < 3; ++k) {
            int p = k, r = (k + 1) % 3;
            double s = m.tri_edge_signs[t][k];
            double acc = 0.0;
            for (int q = 0; q < TriQuadrature::NQ; ++q) {
                Vec2 w = (g.grad[r] * g.lambda[q][p] - g.grad[p] * g.lambda[q][r]) * s;
                acc += H.tri_rule().weight[q] * dot(w, a.v[t][q]);
            }
            L[m.tri_edges[t][k]] += acc * g.area;
        }
    }
    return L;
}

Vec vertex_grad_loads(const HodgeSystem& H, const QPScalar& f, const QPField& a) {
    const auto& m = H.mesh();
    Vec L = Vec::Zero(m.nv());
    for (int t = 0; t < m.nt(); ++t) {
        const TriGeom& g = H.geom()[t];
        for (int k = 0; k < 3; ++k) {
            double acc = 0.0;
            for (int q = 0; q < TriQuadrature::NQ; ++q)
                acc += H.tri_rule().weight[q] * f.v[t][q] * dot(g.grad[k], a.v[t][q]);
            L[m.triangles[t][k]] += acc * g.area;
        }
    }
    return L;
}

Cochain project_1form(const HodgeSystem& H, const QPField& a) {
    return Cochain(1, H.solve_M1(edge_loads(H, a)), H.mesh());
}

// --- forms operations ---------------------------------------------------------

Cochain d(const HodgeSystem& H, const Cochain& c) {
    c.check_shape(H.mesh());
    if (c.degree == 0) return Cochain(1, H.mesh().d0 * c.values, H.mesh());
    if (c.degree == 1) return Cochain(2, H.mesh().d1 * c.values, H.mesh());
    throw DegreeError("d of a top-degree cochain");
}

double inner(const HodgeSystem& H, const Cochain& a, const Cochain& b) {
    a.check_shape(H.mesh());
    require_compatible(a, b);
    switch (a.degree) {
        case 0: return a.values.dot(H.M0() * b.values);
        case 1: return a.values.dot(H.M1() * b.values);
        default: return a.values.dot(H.M2diag().cwiseProduct(b.values));
    }
}

double l2norm(const HodgeSystem& H, const Cochain& a) { return std::sqrt(std::max(0.0, inner(H, a, a))); }

Cochain codifferential(const HodgeSystem& H, const Cochain& c) {
    c.check_shape(H.mesh());
    if (c.degree == 1)
        return Cochain(0, H.solve_M0(H.mesh().d0.transpose() * (H.M1() * c.values)), H.mesh());
    if (c.degree == 2)
        return Cochain(1, H.solve_M1(H.mesh().d1.transpose() * H.M2diag().cwiseProduct(c.values)), H.mesh());
    throw DegreeError("codifferential of a 0-cochain");
}

double wedge_pair(const HodgeSystem& H, const Cochain& a, const Cochain& b) {
    a.check_shape(H.mesh());
    b.check_shape(H.mesh());
    if (a.degree + b.degree != 2) throw DegreeError("wedge_pair degrees must sum to 2");
    if (a.degree == 1)
        return integrate_cross(H, whitney_field(H, a), whitney_field(H, b));
    if (a.degree == 0) {
        QPScalar f = p1_values(H, a), g = p0_density(H, b);
        QPScalar prod;
        prod.v.resize(f.v.size());
        for (size_t t = 0; t < f.v.size(); ++t)
            for (int q = 0; q < TriQuadrature::NQ; ++q) prod.v[t][q] = f.v[t][q] * g.v[t][q];
        return integrate_scalar(H, prod);
    }
    // degree (2,0): a ^ b = b * a as densities.
    return wedge_pair(H, b, a);
}

Cochain star_rep(const HodgeSystem& H, const Cochain& c) {
    c.check_shape(H.mesh());
    const auto& m = H.mesh();
    if (c.degree == 0) {
        // 2-cochain with rows \int_T c.
        QPScalar f = p1_values(H, c);
        Vec s(m.nt());
        for (int t = 0; t < m.nt(); ++t) {
            double acc = 0.0;
            for (int q = 0; q < TriQuadrature::NQ; ++q) acc += H.tri_rule().weight[q] * f.v[t][q];
            s[t] = acc * H.geom()[t].area;
        }
        return Cochain(2, s, m);
    }
    if (c.degree == 1) {
        Vec rhs = edge_loads(H, rotated(whitney_field(H, c)));
        return Cochain(1, H.solve_M1(rhs), m);
    }
    // degree 2 -> 0: M0 s = (\int dens_c hat_i).
    QPScalar dens = p0_density(H, c);
    Vec rhs = Vec::Zero(m.nv());
    for (int t = 0; t < m.nt(); ++t) {
        const TriGeom& g = H.geom()[t];
        for (int k = 0; k < 3; ++k) {
            double acc = 0.0;
            for (int q = 0; q < TriQuadrature::NQ; ++q)
                acc += H.tri_rule().weight[q] * g.lambda[q][k] * dens.v[t][q];
            rhs[m.triangles[t][k]] += acc * g.area;
        }
    }
    return Cochain(0, H.solve_M0(rhs), m);
}

Vec trace(const HodgeSystem& H, const Cochain& c) {
    c.check_shape(H.mesh());
    const auto& m = H.mesh();
    if (c.degree == 0) {
        Vec t(m.boundary_vertices.size());
        for (size_t i = 0; i < m.boundary_vertices.size(); ++i) t[i] = c.values[m.boundary_vertices[i]];
        return t;
    }
    if (c.degree == 1) {
        Vec t(m.boundary.size());
        for (size_t i = 0; i < m.boundary.size(); ++i) {
            const auto& be = m.boundary[i];
            double sign = (m.edges[be.edge][0] == be.tail) ? 1.0 : -1.0;
            t[i] = sign * c.values[be.edge];
        }
        return t;
    }
    throw DegreeError("trace of a top-degree cochain");
}

Vec normal_trace(const HodgeSystem& H, const Cochain& v) {
    v.check_shape(H.mesh());
    if (v.degree != 1) throw DegreeError("normal_trace expects a 1-cochain");
    const auto& m = H.mesh();
    Vec flux(m.boundary.size());
    for (size_t i = 0; i < m.boundary.size(); ++i) {
        const auto& be = m.boundary[i];
        const TriGeom& g = H.geom()[be.tri];
        Vec2 a = m.positions[be.tail], b = m.positions[be.head];
        Vec2 dir = b - a;
        double len = norm(dir);
        Vec2 n{dir.y / len, -dir.x / len};  // outward: right of traversal
        // Barycentric description of the edge inside the owner triangle.
        const auto& tr = m.triangles[be.tri];
        int la = -1, lb = -1;
        for (int k = 0; k < 3; ++k) {
            if (tr[k] == be.tail) la = k;
            if (tr[k] == be.head) lb = k;
        }
        double acc = 0.0;
        for (int q = 0; q < EdgeQuadrature::NQ; ++q) {
            double s = H.edge_rule().t[q];
            std::array<double, 3> lam{0, 0, 0};
            lam[la] = 1.0 - s;
            lam[lb] = s;
            Vec2 u{0, 0};
            for (int k = 0; k < 3; ++k) {
                int p = k, r = (k + 1) % 3;
                double c = v.values[m.tri_edges[be.tri][k]] * m.tri_edge_signs[be.tri][k];
                u += (g.grad[r] * lam[p] - g.grad[p] * lam[r]) * c;
            }
            acc += H.edge_rule().weight[q] * dot(u, n);
        }
        flux[i] = acc * len;
    }
    return flux;
}

Vec weak_flux_loads(const HodgeSystem& H, const Cochain& v) {
    v.check_shape(H.mesh());
    if (v.degree != 1) throw DegreeError("weak_flux_loads expects a 1-cochain");
    return H.mesh().d0.transpose() * (H.M1() * v.values);
}

VectorProxy sharp(const HodgeSystem& H, const Cochain& c1) {
    QPField f = whitney_field(H, c1);
    VectorProxy x;
    x.geometry_id = H.mesh().geometry_id;
    x.per_tri.resize(f.v.size());
    for (size_t t = 0; t < f.v.size(); ++t) {
        Vec2 acc{0, 0};
        for (int q = 0; q < TriQuadrature::NQ; ++q) acc += f.v[t][q] * H.tri_rule().weight[q];
        x.per_tri[t] = acc;
    }
    return x;
}

Cochain flat(const HodgeSystem& H, const VectorProxy& x) {
    QPField f;
    f.v.resize(x.per_tri.size());
    for (size_t t = 0; t < x.per_tri.size(); ++t)
        for (int q = 0; q < TriQuadrature::NQ; ++q) f.v[t][q] = x.per_tri[t];
    return project_1form(H, f);
}

Cochain interior_product(const HodgeSystem& H, const VectorProxy& x, const Cochain& c2) {
    c2.check_shape(H.mesh());
    if (c2.degree != 2) throw DegreeError("interior_product expects a 2-cochain");
    QPScalar dens = p0_density(H, c2);
    QPField f;
    f.v.resize(x.per_tri.size());
    for (size_t t = 0; t < x.per_tri.size(); ++t)
        for (int q = 0; q < TriQuadrature::NQ; ++q) f.v[t][q] = rot90(x.per_tri[t]) * dens.v[t][q];
    return project_1form(H, f);
}

Cochain interior_product_star_route(const HodgeSystem& H, const VectorProxy& x, const Cochain& c2) {
    c2.check_shape(H.mesh());
    if (c2.degree != 2) throw DegreeError("interior_product expects a 2-cochain");
    QPScalar sc = p1_values(H, star_rep(H, c2));
    QPField f;
    f.v.resize(x.per_tri.size());
    for (size_t t = 0; t < x.per_tri.size(); ++t)
        for (int q = 0; q < TriQuadrature::NQ; ++q) f.v[t][q] = rot90(x.per_tri[t]) * sc.v[t][q];
    return project_1form(H, f);
}

double solenoidal_residual(const HodgeSystem& H, const Cochain& v) {
    Vec r = weak_flux_loads(H, v);
    const auto& m = H.mesh();
    double acc = 0.0;
    for (int i = 0; i < m.nv(); ++i)
        if (!m.vertex_on_boundary[i]) acc += r[i] * r[i];
    double nv = l2norm(H, v);
    return std::sqrt(acc) / (nv + 1e-300);
}

Cochain lie_bracket_1(const HodgeSystem& H, const Cochain& a, const Cochain& b, double solenoidal_tol) {
    a.check_shape(H.mesh());
    b.check_shape(H.mesh());
    if (a.degree != 1 || b.degree != 1) throw DegreeError("lie_bracket_1 expects 1-cochains");
    double ra = solenoidal_residual(H, a), rb = solenoidal_residual(H, b);
    if (ra > solenoidal_tol || rb > solenoidal_tol)
        throw DataError("lie_bracket_1: argument not solenoidal (residuals " + std::to_string(ra) +
                        ", " + std::to_string(rb) + ")");
    // Galerkin 2-cochain of a ^ b, then the adjoint codifferential.
    const auto& m = H.mesh();
    QPField ua = whitney_field(H, a), ub = whitney_field(H, b);
    Vec z(m.nt());
    for (int t = 0; t < m.nt(); ++t) {
        double acc = 0.0;
        for (int q = 0; q < TriQuadrature::NQ; ++q)
            acc += H.tri_rule().weight[q] * cross(ua.v[t][q], ub.v[t][q]);
        z[t] = acc * H.geom()[t].area;
    }
    Cochain dz = codifferential(H, Cochain(2, z, m));
    const double sign = -1.0;  // (-1)^(n-1) with n = 2
    dz.values *= sign;
    return dz;
}

Cochain project_interior_solenoidal(const HodgeSystem& H, const Cochain& v) {
    v.check_shape(H.mesh());
    const auto& m = H.mesh();
    Vec r = weak_flux_loads(H, v);
    for (int i = 0; i < m.nv(); ++i)
        if (m.vertex_on_boundary[i]) r[i] = 0.0;
    std::vector<uint8_t> mask(m.nv(), 0);
    for (int i = 0; i < m.nv(); ++i) mask[i] = m.vertex_on_boundary[i] ? 1 : 0;
    Vec q = H.solve_stiffness_dirichlet(mask, Vec::Zero(m.nv()), r);
    return Cochain(1, v.values - m.d0 * q, m);
}

Cochain project_coexact(const HodgeSystem& H, const Cochain& v) {
    v.check_shape(H.mesh());
    const auto& m = H.mesh();
    Vec q = H.solve_stiffness_zero_mean(weak_flux_loads(H, v));
    return Cochain(1, v.values - m.d0 * q, m);
}

void write_cochain_csv(const Cochain& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out.precision(17);
    out << "simplex_id,value\n";
    for (int i = 0; i < c.values.size(); ++i) out << i << "," << c.values[i] << "\n";
}

} // namespace ph
