#include "ph/energetics.hpp"

#include <cmath>

namespace ph {

namespace {

Vec2 reflect_across(const Vec2& p, const Vec2& origin, const Vec2& unit_dir) {
    Vec2 r = p - origin;
    double along = dot(r, unit_dir);
    Vec2 proj = unit_dir * along;
    return origin + proj * 2.0 - r;
}

double turning_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
    Vec2 d1 = b - a, d2 = c - b;
    double l1 = norm(d1), l2 = norm(d2);
    if (l1 <= 0.0 || l2 <= 0.0) throw GeometryError("degenerate surface edge");
    double theta = std::atan2(cross(d1, d2), dot(d1, d2));
    return theta / (0.5 * (l1 + l2));
}

bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        double v = cross(q - p, r - p);
        return (v > 0) - (v < 0);
    };
    int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

} // namespace

SurfaceState build_surface(const SimplicialComplex& m, bool check_simple) {
    SurfaceState S;
    const int nb = static_cast<int>(m.boundary.size());

    // Boundary predecessor/successor per vertex, following loop order.
    std::map<int, int> next_of, prev_of;
    std::map<int, BoundaryLabel> out_label, in_label;
    for (int i = 0; i < nb; ++i) {
        const auto& be = m.boundary[i];
        next_of[be.tail] = be.head;
        prev_of[be.head] = be.tail;
        out_label[be.tail] = be.label;
        in_label[be.head] = be.label;
    }

    for (int i = 0; i < nb; ++i) {
        const auto& be = m.boundary[i];
        if (be.label == BoundaryLabel::Sigma) S.length += norm(m.positions[be.head] - m.positions[be.tail]);
        for (int v : {be.tail, be.head}) {
            if (!m.vertex_on_sigma[v] || S.index_of.count(v)) continue;
            SurfaceVertex sv;
            sv.v = v;
            sv.prev = prev_of.at(v);
            sv.next = next_of.at(v);
            sv.corner = !m.vertex_sigma_interior[v];
            const Vec2 xv = m.positions[v];
            const Vec2 xp = m.positions[sv.prev];
            const Vec2 xn = m.positions[sv.next];
            Vec2 chord = xn - xp;
            double cl = norm(chord);
            if (cl <= 0.0) throw GeometryError("degenerate surface chord at vertex " + std::to_string(v));
            sv.normal = Vec2{chord.y / cl, -chord.x / cl};

            bool sigma_out = out_label.at(v) == BoundaryLabel::Sigma;
            bool sigma_in = in_label.at(v) == BoundaryLabel::Sigma;
            sv.m_energy = 0.0;
            if (sigma_in) sv.m_energy += 0.5 * norm(xv - xp);
            if (sigma_out) sv.m_energy += 0.5 * norm(xn - xv);

            if (!sv.corner) {
                sv.motion_dir = sv.normal;
                sv.kappa = turning_curvature(xp, xv, xn);
            } else {
                // Slide along the adjacent wall; curvature from the
                // wall-mirrored Sigma neighbor (free-slip symmetry).
                Vec2 wall_neighbor = sigma_in ? xn : xp;   // the Gamma-side point
                Vec2 sigma_neighbor = sigma_in ? xp : xn;
                Vec2 wall = xv - wall_neighbor;
                double wl = norm(wall);
                if (wl <= 0.0) throw GeometryError("degenerate wall edge at corner " + std::to_string(v));
                Vec2 t{wall.x / wl, wall.y / wl};
                sv.motion_dir = t;
                Vec2 mirrored = reflect_across(sigma_neighbor, xv, t);
                if (sigma_in)
                    sv.kappa = turning_curvature(sigma_neighbor, xv, mirrored);
                else
                    sv.kappa = turning_curvature(mirrored, xv, sigma_neighbor);
            }
            // Exact enclosed-area derivative along the motion direction.
            Vec2 dA{0.5 * chord.y, -0.5 * chord.x};
            sv.mu_kin = dot(dA, sv.motion_dir);
            S.index_of[v] = static_cast<int>(S.verts.size());
            S.verts.push_back(sv);
        }
    }

    if (check_simple) {
        std::vector<std::array<int, 2>> segs;
        for (const auto& be : m.boundary)
            if (be.label == BoundaryLabel::Sigma) segs.push_back({be.tail, be.head});
        for (size_t i = 0; i < segs.size(); ++i) {
            for (size_t j = i + 1; j < segs.size(); ++j) {
                if (segs[i][0] == segs[j][0] || segs[i][0] == segs[j][1] || segs[i][1] == segs[j][0] ||
                    segs[i][1] == segs[j][1])
                    continue;
                if (segments_properly_intersect(m.positions[segs[i][0]], m.positions[segs[i][1]],
                                                m.positions[segs[j][0]], m.positions[segs[j][1]]))
                    throw GeometryError("free surface self-intersects");
            }
        }
    }
    return S;
}

Vec curvature(const SurfaceState& S) {
    Vec k(S.verts.size());
    for (size_t i = 0; i < S.verts.size(); ++i) k[i] = S.verts[i].kappa;
    return k;
}

namespace {

double gravity_energy(const HodgeSystem& H, const PhysParams& P) {
    if (P.g0 == 0.0) return 0.0;
    double acc = 0.0;
    for (int t = 0; t < H.mesh().nt(); ++t) {
        const TriGeom& g = H.geom()[t];
        double cy = (g.p[0].y + g.p[1].y + g.p[2].y) / 3.0;
        acc += g.area * cy;
    }
    return P.g0 * acc;
}

} // namespace

HamiltonianValue hamiltonian_v(const HodgeSystem& H, const Cochain& v, const SurfaceState& S,
                               const PhysParams& P) {
    P.validate();
    HamiltonianValue hv;
    hv.kinetic = 0.5 * inner(H, v, v);
    hv.gravity = gravity_energy(H, P);
    hv.surface = P.tau / P.rho * S.length;
    hv.total = hv.kinetic + hv.gravity + hv.surface;
    return hv;
}

HamiltonianValue hamiltonian_eta(const HodgeSystem& H, const Cochain& eta, const Vec& phi_boundary,
                                 const SurfaceState& S, const PhysParams& P) {
    P.validate();
    Vec r = weak_flux_loads(H, eta);
    double tangency = r.norm() / (l2norm(H, eta) + 1e-300);
    if (tangency > 1e-8)
        throw DataError("hamiltonian_eta: eta not tangent-solenoidal (residual " + std::to_string(tangency) + ")");
    Cochain phi = harmonic_lift(H, phi_boundary);
    Cochain dphi = d(H, phi);
    HamiltonianValue hv;
    hv.kinetic = 0.5 * inner(H, eta, eta) + 0.5 * inner(H, dphi, dphi);
    hv.gravity = gravity_energy(H, P);
    hv.surface = P.tau / P.rho * S.length;
    hv.total = hv.kinetic + hv.gravity + hv.surface;
    return hv;
}

HamiltonianValue hamiltonian_omega(const HodgeSystem& H, const Cochain& omega, const Vec& phi_boundary,
                                   const SurfaceState& S, const PhysParams& P) {
    P.validate();
    BetaSolution bs = solve_Nbeta(H, omega);
    Cochain phi = harmonic_lift(H, phi_boundary);
    Cochain dphi = d(H, phi);
    HamiltonianValue hv;
    hv.kinetic = 0.5 * inner(H, bs.beta, omega) + 0.5 * inner(H, dphi, dphi);
    hv.gravity = gravity_energy(H, P);
    hv.surface = P.tau / P.rho * S.length;
    hv.total = hv.kinetic + hv.gravity + hv.surface;
    return hv;
}

Vec2 vertex_field_value(const HodgeSystem& H, const Cochain& c1, int vertex) {
    c1.check_shape(H.mesh());
    const auto& m = H.mesh();
    Vec2 acc{0, 0};
    double wsum = 0.0;
    for (int t : m.vertex_tris[vertex]) {
        const TriGeom& g = H.geom()[t];
        int local = -1;
        for (int k = 0; k < 3; ++k)
            if (m.triangles[t][k] == vertex) local = k;
        std::array<double, 3> lam{0, 0, 0};
        lam[local] = 1.0;
        Vec2 u{0, 0};
        for (int k = 0; k < 3; ++k) {
            int p = k, r = (k + 1) % 3;
            double c = c1.values[m.tri_edges[t][k]] * m.tri_edge_signs[t][k];
            u += (g.grad[r] * lam[p] - g.grad[p] * lam[r]) * c;
        }
        acc += u * g.area;
        wsum += g.area;
    }
    return acc * (1.0 / wsum);
}

namespace {

// tr(1/2 <v,v> + Phi) + tau k / rho at Sigma-interior vertices.
Vec sigma_density_base(const HodgeSystem& H, const Cochain& v, const SurfaceState& S,
                       const PhysParams& P) {
    const auto& m = H.mesh();
    Vec out = Vec::Zero(m.nv());
    for (const auto& sv : S.verts) {
        if (sv.corner) continue;
        Vec2 u = vertex_field_value(H, v, sv.v);
        out[sv.v] = 0.5 * dot(u, u) + P.g0 * m.positions[sv.v].y + P.tau * sv.kappa / P.rho;
    }
    return out;
}

} // namespace

FunctionalDerivs func_derivs_H_v(const HodgeSystem& H, const Cochain& v, const SurfaceState& S,
                                 const PhysParams& P) {
    FunctionalDerivs fd;
    fd.form = Formulation::VSigma;
    fd.w = v;
    fd.sigma = sigma_density_base(H, v, S, P);
    return fd;
}

FunctionalDerivs func_derivs_H_eta(const HodgeSystem& H, const Cochain& eta, const Vec& phi_boundary,
                                   const SurfaceState& S, const PhysParams& P) {
    const auto& m = H.mesh();
    Cochain phi = harmonic_lift(H, phi_boundary);
    Cochain dphi = d(H, phi);
    Cochain v(1, dphi.values + eta.values, m);
    FunctionalDerivs fd;
    fd.form = Formulation::EtaPhi;
    fd.s = eta;
    fd.phi_loads = weak_flux_loads(H, dphi);
    fd.sigma = sigma_density_base(H, v, S, P);
    // (-1)^(n-1) <d phi, eta> correction, n = 2.
    for (const auto& sv : S.verts) {
        if (sv.corner) continue;
        fd.sigma[sv.v] -= dot(vertex_field_value(H, dphi, sv.v), vertex_field_value(H, eta, sv.v));
    }
    return fd;
}

FunctionalDerivs func_derivs_H_omega(const HodgeSystem& H, const Cochain& omega, const Vec& phi_boundary,
                                     const SurfaceState& S, const PhysParams& P) {
    const auto& m = H.mesh();
    BetaSolution bs = solve_Nbeta(H, omega);
    Cochain phi = harmonic_lift(H, phi_boundary);
    Cochain dphi = d(H, phi);
    Cochain v(1, dphi.values + bs.eta.values, m);
    FunctionalDerivs fd;
    fd.form = Formulation::OmegaPhi;
    fd.c = star_rep(H, bs.beta);
    for (int i : m.boundary_vertices) fd.c.values[i] = 0.0;  // V* trace condition
    fd.phi_loads = weak_flux_loads(H, dphi);
    fd.sigma = sigma_density_base(H, v, S, P);
    for (const auto& sv : S.verts) {
        if (sv.corner) continue;
        fd.sigma[sv.v] -= dot(vertex_field_value(H, dphi, sv.v), vertex_field_value(H, bs.eta, sv.v));
    }
    return fd;
}

MeshPtr harmonic_deform(const HodgeSystem& H, const std::vector<Vec2>& boundary_displacement) {
    const auto& m = H.mesh();
    if (boundary_displacement.size() != static_cast<size_t>(m.nv()))
        throw DataError("harmonic_deform expects vertex-length displacement");
    std::vector<uint8_t> mask(m.nv(), 0);
    Vec bx = Vec::Zero(m.nv()), by = Vec::Zero(m.nv());
    for (int i = 0; i < m.nv(); ++i) {
        if (m.vertex_on_boundary[i]) {
            mask[i] = 1;
            bx[i] = boundary_displacement[i].x;
            by[i] = boundary_displacement[i].y;
        }
    }
    Vec ux = H.solve_stiffness_dirichlet(mask, bx, Vec::Zero(m.nv()));
    Vec uy = H.solve_stiffness_dirichlet(mask, by, Vec::Zero(m.nv()));
    std::vector<Vec2> pos(m.positions);
    for (int i = 0; i < m.nv(); ++i) pos[i] += Vec2{ux[i], uy[i]};
    return with_positions(m, std::move(pos));
}

ShapeAudit shape_derivative_audit(const HodgeSystem& H, const SurfaceState& S,
                                  const std::function<double(MeshPtr)>& functional,
                                  const Vec& sigma_density, const Vec& dsigma, double h_fd,
                                  bool central) {
    const auto& m = H.mesh();
    if (!(h_fd > 0.0)) throw DataError("shape derivative step must be positive");

    auto displaced = [&](double eps) {
        std::vector<Vec2> disp(m.nv(), Vec2{0, 0});
        for (const auto& sv : S.verts) {
            if (sv.corner) continue;
            disp[sv.v] = sv.normal * (eps * dsigma[sv.v]);
        }
        return harmonic_deform(H, disp);
    };

    ShapeAudit audit;
    double base = functional(H.mesh_ptr());
    if (central) {
        audit.fd_derivative = (functional(displaced(h_fd)) - functional(displaced(-h_fd))) / (2.0 * h_fd);
    } else {
        audit.fd_derivative = (functional(displaced(h_fd)) - base) / h_fd;
    }
    double paired = 0.0;
    for (const auto& sv : S.verts) {
        if (sv.corner) continue;
        paired += sigma_density[sv.v] * dsigma[sv.v] * sv.m_energy;
    }
    audit.paired_derivative = paired;
    audit.residual = std::abs(audit.fd_derivative - paired);
    return audit;
}

} // namespace ph
