#include <doctest.h>

#include "test_support.hpp"

using namespace phtest;

TEST_CASE("hamiltonian in velocity variables") {
    MeshPtr m = unit_square(4);
    HodgeSystem H(m);
    SurfaceState S = build_surface(*m);
    PhysParams P;
    P.tau = 0.3;

    SUBCASE("rest state with zero gravity keeps only the surface term") {
        HamiltonianValue hv = hamiltonian_v(H, Cochain::zero(1, *m), S, P);
        CHECK(hv.kinetic == 0.0);
        CHECK(hv.gravity == 0.0);
        CHECK(hv.total == doctest::Approx(P.tau / P.rho * 1.0).epsilon(1e-13));  // |Sigma| = 1
    }

    SUBCASE("uniform unit velocity on the unit square") {
        P.tau = 0.0;
        Cochain v = flat_uniform(H, {1, 0});
        HamiltonianValue hv = hamiltonian_v(H, v, S, P);
        CHECK(hv.total == doctest::Approx(0.5).epsilon(1e-10));
    }

    SUBCASE("gravity term equals the polygon integral of g0 y") {
        P.tau = 0.0;
        P.g0 = 2.5;
        HamiltonianValue hv = hamiltonian_v(H, Cochain::zero(1, *m), S, P);
        CHECK(hv.gravity == doctest::Approx(P.g0 * 0.5).epsilon(1e-12));  // int_y over unit square
    }

    SUBCASE("invalid parameters rejected") {
        PhysParams bad;
        bad.rho = -1.0;
        CHECK_THROWS_AS(hamiltonian_v(H, Cochain::zero(1, *m), S, bad), DataError);
    }
}

TEST_CASE("hamiltonian formulation equivalences") {
    MeshPtr m = unit_square(4);
    HodgeSystem H(m);
    SurfaceState S = build_surface(*m);
    PhysParams P;
    P.tau = 0.05;
    P.g0 = 1.0;
    Rng rng(21);

    Cochain eta = project_coexact(H, Cochain(1, rng.vec(m->ne()), *m));
    Vec phib = Vec::Zero(m->nv());
    for (int i : m->boundary_vertices) phib[i] = rng.uniform();
    Cochain phi = harmonic_lift(H, phib);
    Cochain v(1, d(H, phi).values + eta.values, *m);

    HamiltonianValue hv = hamiltonian_v(H, v, S, P);
    HamiltonianValue he = hamiltonian_eta(H, eta, phib, S, P);
    HamiltonianValue ho = hamiltonian_omega(H, d(H, eta), phib, S, P);
    CHECK(he.total == doctest::Approx(hv.total).epsilon(1e-9));
    CHECK(ho.total == doctest::Approx(hv.total).epsilon(1e-9));

    // boundary term of the eta form equals the Green identity value
    Cochain dphi = d(H, phi);
    double green = 0.0;
    Vec loads = weak_flux_loads(H, dphi);
    for (int i : m->boundary_vertices) green += phib[i] * loads[i];
    CHECK(0.5 * green == doctest::Approx(0.5 * inner(H, dphi, dphi)).epsilon(1e-9));

    // omega = 0 reduces to the potential-flow energy
    HamiltonianValue hp = hamiltonian_omega(H, Cochain::zero(2, *m), phib, S, P);
    CHECK(hp.kinetic == doctest::Approx(0.5 * inner(H, dphi, dphi)).epsilon(1e-10));

    // doubling omega quadruples the rotational term
    Cochain om = d(H, eta);
    Cochain om2(2, 2.0 * om.values, *m);
    double rot1 = hamiltonian_omega(H, om, phib, S, P).kinetic - hp.kinetic;
    double rot2 = hamiltonian_omega(H, om2, phib, S, P).kinetic - hp.kinetic;
    CHECK(rot2 == doctest::Approx(4.0 * rot1).epsilon(1e-9));

    // tangency precondition enforced
    Cochain not_tangent = flat_uniform(H, {0, 1});
    CHECK_THROWS_AS(hamiltonian_eta(H, not_tangent, phib, S, P), DataError);
}

TEST_CASE("curvature of the discrete surface") {
    SUBCASE("straight surface has zero curvature") {
        MeshPtr m = unit_square(4);
        SurfaceState S = build_surface(*m);
        for (const auto& sv : S.verts)
            if (!sv.corner) CHECK(std::abs(sv.kappa) <= 1e-14);
    }

    SUBCASE("regular polygon approximates the circle curvature at second order") {
        for (int n : {16, 32}) {
            MeshPtr m = make_disc(3, n, 2.0, true);
            SurfaceState S = build_surface(*m);
            double expected_exact = (M_PI / n) / (2.0 * std::sin(M_PI / n));  // analytic polygon value
            for (const auto& sv : S.verts) {
                CHECK(sv.kappa == doctest::Approx(expected_exact).epsilon(1e-10));
                CHECK(std::abs(sv.kappa - 0.5) <= 0.3 * std::pow(M_PI / n, 2));
            }
        }
    }

    SUBCASE("a dent flips the curvature sign") {
        MeshPtr m = unit_square(8);
        std::vector<Vec2> pos = m->positions;
        for (int i : m->sigma_interior_vertices)
            pos[i].y -= 0.02 * std::sin(M_PI * pos[i].x);  // bulging inward
        MeshPtr md = with_positions(*m, pos);
        SurfaceState S = build_surface(*md);
        for (const auto& sv : S.verts)
            if (!sv.corner && std::abs(md->positions[sv.v].x - 0.5) < 0.3) CHECK(sv.kappa < 0.0);
    }

    SUBCASE("degenerate edge is an error") {
        MeshPtr m = unit_square(2);
        std::vector<Vec2> pos = m->positions;
        // collapse one sigma edge
        pos[m->sigma_interior_vertices[0]] = pos[m->sigma_vertices[0]];
        CHECK_THROWS_AS(build_surface(*with_positions(*m, pos)), GeometryError);
    }
}

TEST_CASE("functional derivatives of the Hamiltonians") {
    MeshPtr m = unit_square(4);
    HodgeSystem H(m);
    SurfaceState S = build_surface(*m);
    PhysParams P;
    P.tau = 0.1;
    P.g0 = 1.0;
    Rng rng(22);

    SUBCASE("rest state surface derivative is the hydrostatic density") {
        FunctionalDerivs fd = func_derivs_H_v(H, Cochain::zero(1, *m), S, P);
        for (const auto& sv : S.verts) {
            if (sv.corner) continue;
            double expect = P.g0 * m->positions[sv.v].y + P.tau * sv.kappa / P.rho;
            CHECK(fd.sigma[sv.v] == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    SUBCASE("phi derivative equals the Neumann data of the reconstruction") {
        Vec phib = Vec::Zero(m->nv());
        for (int i : m->boundary_vertices) phib[i] = rng.uniform();
        Cochain eta = project_coexact(H, Cochain(1, rng.vec(m->ne()), *m));
        FunctionalDerivs fd = func_derivs_H_eta(H, eta, phib, S, P);
        Vec expect = weak_flux_loads(H, d(H, harmonic_lift(H, phib)));
        CHECK((fd.phi_loads - expect).norm() <= 1e-12 * (expect.norm() + 1.0));
    }

    SUBCASE("omega derivative satisfies d(star beta) -> star eta") {
        // weak-tested convergence of d(dH/domega) to the star of eta
        MeshPtr mm = unit_square(4);
        double prev = 0.0;
        for (int level = 0; level < 3; ++level) {
            HodgeSystem Hm(mm);
            SurfaceState Sm = build_surface(*mm);
            Cochain eta = project_coexact(
                Hm, project_field(Hm, [](Vec2 p) {
                    return Vec2{-M_PI * std::sin(M_PI * p.x) * std::cos(M_PI * p.y),
                                M_PI * std::cos(M_PI * p.x) * std::sin(M_PI * p.y)};
                }));
            Vec phib = Vec::Zero(mm->nv());
            FunctionalDerivs fd = func_derivs_H_omega(Hm, d(Hm, eta), phib, Sm, P);
            Cochain dc = d(Hm, fd.c);
            // compare against the rotated eta field under a smooth pairing
            Cochain target = project_1form(Hm, rotated(whitney_field(Hm, eta)));
            double err = std::abs(inner(Hm, Cochain(1, dc.values - target.values, *mm), target)) /
                         inner(Hm, target, target);
            if (level > 0) CHECK(err < prev / 1.5);
            prev = err;
            mm = refine_uniform(*mm);
        }
        CHECK(prev < 0.05);
    }

    SUBCASE("velocity derivative reproduces the directional derivative of H") {
        PhysParams P0;
        Cochain v = project_interior_solenoidal(H, Cochain(1, rng.vec(m->ne()), *m));
        Cochain dv = project_interior_solenoidal(H, Cochain(1, rng.vec(m->ne()), *m));
        double h_fd = 1e-5;
        Cochain vp(1, v.values + h_fd * dv.values, *m), vm(1, v.values - h_fd * dv.values, *m);
        double fd = (hamiltonian_v(H, vp, S, P0).total - hamiltonian_v(H, vm, S, P0).total) / (2 * h_fd);
        CHECK(fd == doctest::Approx(inner(H, v, dv)).epsilon(1e-9));
    }
}

TEST_CASE("shape derivative audits") {
    MeshPtr m = unit_square(8);
    HodgeSystem H(m);
    SurfaceState S = build_surface(*m);
    double h_fd = 1e-5;

    Vec dsig = Vec::Zero(m->nv());
    for (int i : m->sigma_interior_vertices) dsig[i] = 1.0;

    SUBCASE("area functional moved uniformly up") {
        Vec density = Vec::Zero(m->nv());
        for (int i : m->sigma_interior_vertices) density[i] = 1.0;
        ShapeAudit a = shape_derivative_audit(
            H, S, [](MeshPtr mm) { return mm->total_area(); }, density, dsig, h_fd, false);
        // movable width: the corner vertices stay, so one edge length is lost
        CHECK(a.paired_derivative == doctest::Approx(1.0 - 1.0 / 8.0).epsilon(1e-12));
        CHECK(a.residual <= 1e-6);
    }

    SUBCASE("surface length derivative density is the curvature") {
        MeshPtr disc = make_disc(4, 24, 1.0, true);
        HodgeSystem Hd(disc);
        SurfaceState Sd = build_surface(*disc);
        Vec density = Vec::Zero(disc->nv());
        Vec ds = Vec::Zero(disc->nv());
        Rng rng(23);
        for (const auto& sv : Sd.verts) {
            density[sv.v] = sv.kappa;
            ds[sv.v] = rng.uniform();
        }
        ShapeAudit a = shape_derivative_audit(
            Hd, Sd, [](MeshPtr mm) { return build_surface(*mm, false).length; }, density, ds, h_fd);
        // turning-angle lumping matches the exact polygon length gradient at
        // second order in the surface spacing (2 pi / 24 here)
        CHECK(a.residual <= 3e-3 * (std::abs(a.fd_derivative) + 1.0));
    }

    SUBCASE("gravity functional derivative density is the trace of the potential") {
        PhysParams P;
        P.g0 = 1.7;
        Vec density = Vec::Zero(m->nv());
        for (int i : m->sigma_interior_vertices) density[i] = P.g0 * m->positions[i].y;
        ShapeAudit a = shape_derivative_audit(
            H, S,
            [&P](MeshPtr mm) {
                HodgeSystem Hm(mm);
                return hamiltonian_v(Hm, Cochain::zero(1, *mm), build_surface(*mm, false), P).gravity;
            },
            density, dsig, h_fd);
        CHECK(a.residual <= 1e-6 * (std::abs(a.fd_derivative) + 1.0));
    }

    SUBCASE("central differences converge at second order in the step") {
        Vec density = Vec::Zero(m->nv());
        for (int i : m->sigma_interior_vertices) density[i] = 1.0;
        auto area = [](MeshPtr mm) { return mm->total_area(); };
        double r1 = shape_derivative_audit(H, S, area, density, dsig, 1e-3).residual;
        double r2 = shape_derivative_audit(H, S, area, density, dsig, 1e-4).residual;
        // the area functional is quadratic in positions: central differences
        // are exact up to roundoff for both steps
        CHECK(r1 <= 1e-9);
        CHECK(r2 <= 1e-9);
    }

    SUBCASE("tangling perturbation is a geometric error") {
        Vec density = Vec::Zero(m->nv());
        Vec down = Vec::Zero(m->nv());
        for (int i : m->sigma_interior_vertices) down[i] = -1.0;  // push far past the bottom
        CHECK_THROWS_AS(shape_derivative_audit(H, S, [](MeshPtr mm) { return mm->total_area(); },
                                               density, down, 10.0, false),
                        GeometryError);
    }
}

TEST_CASE("surface state structure") {
    MeshPtr m = unit_square(4);
    SurfaceState S = build_surface(*m);
    CHECK(S.length == doctest::Approx(1.0).epsilon(1e-14));
    int corners = 0;
    for (const auto& sv : S.verts) {
        corners += sv.corner;
        CHECK(norm(sv.normal) == doctest::Approx(1.0).epsilon(1e-14));
        if (!sv.corner) {
            CHECK(sv.normal.y == doctest::Approx(1.0).epsilon(1e-14));  // flat top points up
            CHECK(sv.mu_kin == doctest::Approx(0.25).epsilon(1e-13));   // half chord
            CHECK(sv.m_energy == doctest::Approx(0.25).epsilon(1e-13));
        } else {
            CHECK(std::abs(sv.motion_dir.y) == doctest::Approx(1.0).epsilon(1e-13));  // slides on the wall
        }
    }
    CHECK(corners == 2);

    // closed box has an empty surface
    SurfaceState empty = build_surface(*unit_square(3, false));
    CHECK(empty.verts.empty());
    CHECK(empty.length == 0.0);
}
