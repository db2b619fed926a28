#include "ph/meshgen.hpp"

#include <cmath>

namespace ph {

MeshPtr make_rect(int nx, int ny, double lx, double ly, bool sigma_top) {
    if (nx < 1 || ny < 1) throw MeshError("rect mesh needs nx, ny >= 1");
    std::vector<Vec2> pos;
    pos.reserve((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            pos.emplace_back(lx * i / nx, ly * j / ny);
    auto vid = [&](int i, int j) { return j * (nx + 1) + i; };

    std::vector<std::array<int, 3>> tris;
    tris.reserve(2 * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            // Alternate the diagonal so the mesh has no preferred direction.
            if ((i + j) % 2 == 0) {
                tris.push_back({a, b, c});
                tris.push_back({a, c, d});
            } else {
                tris.push_back({a, b, d});
                tris.push_back({b, c, d});
            }
        }
    }

    std::vector<std::tuple<int, int, BoundaryLabel>> labels;
    for (int i = 0; i < nx; ++i) {
        labels.emplace_back(vid(i, 0), vid(i + 1, 0), BoundaryLabel::Gamma);
        labels.emplace_back(vid(i, ny), vid(i + 1, ny),
                            sigma_top ? BoundaryLabel::Sigma : BoundaryLabel::Gamma);
    }
    for (int j = 0; j < ny; ++j) {
        labels.emplace_back(vid(0, j), vid(0, j + 1), BoundaryLabel::Gamma);
        labels.emplace_back(vid(nx, j), vid(nx, j + 1), BoundaryLabel::Gamma);
    }
    return build_complex(std::move(pos), std::move(tris), labels);
}

MeshPtr make_annulus(int nr, int ntheta, double r0, double r1) {
    if (nr < 1 || ntheta < 3 || r0 <= 0 || r1 <= r0) throw MeshError("bad annulus parameters");
    std::vector<Vec2> pos;
    for (int j = 0; j <= nr; ++j) {
        double r = r0 + (r1 - r0) * j / nr;
        for (int i = 0; i < ntheta; ++i) {
            double th = 2.0 * M_PI * i / ntheta;
            pos.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    }
    auto vid = [&](int i, int j) { return j * ntheta + ((i % ntheta) + ntheta) % ntheta; };
    std::vector<std::array<int, 3>> tris;
    for (int j = 0; j < nr; ++j) {
        for (int i = 0; i < ntheta; ++i) {
            int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            tris.push_back({a, b, c});
            tris.push_back({a, c, d});
        }
    }
    for (auto& t : tris) std::swap(t[1], t[2]);  // polar layout builds clockwise cells
    std::vector<std::tuple<int, int, BoundaryLabel>> labels;
    for (int i = 0; i < ntheta; ++i) {
        labels.emplace_back(vid(i, 0), vid(i + 1, 0), BoundaryLabel::Gamma);
        labels.emplace_back(vid(i, nr), vid(i + 1, nr), BoundaryLabel::Gamma);
    }
    return build_complex(std::move(pos), std::move(tris), labels);
}

MeshPtr make_disc(int nrings, int ntheta, double r, bool sigma) {
    if (nrings < 1 || ntheta < 3 || r <= 0) throw MeshError("bad disc parameters");
    std::vector<Vec2> pos;
    pos.emplace_back(0.0, 0.0);
    for (int j = 1; j <= nrings; ++j) {
        double rj = r * j / nrings;
        for (int i = 0; i < ntheta; ++i) {
            double th = 2.0 * M_PI * i / ntheta;
            pos.emplace_back(rj * std::cos(th), rj * std::sin(th));
        }
    }
    auto vid = [&](int i, int j) {
        if (j == 0) return 0;
        return 1 + (j - 1) * ntheta + ((i % ntheta) + ntheta) % ntheta;
    };
    std::vector<std::array<int, 3>> tris;
    for (int i = 0; i < ntheta; ++i)
        tris.push_back({0, vid(i, 1), vid(i + 1, 1)});
    for (int j = 1; j < nrings; ++j) {
        for (int i = 0; i < ntheta; ++i) {
            int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            tris.push_back({a, c, b});
            tris.push_back({a, d, c});
        }
    }
    std::vector<std::tuple<int, int, BoundaryLabel>> labels;
    for (int i = 0; i < ntheta; ++i)
        labels.emplace_back(vid(i, nrings), vid(i + 1, nrings),
                            sigma ? BoundaryLabel::Sigma : BoundaryLabel::Gamma);
    return build_complex(std::move(pos), std::move(tris), labels);
}

} // namespace ph
