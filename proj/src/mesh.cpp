#include "ph/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace ph {

namespace {

std::atomic<uint64_t> next_id{1};

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) { parent[a] = parent[parent[a]]; a = parent[a]; }
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

double SimplicialComplex::total_area() const {
    double a = 0.0;
    for (int t = 0; t < nt(); ++t) a += tri_area(t);
    return a;
}

MeshPtr build_complex(std::vector<Vec2> positions,
                      std::vector<std::array<int, 3>> triangles,
                      const std::vector<std::tuple<int, int, BoundaryLabel>>& boundary_labels) {
    auto m = std::make_shared<SimplicialComplex>();
    m->positions = std::move(positions);
    m->triangles = std::move(triangles);
    const int nv = m->nv();
    const int nt = m->nt();

    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            int v = m->triangles[t][k];
            if (v < 0 || v >= nv)
                throw MeshError("triangle " + std::to_string(t) + " references vertex " + std::to_string(v));
        }
        if (m->tri_area(t) <= 0.0)
            throw MeshError("triangle " + std::to_string(t) + " is not counterclockwise (orientation error)");
    }

    // Global edge table, canonical storage a < b.
    std::map<std::pair<int, int>, int> edge_index;
    m->tri_edges.assign(nt, {-1, -1, -1});
    m->tri_edge_signs.assign(nt, {0, 0, 0});
    for (int t = 0; t < nt; ++t) {
        const auto& tr = m->triangles[t];
        for (int k = 0; k < 3; ++k) {
            int p = tr[k], q = tr[(k + 1) % 3];
            if (p == q) throw MeshError("degenerate triangle " + std::to_string(t));
            auto key = std::minmax(p, q);
            auto it = edge_index.find(key);
            int e;
            if (it == edge_index.end()) {
                e = static_cast<int>(m->edges.size());
                edge_index.emplace(key, e);
                m->edges.push_back({key.first, key.second});
            } else {
                e = it->second;
            }
            m->tri_edges[t][k] = e;
            m->tri_edge_signs[t][k] = (p < q) ? 1 : -1;
        }
    }
    const int ne = m->ne();

    // Incidence counts and manifold/orientation validation.
    std::vector<int> count(ne, 0);
    std::vector<int> owner(ne, -1);          // one incident triangle
    std::vector<int> induced_tail(ne, -1);   // direction induced by first owner
    for (int t = 0; t < nt; ++t) {
        const auto& tr = m->triangles[t];
        for (int k = 0; k < 3; ++k) {
            int e = m->tri_edges[t][k];
            int p = tr[k];
            if (count[e] == 0) {
                owner[e] = t;
                induced_tail[e] = p;
            } else if (count[e] == 1) {
                if (induced_tail[e] == p)
                    throw MeshError("inconsistent orientation across edge (" +
                                    std::to_string(m->edges[e][0]) + "," + std::to_string(m->edges[e][1]) + ")");
            } else {
                throw MeshError("non-manifold edge (" + std::to_string(m->edges[e][0]) + "," +
                                std::to_string(m->edges[e][1]) + ") with more than two triangles");
            }
            ++count[e];
        }
    }

    // d0: row e has -1 at tail(a), +1 at head(b) for stored orientation a->b.
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(2 * ne);
        for (int e = 0; e < ne; ++e) {
            trip.emplace_back(e, m->edges[e][0], -1.0);
            trip.emplace_back(e, m->edges[e][1], 1.0);
        }
        m->d0.resize(ne, nv);
        m->d0.setFromTriplets(trip.begin(), trip.end());
    }
    // d1: row t has the relative signs of its three edges.
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(3 * nt);
        for (int t = 0; t < nt; ++t)
            for (int k = 0; k < 3; ++k)
                trip.emplace_back(t, m->tri_edges[t][k], static_cast<double>(m->tri_edge_signs[t][k]));
        m->d1.resize(nt, ne);
        m->d1.setFromTriplets(trip.begin(), trip.end());
    }

    // Boundary edges and labels.
    std::map<std::pair<int, int>, BoundaryLabel> labels;
    for (const auto& [i, j, lab] : boundary_labels) {
        auto key = std::minmax(i, j);
        auto it = edge_index.find(key);
        if (it == edge_index.end())
            throw MeshError("boundary label references nonexistent edge (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
        if (count[it->second] != 1)
            throw MeshError("boundary label on interior edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
        labels[key] = lab;
    }

    m->edge_to_boundary.assign(ne, -1);
    std::vector<BoundaryEdge> raw;
    for (int e = 0; e < ne; ++e) {
        if (count[e] != 1) continue;
        auto key = std::make_pair(m->edges[e][0], m->edges[e][1]);
        auto it = labels.find(key);
        if (it == labels.end())
            throw MeshError("unlabeled boundary edge (" + std::to_string(key.first) + "," +
                            std::to_string(key.second) + ")");
        BoundaryEdge be;
        be.edge = e;
        be.tri = owner[e];
        be.tail = induced_tail[e];
        be.head = (m->edges[e][0] == be.tail) ? m->edges[e][1] : m->edges[e][0];
        be.label = it->second;
        raw.push_back(be);
    }

    // Each boundary vertex must have exactly two incident boundary edges;
    // then walk the closed loops following the induced orientation.
    std::map<int, std::vector<int>> out_of, at;
    for (size_t i = 0; i < raw.size(); ++i) {
        out_of[raw[i].tail].push_back(static_cast<int>(i));
        at[raw[i].tail].push_back(static_cast<int>(i));
        at[raw[i].head].push_back(static_cast<int>(i));
    }
    for (const auto& [v, inc] : at)
        if (inc.size() != 2)
            throw MeshError("boundary vertex " + std::to_string(v) + " has " + std::to_string(inc.size()) +
                            " incident boundary edges (boundary must form closed curves)");

    std::vector<uint8_t> used(raw.size(), 0);
    for (size_t start = 0; start < raw.size(); ++start) {
        if (used[start]) continue;
        m->loop_offsets.push_back(static_cast<int>(m->boundary.size()));
        int cur = static_cast<int>(start);
        while (!used[cur]) {
            used[cur] = 1;
            m->edge_to_boundary[raw[cur].edge] = static_cast<int>(m->boundary.size());
            m->boundary.push_back(raw[cur]);
            int nxt = -1;
            for (int cand : out_of[raw[cur].head])
                if (!used[cand]) nxt = cand;
            if (nxt < 0) break;
            cur = nxt;
        }
    }
    m->loop_offsets.push_back(static_cast<int>(m->boundary.size()));

    // Vertex classifications; corner vertices (Sigma meets Gamma) belong to Gamma.
    m->vertex_on_boundary.assign(nv, 0);
    m->vertex_on_sigma.assign(nv, 0);
    m->vertex_sigma_interior.assign(nv, 0);
    std::vector<uint8_t> touches_gamma(nv, 0);
    for (const auto& be : m->boundary) {
        m->vertex_on_boundary[be.tail] = m->vertex_on_boundary[be.head] = 1;
        if (be.label == BoundaryLabel::Sigma) {
            m->vertex_on_sigma[be.tail] = m->vertex_on_sigma[be.head] = 1;
        } else {
            touches_gamma[be.tail] = touches_gamma[be.head] = 1;
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (m->vertex_on_boundary[v]) m->boundary_vertices.push_back(v);
        if (m->vertex_on_sigma[v]) {
            m->sigma_vertices.push_back(v);
            if (!touches_gamma[v]) {
                m->vertex_sigma_interior[v] = 1;
                m->sigma_interior_vertices.push_back(v);
            }
        }
    }

    m->vertex_tris.assign(nv, {});
    for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) m->vertex_tris[m->triangles[t][k]].push_back(t);

    m->topology_id = next_id.fetch_add(1);
    m->geometry_id = next_id.fetch_add(1);
    return m;
}

namespace {

// Token stream that skips '#' comments; tolerates CRLF endings.
std::vector<std::string> tokenize(std::istream& in) {
    std::vector<std::string> toks;
    std::string line;
    while (std::getline(in, line)) {
        for (char& c : line)
            if (c == '\r' || c == '\t') c = ' ';
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string t;
        while (ls >> t) toks.push_back(t);
    }
    return toks;
}

} // namespace

MeshPtr load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open '" + path + "'");
    auto toks = tokenize(in);
    size_t k = 0;
    auto need = [&](const char* what) -> const std::string& {
        if (k >= toks.size()) throw MeshError(std::string("unexpected end of file, expected ") + what);
        return toks[k++];
    };
    auto need_int = [&](const char* what) {
        const std::string& s = need(what);
        try { return std::stoi(s); } catch (...) { throw MeshError(std::string("bad integer '") + s + "' for " + what); }
    };
    auto need_double = [&](const char* what) {
        const std::string& s = need(what);
        try { return std::stod(s); } catch (...) { throw MeshError(std::string("bad number '") + s + "' for " + what); }
    };

    if (need("header") != "ph-mesh" || need_int("format version") != 1)
        throw MeshError("missing 'ph-mesh 1' header in '" + path + "'");

    if (need("section") != "vertices") throw MeshError("expected 'vertices' section");
    int nv = need_int("vertex count");
    std::vector<Vec2> pos(nv);
    for (int i = 0; i < nv; ++i) {
        pos[i].x = need_double("vertex x");
        pos[i].y = need_double("vertex y");
    }

    if (need("section") != "triangles") throw MeshError("expected 'triangles' section");
    int nt = need_int("triangle count");
    std::vector<std::array<int, 3>> tris(nt);
    for (int t = 0; t < nt; ++t)
        for (int j = 0; j < 3; ++j) tris[t][j] = need_int("triangle vertex");

    if (need("section") != "boundary") throw MeshError("expected 'boundary' section");
    int nb = need_int("boundary count");
    std::vector<std::tuple<int, int, BoundaryLabel>> labels;
    labels.reserve(nb);
    for (int b = 0; b < nb; ++b) {
        int i = need_int("boundary vertex"), j = need_int("boundary vertex");
        std::string lab = need("boundary label");
        if (lab == "SIGMA") labels.emplace_back(i, j, BoundaryLabel::Sigma);
        else if (lab == "GAMMA") labels.emplace_back(i, j, BoundaryLabel::Gamma);
        else throw MeshError("unknown boundary label '" + lab + "'");
    }
    if (k != toks.size()) throw MeshError("trailing tokens after boundary section");

    return build_complex(std::move(pos), std::move(tris), labels);
}

void save_mesh(const SimplicialComplex& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write '" + path + "'");
    out.precision(17);
    out << "ph-mesh 1\n";
    out << "vertices " << m.nv() << "\n";
    for (const auto& p : m.positions) out << p.x << " " << p.y << "\n";
    out << "triangles " << m.nt() << "\n";
    for (const auto& t : m.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "boundary " << m.boundary.size() << "\n";
    for (const auto& be : m.boundary)
        out << be.tail << " " << be.head << " "
            << (be.label == BoundaryLabel::Sigma ? "SIGMA" : "GAMMA") << "\n";
}

MeshPtr refine_uniform(const SimplicialComplex& m) {
    std::vector<Vec2> pos = m.positions;
    pos.reserve(m.nv() + m.ne());
    std::vector<int> midpoint(m.ne());
    for (int e = 0; e < m.ne(); ++e) {
        midpoint[e] = static_cast<int>(pos.size());
        pos.push_back((m.positions[m.edges[e][0]] + m.positions[m.edges[e][1]]) * 0.5);
    }
    std::vector<std::array<int, 3>> tris;
    tris.reserve(4 * m.nt());
    for (int t = 0; t < m.nt(); ++t) {
        const auto& tr = m.triangles[t];
        int m01 = midpoint[m.tri_edges[t][0]];
        int m12 = midpoint[m.tri_edges[t][1]];
        int m20 = midpoint[m.tri_edges[t][2]];
        tris.push_back({tr[0], m01, m20});
        tris.push_back({m01, tr[1], m12});
        tris.push_back({m20, m12, tr[2]});
        tris.push_back({m01, m12, m20});
    }
    std::vector<std::tuple<int, int, BoundaryLabel>> labels;
    for (const auto& be : m.boundary) {
        int mid = midpoint[be.edge];
        labels.emplace_back(be.tail, mid, be.label);
        labels.emplace_back(mid, be.head, be.label);
    }
    return build_complex(std::move(pos), std::move(tris), labels);
}

std::pair<int, int> betti_numbers(const SimplicialComplex& m) {
    UnionFind uf(m.nv());
    for (const auto& e : m.edges) uf.unite(e[0], e[1]);
    std::vector<int> roots;
    for (int v = 0; v < m.nv(); ++v) roots.push_back(uf.find(v));
    std::sort(roots.begin(), roots.end());
    int b0 = static_cast<int>(std::unique(roots.begin(), roots.end()) - roots.begin());
    // Every component of an embedded planar triangulation has boundary, so
    // b2 = 0 and b1 follows from the Euler characteristic.
    int chi = m.nv() - m.ne() + m.nt();
    int b1 = b0 - chi;
    return {b0, b1};
}

MeshPtr with_positions(const SimplicialComplex& m, std::vector<Vec2> positions) {
    if (positions.size() != m.positions.size()) throw GeometryError("position count mismatch");
    auto out = std::make_shared<SimplicialComplex>(m);
    out->positions = std::move(positions);
    for (int t = 0; t < out->nt(); ++t)
        if (out->tri_area(t) <= 0.0)
            throw GeometryError("triangle " + std::to_string(t) + " inverted by deformation");
    out->geometry_id = next_id.fetch_add(1);
    return out;
}

} // namespace ph
