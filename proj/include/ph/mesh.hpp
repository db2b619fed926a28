#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "ph/error.hpp"

namespace ph {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }
// Counterclockwise rotation by 90 degrees.
inline Vec2 rot90(const Vec2& a) { return {-a.y, a.x}; }

enum class BoundaryLabel : uint8_t { Sigma, Gamma };

// One boundary edge with the orientation induced by its owner triangle
// (tail -> head follows the counterclockwise boundary traversal).
struct BoundaryEdge {
    int edge = -1;   // global edge index
    int tail = -1, head = -1;
    int tri = -1;    // owner triangle
    BoundaryLabel label = BoundaryLabel::Gamma;
};

// Oriented 2D triangulation with integer incidence operators and a labeled
// Sigma/Gamma boundary partition. Immutable after construction; geometric
// copies share topology.
class SimplicialComplex {
public:
    std::vector<Vec2> positions;
    std::vector<std::array<int, 2>> edges;      // vertex pairs, stored a < b
    std::vector<std::array<int, 3>> triangles;  // counterclockwise

    // Signed integer incidence operators: d0 (edges x vertices),
    // d1 (triangles x edges). d1 * d0 = 0 exactly.
    SpMat d0, d1;

    // Per triangle: global edge index and relative sign for the local edges
    // (v0,v1), (v1,v2), (v2,v0).
    std::vector<std::array<int, 3>> tri_edges;
    std::vector<std::array<int, 3>> tri_edge_signs;

    std::vector<BoundaryEdge> boundary;         // in boundary-loop order
    std::vector<int> loop_offsets;              // boundary loop partition
    std::vector<int> edge_to_boundary;          // edge index -> boundary index or -1

    std::vector<std::vector<int>> vertex_tris;  // incident triangles per vertex

    std::vector<uint8_t> vertex_on_boundary;
    std::vector<uint8_t> vertex_on_sigma;        // incident to >= 1 Sigma edge
    std::vector<uint8_t> vertex_sigma_interior;  // every incident boundary edge is Sigma
    std::vector<int> boundary_vertices;          // sorted vertex ids
    std::vector<int> sigma_interior_vertices;    // sorted vertex ids
    std::vector<int> sigma_vertices;             // sorted, includes corners

    uint64_t topology_id = 0;  // shared by geometric copies
    uint64_t geometry_id = 0;  // bumped on every deformation

    int nv() const { return static_cast<int>(positions.size()); }
    int ne() const { return static_cast<int>(edges.size()); }
    int nt() const { return static_cast<int>(triangles.size()); }

    double tri_area(int t) const {
        const auto& tr = triangles[t];
        return 0.5 * cross(positions[tr[1]] - positions[tr[0]], positions[tr[2]] - positions[tr[0]]);
    }
    double total_area() const;

    bool same_topology(const SimplicialComplex& o) const { return topology_id == o.topology_id; }
};

using MeshPtr = std::shared_ptr<const SimplicialComplex>;

// Build a validated complex from vertex positions, triangle tuples, and
// boundary labels given as (i, j, label) on unordered vertex pairs.
MeshPtr build_complex(std::vector<Vec2> positions,
                      std::vector<std::array<int, 3>> triangles,
                      const std::vector<std::tuple<int, int, BoundaryLabel>>& boundary_labels);

// ASCII mesh format: "ph-mesh 1" header, then "vertices N", "triangles M",
// "boundary K" sections. '#' starts a comment.
MeshPtr load_mesh(const std::string& path);
void save_mesh(const SimplicialComplex& m, const std::string& path);

// Split every triangle into four by edge midpoints; boundary labels inherited.
MeshPtr refine_uniform(const SimplicialComplex& m);

// (b0, b1) from the incidence structure.
std::pair<int, int> betti_numbers(const SimplicialComplex& m);

// Same topology, new vertex positions (triangle orientations re-validated).
MeshPtr with_positions(const SimplicialComplex& m, std::vector<Vec2> positions);

} // namespace ph
