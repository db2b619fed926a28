#pragma once

#include <string>

#include "ph/mesh.hpp"

namespace ph {

// Real vector indexed by the oriented k-simplices of one complex.
struct Cochain {
    int degree = 0;
    Vec values;
    uint64_t topology_id = 0;

    Cochain() = default;
    Cochain(int deg, Vec vals, const SimplicialComplex& m)
        : degree(deg), values(std::move(vals)), topology_id(m.topology_id) {
        check_shape(m);
    }
    static Cochain zero(int deg, const SimplicialComplex& m) {
        int n = deg == 0 ? m.nv() : deg == 1 ? m.ne() : m.nt();
        return Cochain(deg, Vec::Zero(n), m);
    }

    void check_shape(const SimplicialComplex& m) const {
        if (degree < 0 || degree > 2) throw DegreeError("cochain degree must be 0, 1 or 2");
        int n = degree == 0 ? m.nv() : degree == 1 ? m.ne() : m.nt();
        if (values.size() != n) throw DegreeError("cochain length does not match simplex count");
        if (topology_id != m.topology_id) throw DegreeError("cochain belongs to a different mesh");
    }
};

inline void require_compatible(const Cochain& a, const Cochain& b) {
    if (a.degree != b.degree) throw DegreeError("cochain degrees differ");
    if (a.topology_id != b.topology_id) throw DegreeError("cochains from different meshes");
}

// Debug serialization: one "simplex_id,value" row per entry.
void write_cochain_csv(const Cochain& c, const std::string& path);

} // namespace ph
