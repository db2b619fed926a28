#pragma once

#include <stdexcept>
#include <string>

namespace ph {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mesh file could not be parsed or fails a structural invariant.
class MeshError : public Error {
public:
    explicit MeshError(const std::string& msg) : Error("mesh: " + msg) {}
};

// Degree/mesh mismatch between cochains or against an operator.
class DegreeError : public Error {
public:
    explicit DegreeError(const std::string& msg) : Error("degree: " + msg) {}
};

// Linear solver failed or exceeded its residual tolerance.
class SolverError : public Error {
public:
    explicit SolverError(const std::string& msg) : Error("solver: " + msg) {}
};

// Neumann data with nonzero net flux, non-solenoidal input, and similar.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error("data: " + msg) {}
};

// Mesh deformation produced tangled/inverted geometry.
class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& msg) : Error("geometry: " + msg) {}
};

} // namespace ph
