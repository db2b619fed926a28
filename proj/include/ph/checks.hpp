#pragma once

#include <string>
#include <vector>

#include "ph/dirac.hpp"

namespace ph {

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

std::vector<CheckResult> check_forms(MeshPtr mesh, uint64_t seed);
std::vector<CheckResult> check_elliptic(MeshPtr mesh, uint64_t seed);
std::vector<CheckResult> check_energetics(MeshPtr mesh, uint64_t seed);
std::vector<CheckResult> check_brackets(MeshPtr mesh, uint64_t seed);
// dirac additionally emits the per-pair audit rows when audit_csv is nonempty
std::vector<CheckResult> check_dirac(MeshPtr mesh, uint64_t seed, const std::string& audit_csv);

void write_checks_csv(const std::vector<CheckResult>& results, const std::string& path);
bool all_pass(const std::vector<CheckResult>& results);

} // namespace ph
