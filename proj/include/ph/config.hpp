#pragma once

#include <string>

#include "ph/dynamics.hpp"

namespace ph {

struct RunConfig {
    Scenario scenario;
    std::string output_dir = ".";
    std::string prefix = "run";
    uint64_t seed = 1;
    double energy_drift_threshold = 1e-4;
    double power_residual_threshold = 1e-3;
};

// Flat key-value text: `key = value` lines under `[scenario]`, `[params]`,
// `[inflow]`, `[output]` sections; '#' comments.
RunConfig parse_config(const std::string& path);

} // namespace ph
