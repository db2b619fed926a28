#include "ph/config.hpp"

#include <fstream>
#include <sstream>

namespace ph {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        return std::stod(v);
    } catch (...) {
        throw DataError("config: bad number '" + v + "' for " + key);
    }
}

int to_int(const std::string& key, const std::string& v) {
    try {
        return std::stoi(v);
    } catch (...) {
        throw DataError("config: bad integer '" + v + "' for " + key);
    }
}

} // namespace

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("config: cannot open '" + path + "'");
    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw DataError("config: bad section at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError("config: expected key = value at line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));

        if (section == "scenario") {
            if (key == "mesh") cfg.scenario.mesh_path = val;
            else if (key == "model") cfg.scenario.model = val;
            else if (key == "init") cfg.scenario.init = val;
            else if (key == "amplitude") cfg.scenario.amplitude = to_double(key, val);
            else if (key == "mode") cfg.scenario.mode = to_int(key, val);
            else if (key == "dt") cfg.scenario.dt = to_double(key, val);
            else if (key == "t_end") cfg.scenario.t_end = to_double(key, val);
            else if (key == "output_every") cfg.scenario.output_every = to_int(key, val);
            else if (key == "sigma_snapshots") cfg.scenario.sigma_snapshots = to_int(key, val) != 0;
            else if (key == "fp_tol") cfg.scenario.fp_tol = to_double(key, val);
            else if (key == "fp_maxit") cfg.scenario.fp_maxit = to_int(key, val);
            else if (key == "integrator") {
                if (val == "implicit-midpoint") cfg.scenario.integrator = Integrator::ImplicitMidpoint;
                else if (val == "rk4") cfg.scenario.integrator = Integrator::RK4;
                else throw DataError("config: unknown integrator '" + val + "'");
            } else throw DataError("config: unknown key '" + key + "' in [scenario]");
        } else if (section == "params") {
            if (key == "rho") cfg.scenario.params.rho = to_double(key, val);
            else if (key == "tau") cfg.scenario.params.tau = to_double(key, val);
            else if (key == "g0") cfg.scenario.params.g0 = to_double(key, val);
            else throw DataError("config: unknown key '" + key + "' in [params]");
        } else if (section == "inflow") {
            if (key == "amplitude") cfg.scenario.inflow.amplitude = to_double(key, val);
            else if (key == "t_center") cfg.scenario.inflow.t_center = to_double(key, val);
            else if (key == "t_width") cfg.scenario.inflow.t_width = to_double(key, val);
            else if (key == "on") cfg.scenario.inflow.on = val;
            else throw DataError("config: unknown key '" + key + "' in [inflow]");
        } else if (section == "output") {
            if (key == "dir") cfg.output_dir = val;
            else if (key == "prefix") cfg.prefix = val;
            else if (key == "seed") cfg.seed = static_cast<uint64_t>(std::stoull(val));
            else if (key == "energy_drift_threshold") cfg.energy_drift_threshold = to_double(key, val);
            else if (key == "power_residual_threshold") cfg.power_residual_threshold = to_double(key, val);
            else throw DataError("config: unknown key '" + key + "' in [output]");
        } else {
            throw DataError("config: key outside a known section at line " + std::to_string(lineno));
        }
    }
    if (cfg.scenario.mesh_path.empty()) throw DataError("config: missing scenario.mesh");
    if (!(cfg.energy_drift_threshold > 0.0) || !(cfg.power_residual_threshold > 0.0))
        throw DataError("config: thresholds must be positive");
    cfg.scenario.validate();
    return cfg;
}

} // namespace ph
