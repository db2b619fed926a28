#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ph/checks.hpp"
#include "ph/config.hpp"
#include "ph/meshgen.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& config_path) {
    ph::RunConfig cfg;
    try {
        cfg = ph::parse_config(config_path);
    } catch (const ph::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        ph::TrajectoryRecord rec = ph::run_scenario(cfg.scenario);
        fs::create_directories(cfg.output_dir);
        std::string traj = cfg.output_dir + "/" + cfg.prefix + "_trajectory.csv";
        ph::write_trajectory_csv(rec, traj);
        for (const auto& [step, pts] : rec.sigma_snapshots) {
            std::string path = cfg.output_dir + "/sigma_" + std::to_string(step) + ".csv";
            std::string tmp = path + ".tmp";
            {
                std::ofstream out(tmp);
                out.precision(17);
                out << "x,y\n";
                for (const auto& p : pts) out << p.x << "," << p.y << "\n";
            }
            if (std::rename(tmp.c_str(), path.c_str()) != 0) throw ph::Error("cannot rename snapshot");
        }

        double drift = 0.0;
        if (!rec.H.empty())
            drift = std::abs(rec.H.back() - rec.H.front()) / (std::abs(rec.H.front()) + 1e-300);
        double power_res = 0.0;
        bool have_power = cfg.scenario.inflow.amplitude != 0.0 && cfg.scenario.output_every == 1;
        if (have_power) {
            double pscale = 1e-300;
            for (double p : rec.port_flux) pscale = std::max(pscale, std::abs(p));
            for (size_t k = 1; k < rec.t.size(); ++k) {
                double dtk = rec.t[k] - rec.t[k - 1];
                double r = std::abs((rec.H[k] - rec.H[k - 1]) / dtk + rec.port_flux[k]) / pscale;
                power_res = std::max(power_res, r);
            }
        }
        std::cout.precision(17);
        std::cout << std::scientific;
        std::cout << "trajectory: " << traj << "\n";
        std::cout << "final_energy_drift = " << drift << " (threshold " << cfg.energy_drift_threshold
                  << ")\n";
        if (have_power)
            std::cout << "max_power_balance_residual = " << power_res << " (threshold "
                      << cfg.power_residual_threshold << ")\n";
        bool ok = true;
        if (cfg.scenario.inflow.amplitude == 0.0) ok = ok && drift <= cfg.energy_drift_threshold;
        if (have_power) ok = ok && power_res <= cfg.power_residual_threshold;
        return ok ? 0 : 1;
    } catch (const ph::MeshError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ph::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_check(const std::string& suite, const std::string& mesh_path, uint64_t seed,
              const std::string& out_csv) {
    ph::MeshPtr mesh;
    try {
        mesh = ph::load_mesh(mesh_path);
    } catch (const ph::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        std::vector<ph::CheckResult> results;
        if (suite == "forms") results = ph::check_forms(mesh, seed);
        else if (suite == "elliptic") results = ph::check_elliptic(mesh, seed);
        else if (suite == "energetics") results = ph::check_energetics(mesh, seed);
        else if (suite == "brackets") results = ph::check_brackets(mesh, seed);
        else if (suite == "dirac") results = ph::check_dirac(mesh, seed, out_csv.empty() ? "" : out_csv + ".audit");
        else {
            std::cerr << "error: unknown suite '" << suite << "'\n";
            return 2;
        }
        if (!out_csv.empty()) ph::write_checks_csv(results, out_csv);
        std::cout.precision(6);
        std::cout << std::scientific;
        for (const auto& r : results)
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " value=" << r.value
                      << " threshold=" << r.threshold << "\n";
        return ph::all_pass(results) ? 0 : 1;
    } catch (const ph::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_mesh_info(const std::string& path) {
    try {
        ph::MeshPtr m = ph::load_mesh(path);
        auto [b0, b1] = ph::betti_numbers(*m);
        int nsig = 0, ngam = 0;
        for (const auto& be : m->boundary)
            (be.label == ph::BoundaryLabel::Sigma ? nsig : ngam)++;
        std::cout << "vertices " << m->nv() << "\n";
        std::cout << "edges " << m->ne() << "\n";
        std::cout << "triangles " << m->nt() << "\n";
        std::cout << "boundary_edges " << m->boundary.size() << " (sigma " << nsig << ", gamma "
                  << ngam << ")\n";
        std::cout << "sigma_interior_vertices " << m->sigma_interior_vertices.size() << "\n";
        std::cout << "betti " << b0 << " " << b1 << "\n";
        std::cout << "area " << m->total_area() << "\n";
        return 0;
    } catch (const ph::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ph: structure-preserving free-surface Euler toolkit"};
    app.require_subcommand(1);

    if (const char* threads = std::getenv("PH_THREADS")) {
        char* end = nullptr;
        long n = std::strtol(threads, &end, 10);
        if (end == threads || n < 1) {
            std::cerr << "error: PH_THREADS must be a positive integer\n";
            return 2;
        }
    }

    std::string config_path;
    auto* run = app.add_subcommand("run", "integrate a scenario from a config file");
    run->add_option("config", config_path, "config file")->required();

    std::string suite, mesh_path, out_csv;
    uint64_t seed = 1;
    auto* check = app.add_subcommand("check", "run a property suite on a mesh");
    check->add_option("suite", suite, "forms|elliptic|energetics|brackets|dirac")->required();
    check->add_option("--mesh", mesh_path, "mesh file")->required();
    check->add_option("--seed", seed, "random seed");
    check->add_option("--out", out_csv, "per-check CSV output path");

    std::string info_path;
    auto* info = app.add_subcommand("mesh-info", "print mesh statistics");
    info->add_option("mesh", info_path, "mesh file")->required();

    std::string kind, gen_out = "mesh.phm", sigma_spec = "top";
    int nx = 4, ny = 4, n2 = 8;
    double lx = 1.0, ly = 1.0, r0 = 0.5, r1 = 1.0;
    auto* gen = app.add_subcommand("gen-mesh", "generate a structured mesh file");
    gen->add_option("kind", kind, "rect|annulus|disc")->required();
    gen->add_option("--nx", nx, "cells in x / radial divisions / rings");
    gen->add_option("--ny", ny, "cells in y");
    gen->add_option("--ntheta", n2, "angular divisions");
    gen->add_option("--lx", lx, "width / outer radius");
    gen->add_option("--ly", ly, "height");
    gen->add_option("--r0", r0, "inner radius (annulus)");
    gen->add_option("--sigma", sigma_spec, "rect: top|none; disc: all|none");
    gen->add_option("--out", gen_out, "output path");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path);
    if (check->parsed()) return cmd_check(suite, mesh_path, seed, out_csv);
    if (info->parsed()) return cmd_mesh_info(info_path);
    if (gen->parsed()) {
        try {
            ph::MeshPtr m;
            if (kind == "rect") m = ph::make_rect(nx, ny, lx, ly, sigma_spec == "top");
            else if (kind == "annulus") m = ph::make_annulus(nx, n2, r0, r1);
            else if (kind == "disc") m = ph::make_disc(nx, n2, lx, sigma_spec == "all");
            else {
                std::cerr << "error: unknown mesh kind '" << kind << "'\n";
                return 2;
            }
            ph::save_mesh(*m, gen_out);
            std::cout << "wrote " << gen_out << "\n";
            return 0;
        } catch (const ph::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return 2;
}
