// dwall: command-line driver for the domain-wall heteroclinic solver.
//
// Subcommands:
//   solve     minimize J_eps and write profile.csv + manifest.json
//   reduced   closed-form eps=0 orbit: reduced.csv + manifest.json
//   spectrum  equilibrium linearization roots: spectrum.json
//   sweep     g -> 1+ continuation: sweep.csv + sweep_plot.csv + manifest.json
//
// Exit codes: 0 success, 2 configuration/validation error, 3 numerical
// failure (non-convergence; output files are still written).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dwall/analysis.hpp"
#include "dwall/io.hpp"
#include "dwall/minimize.hpp"
#include "dwall/model.hpp"
#include "dwall/reduced.hpp"

namespace {

using nlohmann::json;

struct Config {
    dwall::Params params;
    double grad_tol = 1e-8;
    int max_iters = 50000;
    int memory = 10;
    std::string init = "testfn";
    std::string out_dir = ".";
    std::string g_list = "2,1.5,1.2,1.1,1.05,1.02,1.01";
};

json params_json(const dwall::Params& p) {
    return {{"eps", p.eps}, {"g", p.g}, {"L", p.L}, {"n", p.n}};
}

json options_json(const Config& c) {
    return {{"grad_tol", c.grad_tol}, {"max_iters", c.max_iters}, {"memory", c.memory}, {"init", c.init}};
}

dwall::SolveOptions make_options(const Config& c) {
    dwall::SolveOptions o;
    o.grad_tol = c.grad_tol;
    o.max_iters = c.max_iters;
    o.memory = c.memory;
    if (c.init == "testfn") {
        o.init = dwall::InitKind::TestFunction;
    } else if (c.init == "reduced") {
        o.init = dwall::InitKind::ReducedLimit;
    } else if (c.init.rfind("file:", 0) == 0) {
        o.init = dwall::InitKind::Given;
        o.given = dwall::read_profile_csv(c.init.substr(5));
    } else {
        throw std::invalid_argument("unknown --init value '" + c.init + "' (want testfn|reduced|file:PATH)");
    }
    return o;
}

void write_manifest(const std::string& path, json manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << manifest.dump(2) << '\n';
}

std::vector<double> parse_g_list(const std::string& s) {
    std::vector<double> g;
    std::string cell;
    std::istringstream in(s);
    while (std::getline(in, cell, ',')) {
        if (!cell.empty()) g.push_back(std::stod(cell));
    }
    return g;
}

int cmd_solve(const Config& cfg) {
    dwall::validate(cfg.params);
    const dwall::SolveOptions opts = make_options(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const dwall::SolveResult res = dwall::minimize(cfg.params, opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string profile_path = cfg.out_dir + "/profile.csv";
    dwall::write_profile_csv(profile_path, res.profile, cfg.params);

    json manifest = {
        {"command", "solve"},
        {"params", params_json(cfg.params)},
        {"options", options_json(cfg)},
        {"outputs", {profile_path}},
        {"wall_time_seconds", secs},
        {"converged", res.converged},
        {"grad_norm", res.grad_norm},
        {"iterations", res.iterations},
        {"energy",
         {{"total", res.energy.total},
          {"bending", res.energy.bending},
          {"dirichlet", res.energy.dirichlet},
          {"potential", res.energy.potential}}},
    };
    write_manifest(cfg.out_dir + "/manifest.json", manifest);

    if (!res.converged) {
        std::cerr << "solve: did not converge (grad_norm " << res.grad_norm << ")\n";
        return 3;
    }
    return 0;
}

int cmd_reduced(const Config& cfg) {
    dwall::validate(cfg.params);
    const auto t0 = std::chrono::steady_clock::now();
    const dwall::ReducedOrbit orbit = dwall::reduced_orbit(cfg.params.g);

    std::vector<double> xs = dwall::make_grid(cfg.params);
    bool have_junction = false;
    for (double x : xs) have_junction = have_junction || x == orbit.x_junction;
    if (!have_junction && orbit.x_junction > -cfg.params.L && orbit.x_junction < cfg.params.L) {
        xs.push_back(orbit.x_junction);
        std::sort(xs.begin(), xs.end());
    }

    const std::string csv_path = cfg.out_dir + "/reduced.csv";
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + csv_path + " for writing");
    out << "x,A,B,B_prime,invariant_inner,invariant_outer\n";
    const double g = cfg.params.g;
    for (double x : xs) {
        const double B = dwall::reduced_B(orbit, x);
        const double Bp = dwall::reduced_Bprime(orbit, x);
        out << dwall::fmt17(x) << ',' << dwall::fmt17(dwall::reduced_A(orbit, x)) << ','
            << dwall::fmt17(B) << ',' << dwall::fmt17(Bp) << ',';
        if (x <= orbit.x_junction)
            out << dwall::fmt17(Bp * Bp + (1.0 - g) * B * B - 0.5 * (1.0 - g * g) * B * B * B * B);
        out << ',';
        if (x >= orbit.x_junction) out << dwall::fmt17(Bp * Bp + B * B - 0.5 * B * B * B * B);
        out << '\n';
    }
    out.close();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest = {
        {"command", "reduced"},
        {"params", params_json(cfg.params)},
        {"options", options_json(cfg)},
        {"outputs", {csv_path}},
        {"wall_time_seconds", secs},
        {"converged", true},
        {"x_junction", orbit.x_junction},
        {"reduced_energy", dwall::reduced_energy(orbit, 1e-10)},
    };
    write_manifest(cfg.out_dir + "/manifest.json", manifest);
    return 0;
}

json spectrum_json(const dwall::SpectrumReport& s) {
    json roots = json::array();
    for (const auto& z : s.a_roots) roots.push_back({{"re", z.real()}, {"im", z.imag()}});
    return {{"a_roots", roots}, {"b_roots", {s.b_roots[0], s.b_roots[1]}}, {"hyperbolic", s.hyperbolic}};
}

int cmd_spectrum(const Config& cfg) {
    dwall::validate(cfg.params);
    const auto minus = dwall::equilibrium_spectrum(cfg.params, dwall::EquilibriumTag::MMinus);
    const auto plus = dwall::equilibrium_spectrum(cfg.params, dwall::EquilibriumTag::MPlus);
    const double slowest = dwall::slowest_decay_rate(cfg.params.eps, cfg.params.g);
    const double recL = dwall::recommended_L(cfg.params.eps, cfg.params.g);
    json doc = {
        {"command", "spectrum"},
        {"params", params_json(cfg.params)},
        {"M_minus", spectrum_json(minus)},
        {"M_plus", spectrum_json(plus)},
        {"slowest_decay_rate", slowest},
        {"recommended_L", recL},
        {"recommended_n", dwall::recommended_n(cfg.params.eps, cfg.params.g, recL)},
    };
    write_manifest(cfg.out_dir + "/spectrum.json", doc);
    return 0;
}

int cmd_sweep(const Config& cfg) {
    const std::vector<double> gs = parse_g_list(cfg.g_list);
    const dwall::SolveOptions opts = make_options(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    const std::string csv_path = cfg.out_dir + "/sweep.csv";
    const std::string plot_path = cfg.out_dir + "/sweep_plot.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    std::ofstream plot(plot_path, std::ios::binary);
    if (!csv || !plot) throw std::runtime_error("cannot open sweep outputs in " + cfg.out_dir);
    csv << "g,min_energy,testfn_bound,circle_sup,converged\n";
    plot << "g,x,A,B\n";

    // stream records as they are produced so a failing solve still leaves
    // the completed rows behind
    bool all_ok = true;
    dwall::SolveOptions step_opts = opts;
    dwall::Profile carry;
    bool have_carry = false;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        if (i > 0 && !(gs[i] < gs[i - 1] && gs[i] > 1.0))
            throw std::invalid_argument("sweep: g list must be strictly decreasing toward 1 (g > 1)");
        if (!(gs[i] > 1.0)) throw std::invalid_argument("sweep: g must be > 1, got " + std::to_string(gs[i]));
        const dwall::Params p = dwall::sweep_params(cfg.params.eps, gs[i]);
        if (have_carry) {
            step_opts.init = dwall::InitKind::Given;
            step_opts.given = dwall::resample(carry, p);
        }
        const dwall::SolveResult res = dwall::minimize(p, step_opts);
        const double bound = dwall::testfn_energy(p, std::sqrt(gs[i] - 1.0));
        csv << dwall::fmt17(gs[i]) << ',' << dwall::fmt17(res.energy.total) << ',' << dwall::fmt17(bound)
            << ',' << dwall::fmt17(dwall::circle_sup(res.profile)) << ',' << (res.converged ? "true" : "false")
            << '\n';
        csv.flush();
        for (std::size_t j = 0; j < res.profile.size(); ++j) {
            plot << dwall::fmt17(gs[i]) << ',' << dwall::fmt17(res.profile.x[j]) << ','
                 << dwall::fmt17(res.profile.A[j]) << ',' << dwall::fmt17(res.profile.B[j]) << '\n';
        }
        plot.flush();
        if (!res.converged) {
            all_ok = false;
            break;
        }
        carry = res.profile;
        have_carry = true;
    }
    csv.close();
    plot.close();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest = {
        {"command", "sweep"},
        {"params", {{"eps", cfg.params.eps}, {"g_list", gs}}},
        {"options", options_json(cfg)},
        {"outputs", {csv_path, plot_path}},
        {"wall_time_seconds", secs},
        {"converged", all_ok},
    };
    write_manifest(cfg.out_dir + "/manifest.json", manifest);
    if (!all_ok) {
        std::cerr << "sweep: a solve failed to converge; partial rows written\n";
        return 3;
    }
    return 0;
}

void add_common_options(CLI::App* cmd, Config& cfg) {
    cmd->add_option("--eps", cfg.params.eps, "stiffness of the fourth-order term (eps > 0)");
    cmd->add_option("--g", cfg.params.g, "coupling (g > 1)");
    cmd->add_option("--L", cfg.params.L, "half-length of the truncated domain");
    cmd->add_option("--n", cfg.params.n, "grid intervals (even, >= 16)");
    cmd->add_option("--grad-tol", cfg.grad_tol, "gradient sup-norm stopping tolerance");
    cmd->add_option("--max-iters", cfg.max_iters, "iteration budget");
    cmd->add_option("--init", cfg.init, "initial guess: testfn|reduced|file:PATH");
    cmd->add_option("--out-dir", cfg.out_dir, "output directory");
    cmd->set_config("--config", "", "key = value configuration file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"domain-wall heteroclinic solver for the Benard-Rayleigh amplitude system"};
    app.require_subcommand(1);
    Config cfg;

    CLI::App* solve = app.add_subcommand("solve", "minimize J_eps on the clamped grid");
    CLI::App* reduced = app.add_subcommand("reduced", "closed-form eps = 0 orbit");
    CLI::App* spectrum = app.add_subcommand("spectrum", "equilibrium linearization report");
    CLI::App* sweep = app.add_subcommand("sweep", "g -> 1+ continuation sweep");
    for (CLI::App* cmd : {solve, reduced, spectrum, sweep}) add_common_options(cmd, cfg);
    sweep->add_option("--g-list", cfg.g_list, "comma-separated decreasing g values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::filesystem::create_directories(cfg.out_dir);
        if (solve->parsed()) return cmd_solve(cfg);
        if (reduced->parsed()) return cmd_reduced(cfg);
        if (spectrum->parsed()) return cmd_spectrum(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
