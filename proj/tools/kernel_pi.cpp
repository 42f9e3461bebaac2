#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kernel_pi/errors.hpp"
#include "kernel_pi/experiments.hpp"

namespace fs = std::filesystem;
using namespace kernel_pi;

namespace {

enum ExitCode : int {
    ok = 0,
    failure = 1,
    config_error = 2,
    numerical_failure = 3,
    property_failure = 4,
};

struct GlobalOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
};

ExperimentConfig resolve_config(const GlobalOptions& opts) {
    ExperimentConfig cfg = opts.config_path.empty() ? ExperimentConfig{} : load_config(opts.config_path);
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!opts.out_dir.empty()) {
        cfg.output_dir = opts.out_dir;
    }
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    cfg.validate();
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec || !fs::is_directory(cfg.output_dir)) {
        throw ConfigError("cannot create output directory '" + cfg.output_dir.string() + "'");
    }
    return cfg;
}

void report(const std::string& what, const fs::path& path) {
    std::cout << what << ": " << path.string() << '\n';
}

int kernel_check(const ExperimentConfig& cfg) {
    Manifest manifest("kernel-check", cfg);
    const auto checks = kernel_property_suite(cfg);
    const auto path = cfg.output_dir / "kernel_check.csv";
    std::ofstream out(path);
    out << "check,passed,detail\n";
    int failed = 0;
    for (const auto& c : checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")")
                  << '\n';
        out << '"' << c.name << "\"," << (c.passed ? "true" : "false") << ",\"" << c.detail << "\"\n";
        failed += c.passed ? 0 : 1;
    }
    manifest.add_result("checks_failed", failed);
    manifest.write(cfg.output_dir / "manifest.json");
    report("checks", path);
    return failed == 0 ? ok : property_failure;
}

int approximate(const ExperimentConfig& cfg) {
    Manifest manifest("approximate", cfg);
    const Kernel k = cfg.make_kernel();
    const auto problem = benchmark_value_problem();
    const auto sol = solve_on_grid(cfg, k, cfg.grid_size, problem);
    manifest.add_solve("grid " + std::to_string(cfg.grid_size), sol.centers.size(), sol.system.pe_margin,
                       sol.value.jitter());

    const auto probes = tensor_grid(cfg.domain, cfg.probe_n);
    const auto errs = value_errors(sol.value, problem.exact_value, probes);
    write_value_map_csv(cfg.output_dir / "value_map.csv", sol.value, problem.exact_value, probes);
    write_approximant_csv(cfg.output_dir / "approximant.csv", sol.value);
    write_centers_csv(cfg.output_dir / "centers.csv", sol.centers);
    {
        std::ofstream diag(cfg.output_dir / "diagnostics.csv");
        write_diagnostics_header(diag);
        write_diagnostics_row(diag, sol.system, sol.residual);
    }
    manifest.add_result("sup_error_modulo_constant", errs.modulo_constant);
    manifest.add_result("sup_error_anchored", errs.anchored);
    manifest.add_result("sup_error_raw", errs.raw);
    manifest.add_result("residual", sol.residual);
    manifest.write(cfg.output_dir / "manifest.json");

    std::cout << "N = " << sol.centers.size() << ", beta(N) = " << sol.system.pe_margin
              << ", sup error (modulo constants) = " << errs.modulo_constant << ", residual = " << sol.residual
              << '\n';
    report("value map", cfg.output_dir / "value_map.csv");
    return ok;
}

int policy_iteration(const ExperimentConfig& cfg) {
    Manifest manifest("pi", cfg);
    const auto centers = grid_centers(cfg.domain, cfg.grid_size);
    const auto result = run_policy_iteration(cfg, centers);
    if (result.iterates.empty()) {
        throw ConfigError("policy iteration ran no iterations (pi_max_iter = 0)");
    }
    for (std::size_t i = 0; i < result.iterates.size(); ++i) {
        const auto& it = result.iterates[i];
        manifest.add_solve("iteration " + std::to_string(i), centers.size(), it.pe_margin, it.value.jitter());
        if (it.origin_control > 1e-6) {
            std::cerr << "warning: iteration " << i << ": |mu(0)| = " << it.origin_control << '\n';
        }
    }
    {
        std::ofstream log(cfg.output_dir / "pi_log.csv");
        write_pi_log(log, result);
    }
    write_approximant_csv(cfg.output_dir / "approximant.csv", result.last().value);
    manifest.add_result("converged", result.converged ? "true" : "false");
    manifest.add_result("iterations", result.iterations_used);
    manifest.add_result("controller_error", result.last().reference_error);
    manifest.write(cfg.output_dir / "manifest.json");

    std::cout << "iterations = " << result.iterations_used << ", converged = " << (result.converged ? "yes" : "no")
              << ", final policy change = " << result.last().policy_delta
              << ", controller error vs u* = " << result.last().reference_error << '\n';
    report("log", cfg.output_dir / "pi_log.csv");
    return ok;
}

void add_study(Manifest& manifest, const std::string& label, const DecayStudy& study) {
    for (const auto& r : study.records) {
        manifest.add_solve(label + " grid " + std::to_string(r.n_per_dim), r.centers, r.pe_margin, 0.0);
    }
    manifest.add_result(label + " slope", study.fit.slope);
    manifest.add_result(label + " r_squared", study.fit.r_squared);
}

void print_study(const std::string& label, const DecayStudy& study) {
    for (const auto& r : study.records) {
        std::cout << label << " n=" << r.n_per_dim << " h=" << r.fill_distance << " error=" << r.sup_error
                  << " beta=" << r.pe_margin << (r.converged ? "" : " (not converged)") << '\n';
    }
    if (!study.fit.available) {
        std::cout << label << " slope unavailable (one grid size)\n";
    } else if (study.fit.degenerate) {
        std::cout << label << " slope degenerate (errors at the noise floor)\n";
    } else {
        std::cout << label << " slope " << study.fit.slope << ", R^2 " << study.fit.r_squared << '\n';
    }
}

int convergence(const ExperimentConfig& cfg) {
    Manifest manifest("convergence", cfg);
    std::vector<std::pair<std::string, SlopeFit>> fits;
    for (auto family : cfg.kernels) {
        const std::string name(to_string(family));
        const auto study = convergence_study(cfg, family);
        write_decay_csv(cfg.output_dir / ("convergence_" + name + ".csv"), study);
        fits.emplace_back(name, study.fit);
        add_study(manifest, name, study);
        print_study(name, study);
    }
    write_fit_csv(cfg.output_dir / "convergence_fit.csv", fits);
    manifest.write(cfg.output_dir / "manifest.json");
    report("fits", cfg.output_dir / "convergence_fit.csv");
    return ok;
}

int pi_decay(const ExperimentConfig& cfg) {
    Manifest manifest("pi-decay", cfg);
    const auto study = pi_decay_study(cfg);
    write_decay_csv(cfg.output_dir / "pi_decay.csv", study);
    write_fit_csv(cfg.output_dir / "pi_decay_fit.csv", {{"controller", study.fit}});
    add_study(manifest, "controller", study);
    print_study("controller", study);
    manifest.write(cfg.output_dir / "manifest.json");
    report("records", cfg.output_dir / "pi_decay.csv");
    return ok;
}

int error_map_command(const ExperimentConfig& cfg) {
    Manifest manifest("error-map", cfg);
    const auto map = error_map(cfg, cfg.grid_size);
    write_error_map_csv(cfg.output_dir / "error_map.csv", map);
    write_centers_csv(cfg.output_dir / "centers.csv", map.centers);
    manifest.add_result("nearest_decile_mean", map.nearest_decile_mean);
    manifest.add_result("farthest_decile_mean", map.farthest_decile_mean);
    manifest.write(cfg.output_dir / "manifest.json");
    std::cout << "mean error, nearest decile = " << map.nearest_decile_mean
              << ", farthest decile = " << map.farthest_decile_mean << '\n';
    report("error map", cfg.output_dir / "error_map.csv");
    return ok;
}

void record_power_map(Manifest& manifest, const std::string& label, const PowerMap& map) {
    manifest.add_solve(label, map.centers.size(), std::numeric_limits<double>::quiet_NaN(), map.jitter);
    manifest.add_result(label + " max_power", map.max_power);
    manifest.add_result(label + " candidate_x1", map.candidate(0));
    manifest.add_result(label + " candidate_x2", map.candidate(1));
    std::cout << label << ": max power " << map.max_power << " at (" << map.candidate(0) << ", " << map.candidate(1)
              << ")\n";
}

int power_map_command(const ExperimentConfig& cfg) {
    Manifest manifest("power-map", cfg);
    const auto map = power_map(cfg, cfg.grid_size);
    write_power_map_csv(cfg.output_dir / "power_map.csv", map);
    write_centers_csv(cfg.output_dir / "centers.csv", map.centers);
    record_power_map(manifest, "power map", map);
    manifest.write(cfg.output_dir / "manifest.json");
    report("power map", cfg.output_dir / "power_map.csv");
    return ok;
}

int greedy(const ExperimentConfig& cfg) {
    Manifest manifest("greedy", cfg);
    const auto maps = greedy_rounds(cfg, cfg.grid_size, cfg.greedy_rounds);
    for (std::size_t r = 0; r < maps.size(); ++r) {
        const std::string suffix = "round" + std::to_string(r);
        write_power_map_csv(cfg.output_dir / ("power_map_" + suffix + ".csv"), maps[r]);
        record_power_map(manifest, suffix, maps[r]);
    }
    write_centers_csv(cfg.output_dir / "centers_final.csv", maps.back().centers);
    manifest.write(cfg.output_dir / "manifest.json");
    report("final centers", cfg.output_dir / "centers_final.csv");
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel-based policy iteration experiments"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "key = value configuration file");
    app.add_option("--out", opts.out_dir, "output directory");
    app.add_option("--seed", opts.seed, "seed for random property checks");
    app.add_option("--set", opts.overrides, "override a config key (key=value), repeatable");

    struct Command {
        const char* name;
        const char* help;
        int (*run)(const ExperimentConfig&);
    };
    const std::vector<Command> commands{
        {"kernel-check", "kernel derivative, symmetry and PSD property suite", kernel_check},
        {"approximate", "single policy-evaluation solve under the optimal policy", approximate},
        {"pi", "policy iteration from the configured initial policy", policy_iteration},
        {"convergence", "value-error decay against fill distance", convergence},
        {"pi-decay", "controller-error decay after policy iteration", pi_decay},
        {"error-map", "pointwise controller error field", error_map_command},
        {"power-map", "power function over the probe grid", power_map_command},
        {"greedy", "iterated power-function center augmentation", greedy},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        subs.push_back(app.add_subcommand(c.name, c.help));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        const ExperimentConfig cfg = resolve_config(opts);
        for (std::size_t i = 0; i < commands.size(); ++i) {
            if (subs[i]->parsed()) {
                return commands[i].run(cfg);
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return config_error;
    } catch (const PeViolationError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const SingularGramError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const NonfiniteError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return failure;
}
