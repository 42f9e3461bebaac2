#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kernel_pi/dynamics.hpp"
#include "kernel_pi/galerkin.hpp"
#include "kernel_pi/geometry.hpp"
#include "kernel_pi/kernels.hpp"
#include "kernel_pi/native_approx.hpp"
#include "kernel_pi/policy_iteration.hpp"

namespace kernel_pi {

std::string_view version();

/// Settings shared by every experiment. Loaded from a `key = value` file;
/// `#` starts a comment. Lists are comma separated.
///
/// Recognized keys: domain_lower, domain_upper, kernel, kernels, lengthscale,
/// variance, grid_sizes, grid_size, quadrature_order, probe_n, fill_probe_n,
/// pi_tol, pi_max_iter, mu0_gain, greedy_rounds, skip_stability_check, out, seed.
struct ExperimentConfig {
    Domain domain = Domain::symmetric_box(2);
    KernelFamily kernel = KernelFamily::matern52;
    std::vector<KernelFamily> kernels{KernelFamily::matern52};
    double lengthscale = 0.5;
    double variance = 1.0;
    std::vector<int> grid_sizes{5, 7, 9, 11};
    int grid_size = 9;
    int quadrature_order = 40;
    int probe_n = 101;
    int fill_probe_n = 201;
    double pi_tol = 1e-6;
    int pi_max_iter = 20;
    double mu0_gain = -3.0;
    int greedy_rounds = 2;
    bool skip_stability_check = false;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;

    // Throws ConfigError on an unknown key or malformed value.
    void set(const std::string& key, const std::string& value);
    void validate() const;
    [[nodiscard]] std::map<std::string, std::string> echo() const;
    [[nodiscard]] Kernel make_kernel(KernelFamily family) const;
    [[nodiscard]] Kernel make_kernel() const { return make_kernel(kernel); }
};

ExperimentConfig load_config(const std::filesystem::path& path);

/// Policy evaluation problem with a known solution.
struct ValueProblem {
    ControlAffineSystem system;
    Eigen::MatrixXd input_weight;
    Policy policy;
    RhsFunction rhs;
    ScalarField exact_value;
    VectorField exact_gradient;
};

// Benchmark evaluated under u*, b = -r(x, u*(x)); the solution is V*.
ValueProblem benchmark_value_problem();

// Benchmark dynamics under `pol` with b = psi^T grad vbar, so vbar solves the
// evaluation equation exactly.
ValueProblem manufactured_value_problem(const Approximant& vbar, const Policy& pol);

// Error of v_N against the exact value on the probes. The evaluation operator
// annihilates constants, so v_N is compared modulo constants.
struct ValueErrors {
    double modulo_constant = 0.0; // inf_c max|v_N - V - c|
    double anchored = 0.0;        // max|v_N - v_N(0) - V|
    double raw = 0.0;             // max|v_N - V|
};

ValueErrors value_errors(const Approximant& v, const ScalarField& exact, const PointList& probes);

struct SolveOutcome {
    CenterSet centers;
    Approximant value;
    GalerkinSystem system;
    double residual;
};

SolveOutcome solve_on_grid(const ExperimentConfig& cfg, const Kernel& k, int n_per_dim, const ValueProblem& problem);

struct DecayRecord {
    KernelFamily family = KernelFamily::matern52;
    int n_per_dim = 0;
    std::size_t centers = 0;
    double fill_distance = 0.0;
    double sup_error = 0.0;       // value: modulo constants; controller: sup |mu_N - u*|
    double anchored_error = std::numeric_limits<double>::quiet_NaN();
    double raw_error = std::numeric_limits<double>::quiet_NaN();
    double h_error = std::numeric_limits<double>::quiet_NaN();
    double pe_margin = 0.0;
    int iterations = 0;
    bool converged = true;
};

struct SlopeFit {
    bool available = false;  // needs >= 2 records
    bool degenerate = false; // errors at the noise floor
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
};

// Least-squares line through (log h, log error).
SlopeFit fit_log_log(const std::vector<double>& h, const std::vector<double>& error, double noise_floor = 1e-9);

struct DecayStudy {
    std::vector<DecayRecord> records;
    SlopeFit fit;
};

// Value-function error vs fill distance across cfg.grid_sizes.
DecayStudy convergence_study(const ExperimentConfig& cfg, KernelFamily family, const ValueProblem& problem);
DecayStudy convergence_study(const ExperimentConfig& cfg, KernelFamily family);

// Controller error after policy iteration vs fill distance across cfg.grid_sizes.
DecayStudy pi_decay_study(const ExperimentConfig& cfg);

PIResult run_policy_iteration(const ExperimentConfig& cfg, const CenterSet& centers);

struct ErrorMap {
    PointList probes;
    Eigen::VectorXd error;
    Eigen::VectorXd distance; // to the nearest center
    CenterSet centers;
    double nearest_decile_mean = 0.0;
    double farthest_decile_mean = 0.0;
};

// Pointwise |mu(x) - ref(x)|_inf and the nearest/farthest decile contrast.
ErrorMap controller_error_field(const Policy& mu, const Policy& ref, const PointList& probes,
                                const CenterSet& centers);
// Policy iteration on an n x n grid, then the field against u*.
ErrorMap error_map(const ExperimentConfig& cfg, int n_per_dim);

struct PowerMap {
    PointList probes;
    Eigen::VectorXd power;
    CenterSet centers;
    Point candidate;
    std::size_t candidate_index = 0;
    double max_power = 0.0;
    double jitter = 0.0;
};

PowerMap power_map(const ExperimentConfig& cfg, const CenterSet& centers);
PowerMap power_map(const ExperimentConfig& cfg, int n_per_dim);

// Power maps before each augmentation; rounds + 1 maps in total.
std::vector<PowerMap> greedy_rounds(const ExperimentConfig& cfg, int n_per_dim, int rounds);

struct PropertyCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Derivative, symmetry, diagonal and PSD checks on seeded random samples.
std::vector<PropertyCheck> kernel_property_suite(const ExperimentConfig& cfg, int samples = 200);

// CSV writers; header rows documented in README.
void write_decay_csv(const std::filesystem::path& path, const DecayStudy& study);
void write_fit_csv(const std::filesystem::path& path, const std::vector<std::pair<std::string, SlopeFit>>& fits);
void write_error_map_csv(const std::filesystem::path& path, const ErrorMap& map);
void write_power_map_csv(const std::filesystem::path& path, const PowerMap& map);
void write_value_map_csv(const std::filesystem::path& path, const Approximant& v, const ScalarField& exact,
                         const PointList& probes);

/// Run manifest (JSON): command, config echo, seed, version, and one entry per
/// linear solve with its jitter and PE margin.
class Manifest {
public:
    Manifest(std::string command, const ExperimentConfig& cfg);
    void add_solve(const std::string& label, std::size_t centers, double pe_margin, double jitter);
    void add_result(const std::string& key, double value);
    void add_result(const std::string& key, const std::string& value);
    void write(const std::filesystem::path& path) const;

private:
    struct Solve {
        std::string label;
        std::size_t centers;
        double pe_margin;
        double jitter;
    };
    std::string command_;
    std::map<std::string, std::string> config_;
    std::uint64_t seed_;
    std::vector<Solve> solves_;
    std::map<std::string, double> numbers_;
    std::map<std::string, std::string> strings_;
};

} // namespace kernel_pi
