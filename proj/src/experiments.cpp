#include "kernel_pi/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "kernel_pi/errors.hpp"
#include "kernel_pi/quadrature.hpp"

#ifndef KERNEL_PI_VERSION
#define KERNEL_PI_VERSION "0.0.0"
#endif

namespace kernel_pi {

std::string_view version() {
    return KERNEL_PI_VERSION;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

Point parse_point(const std::string& key, const std::string& value) {
    const auto items = split_list(value);
    Point p(static_cast<Eigen::Index>(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i) {
        p(static_cast<Eigen::Index>(i)) = parse_double(key, items[i]);
    }
    return p;
}


// shortest representation that round-trips
std::string number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out.precision(17);
    return out;
}

std::string join_point(const Point& p) {
    std::string out;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        out += (i ? "," : "") + number(p(i));
    }
    return out;
}

} // namespace

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "domain_lower") {
        domain = Domain(parse_point(key, value), domain.upper());
    } else if (key == "domain_upper") {
        domain = Domain(domain.lower(), parse_point(key, value));
    } else if (key == "kernel") {
        kernel = parse_kernel_family(value);
    } else if (key == "kernels") {
        kernels.clear();
        for (const auto& item : split_list(value)) {
            kernels.push_back(parse_kernel_family(item));
        }
    } else if (key == "lengthscale") {
        lengthscale = parse_double(key, value);
    } else if (key == "variance") {
        variance = parse_double(key, value);
    } else if (key == "grid_sizes") {
        grid_sizes.clear();
        for (const auto& item : split_list(value)) {
            grid_sizes.push_back(parse_int(key, item));
        }
    } else if (key == "grid_size") {
        grid_size = parse_int(key, value);
    } else if (key == "quadrature_order") {
        quadrature_order = parse_int(key, value);
    } else if (key == "probe_n") {
        probe_n = parse_int(key, value);
    } else if (key == "fill_probe_n") {
        fill_probe_n = parse_int(key, value);
    } else if (key == "pi_tol") {
        pi_tol = parse_double(key, value);
    } else if (key == "pi_max_iter") {
        pi_max_iter = parse_int(key, value);
    } else if (key == "mu0_gain") {
        mu0_gain = parse_double(key, value);
    } else if (key == "greedy_rounds") {
        greedy_rounds = parse_int(key, value);
    } else if (key == "skip_stability_check") {
        skip_stability_check = parse_bool(key, value);
    } else if (key == "out") {
        output_dir = value;
    } else if (key == "seed") {
        try {
            seed = std::stoull(value);
        } catch (const std::exception&) {
            throw ConfigError("config key 'seed': expected an unsigned integer, got '" + value + "'");
        }
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

void ExperimentConfig::validate() const {
    if (domain.dim() != 2) {
        throw ConfigError("the benchmark experiments run on a 2-D domain");
    }
    (void)make_kernel(kernel);
    if (kernels.empty()) {
        throw ConfigError("'kernels' must name at least one family");
    }
    if (grid_sizes.empty()) {
        throw ConfigError("'grid_sizes' must list at least one size");
    }
    for (int n : grid_sizes) {
        if (n < 1) {
            throw ConfigError("grid sizes must be at least 1");
        }
    }
    if (grid_size < 1 || quadrature_order < 1 || probe_n < 2 || fill_probe_n < 2) {
        throw ConfigError("grid_size, quadrature_order >= 1 and probe_n, fill_probe_n >= 2 are required");
    }
    if (!(pi_tol > 0.0) || pi_max_iter < 0 || greedy_rounds < 0) {
        throw ConfigError("pi_tol > 0, pi_max_iter >= 0 and greedy_rounds >= 0 are required");
    }
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
    std::map<std::string, std::string> out;
    out["domain_lower"] = join_point(domain.lower());
    out["domain_upper"] = join_point(domain.upper());
    out["kernel"] = std::string(to_string(kernel));
    std::string names;
    for (auto f : kernels) {
        names += (names.empty() ? "" : ",") + std::string(to_string(f));
    }
    out["kernels"] = names;
    out["lengthscale"] = number(lengthscale);
    out["variance"] = number(variance);
    std::string sizes;
    for (int n : grid_sizes) {
        sizes += (sizes.empty() ? "" : ",") + std::to_string(n);
    }
    out["grid_sizes"] = sizes;
    out["grid_size"] = std::to_string(grid_size);
    out["quadrature_order"] = std::to_string(quadrature_order);
    out["probe_n"] = std::to_string(probe_n);
    out["fill_probe_n"] = std::to_string(fill_probe_n);
    out["pi_tol"] = number(pi_tol);
    out["pi_max_iter"] = std::to_string(pi_max_iter);
    out["mu0_gain"] = number(mu0_gain);
    out["greedy_rounds"] = std::to_string(greedy_rounds);
    out["skip_stability_check"] = skip_stability_check ? "true" : "false";
    out["out"] = output_dir.string();
    out["seed"] = std::to_string(seed);
    return out;
}

Kernel ExperimentConfig::make_kernel(KernelFamily family) const {
    return Kernel(family, lengthscale, variance);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

ValueProblem benchmark_value_problem() {
    const Benchmark bm = benchmark_system();
    ValueProblem p;
    p.system = bm.system;
    p.input_weight = bm.cost.input_weight;
    p.policy = bm.exact_policy;
    p.rhs = [cost = bm.cost, pol = bm.exact_policy](const Point& x, const Eigen::VectorXd&) {
        return pde_rhs(cost, pol, x);
    };
    p.exact_value = bm.exact_value;
    p.exact_gradient = bm.exact_value_gradient;
    return p;
}

ValueProblem manufactured_value_problem(const Approximant& vbar, const Policy& pol) {
    const Benchmark bm = benchmark_system();
    ValueProblem p;
    p.system = bm.system;
    p.input_weight = bm.cost.input_weight;
    p.policy = pol;
    p.rhs = [vbar](const Point& x, const Eigen::VectorXd& psi) { return psi.dot(vbar.gradient(x)); };
    p.exact_value = [vbar](const Point& x) { return vbar.value(x); };
    p.exact_gradient = [vbar](const Point& x) { return vbar.gradient(x); };
    return p;
}

ValueErrors value_errors(const Approximant& v, const ScalarField& exact, const PointList& probes) {
    const double at_origin = v.value(Point::Zero(probes.front().size()));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    ValueErrors e;
    for (const auto& x : probes) {
        const double diff = v.value(x) - exact(x);
        lo = std::min(lo, diff);
        hi = std::max(hi, diff);
        e.raw = std::max(e.raw, std::abs(diff));
        e.anchored = std::max(e.anchored, std::abs(diff - at_origin));
    }
    e.modulo_constant = 0.5 * (hi - lo);
    return e;
}

SolveOutcome solve_on_grid(const ExperimentConfig& cfg, const Kernel& k, int n_per_dim, const ValueProblem& problem) {
    CenterSet centers = grid_centers(cfg.domain, n_per_dim);
    const auto rule = gauss_legendre_tensor(cfg.domain, cfg.quadrature_order);
    GalerkinSystem gsys = assemble(k, centers, problem.system, problem.policy, problem.rhs, rule);
    Approximant v = solve_value(gsys, k, centers);
    const double residual = residual_norm(gsys, v.coefficients());
    return SolveOutcome{std::move(centers), std::move(v), std::move(gsys), residual};
}

SlopeFit fit_log_log(const std::vector<double>& h, const std::vector<double>& error, double noise_floor) {
    SlopeFit fit;
    if (h.size() != error.size()) {
        throw ConfigError("slope fit needs matching h and error lists");
    }
    if (h.size() < 2) {
        return fit;
    }
    fit.available = true;
    const double worst = *std::max_element(error.begin(), error.end());
    if (worst <= noise_floor || std::any_of(error.begin(), error.end(), [](double e) { return !(e > 0.0); })) {
        fit.degenerate = true;
        return fit;
    }
    const auto n = static_cast<Eigen::Index>(h.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = std::log(h[static_cast<std::size_t>(i)]);
        A(i, 1) = 1.0;
        y(i) = std::log(error[static_cast<std::size_t>(i)]);
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
    fit.slope = coef(0);
    fit.intercept = coef(1);
    const double ss_res = (A * coef - y).squaredNorm();
    const double ss_tot = (y.array() - y.mean()).square().sum();
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

namespace {

SlopeFit fit_records(const std::vector<DecayRecord>& records) {
    std::vector<double> h;
    std::vector<double> e;
    for (const auto& r : records) {
        h.push_back(r.fill_distance);
        e.push_back(r.sup_error);
    }
    return fit_log_log(h, e);
}

} // namespace

DecayStudy convergence_study(const ExperimentConfig& cfg, KernelFamily family, const ValueProblem& problem) {
    const Kernel k = cfg.make_kernel(family);
    const PointList probes = tensor_grid(cfg.domain, cfg.probe_n);
    DecayStudy study;
    for (int n : cfg.grid_sizes) {
        SolveOutcome sol = [&] {
            try {
                return solve_on_grid(cfg, k, n, problem);
            } catch (const PeViolationError& e) {
                throw PeViolationError("grid " + std::to_string(n) + "x" + std::to_string(n) + ": " + e.what(),
                                       e.pe_margin(), e.threshold());
            }
        }();
        const auto errs = value_errors(sol.value, problem.exact_value, probes);
        DecayRecord rec;
        rec.family = family;
        rec.n_per_dim = n;
        rec.centers = sol.centers.size();
        rec.fill_distance = fill_distance(sol.centers, cfg.domain, cfg.fill_probe_n);
        rec.sup_error = errs.modulo_constant;
        rec.anchored_error = errs.anchored;
        rec.raw_error = errs.raw;
        rec.pe_margin = sol.system.pe_margin;
        rec.iterations = 1;
        study.records.push_back(rec);
    }
    study.fit = fit_records(study.records);
    return study;
}

DecayStudy convergence_study(const ExperimentConfig& cfg, KernelFamily family) {
    return convergence_study(cfg, family, benchmark_value_problem());
}

PIResult run_policy_iteration(const ExperimentConfig& cfg, const CenterSet& centers) {
    const Benchmark bm = benchmark_system();
    const auto rule = gauss_legendre_tensor(cfg.domain, cfg.quadrature_order);
    PISettings settings;
    settings.tol = cfg.pi_tol;
    settings.max_iter = cfg.pi_max_iter;
    settings.probe_n = cfg.probe_n;
    settings.skip_stability_check = cfg.skip_stability_check;
    settings.reference = bm.exact_policy;
    return policy_iterate(cfg.make_kernel(), centers, bm.system, bm.cost, linear_x2_policy(cfg.mu0_gain), cfg.domain,
                          rule, settings);
}

DecayStudy pi_decay_study(const ExperimentConfig& cfg) {
    const Benchmark bm = benchmark_system();
    const PointList probes = tensor_grid(cfg.domain, cfg.probe_n);
    DecayStudy study;
    for (int n : cfg.grid_sizes) {
        const CenterSet centers = grid_centers(cfg.domain, n);
        PIResult result = [&] {
            try {
                return run_policy_iteration(cfg, centers);
            } catch (const PeViolationError& e) {
                throw PeViolationError("grid " + std::to_string(n) + "x" + std::to_string(n) + ": " + e.what(),
                                       e.pe_margin(), e.threshold());
            }
        }();
        if (result.iterates.empty()) {
            throw ConfigError("policy iteration ran no iterations (pi_max_iter = 0)");
        }
        DecayRecord rec;
        rec.family = cfg.kernel;
        rec.n_per_dim = n;
        rec.centers = centers.size();
        rec.fill_distance = fill_distance(centers, cfg.domain, cfg.fill_probe_n);
        rec.sup_error = controller_error(result.last().next_policy, bm.exact_policy, probes);
        rec.pe_margin = std::numeric_limits<double>::infinity();
        for (const auto& it : result.iterates) {
            rec.pe_margin = std::min(rec.pe_margin, it.pe_margin);
        }
        rec.iterations = result.iterations_used;
        rec.converged = result.converged;
        study.records.push_back(rec);
    }
    study.fit = fit_records(study.records);
    return study;
}

ErrorMap controller_error_field(const Policy& mu, const Policy& ref, const PointList& probes,
                                const CenterSet& centers) {
    ErrorMap map{probes, Eigen::VectorXd(probes.size()), Eigen::VectorXd(probes.size()), centers, 0.0, 0.0};
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        map.error(row) = (mu(probes[i]) - ref(probes[i])).lpNorm<Eigen::Infinity>();
        map.distance(row) = distance_to_nearest(centers, probes[i]);
    }
    std::vector<std::size_t> order(probes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return map.distance(static_cast<Eigen::Index>(a)) < map.distance(static_cast<Eigen::Index>(b));
    });
    const std::size_t decile = std::max<std::size_t>(1, probes.size() / 10);
    double near = 0.0;
    double far = 0.0;
    for (std::size_t i = 0; i < decile; ++i) {
        near += map.error(static_cast<Eigen::Index>(order[i]));
        far += map.error(static_cast<Eigen::Index>(order[order.size() - 1 - i]));
    }
    map.nearest_decile_mean = near / static_cast<double>(decile);
    map.farthest_decile_mean = far / static_cast<double>(decile);
    return map;
}

ErrorMap error_map(const ExperimentConfig& cfg, int n_per_dim) {
    const Benchmark bm = benchmark_system();
    const CenterSet centers = grid_centers(cfg.domain, n_per_dim);
    const PIResult result = run_policy_iteration(cfg, centers);
    if (result.iterates.empty()) {
        throw ConfigError("policy iteration ran no iterations (pi_max_iter = 0)");
    }
    return controller_error_field(result.last().next_policy, bm.exact_policy, tensor_grid(cfg.domain, cfg.probe_n),
                                  centers);
}

PowerMap power_map(const ExperimentConfig& cfg, const CenterSet& centers) {
    const auto factor = factorize(cfg.make_kernel(), centers);
    PowerMap map{tensor_grid(cfg.domain, cfg.probe_n), {}, centers, {}, 0, 0.0, factor.jitter()};
    map.power = power_function(factor, map.probes);
    Eigen::Index best = 0;
    map.max_power = map.power.maxCoeff(&best);
    map.candidate_index = static_cast<std::size_t>(best);
    map.candidate = map.probes[map.candidate_index];
    return map;
}

PowerMap power_map(const ExperimentConfig& cfg, int n_per_dim) {
    return power_map(cfg, grid_centers(cfg.domain, n_per_dim));
}

std::vector<PowerMap> greedy_rounds(const ExperimentConfig& cfg, int n_per_dim, int rounds) {
    std::vector<PowerMap> maps;
    CenterSet centers = grid_centers(cfg.domain, n_per_dim);
    for (int r = 0; r <= rounds; ++r) {
        maps.push_back(power_map(cfg, centers));
        if (r < rounds) {
            centers = greedy_augment(centers, cfg.make_kernel(), cfg.domain, cfg.probe_n);
        }
    }
    return maps;
}

std::vector<PropertyCheck> kernel_property_suite(const ExperimentConfig& cfg, int samples) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int d = cfg.domain.dim();
    const Point lo = cfg.domain.lower();
    const Point span = cfg.domain.upper() - cfg.domain.lower();
    auto random_point = [&] {
        Point p(d);
        for (int i = 0; i < d; ++i) {
            p(i) = lo(i) + span(i) * 0.5 * (unit(rng) + 1.0);
        }
        return p;
    };

    std::vector<PropertyCheck> checks;
    const double step = 1e-5;
    for (auto family : {KernelFamily::gaussian, KernelFamily::matern32, KernelFamily::matern52}) {
        const Kernel k = cfg.make_kernel(family);
        const std::string name(to_string(family));
        double worst_fd = 0.0;
        double worst_sym = 0.0;
        double worst_diag = 0.0;
        double worst_anti = 0.0;
        for (int s = 0; s < samples; ++s) {
            const Point x = random_point();
            const Point y = random_point();
            const Point g = k.grad_x(x, y);
            Point fd(d);
            for (int i = 0; i < d; ++i) {
                Point xp = x;
                Point xm = x;
                xp(i) += step;
                xm(i) -= step;
                fd(i) = (k.eval(xp, y) - k.eval(xm, y)) / (2.0 * step);
            }
            worst_fd = std::max(worst_fd, (g - fd).norm() / std::max(g.norm(), 1e-300));
            worst_sym = std::max(worst_sym, std::abs(k.eval(x, y) - k.eval(y, x)));
            worst_diag = std::max(worst_diag, std::abs(k.eval(x, x) - k.variance()));
            worst_anti = std::max(worst_anti, (g + k.grad_x(y, x)).norm());
        }
        checks.push_back({name + ": grad_x vs central difference", worst_fd <= 1e-6,
                          "max relative error " + number(worst_fd)});
        checks.push_back({name + ": symmetry", worst_sym == 0.0, "max |k(x,y)-k(y,x)| " + number(worst_sym)});
        checks.push_back({name + ": diagonal equals variance", worst_diag <= 1e-15 * k.variance(),
                          "max deviation " + number(worst_diag)});
        checks.push_back({name + ": gradient antisymmetry", worst_anti <= 1e-15,
                          "max |grad(x,y)+grad(y,x)| " + number(worst_anti)});

        double worst_eig = 0.0;
        bool psd = true;
        std::uniform_int_distribution<int> size_dist(1, 50);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = size_dist(rng);
            PointList pts;
            for (int i = 0; i < n; ++i) {
                pts.push_back(random_point());
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram(k, pts, pts), Eigen::EigenvaluesOnly);
            const double min_eig = eig.eigenvalues().minCoeff();
            worst_eig = std::min(worst_eig, min_eig);
            psd = psd && min_eig >= -1e-12 * n;
        }
        checks.push_back({name + ": Gram PSD", psd, "min eigenvalue " + number(worst_eig)});
    }

    const Kernel rough = cfg.make_kernel(KernelFamily::matern12);
    bool rejected = false;
    try {
        (void)rough.grad_x(Point::Zero(d), Point::Ones(d));
    } catch (const UnsupportedDerivativeError&) {
        rejected = true;
    }
    checks.push_back({"matern12: derivative rejected", rejected, ""});
    return checks;
}

void write_decay_csv(const std::filesystem::path& path, const DecayStudy& study) {
    auto out = open_csv(path);
    out << "kernel,n_per_dim,N,fill_distance,sup_error,anchored_error,raw_error,h_error,pe_margin,iterations,"
           "converged\n";
    for (const auto& r : study.records) {
        out << to_string(r.family) << ',' << r.n_per_dim << ',' << r.centers << ',' << r.fill_distance << ','
            << r.sup_error << ',' << r.anchored_error << ',' << r.raw_error << ',' << r.h_error << ','
            << r.pe_margin << ',' << r.iterations << ',' << (r.converged ? "true" : "false") << '\n';
    }
}

void write_fit_csv(const std::filesystem::path& path, const std::vector<std::pair<std::string, SlopeFit>>& fits) {
    auto out = open_csv(path);
    out << "series,available,degenerate,slope,intercept,r_squared\n";
    for (const auto& [name, fit] : fits) {
        out << name << ',' << (fit.available ? "true" : "false") << ',' << (fit.degenerate ? "true" : "false")
            << ',' << fit.slope << ',' << fit.intercept << ',' << fit.r_squared << '\n';
    }
}

void write_error_map_csv(const std::filesystem::path& path, const ErrorMap& map) {
    auto out = open_csv(path);
    out << "x1,x2,error,distance_to_center\n";
    for (std::size_t i = 0; i < map.probes.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        out << map.probes[i](0) << ',' << map.probes[i](1) << ',' << map.error(row) << ',' << map.distance(row)
            << '\n';
    }
}

void write_power_map_csv(const std::filesystem::path& path, const PowerMap& map) {
    auto out = open_csv(path);
    out << "x1,x2,power\n";
    for (std::size_t i = 0; i < map.probes.size(); ++i) {
        out << map.probes[i](0) << ',' << map.probes[i](1) << ',' << map.power(static_cast<Eigen::Index>(i))
            << '\n';
    }
}

void write_value_map_csv(const std::filesystem::path& path, const Approximant& v, const ScalarField& exact,
                         const PointList& probes) {
    auto out = open_csv(path);
    out << "x1,x2,v_approx,v_exact\n";
    for (const auto& x : probes) {
        out << x(0) << ',' << x(1) << ',' << v.value(x) << ',' << exact(x) << '\n';
    }
}

Manifest::Manifest(std::string command, const ExperimentConfig& cfg)
    : command_(std::move(command)), config_(cfg.echo()), seed_(cfg.seed) {}

void Manifest::add_solve(const std::string& label, std::size_t centers, double pe_margin, double jitter) {
    solves_.push_back({label, centers, pe_margin, jitter});
}

void Manifest::add_result(const std::string& key, double value) {
    numbers_[key] = value;
}

void Manifest::add_result(const std::string& key, const std::string& value) {
    strings_[key] = value;
}

void Manifest::write(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["command"] = command_;
    j["version"] = std::string(version());
    j["seed"] = seed_;
    j["config"] = config_;
    auto& solves = j["solves"] = nlohmann::json::array();
    for (const auto& s : solves_) {
        solves.push_back({{"label", s.label},
                          {"centers", s.centers},
                          {"pe_margin", std::isfinite(s.pe_margin) ? nlohmann::json(s.pe_margin) : nullptr},
                          {"jitter", s.jitter}});
    }
    auto& results = j["results"] = nlohmann::json::object();
    for (const auto& [k, v] : numbers_) {
        results[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    }
    for (const auto& [k, v] : strings_) {
        results[k] = v;
    }
    // write-then-rename so readers never see a partial file
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            throw Error("cannot open '" + tmp + "' for writing");
        }
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

} // namespace kernel_pi
