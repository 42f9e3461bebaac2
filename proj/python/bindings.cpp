#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kernel_pi/errors.hpp"
#include "kernel_pi/experiments.hpp"

namespace py = pybind11;
using namespace kernel_pi;

namespace {

// Rows of an (n, d) array as points.
PointList to_points(const Eigen::MatrixXd& rows) {
    PointList out;
    out.reserve(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        out.emplace_back(rows.row(i).transpose());
    }
    return out;
}

Eigen::MatrixXd to_rows(const PointList& points) {
    if (points.empty()) {
        return Eigen::MatrixXd(0, 0);
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()), points.front().size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
    }
    return out;
}

Domain make_box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    return Domain(lower, upper);
}

py::dict record_dict(const DecayRecord& r) {
    py::dict d;
    d["kernel"] = std::string(to_string(r.family));
    d["n_per_dim"] = r.n_per_dim;
    d["centers"] = r.centers;
    d["fill_distance"] = r.fill_distance;
    d["sup_error"] = r.sup_error;
    d["anchored_error"] = r.anchored_error;
    d["raw_error"] = r.raw_error;
    d["pe_margin"] = r.pe_margin;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    return d;
}

py::dict study_dict(const DecayStudy& study) {
    py::list records;
    for (const auto& r : study.records) {
        records.append(record_dict(r));
    }
    py::dict d;
    d["records"] = records;
    d["slope"] = study.fit.slope;
    d["r_squared"] = study.fit.r_squared;
    d["fit_available"] = study.fit.available;
    d["fit_degenerate"] = study.fit.degenerate;
    return d;
}

ExperimentConfig make_config(const py::dict& overrides) {
    ExperimentConfig cfg;
    for (const auto& [key, value] : overrides) {
        cfg.set(py::str(key), py::str(value));
    }
    cfg.validate();
    return cfg;
}

} // namespace

PYBIND11_MODULE(_kernel_pi, m) {
    m.doc() = "Kernel-based Galerkin policy iteration";
    m.attr("__version__") = std::string(version());

    auto base = py::register_exception<Error>(m, "KernelPiError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<PeViolationError>(m, "PeViolationError", base.ptr());
    py::register_exception<SingularGramError>(m, "SingularGramError", base.ptr());
    py::register_exception<NonfiniteError>(m, "NonfiniteError", base.ptr());
    py::register_exception<UnsupportedDerivativeError>(m, "UnsupportedDerivativeError", base.ptr());

    py::class_<Kernel>(m, "Kernel")
        .def(py::init([](const std::string& family, double lengthscale, double variance) {
                 return Kernel(parse_kernel_family(family), lengthscale, variance);
             }),
             py::arg("family"), py::arg("lengthscale"), py::arg("variance") = 1.0)
        .def_property_readonly("family", [](const Kernel& k) { return std::string(to_string(k.family())); })
        .def_property_readonly("lengthscale", &Kernel::lengthscale)
        .def_property_readonly("variance", &Kernel::variance)
        .def_property_readonly("differentiable", &Kernel::differentiable)
        .def("eval", &Kernel::eval, py::arg("x"), py::arg("y"))
        .def("grad_x", &Kernel::grad_x, py::arg("x"), py::arg("y"))
        .def("radial", &Kernel::radial, py::arg("r"))
        .def("gram", [](const Kernel& k, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
            return gram(k, to_points(x), to_points(y));
        });

    m.def(
        "grid_centers",
        [](const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int n) {
            return to_rows(grid_centers(make_box(lower, upper), n).points());
        },
        py::arg("lower"), py::arg("upper"), py::arg("n"));
    m.def(
        "tensor_grid",
        [](const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int n) {
            return to_rows(tensor_grid(make_box(lower, upper), n));
        },
        py::arg("lower"), py::arg("upper"), py::arg("n"));
    m.def(
        "fill_distance",
        [](const Eigen::MatrixXd& centers, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int probe_n) {
            return fill_distance(CenterSet(to_points(centers)), make_box(lower, upper), probe_n);
        },
        py::arg("centers"), py::arg("lower"), py::arg("upper"), py::arg("probe_n") = 201);
    m.def(
        "power_function",
        [](const Kernel& k, const Eigen::MatrixXd& centers, const Eigen::MatrixXd& points) {
            return power_function(factorize(k, CenterSet(to_points(centers))), to_points(points));
        },
        py::arg("kernel"), py::arg("centers"), py::arg("points"));
    m.def(
        "gauss_legendre",
        [](int order) {
            const auto rule = gauss_legendre(order);
            return py::make_tuple(rule.nodes, rule.weights);
        },
        py::arg("order"));

    py::class_<Approximant>(m, "Approximant")
        .def(py::init([](const Kernel& k, const Eigen::MatrixXd& centers, const Eigen::VectorXd& alpha) {
                 return Approximant(k, CenterSet(to_points(centers)), alpha);
             }),
             py::arg("kernel"), py::arg("centers"), py::arg("coefficients"))
        .def_property_readonly("coefficients", &Approximant::coefficients)
        .def_property_readonly("centers", [](const Approximant& v) { return to_rows(v.centers().points()); })
        .def("value", &Approximant::value, py::arg("x"))
        .def("values", [](const Approximant& v, const Eigen::MatrixXd& pts) { return v.values(to_points(pts)); })
        .def("gradient", &Approximant::gradient, py::arg("x"))
        .def("h_norm", &Approximant::h_norm);

    m.def(
        "interpolate",
        [](const Kernel& k, const Eigen::MatrixXd& centers, const Eigen::VectorXd& values) {
            return interpolate(k, CenterSet(to_points(centers)), values);
        },
        py::arg("kernel"), py::arg("centers"), py::arg("values"));

    m.def("benchmark_value", [](const Point& x) { return benchmark_system().exact_value(x); }, py::arg("x"));
    m.def("benchmark_policy", [](const Point& x) { return benchmark_system().exact_policy(x)(0); }, py::arg("x"));

    m.def(
        "solve_benchmark",
        [](const py::dict& overrides) {
            const auto cfg = make_config(overrides);
            const auto problem = benchmark_value_problem();
            const auto sol = solve_on_grid(cfg, cfg.make_kernel(), cfg.grid_size, problem);
            const auto errs = value_errors(sol.value, problem.exact_value, tensor_grid(cfg.domain, cfg.probe_n));
            py::dict d;
            d["value"] = sol.value;
            d["pe_margin"] = sol.system.pe_margin;
            d["residual"] = sol.residual;
            d["sup_error"] = errs.modulo_constant;
            return d;
        },
        py::arg("config") = py::dict());
    m.def(
        "convergence_study",
        [](const py::dict& overrides) {
            const auto cfg = make_config(overrides);
            return study_dict(convergence_study(cfg, cfg.kernel));
        },
        py::arg("config") = py::dict());
    m.def(
        "pi_decay_study", [](const py::dict& overrides) { return study_dict(pi_decay_study(make_config(overrides))); },
        py::arg("config") = py::dict());
    m.def(
        "kernel_property_suite",
        [](const py::dict& overrides, int samples) {
            py::list out;
            for (const auto& c : kernel_property_suite(make_config(overrides), samples)) {
                out.append(py::make_tuple(c.name, c.passed, c.detail));
            }
            return out;
        },
        py::arg("config") = py::dict(), py::arg("samples") = 200);
}
