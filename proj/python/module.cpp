#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "adastrat/bench.hpp"
#include "adastrat/errors.hpp"
#include "adastrat/estimators.hpp"
#include "adastrat/integrands.hpp"
#include "adastrat/oracle.hpp"
#include "adastrat/partition_tree.hpp"

namespace py = pybind11;
using namespace adastrat;

namespace {

SampleBatch to_batch(py::array_t<double, py::array::c_style | py::array::forcecast> points,
                     py::array_t<double, py::array::c_style | py::array::forcecast> values) {
    if (points.ndim() != 2) throw ArgumentError("points must be a 2-d array");
    if (values.ndim() != 1 || values.shape(0) != points.shape(0))
        throw ArgumentError("values must be 1-d with one entry per point");
    SampleBatch batch(static_cast<std::size_t>(points.shape(1)));
    const auto p = points.unchecked<2>();
    const auto v = values.unchecked<1>();
    std::vector<double> x(batch.dim);
    for (py::ssize_t i = 0; i < points.shape(0); ++i) {
        for (py::ssize_t j = 0; j < points.shape(1); ++j) x[static_cast<std::size_t>(j)] = p(i, j);
        batch.push_back(x, v(i));
    }
    return batch;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Adaptive stratified Monte Carlo integration on the unit cube";

    py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<IntegrandSpec>(m, "Integrand")
        .def_readonly("name", &IntegrandSpec::name)
        .def_readonly("dim", &IntegrandSpec::dim)
        .def_readonly("analytic_integral", &IntegrandSpec::analytic_integral)
        .def_readonly("log_scale", &IntegrandSpec::log_scale)
        .def_property_readonly("has_closed_form_delta", &IntegrandSpec::has_closed_form_delta)
        .def("__call__", [](const IntegrandSpec& f, const std::vector<double>& x) {
            if (x.size() != f.dim) throw ArgumentError("point has the wrong dimension");
            return f.evaluate(x);
        })
        .def("delta", [](const IntegrandSpec& f, std::vector<double> lower, std::vector<double> upper) {
            if (!f.has_closed_form_delta()) throw UnsupportedError("integrand has no closed-form Delta");
            return f.closed_form_delta(Rectangle(std::move(lower), std::move(upper), 1, 1));
        });

    m.def("toy", &toy, py::arg("s"));
    m.def("linear", &linear, py::arg("weights"));
    m.def("sine_counterexample", &sine_counterexample, py::arg("lam") = 1.0);
    m.def("normal_quantile", py::vectorize(&normal_quantile), py::arg("p"));

    py::class_<EstimateReport>(m, "EstimateReport")
        .def_readonly("estimate", &EstimateReport::estimate)
        .def_readonly("total_evaluations", &EstimateReport::total_evaluations)
        .def_readonly("variance_estimate", &EstimateReport::variance_estimate)
        .def_readonly("seed", &EstimateReport::seed)
        .def_readonly("estimator_name", &EstimateReport::estimator_name)
        .def("__repr__", [](const EstimateReport& r) {
            return "EstimateReport(" + r.estimator_name + ", estimate=" + std::to_string(r.estimate) +
                   ", evaluations=" + std::to_string(r.total_evaluations) + ")";
        });

    m.def("estimate_mc", &estimate_mc, py::arg("f"), py::arg("n"), py::arg("seed"));
    m.def("estimate_haber1", &estimate_haber1, py::arg("f"), py::arg("k"), py::arg("seed"));
    m.def("estimate_adastrat", &estimate_adastrat, py::arg("f"), py::arg("k"), py::arg("depth") = py::none(),
          py::arg("seed"));
    m.def("estimate_adastrat_with_variance", &estimate_adastrat_with_variance, py::arg("f"), py::arg("k"),
          py::arg("seed"));
    m.def("estimate_adastrat_rational", &estimate_adastrat_rational, py::arg("f"), py::arg("n"), py::arg("seed"));
    m.def("estimate_oracle_stratified", &estimate_oracle_stratified, py::arg("f"), py::arg("k"), py::arg("seed"));

    py::class_<SplitDecision>(m, "SplitDecision")
        .def_readonly("axis", &SplitDecision::axis)
        .def_readonly("n_plus", &SplitDecision::n_plus)
        .def_readonly("criterion_value", &SplitDecision::criterion_value)
        .def_readonly("was_tiebreak", &SplitDecision::was_tiebreak);

    py::class_<Partition>(m, "Partition")
        .def_readonly("dim", &Partition::dim)
        .def_readonly("depth", &Partition::depth)
        .def_readonly("decisions", &Partition::decisions)
        .def_property_readonly("leaves",
                               [](const Partition& p) {
                                   py::list out;
                                   for (const auto& r : p.leaves) {
                                       std::vector<double> lo(r.lower().begin(), r.lower().end());
                                       std::vector<double> hi(r.upper().begin(), r.upper().end());
                                       out.append(py::make_tuple(lo, hi));
                                   }
                                   return out;
                               })
        .def_property_readonly("volumes",
                               [](const Partition& p) {
                                   std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
                                   for (const auto& r : p.leaves) {
                                       const auto v = r.exact_volume();
                                       out.emplace_back(v.num, v.den);
                                   }
                                   return out;
                               })
        .def("__len__", [](const Partition& p) { return p.leaves.size(); })
        .def("serialize", [](const Partition& p) {
            std::ostringstream os;
            write_partition(os, p);
            return os.str();
        });

    m.def(
        "grow_pow2",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> points,
           py::array_t<double, py::array::c_style | py::array::forcecast> values, int depth, std::uint64_t seed) {
            Rng rng(seed);
            return grow_pow2(to_batch(points, values), depth, rng);
        },
        py::arg("points"), py::arg("values"), py::arg("depth"), py::arg("seed"));
    m.def(
        "grow_rational",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> points,
           py::array_t<double, py::array::c_style | py::array::forcecast> values, std::uint64_t seed) {
            Rng rng(seed);
            const auto batch = to_batch(points, values);
            return grow_rational(batch, batch.size(), rng);
        },
        py::arg("points"), py::arg("values"), py::arg("seed"));
    m.def(
        "grow_oracle",
        [](const IntegrandSpec& f, int depth, std::uint64_t seed) {
            if (!f.has_closed_form_delta()) throw UnsupportedError("integrand has no closed-form Delta");
            Rng rng(seed);
            return grow_oracle(f.closed_form_delta, f.dim, depth, rng);
        },
        py::arg("f"), py::arg("depth"), py::arg("seed"));
    m.def(
        "stratified_variance",
        [](const Partition& p, const IntegrandSpec& f, std::uint64_t n) {
            if (!f.has_closed_form_delta()) throw UnsupportedError("integrand has no closed-form Delta");
            return stratified_variance(p, f.closed_form_delta, n);
        },
        py::arg("partition"), py::arg("f"), py::arg("total_points"));
    m.def("predicted_rate_linear", &predicted_rate_linear, py::arg("active_count"));

    py::class_<BenchConfig>(m, "BenchConfig")
        .def(py::init<>())
        .def_property(
            "experiment", [](const BenchConfig& c) { return to_string(c.experiment); },
            [](BenchConfig& c, const std::string& e) { c.experiment = parse_experiment(e); })
        .def_readwrite("s", &BenchConfig::s)
        .def_readwrite("k_min", &BenchConfig::k_min)
        .def_readwrite("k_max", &BenchConfig::k_max)
        .def_readwrite("replicates", &BenchConfig::replicates)
        .def_readwrite("estimators", &BenchConfig::estimators)
        .def_readwrite("master_seed", &BenchConfig::master_seed)
        .def_readwrite("data_path", &BenchConfig::data_path)
        .def_readwrite("lam", &BenchConfig::lambda)
        .def_readwrite("haber_k", &BenchConfig::haber_k)
        .def_readwrite("prior_sd", &BenchConfig::prior_sd)
        .def_readwrite("intercept", &BenchConfig::intercept)
        .def_readwrite("timing", &BenchConfig::timing)
        .def_readwrite("threads", &BenchConfig::threads);

    py::class_<BenchRow>(m, "BenchRow")
        .def_readonly("estimator", &BenchRow::estimator)
        .def_readonly("s", &BenchRow::s)
        .def_readonly("n", &BenchRow::n)
        .def_readonly("total_evals", &BenchRow::total_evals)
        .def_readonly("replicates", &BenchRow::replicates)
        .def_readonly("mean_estimate", &BenchRow::mean_estimate)
        .def_readonly("reference", &BenchRow::reference)
        .def_readonly("rmse", &BenchRow::rmse)
        .def_readonly("rel_rmse", &BenchRow::rel_rmse)
        .def_readonly("mean_var_estimate", &BenchRow::mean_var_estimate)
        .def_readonly("wall_seconds", &BenchRow::wall_seconds);

    m.def(
        "run_bench",
        [](const BenchConfig& c) {
            py::gil_scoped_release release;
            return run_bench(c);
        },
        py::arg("config"));
    m.def(
        "to_csv",
        [](const std::vector<BenchRow>& rows) {
            std::ostringstream os;
            write_csv(os, rows);
            return os.str();
        },
        py::arg("rows"));
    m.def(
        "fit_slope", [](const std::vector<BenchRow>& rows, const std::string& est) { return fit_slope(rows, est); },
        py::arg("rows"), py::arg("estimator"));
}
