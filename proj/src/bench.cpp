#include "adastrat/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "adastrat/data_ingest.hpp"
#include "adastrat/errors.hpp"
#include "adastrat/estimators.hpp"
#include "adastrat/replicates.hpp"
#include "adastrat/rng.hpp"
#include "adastrat/stats.hpp"

namespace adastrat {

namespace {

struct Cell {
    std::string estimator;
    std::uint64_t n;
    std::uint64_t param;  // log2 N, or Haber's k
};

bool is_known_estimator(const std::string& name) {
    return std::find(kEstimatorNames.begin(), kEstimatorNames.end(), name) != kEstimatorNames.end();
}

std::vector<std::uint64_t> haber_edges(const BenchConfig& config) {
    if (!config.haber_k.empty()) return config.haber_k;
    std::vector<std::uint64_t> out;
    for (int k = config.k_min; k <= config.k_max; ++k)
        if (auto j = haber_edge_for(std::uint64_t{1} << k, config.s)) out.push_back(*j);
    return out;
}

std::vector<Cell> plan_cells(const BenchConfig& config) {
    std::vector<Cell> cells;
    for (const auto& est : config.estimators) {
        if (est == "haber") {
            auto edges = haber_edges(config);
            std::sort(edges.begin(), edges.end());
            for (std::uint64_t k : edges) cells.push_back({est, haber_points(k, config.s), k});
        } else {
            for (int k = config.k_min; k <= config.k_max; ++k)
                cells.push_back({est, std::uint64_t{1} << k, static_cast<std::uint64_t>(k)});
        }
    }
    return cells;
}

std::uint64_t replicate_seed(const BenchConfig& config, const Cell& cell, std::size_t i) {
    return derive_seed(config.master_seed, {hash_label(cell.estimator), cell.n, static_cast<std::uint64_t>(i)});
}

EstimateReport run_one(const IntegrandSpec& f, const Cell& cell, std::uint64_t seed) {
    const int k = static_cast<int>(cell.param);
    if (cell.estimator == "mc") return estimate_mc(f, cell.n, seed);
    if (cell.estimator == "haber") return estimate_haber1(f, cell.param, seed);
    if (cell.estimator == "adastrat") return estimate_adastrat(f, k, std::nullopt, seed);
    if (cell.estimator == "adastrat-var") return estimate_adastrat_with_variance(f, k, seed);
    if (cell.estimator == "oracle") return estimate_oracle_stratified(f, k, seed);
    throw ArgumentError("unknown estimator '" + cell.estimator + "'");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Experiment parse_experiment(const std::string& name) {
    if (name == "toy") return Experiment::toy;
    if (name == "logistic") return Experiment::logistic;
    if (name == "linear") return Experiment::linear;
    if (name == "sine") return Experiment::sine;
    throw ArgumentError("unknown experiment '" + name + "' (expected toy, logistic, linear or sine)");
}

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::toy: return "toy";
        case Experiment::logistic: return "logistic";
        case Experiment::linear: return "linear";
        case Experiment::sine: return "sine";
    }
    return "?";
}

void validate(const BenchConfig& config) {
    if (config.s < 1) throw ArgumentError("s must be at least 1");
    if (config.experiment == Experiment::sine && config.s != 2) throw ArgumentError("the sine experiment has s = 2");
    if (config.k_min < 0 || config.k_min > config.k_max || config.k_max > 40)
        throw ArgumentError("need 0 <= kmin <= kmax <= 40");
    if (config.replicates < 2) throw ArgumentError("replicates must be at least 2");
    if (config.estimators.empty()) throw ArgumentError("no estimators selected");
    std::set<std::string> seen;
    for (const auto& e : config.estimators) {
        if (!is_known_estimator(e)) throw ArgumentError("unknown estimator '" + e + "'");
        if (!seen.insert(e).second) throw ArgumentError("estimator '" + e + "' listed twice");
    }
    if (seen.count("adastrat-var") && config.k_min < 1) throw ArgumentError("adastrat-var needs kmin >= 1");
    if (seen.count("oracle") && config.experiment == Experiment::logistic)
        throw ArgumentError("the oracle estimator needs a closed-form Delta, unavailable for logistic");
    if (seen.count("haber")) {
        const auto edges = haber_edges(config);
        if (edges.empty())
            throw ArgumentError("haber: no N = 2^k in [kmin, kmax] is a perfect s-th power; pass --haber-k");
        for (std::uint64_t k : edges) {
            if (k < 2) throw ArgumentError("haber: k must be at least 2");
            haber_points(k, config.s);
        }
    }
    if (config.experiment == Experiment::linear && !config.lambda.empty() && config.lambda.size() != config.s)
        throw ArgumentError("linear: lambda must have s entries");
    if (config.experiment == Experiment::sine && config.lambda.size() > 1)
        throw ArgumentError("sine: lambda takes a single value");
    if (!(config.prior_sd > 0.0)) throw ArgumentError("prior_sd must be positive");

    // per-cell seeds must be pairwise distinct across the grid
    std::vector<std::uint64_t> seeds;
    for (const Cell& cell : plan_cells(config))
        for (std::size_t i = 0; i < config.replicates; ++i) seeds.push_back(replicate_seed(config, cell, i));
    std::sort(seeds.begin(), seeds.end());
    if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end())
        throw ArgumentError("seed collision in the replicate grid; choose another master seed");
}

IntegrandSpec make_integrand(const BenchConfig& config) {
    switch (config.experiment) {
        case Experiment::toy: return toy(config.s);
        case Experiment::linear:
            return linear(config.lambda.empty() ? std::vector<double>(config.s, 1.0) : config.lambda);
        case Experiment::sine: return sine_counterexample(config.lambda.empty() ? 1.0 : config.lambda.front());
        case Experiment::logistic: {
            std::string path;
            if (config.data_path) {
                path = *config.data_path;
            } else if (const char* env = std::getenv(kGermanPathEnv)) {
                path = env;
            } else {
                throw IoError(std::string("logistic: no data file; pass --data or set ") + kGermanPathEnv);
            }
            const Dataset data = load_german_numeric(path, config.s, config.intercept);
            const LaplaceProposal proposal = fit_laplace(data.design, data.labels, config.prior_sd);
            return marginal_likelihood_integrand(proposal, data.design, data.labels, config.prior_sd);
        }
    }
    throw ArgumentError("unknown experiment");
}

std::vector<BenchRow> run_bench(const BenchConfig& config) {
    validate(config);
    return run_bench(config, make_integrand(config));
}

std::vector<BenchRow> run_bench(const BenchConfig& config, const IntegrandSpec& integrand) {
    validate(config);
    if (integrand.dim != config.s) throw ArgumentError("integrand dimension does not match s");
    const std::vector<Cell> cells = plan_cells(config);

    struct CellResult {
        std::vector<double> estimates;
        std::uint64_t total_evals = 0;
        std::optional<double> mean_var;
        double seconds = 0.0;
    };
    std::vector<CellResult> results;
    results.reserve(cells.size());
    for (const Cell& cell : cells) {
        const auto start = std::chrono::steady_clock::now();
        const auto reports = parallel_map(config.replicates, config.threads, [&](std::size_t i) {
            return run_one(integrand, cell, replicate_seed(config, cell, i));
        });
        const auto stop = std::chrono::steady_clock::now();

        CellResult r;
        r.seconds = config.timing ? std::chrono::duration<double>(stop - start).count() : 0.0;
        r.total_evals = reports.front().total_evaluations;
        double var_sum = 0.0;
        bool all_var = true;
        for (const auto& rep : reports) {
            r.estimates.push_back(rep.estimate);
            if (rep.variance_estimate)
                var_sum += *rep.variance_estimate;
            else
                all_var = false;
        }
        if (all_var) r.mean_var = var_sum / static_cast<double>(reports.size());
        results.push_back(std::move(r));
    }

    double reference;
    ReferenceKind kind;
    if (integrand.analytic_integral) {
        reference = *integrand.analytic_integral;
        kind = ReferenceKind::analytic;
    } else {
        // pool every estimator's replicates at the largest N
        std::uint64_t largest = 0;
        for (const Cell& c : cells) largest = std::max(largest, c.n);
        MomentAccumulator pooled;
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (cells[c].n == largest)
                for (double e : results[c].estimates) pooled.add(e);
        reference = pooled.mean;
        kind = ReferenceKind::grand_mean;
    }

    std::vector<BenchRow> rows;
    rows.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const RmseSummary sum = summarize_replicates(results[c].estimates, reference, kind);
        BenchRow row;
        row.estimator = cells[c].estimator;
        row.s = config.s;
        row.n = cells[c].n;
        row.total_evals = results[c].total_evals;
        row.replicates = config.replicates;
        row.mean_estimate = sum.mean_of_estimates;
        row.reference = reference;
        row.rmse = sum.rmse;
        row.rel_rmse = sum.relative_rmse;
        row.mean_var_estimate = results[c].mean_var;
        row.wall_seconds = results[c].seconds;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_csv(std::ostream& os, std::span<const BenchRow> rows) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.estimator << ',' << r.s << ',' << r.n << ',' << r.total_evals << ',' << r.replicates << ','
           << format_double(r.mean_estimate) << ',' << format_double(r.reference) << ',' << format_double(r.rmse)
           << ',' << format_double(r.rel_rmse) << ','
           << (r.mean_var_estimate ? format_double(*r.mean_var_estimate) : std::string()) << ','
           << format_double(r.wall_seconds) << '\n';
    }
}

std::vector<BenchRow> read_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(is, line)) throw ParseError("csv: empty input", line_no);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw ParseError("csv: unexpected header", line_no);

    std::vector<BenchRow> rows;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_commas(line);
        if (f.size() != 11) throw ParseError("csv: expected 11 fields, got " + std::to_string(f.size()), line_no);
        try {
            BenchRow r;
            r.estimator = f[0];
            r.s = std::stoull(f[1]);
            r.n = std::stoull(f[2]);
            r.total_evals = std::stoull(f[3]);
            r.replicates = std::stoull(f[4]);
            r.mean_estimate = std::stod(f[5]);
            r.reference = std::stod(f[6]);
            r.rmse = std::stod(f[7]);
            r.rel_rmse = std::stod(f[8]);
            if (!f[9].empty()) r.mean_var_estimate = std::stod(f[9]);
            r.wall_seconds = std::stod(f[10]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ParseError("csv: malformed numeric field", line_no);
        }
    }
    return rows;
}

double fit_slope(std::span<const BenchRow> rows, const std::string& estimator) {
    std::vector<double> xs, ys;
    std::set<std::uint64_t> distinct;
    for (const auto& r : rows) {
        if (r.estimator != estimator) continue;
        if (!(r.rmse > 0.0)) throw ArgumentError("fit_slope: rmse must be positive to take logs");
        xs.push_back(std::log2(static_cast<double>(r.n)));
        ys.push_back(std::log2(r.rmse));
        distinct.insert(r.n);
    }
    if (distinct.size() < 3)
        throw ArgumentError("fit_slope: need at least 3 distinct N for estimator '" + estimator + "'");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace adastrat
