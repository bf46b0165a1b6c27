#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adastrat/integrands.hpp"

namespace adastrat {

enum class Experiment { toy, logistic, linear, sine };

Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

/// Names accepted in BenchConfig::estimators.
inline const std::vector<std::string> kEstimatorNames{"mc", "haber", "adastrat", "adastrat-var", "oracle"};

struct BenchConfig {
    Experiment experiment = Experiment::toy;
    std::size_t s = 5;
    int k_min = 6;
    int k_max = 13;
    std::size_t replicates = 256;
    std::vector<std::string> estimators{"mc", "adastrat"};
    std::uint64_t master_seed = 42;
    std::optional<std::string> data_path;  // logistic only
    std::string output_path;
    std::vector<double> lambda;            // linear weights (size s) or sine slope (size 1)
    std::vector<std::uint64_t> haber_k;    // explicit Haber edge counts; N = k^s
    double prior_sd = 5.0;
    bool intercept = false;
    bool timing = true;   // false writes wall_seconds = 0 so output is byte-stable
    unsigned threads = 0; // 0 = hardware concurrency
};

/// Throws ArgumentError describing the first violated constraint.
void validate(const BenchConfig& config);

/// Integrand for the configured experiment. For logistic, reads the data
/// file (config path, else $ADASTRAT_GERMAN_PATH) and fits the proposal.
IntegrandSpec make_integrand(const BenchConfig& config);

struct BenchRow {
    std::string estimator;
    std::size_t s = 0;
    std::uint64_t n = 0;
    std::uint64_t total_evals = 0;
    std::size_t replicates = 0;
    double mean_estimate = 0.0;
    double reference = 0.0;
    double rmse = 0.0;
    double rel_rmse = 0.0;
    std::optional<double> mean_var_estimate;
    double wall_seconds = 0.0;

    friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

/// Every (estimator, N) cell of the sweep with its replicates, one row per
/// cell ordered by estimator (config order) then N. Replicate i of a cell
/// uses seed derive_seed(master_seed, {hash_label(estimator), N, i}).
std::vector<BenchRow> run_bench(const BenchConfig& config);
std::vector<BenchRow> run_bench(const BenchConfig& config, const IntegrandSpec& integrand);

inline constexpr const char* kCsvHeader =
    "estimator,s,N,total_evals,replicates,mean_estimate,reference,rmse,rel_rmse,mean_var_estimate,wall_seconds";

void write_csv(std::ostream& os, std::span<const BenchRow> rows);
std::vector<BenchRow> read_csv(std::istream& is);

/// Least-squares slope of log2(rmse) against log2(N) over the rows of
/// `estimator`. Needs at least three distinct N.
double fit_slope(std::span<const BenchRow> rows, const std::string& estimator);

}  // namespace adastrat
