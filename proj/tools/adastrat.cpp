// adastrat: benchmark sweeps of adaptive-stratification estimators.
//
//   adastrat bench --experiment toy --s 5 --kmin 6 --kmax 13 --reps 256 \
//       --estimators mc,adastrat --seed 42 --out toy_s5.csv
//   adastrat slope --in toy_s5.csv --estimator adastrat
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "adastrat/bench.hpp"
#include "adastrat/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive stratification Monte Carlo benchmarks"};
    app.require_subcommand(1);

    adastrat::BenchConfig config;
    std::string experiment = "toy";
    std::string data_path;
    bool no_timing = false;
    auto* bench = app.add_subcommand("bench", "Run an RMSE-vs-N sweep and write CSV");
    bench->add_option("--experiment", experiment, "toy | logistic | linear | sine")->capture_default_str();
    bench->add_option("--s", config.s, "Dimension")->capture_default_str();
    bench->add_option("--kmin", config.k_min, "Smallest exponent, N = 2^k")->capture_default_str();
    bench->add_option("--kmax", config.k_max, "Largest exponent, N = 2^k")->capture_default_str();
    bench->add_option("--reps", config.replicates, "Replicates per cell")->capture_default_str();
    bench->add_option("--estimators", config.estimators, "Subset of mc,haber,adastrat,adastrat-var,oracle")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--seed", config.master_seed, "Master seed")->capture_default_str();
    bench->add_option("--data", data_path, "German credit numeric file (else $ADASTRAT_GERMAN_PATH)");
    bench->add_option("--lambda", config.lambda, "Linear weights, or the sine slope")->delimiter(',');
    bench->add_option("--haber-k", config.haber_k, "Haber edge counts k (N = k^s)")->delimiter(',');
    bench->add_option("--prior-sd", config.prior_sd, "Prior standard deviation (logistic)")->capture_default_str();
    bench->add_flag("--intercept", config.intercept, "Append an intercept column (logistic)");
    bench->add_flag("--no-timing", no_timing, "Write wall_seconds = 0 for byte-reproducible output");
    bench->add_option("--threads", config.threads, "Worker threads (0 = all cores)")->capture_default_str();
    bench->add_option("--out", config.output_path, "Output CSV path (- for stdout)")->required();

    std::string in_path;
    std::string estimator;
    auto* slope = app.add_subcommand("slope", "Fit log2(rmse) ~ log2(N) for one estimator of a CSV");
    slope->add_option("--in", in_path, "Input CSV")->required();
    slope->add_option("--estimator", estimator, "Estimator label")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*bench) {
            config.experiment = adastrat::parse_experiment(experiment);
            if (!data_path.empty()) config.data_path = data_path;
            config.timing = !no_timing;
            const auto rows = adastrat::run_bench(config);
            if (config.output_path == "-") {
                adastrat::write_csv(std::cout, rows);
            } else {
                std::ofstream out(config.output_path, std::ios::binary);
                if (!out) throw adastrat::IoError("cannot write '" + config.output_path + "'");
                adastrat::write_csv(out, rows);
                if (!out) throw adastrat::IoError("write failed for '" + config.output_path + "'");
            }
        } else if (*slope) {
            std::ifstream in(in_path, std::ios::binary);
            if (!in) throw adastrat::IoError("cannot open '" + in_path + "'");
            const auto rows = adastrat::read_csv(in);
            std::printf("%.6f\n", adastrat::fit_slope(rows, estimator));
        }
    } catch (const adastrat::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const adastrat::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
