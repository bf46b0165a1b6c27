#include "adastrat/estimators.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "adastrat/errors.hpp"
#include "adastrat/partition_tree.hpp"
#include "adastrat/stats.hpp"

namespace adastrat {

namespace {

// Wraps an integrand and counts calls.
class CountingEvaluator {
public:
    explicit CountingEvaluator(const IntegrandSpec& f) : f_(f) {
        if (!f_.evaluate) throw ArgumentError("integrand '" + f_.name + "' has no evaluator");
        if (f_.dim == 0) throw ArgumentError("integrand '" + f_.name + "' has dimension 0");
    }
    double operator()(std::span<const double> x) {
        ++calls_;
        return f_.evaluate(x);
    }
    std::uint64_t calls() const { return calls_; }

private:
    const IntegrandSpec& f_;
    std::uint64_t calls_ = 0;
};

void check_log2_size(int k, const char* who) {
    if (k < 0 || k > 40) throw ArgumentError(std::string(who) + ": k must lie in [0, 40]");
}

SampleBatch preliminary_sample(CountingEvaluator& eval, std::size_t dim, std::uint64_t n, Rng& rng) {
    SampleBatch batch(dim);
    batch.coords.resize(n * dim);
    batch.values.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        std::span<double> x(batch.coords.data() + i * dim, dim);
        for (double& xi : x) xi = rng.uniform();
        batch.values[i] = eval(x);
    }
    return batch;
}

// Sum of f over `per_leaf` fresh uniform points in each leaf.
double stratified_sum(CountingEvaluator& eval, const Partition& partition, std::uint64_t per_leaf, Rng& rng,
                      std::vector<MomentAccumulator>* per_leaf_moments = nullptr) {
    std::vector<double> x(partition.dim);
    double sum = 0.0;
    for (const auto& leaf : partition.leaves) {
        MomentAccumulator acc;
        for (std::uint64_t n = 0; n < per_leaf; ++n) {
            sample_uniform(leaf, rng, x);
            const double y = eval(x);
            sum += y;
            acc.add(y);
        }
        if (per_leaf_moments) per_leaf_moments->push_back(acc);
    }
    return sum;
}

void check_evaluations(const CountingEvaluator& eval, std::uint64_t expected, const char* who) {
    if (eval.calls() != expected)
        throw std::logic_error(std::string(who) + ": evaluation count " + std::to_string(eval.calls()) +
                               " != expected " + std::to_string(expected));
}

}  // namespace

EstimateReport estimate_mc(const IntegrandSpec& f, std::uint64_t n, std::uint64_t seed) {
    if (n < 1) throw ArgumentError("estimate_mc: N must be at least 1");
    CountingEvaluator eval(f);
    Rng rng(seed);
    std::vector<double> x(f.dim);
    MomentAccumulator acc;
    for (std::uint64_t i = 0; i < n; ++i) {
        for (double& xi : x) xi = rng.uniform();
        acc.add(eval(x));
    }
    check_evaluations(eval, n, "estimate_mc");
    EstimateReport out{acc.mean, eval.calls(), std::nullopt, seed, "mc"};
    if (n >= 2) out.variance_estimate = acc.variance() / static_cast<double>(n);
    return out;
}

std::uint64_t haber_points(std::uint64_t k, std::size_t s) {
    std::uint64_t n = 1;
    for (std::size_t i = 0; i < s; ++i) {
        if (k != 0 && n > UINT64_MAX / k) throw ArgumentError("haber: k^s overflows 64 bits");
        n *= k;
    }
    return n;
}

std::optional<std::uint64_t> haber_edge_for(std::uint64_t n, std::size_t s) {
    if (s == 0 || n < 2) return std::nullopt;
    auto k = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(s))));
    for (std::uint64_t cand = (k > 2 ? k - 1 : 2); cand <= k + 1; ++cand) {
        std::uint64_t p = 1;
        bool overflow = false;
        for (std::size_t i = 0; i < s && !overflow; ++i) {
            if (p > n / cand) overflow = true;
            else p *= cand;
        }
        if (!overflow && p == n) return cand;
    }
    return std::nullopt;
}

EstimateReport estimate_haber1(const IntegrandSpec& f, std::uint64_t k, std::uint64_t seed) {
    if (k < 2) throw ArgumentError("estimate_haber1: Haber's estimator is defined only for N = k^s with k >= 2");
    const std::size_t s = f.dim;
    const std::uint64_t n = haber_points(k, s);
    CountingEvaluator eval(f);
    Rng rng(seed);
    const double inv_k = 1.0 / static_cast<double>(k);
    std::vector<std::uint64_t> cell(s, 0);
    std::vector<double> x(s);
    double sum = 0.0;
    for (std::uint64_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < s; ++i) {
            const double lo = static_cast<double>(cell[i]) * inv_k;
            const double hi = static_cast<double>(cell[i] + 1) * inv_k;
            double xi = lo + rng.uniform() * (hi - lo);
            if (xi >= hi) xi = std::nextafter(hi, lo);
            x[i] = xi;
        }
        sum += eval(x);
        // mixed-radix increment
        for (std::size_t i = 0; i < s; ++i) {
            if (++cell[i] < k) break;
            cell[i] = 0;
        }
    }
    check_evaluations(eval, n, "estimate_haber1");
    return EstimateReport{sum / static_cast<double>(n), eval.calls(), std::nullopt, seed, "haber"};
}

EstimateReport estimate_adastrat(const IntegrandSpec& f, int k, std::optional<int> depth, std::uint64_t seed) {
    check_log2_size(k, "estimate_adastrat");
    const int d = depth.value_or(k);
    if (d < 0 || d > k)
        throw ArgumentError("estimate_adastrat: depth must lie in [0, k]; d > k leaves strata without points");
    const std::uint64_t n = std::uint64_t{1} << k;
    CountingEvaluator eval(f);
    Rng rng(seed);
    const SampleBatch batch = preliminary_sample(eval, f.dim, n, rng);
    const Partition partition = grow_pow2(batch, d, rng);
    const double sum = stratified_sum(eval, partition, n >> d, rng);
    check_evaluations(eval, 2 * n, "estimate_adastrat");
    return EstimateReport{sum / static_cast<double>(n), eval.calls(), std::nullopt, seed, "adastrat"};
}

EstimateReport estimate_adastrat_with_variance(const IntegrandSpec& f, int k, std::uint64_t seed) {
    check_log2_size(k, "estimate_adastrat_with_variance");
    if (k < 1) throw ArgumentError("estimate_adastrat_with_variance: k must be at least 1 (two points per stratum)");
    const std::uint64_t n = std::uint64_t{1} << k;
    CountingEvaluator eval(f);
    Rng rng(seed);
    const SampleBatch batch = preliminary_sample(eval, f.dim, n, rng);
    const Partition partition = grow_pow2(batch, k - 1, rng);
    std::vector<MomentAccumulator> moments;
    moments.reserve(partition.leaves.size());
    const double sum = stratified_sum(eval, partition, 2, rng, &moments);
    check_evaluations(eval, 2 * n, "estimate_adastrat_with_variance");

    double var_sum = 0.0;
    for (const auto& m : moments) var_sum += static_cast<double>(m.count) * m.variance();
    const double nn = static_cast<double>(n);
    return EstimateReport{sum / nn, eval.calls(), var_sum / (nn * nn), seed, "adastrat-var"};
}

EstimateReport estimate_adastrat_rational(const IntegrandSpec& f, std::uint64_t n, std::uint64_t seed) {
    if (n < 1) throw ArgumentError("estimate_adastrat_rational: N must be at least 1");
    CountingEvaluator eval(f);
    Rng rng(seed);
    const SampleBatch batch = preliminary_sample(eval, f.dim, n, rng);
    const Partition partition = grow_rational(batch, n, rng);
    const double sum = stratified_sum(eval, partition, 1, rng);
    check_evaluations(eval, 2 * n, "estimate_adastrat_rational");
    return EstimateReport{sum / static_cast<double>(n), eval.calls(), std::nullopt, seed, "adastrat-rational"};
}

EstimateReport estimate_oracle_stratified(const IntegrandSpec& f, int k, std::uint64_t seed) {
    check_log2_size(k, "estimate_oracle_stratified");
    if (!f.has_closed_form_delta())
        throw UnsupportedError("estimate_oracle_stratified: integrand '" + f.name + "' has no closed-form Delta");
    const std::uint64_t n = std::uint64_t{1} << k;
    CountingEvaluator eval(f);
    Rng rng(seed);
    const Partition partition = grow_oracle(f.closed_form_delta, f.dim, k, rng);
    const double sum = stratified_sum(eval, partition, 1, rng);
    check_evaluations(eval, n, "estimate_oracle_stratified");
    return EstimateReport{sum / static_cast<double>(n), eval.calls(), std::nullopt, seed, "oracle"};
}

}  // namespace adastrat
