#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "adastrat/integrands.hpp"

namespace adastrat {

struct EstimateReport {
    double estimate = 0.0;
    std::uint64_t total_evaluations = 0;
    std::optional<double> variance_estimate;
    std::uint64_t seed = 0;
    std::string estimator_name;
};

/// Plain Monte Carlo with n iid uniform points. Reports s^2/n as a variance
/// estimate when n >= 2.
EstimateReport estimate_mc(const IntegrandSpec& f, std::uint64_t n, std::uint64_t seed);

/// k^s, or ArgumentError when it does not fit in 64 bits.
std::uint64_t haber_points(std::uint64_t k, std::size_t s);

/// k >= 2 with k^s == n, if any.
std::optional<std::uint64_t> haber_edge_for(std::uint64_t n, std::size_t s);

/// One uniform point in each of the k^s subcubes of edge 1/k.
EstimateReport estimate_haber1(const IntegrandSpec& f, std::uint64_t k, std::uint64_t seed);

/// Adaptive stratification with N = 2^k: learn a depth-d tree from N
/// preliminary evaluations, then average N fresh points, N 2^-d per leaf.
/// depth defaults to k. Uses 2N evaluations.
EstimateReport estimate_adastrat(const IntegrandSpec& f, int k, std::optional<int> depth, std::uint64_t seed);

/// Depth k-1 tree with two fresh points per leaf; variance_estimate is
/// (1/N^2) sum_p N_p s_p^2 over the leaves.
EstimateReport estimate_adastrat_with_variance(const IntegrandSpec& f, int k, std::uint64_t seed);

/// Arbitrary-N variant: rational-grid tree from N preliminary evaluations,
/// then one fresh point per leaf (every leaf has volume 1/N). 2N evaluations.
EstimateReport estimate_adastrat_rational(const IntegrandSpec& f, std::uint64_t n, std::uint64_t seed);

/// One point per leaf of the depth-k oracle tree built from the integrand's
/// closed-form Delta. Throws UnsupportedError when there is none.
EstimateReport estimate_oracle_stratified(const IntegrandSpec& f, int k, std::uint64_t seed);

}  // namespace adastrat
