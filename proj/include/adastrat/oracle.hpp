#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "adastrat/geometry.hpp"
#include "adastrat/partition_tree.hpp"
#include "adastrat/rng.hpp"

namespace adastrat {

/// Exact conditional variance Var[f(X) | X in R] for X uniform on R.
using DeltaFn = std::function<double(const Rectangle&)>;

/// f(x) = lambda^T x.
struct LinearSpec {
    std::vector<double> lambda;

    /// Number of nonzero weights (s0).
    std::size_t active_count() const;
};

/// Sum_j mu_j^2 lambda_j^2 / 12 with mu_j the edge lengths of r.
double delta_linear(const LinearSpec& spec, const Rectangle& r);

/// Variance-reduction factor (Delta(R+) + Delta(R-)) / (2 Delta(R)) of the
/// best midpoint split of r. Throws DegenerateError when Delta(r) = 0.
double reduction_ratio_linear(const LinearSpec& spec, const Rectangle& r);

/// Theoretical split criterion: Delta(R+)/2 + Delta(R-)/2 for the midpoint
/// split along `axis`.
double oracle_criterion(const DeltaFn& delta, const Rectangle& r, std::size_t axis);

/// Same level-by-level growth as grow_pow2 with the empirical criterion
/// replaced by oracle_criterion.
Partition grow_oracle(const DeltaFn& delta, std::size_t dim, int depth, Rng& rng);

/// Exact variance of the stratified estimator that puts N*vol(R) uniform
/// points in each leaf: (1/N) sum_R vol(R) Delta(R).
double stratified_variance(const Partition& partition, const DeltaFn& delta, std::uint64_t total_points);

/// Exponent r(s0) = -log(1 - 3/(4 s0)) / (2 log 2) of the linear-function rate.
double predicted_rate_linear(int active_count);

/// Per-coordinate lower/upper Lipschitz-type constants of a strictly
/// increasing integrand.
struct BiLipschitzBounds {
    std::vector<double> alpha;
    std::vector<double> beta;
};

/// r(s) = log((3/4 + S) / S) / (2 log 2), S = sum_i beta_i^2 / alpha_i^2.
double predicted_rate_bilipschitz(const BiLipschitzBounds& bounds);

/// Axes j whose criterion satisfies Delta(R,j) <= Delta(R,j*) (1+eps)/(1-eps),
/// j* the minimizing axis. Sorted ascending; always contains j*.
std::vector<std::size_t> epsilon_tie(const DeltaFn& delta, const Rectangle& r, double epsilon);

}  // namespace adastrat
