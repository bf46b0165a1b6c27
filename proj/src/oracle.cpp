#include "adastrat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "adastrat/errors.hpp"

namespace adastrat {

std::size_t LinearSpec::active_count() const {
    return static_cast<std::size_t>(std::count_if(lambda.begin(), lambda.end(), [](double l) { return l != 0.0; }));
}

double delta_linear(const LinearSpec& spec, const Rectangle& r) {
    if (spec.lambda.size() != r.dim()) throw ArgumentError("delta_linear: lambda size does not match rectangle");
    double sum = 0.0;
    for (std::size_t j = 0; j < r.dim(); ++j) {
        const double t = r.edge(j) * spec.lambda[j];
        sum += t * t;
    }
    return sum / 12.0;
}

double reduction_ratio_linear(const LinearSpec& spec, const Rectangle& r) {
    if (spec.lambda.size() != r.dim()) throw ArgumentError("reduction_ratio_linear: lambda size does not match rectangle");
    double sum = 0.0;
    double best = 0.0;
    for (std::size_t j = 0; j < r.dim(); ++j) {
        const double t = r.edge(j) * spec.lambda[j];
        sum += t * t;
        best = std::max(best, t * t);
    }
    if (sum == 0.0) throw DegenerateError("reduction_ratio_linear: Delta(R) = 0");
    return 1.0 - 0.75 * best / sum;
}

double oracle_criterion(const DeltaFn& delta, const Rectangle& r, std::size_t axis) {
    const SplitPair split = split_mid(r, axis);
    return 0.5 * delta(split.plus) + 0.5 * delta(split.minus);
}

Partition grow_oracle(const DeltaFn& delta, std::size_t dim, int depth, Rng& rng) {
    if (depth < 0 || depth > 62) throw ArgumentError("grow_oracle: depth must lie in [0, 62]");
    Partition out;
    out.dim = dim;
    out.mode = PartitionMode::pow2;
    out.depth = depth;

    std::vector<Rectangle> level{Rectangle::unit(dim)};
    std::vector<double> criteria(dim);
    for (int l = 0; l < depth; ++l) {
        std::vector<Rectangle> next;
        next.reserve(level.size() * 2);
        for (const Rectangle& rect : level) {
            for (std::size_t j = 0; j < dim; ++j) criteria[j] = oracle_criterion(delta, rect, j);
            const Choice choice = pick_minimizer(criteria, rng);
            out.decisions.push_back(SplitDecision{choice.index, 0, criteria[choice.index], choice.tiebreak});
            SplitPair split = split_mid(rect, choice.index);
            next.push_back(std::move(split.minus));
            next.push_back(std::move(split.plus));
        }
        level = std::move(next);
    }
    out.leaves = std::move(level);
    return out;
}

double stratified_variance(const Partition& partition, const DeltaFn& delta, std::uint64_t total_points) {
    if (total_points == 0) throw ArgumentError("stratified_variance: total_points must be positive");
    double sum = 0.0;
    for (const auto& leaf : partition.leaves) sum += leaf.exact_volume().value() * delta(leaf);
    return sum / static_cast<double>(total_points);
}

double predicted_rate_linear(int active_count) {
    if (active_count < 1) throw ArgumentError("predicted_rate_linear: s0 must be at least 1");
    const double s0 = active_count;
    const double r = -std::log(1.0 - 3.0 / (4.0 * s0)) / (2.0 * std::log(2.0));
    if (r < 0.541 / s0) throw std::logic_error("predicted_rate_linear: lower bound 0.541/s0 violated");
    return r;
}

double predicted_rate_bilipschitz(const BiLipschitzBounds& bounds) {
    if (bounds.alpha.empty() || bounds.alpha.size() != bounds.beta.size())
        throw ArgumentError("predicted_rate_bilipschitz: alpha and beta must be nonempty and of equal length");
    double s = 0.0;
    for (std::size_t i = 0; i < bounds.alpha.size(); ++i) {
        if (!(bounds.alpha[i] > 0.0)) throw ArgumentError("predicted_rate_bilipschitz: alpha must be positive");
        const double ratio = bounds.beta[i] / bounds.alpha[i];
        s += ratio * ratio;
    }
    return std::log((0.75 + s) / s) / (2.0 * std::log(2.0));
}

std::vector<std::size_t> epsilon_tie(const DeltaFn& delta, const Rectangle& r, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ArgumentError("epsilon_tie: epsilon must lie in (0, 1)");
    std::vector<double> criteria(r.dim());
    for (std::size_t j = 0; j < r.dim(); ++j) criteria[j] = oracle_criterion(delta, r, j);
    const double best = *std::min_element(criteria.begin(), criteria.end());
    const double bound = best * (1.0 + epsilon) / (1.0 - epsilon);
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < r.dim(); ++j)
        if (criteria[j] <= bound) out.push_back(j);
    return out;
}

}  // namespace adastrat
