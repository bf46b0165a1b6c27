#include "adastrat/stats.hpp"

#include <cmath>

#include "adastrat/errors.hpp"

namespace adastrat {

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    const double n_a = static_cast<double>(count);
    const double n_b = static_cast<double>(other.count);
    const double n = n_a + n_b;
    const double delta = other.mean - mean;
    mean += delta * n_b / n;
    m2 += other.m2 + delta * delta * n_a * n_b / n;
    count += other.count;
}

double empirical_variance(std::span<const double> values) noexcept {
    MomentAccumulator acc;
    for (double v : values) acc.add(v);
    return acc.variance();
}

std::string_view to_string(ReferenceKind kind) noexcept {
    return kind == ReferenceKind::analytic ? "analytic" : "grand-mean";
}

RmseSummary summarize_replicates(std::span<const double> estimates, double reference, ReferenceKind kind) {
    if (estimates.size() < 2) throw ArgumentError("summarize_replicates: need at least 2 estimates");
    MomentAccumulator acc;
    double sq = 0.0;
    for (double e : estimates) {
        acc.add(e);
        sq += (e - reference) * (e - reference);
    }
    RmseSummary out;
    out.replicate_count = estimates.size();
    out.mean_of_estimates = acc.mean;
    out.rmse = std::sqrt(sq / static_cast<double>(estimates.size()));
    out.reference_value = reference;
    out.reference_kind = kind;
    out.relative_rmse = out.rmse / std::abs(reference);
    out.sd = std::sqrt(acc.variance());
    const double se = out.sd / std::sqrt(static_cast<double>(estimates.size()));
    out.bias_z = se > 0.0 ? (acc.mean - reference) / se : (acc.mean == reference ? 0.0 : std::copysign(INFINITY, acc.mean - reference));
    return out;
}

}  // namespace adastrat
