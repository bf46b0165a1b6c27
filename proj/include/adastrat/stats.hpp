#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

namespace adastrat {

/// Streaming mean / sum of squared deviations (Welford). Mergeable, so
/// partial accumulators from parallel chunks or prefix sweeps combine.
struct MomentAccumulator {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double y) noexcept {
        ++count;
        const double delta = y - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (y - mean);
    }

    void merge(const MomentAccumulator& other) noexcept;

    /// Unbiased sample variance; +inf when count <= 1.
    double variance() const noexcept {
        if (count <= 1) return std::numeric_limits<double>::infinity();
        return m2 / static_cast<double>(count - 1);
    }
};

/// Unbiased sample variance, with the convention that sets of size <= 1
/// have infinite variance.
double empirical_variance(std::span<const double> values) noexcept;

enum class ReferenceKind { analytic, grand_mean };

std::string_view to_string(ReferenceKind kind) noexcept;

struct RmseSummary {
    std::size_t replicate_count = 0;
    double mean_of_estimates = 0.0;
    double rmse = 0.0;
    double relative_rmse = 0.0;
    double reference_value = 0.0;
    ReferenceKind reference_kind = ReferenceKind::analytic;
    /// (mean_of_estimates - reference) / standard error of the mean.
    double bias_z = 0.0;
    /// Sample standard deviation of the estimates.
    double sd = 0.0;
};

RmseSummary summarize_replicates(std::span<const double> estimates, double reference,
                                 ReferenceKind kind = ReferenceKind::analytic);

}  // namespace adastrat
