#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "adastrat/geometry.hpp"
#include "adastrat/rng.hpp"

namespace adastrat {

/// Preliminary sample: N points of [0,1]^dim (row-major) and their values.
struct SampleBatch {
    std::size_t dim = 0;
    std::vector<double> coords;
    std::vector<double> values;

    SampleBatch() = default;
    explicit SampleBatch(std::size_t dimension) : dim(dimension) {}

    std::size_t size() const noexcept { return values.size(); }
    std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
    void push_back(std::span<const double> x, double y);
};

enum class PartitionMode { pow2, rational };

/// One split made while growing a tree. Axes are zero-based; n_plus is the
/// number of grid units given to the upper child (rational mode only, 0 for
/// pow2 mode).
struct SplitDecision {
    std::size_t axis = 0;
    std::uint64_t n_plus = 0;
    double criterion_value = 0.0;
    bool was_tiebreak = false;
};

struct Partition {
    std::size_t dim = 0;
    PartitionMode mode = PartitionMode::pow2;
    std::optional<int> depth;  // pow2 mode only
    std::vector<Rectangle> leaves;
    /// Decisions in the order they were taken (breadth-first for pow2).
    std::vector<SplitDecision> decisions;

    /// Sum of exact leaf volumes.
    Fraction total_volume() const;
};

/// Result of choosing among candidate criteria.
struct Choice {
    std::size_t index;
    bool tiebreak;
};

/// Index of the smallest criterion. Values within relative 1e-12 of the
/// minimum count as tied, as do all values when every one is +inf; ties are
/// broken uniformly with `rng`, which is only consumed when a tie occurs.
Choice pick_minimizer(std::span<const double> criteria, Rng& rng);

/// Equal-weight average of the sample variances on both halves of `r`
/// split at the middle of `axis`. +inf if either half holds <= 1 point.
/// `batch_in_r` is expected to contain only points of `r`.
double cart_criterion(const SampleBatch& batch_in_r, const Rectangle& r, std::size_t axis);

/// Weighted variant on the rational grid: (n_plus/n_R) var(upper piece)
/// + (n_minus/n_R) var(lower piece) for the cut of split_frac.
double rational_criterion(const SampleBatch& batch_in_r, const Rectangle& r, std::size_t axis,
                          std::uint64_t n_plus);

/// Grow the midpoint-split tree level by level to `depth`, giving 2^depth
/// leaves of volume 2^-depth.
Partition grow_pow2(const SampleBatch& batch, int depth, Rng& rng);

/// Grow the rational-grid tree until every leaf has volume 1/total.
Partition grow_rational(const SampleBatch& batch, std::uint64_t total, Rng& rng);

/// Plain-text form: a short header followed by one line per leaf
/// "num den lo_0 hi_0 lo_1 hi_1 ...". Coordinates use 17 significant digits
/// so reading back is exact. Decisions are not serialized.
void write_partition(std::ostream& os, const Partition& partition);
Partition read_partition(std::istream& is);

}  // namespace adastrat
