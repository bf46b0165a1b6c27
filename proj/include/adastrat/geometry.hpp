#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adastrat/rng.hpp"

namespace adastrat {

/// Nonnegative rational number with 64-bit parts, kept in lowest terms by
/// the arithmetic helpers below.
struct Fraction {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    Fraction reduced() const;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Fraction& a, const Fraction& b);
};

Fraction operator+(const Fraction& a, const Fraction& b);

/// Axis-aligned box in [0,1]^s. Besides the float corners it carries an exact
/// volume num/den. On the rational grid of arbitrary-N growth den is the total
/// sample size N and num is the number of points allotted to the box.
class Rectangle {
public:
    /// [0,1]^dim with exact volume total/total.
    static Rectangle unit(std::size_t dim, std::uint64_t total = 1);

    Rectangle(std::vector<double> lower, std::vector<double> upper,
              std::uint64_t volume_numerator, std::uint64_t volume_denominator);

    std::size_t dim() const noexcept { return lower_.size(); }
    std::span<const double> lower() const noexcept { return lower_; }
    std::span<const double> upper() const noexcept { return upper_; }
    double lower(std::size_t axis) const { return lower_[axis]; }
    double upper(std::size_t axis) const { return upper_[axis]; }
    double edge(std::size_t axis) const { return upper_[axis] - lower_[axis]; }

    /// Product of edge lengths.
    double volume() const noexcept { return volume_; }
    std::uint64_t volume_numerator() const noexcept { return num_; }
    std::uint64_t volume_denominator() const noexcept { return den_; }
    Fraction exact_volume() const { return Fraction{num_, den_}.reduced(); }

    friend bool operator==(const Rectangle&, const Rectangle&) = default;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::uint64_t num_;
    std::uint64_t den_;
    double volume_;
};

struct SplitPair {
    Rectangle minus;   // lower piece along `axis`
    Rectangle plus;    // upper piece along `axis`
    std::size_t axis;  // zero-based
    Fraction fraction; // cut position relative to the parent edge
};

/// Halve `r` along `axis` (zero-based).
SplitPair split_mid(const Rectangle& r, std::size_t axis);

/// Cut `r` along `axis` so that the upper piece gets exact volume n_plus/N and
/// the lower piece (n_R - n_plus)/N, where n_R/N is the volume of `r`.
SplitPair split_frac(const Rectangle& r, std::size_t axis, std::uint64_t n_plus);

/// Coordinate of the cut used by split_frac when the lower piece receives
/// n_minus of the parent's n_R grid units.
double frac_cut_point(const Rectangle& r, std::size_t axis, std::uint64_t n_minus);

void sample_uniform(const Rectangle& r, Rng& rng, std::span<double> out);
std::vector<double> sample_uniform(const Rectangle& r, Rng& rng);

/// Half-open membership lower <= x < upper, closed on faces that lie on the
/// upper boundary of the unit cube.
bool contains(const Rectangle& r, std::span<const double> x);

}  // namespace adastrat
