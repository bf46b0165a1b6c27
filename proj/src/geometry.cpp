#include "adastrat/geometry.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "adastrat/errors.hpp"

namespace adastrat {

namespace {

using u128 = unsigned __int128;

Fraction reduce128(u128 num, u128 den) {
    u128 a = num, b = den;
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    if (a == 0) a = 1;
    num /= a;
    den /= a;
    if (num > UINT64_MAX || den > UINT64_MAX) throw ArgumentError("Fraction: overflow of 64-bit parts");
    return Fraction{static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den)};
}

void check_axis(const Rectangle& r, std::size_t axis) {
    if (axis >= r.dim())
        throw ArgumentError("axis " + std::to_string(axis) + " out of range for dimension " + std::to_string(r.dim()));
}

}  // namespace

Fraction Fraction::reduced() const { return reduce128(num, den); }

bool operator==(const Fraction& a, const Fraction& b) {
    return static_cast<u128>(a.num) * b.den == static_cast<u128>(b.num) * a.den;
}

Fraction operator+(const Fraction& a, const Fraction& b) {
    const std::uint64_t g = std::gcd(a.den, b.den);
    const u128 den = static_cast<u128>(a.den / g) * b.den;
    const u128 num = static_cast<u128>(a.num) * (b.den / g) + static_cast<u128>(b.num) * (a.den / g);
    return reduce128(num, den);
}

Rectangle Rectangle::unit(std::size_t dim, std::uint64_t total) {
    if (dim == 0) throw ArgumentError("dimension must be at least 1");
    if (total == 0) throw ArgumentError("total must be at least 1");
    return Rectangle(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0), total, total);
}

Rectangle::Rectangle(std::vector<double> lower, std::vector<double> upper,
                     std::uint64_t volume_numerator, std::uint64_t volume_denominator)
    : lower_(std::move(lower)), upper_(std::move(upper)), num_(volume_numerator), den_(volume_denominator) {
    if (lower_.empty() || lower_.size() != upper_.size())
        throw ArgumentError("Rectangle: lower/upper must be nonempty and of equal length");
    if (num_ == 0 || den_ == 0) throw ArgumentError("Rectangle: volume parts must be positive");
    volume_ = 1.0;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (!(0.0 <= lower_[i] && lower_[i] < upper_[i] && upper_[i] <= 1.0))
            throw ArgumentError("Rectangle: need 0 <= lower < upper <= 1 on axis " + std::to_string(i));
        volume_ *= upper_[i] - lower_[i];
    }
}

SplitPair split_mid(const Rectangle& r, std::size_t axis) {
    check_axis(r, axis);
    std::uint64_t num = r.volume_numerator();
    std::uint64_t den = r.volume_denominator();
    if (num % 2 == 0) {
        num /= 2;
    } else {
        if (den > UINT64_MAX / 2) throw ArgumentError("split_mid: volume denominator overflow");
        den *= 2;
    }
    const double mid = 0.5 * (r.lower(axis) + r.upper(axis));

    std::vector<double> lo(r.lower().begin(), r.lower().end());
    std::vector<double> hi(r.upper().begin(), r.upper().end());
    std::vector<double> minus_hi = hi;
    minus_hi[axis] = mid;
    std::vector<double> plus_lo = lo;
    plus_lo[axis] = mid;
    return SplitPair{Rectangle(std::move(lo), std::move(minus_hi), num, den),
                     Rectangle(std::move(plus_lo), std::move(hi), num, den), axis, Fraction{1, 2}};
}

double frac_cut_point(const Rectangle& r, std::size_t axis, std::uint64_t n_minus) {
    const std::uint64_t n_r = r.volume_numerator();
    if (2 * n_minus == n_r) return 0.5 * (r.lower(axis) + r.upper(axis));
    return r.lower(axis) + (static_cast<double>(n_minus) / static_cast<double>(n_r)) * r.edge(axis);
}

SplitPair split_frac(const Rectangle& r, std::size_t axis, std::uint64_t n_plus) {
    check_axis(r, axis);
    const std::uint64_t n_r = r.volume_numerator();
    if (n_r == 1) throw IndivisibleError("split_frac: rectangle holds a single grid unit (n_R = 1)");
    if (n_plus < 1 || n_plus > n_r - 1)
        throw ArgumentError("split_frac: n_plus must lie in [1, " + std::to_string(n_r - 1) + "], got " +
                            std::to_string(n_plus));
    const std::uint64_t n_minus = n_r - n_plus;
    const double cut = frac_cut_point(r, axis, n_minus);

    std::vector<double> lo(r.lower().begin(), r.lower().end());
    std::vector<double> hi(r.upper().begin(), r.upper().end());
    std::vector<double> minus_hi = hi;
    minus_hi[axis] = cut;
    std::vector<double> plus_lo = lo;
    plus_lo[axis] = cut;
    const std::uint64_t den = r.volume_denominator();
    return SplitPair{Rectangle(std::move(lo), std::move(minus_hi), n_minus, den),
                     Rectangle(std::move(plus_lo), std::move(hi), n_plus, den), axis,
                     Fraction{n_minus, n_r}.reduced()};
}

void sample_uniform(const Rectangle& r, Rng& rng, std::span<double> out) {
    for (std::size_t i = 0; i < r.dim(); ++i) {
        const double lo = r.lower(i);
        const double hi = r.upper(i);
        double x = lo + rng.uniform() * (hi - lo);
        // rounding can land exactly on the open upper face
        if (x >= hi) x = std::nextafter(hi, lo);
        out[i] = x;
    }
}

std::vector<double> sample_uniform(const Rectangle& r, Rng& rng) {
    std::vector<double> x(r.dim());
    sample_uniform(r, rng, x);
    return x;
}

bool contains(const Rectangle& r, std::span<const double> x) {
    for (std::size_t i = 0; i < r.dim(); ++i) {
        if (x[i] < r.lower(i)) return false;
        if (x[i] >= r.upper(i) && !(r.upper(i) == 1.0 && x[i] == 1.0)) return false;
    }
    return true;
}

}  // namespace adastrat
