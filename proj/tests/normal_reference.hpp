#pragma once

#include <cmath>

// Reference standard-normal CDF in long double, independent of the library's
// quantile code: the positive-term erf series below |x| = 3 and a Lentz
// continued fraction for erfc above.
namespace reference {

inline long double erf_series(long double x) {
    // erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (1*3*...*(2n+1))
    long double term = x, sum = x;
    const long double x2 = x * x;
    for (int n = 1; n < 500; ++n) {
        term *= 2.0L * x2 / (2.0L * n + 1.0L);
        sum += term;
        if (term < 1e-22L * sum) break;
    }
    return 2.0L / std::sqrt(3.14159265358979323846264338327950288L) * std::exp(-x2) * sum;
}

inline long double erfc_continued_fraction(long double x) {
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    const long double tiny = 1e-300L;
    long double f = x, c = x, d = 0.0L;
    for (int n = 1; n < 2000; ++n) {
        const long double a = n / 2.0L;
        d = x + a * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = x + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0L / d;
        const long double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0L) < 1e-21L) break;
    }
    return std::exp(-x * x) / std::sqrt(3.14159265358979323846264338327950288L) / f;
}

inline long double erfc(long double x) {
    if (x < 0) return 2.0L - erfc(-x);
    if (x < 3.0L) return 1.0L - erf_series(x);
    return erfc_continued_fraction(x);
}

inline long double normal_cdf(long double z) { return 0.5L * erfc(-z / std::sqrt(2.0L)); }

}  // namespace reference
