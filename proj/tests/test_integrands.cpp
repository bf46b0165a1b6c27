#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adastrat/data_ingest.hpp"
#include "adastrat/errors.hpp"
#include "adastrat/integrands.hpp"
#include "adastrat/stats.hpp"
#include "normal_reference.hpp"

using namespace adastrat;

namespace {

// Grand mean and standard error of `n` plain MC evaluations.
std::pair<double, double> mc_mean(const IntegrandSpec& f, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(f.dim);
    MomentAccumulator acc;
    for (std::size_t i = 0; i < n; ++i) {
        for (double& xi : x) xi = rng.uniform();
        acc.add(f.evaluate(x));
    }
    return {acc.mean, std::sqrt(acc.variance() / static_cast<double>(n))};
}

double quad_variance_2d(const Rectangle& r, const IntegrandSpec& f, int m = 1000) {
    double s1 = 0, s2 = 0;
    std::vector<double> x(2);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            x[0] = r.lower(0) + (i + 0.5) / m * r.edge(0);
            x[1] = r.lower(1) + (j + 0.5) / m * r.edge(1);
            const double y = f.evaluate(x);
            s1 += y;
            s2 += y * y;
        }
    const double n = double(m) * m;
    return s2 / n - (s1 / n) * (s1 / n);
}

double bisect_quantile(double p) {
    double lo = -40, hi = 40;
    for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        (static_cast<double>(reference::normal_cdf(mid)) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("toy integrand") {
    CHECK(*toy(1).analytic_integral == doctest::Approx(std::numbers::e - 1));
    CHECK(*toy(2).analytic_integral == doctest::Approx(1.718281828 * 1.136101667).epsilon(1e-8));
    CHECK(*toy(2).analytic_integral == doctest::Approx(std::expm1(1.0) * 4.0 * std::expm1(0.25)).epsilon(1e-14));
    CHECK(*toy(2).analytic_integral == doctest::Approx(1.952146).epsilon(5e-6));
    const auto f = toy(5);
    CHECK(f.evaluate(std::vector<double>(5, 0.0)) == 1.0);
    CHECK(f.evaluate(std::vector<double>{1, 0, 0, 0, 0}) == doctest::Approx(std::numbers::e));
}

TEST_CASE("analytic integrals pass a 1e6-sample MC check") {
    for (const auto& f : {toy(1), toy(2), toy(5), linear({1.0, 0.99}), linear({0.3, -2.0, 1.0}),
                          sine_counterexample(1.0), sine_counterexample(3.0)}) {
        const auto [mean, se] = mc_mean(f, 1000000, 42);
        INFO(f.name);
        CHECK(std::abs(mean - *f.analytic_integral) <= 3 * se);
    }
}

TEST_CASE("linear and sine integrands") {
    CHECK(*linear({1.0}).analytic_integral == 0.5);
    CHECK(*linear({1.0, 0.99}).analytic_integral == doctest::Approx(0.995));
    const auto zero = linear({0.0, 0.0});
    CHECK(*zero.analytic_integral == 0.0);
    CHECK(zero.closed_form_delta(Rectangle::unit(2)) == 0.0);

    CHECK(*sine_counterexample(1.0).analytic_integral == 0.5);
    CHECK(sine_counterexample(1.0).evaluate(std::vector{0.0, 0.25}) == doctest::Approx(1.0));
    CHECK(sine_counterexample(1e-12).evaluate(std::vector{0.3, 0.25}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(sine_counterexample(0.0), ArgumentError);
}

TEST_CASE("closed-form Delta of toy and sine agree with quadrature") {
    Rng rng(3);
    const auto t = toy(2);
    const auto s = sine_counterexample(1.3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> lo(2), hi(2);
        for (int i = 0; i < 2; ++i) {
            double a = rng.uniform(), b = rng.uniform();
            if (a > b) std::swap(a, b);
            lo[i] = a;
            hi[i] = std::max(b, a + 1e-2);
        }
        const Rectangle r(lo, hi, 1, 1);
        CHECK(t.closed_form_delta(r) == doctest::Approx(quad_variance_2d(r, t)).epsilon(1e-4));
        CHECK(s.closed_form_delta(r) == doctest::Approx(quad_variance_2d(r, s)).epsilon(1e-4));
    }
    // tiny cell: no cancellation blow-up, close to the linearized value
    const Rectangle tiny({0.5, 0.5}, {0.5 + 1.0 / 4096, 0.5 + 1.0 / 4096}, 1, 1);
    const double grad0 = std::exp(0.5 + 0.125);
    const double lin = (grad0 * grad0 + grad0 * grad0 / 16) / (12.0 * 4096 * 4096);
    CHECK(t.closed_form_delta(tiny) == doctest::Approx(lin).epsilon(1e-3));
}

TEST_CASE("normal_quantile values and errors") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.975) == doctest::Approx(bisect_quantile(0.975)).epsilon(1e-12));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(-0.5), DomainError);
    CHECK_THROWS_AS(normal_quantile(std::nan("")), DomainError);
}

TEST_CASE("normal_quantile round trip, symmetry and monotonicity") {
    double worst = 0.0;
    double prev = -INFINITY;
    for (int i = 0; i < 10000; ++i) {
        const double p = 1e-8 + (1 - 2e-8) * i / 9999.0;
        const double z = normal_quantile(p);
        worst = std::max(worst, static_cast<double>(std::fabs(reference::normal_cdf(z) - p)));
        CHECK(z > prev);
        prev = z;
    }
    CHECK(worst <= 1e-9);
    for (int i = 1; i < 1 << 12; ++i) {
        const double p = std::ldexp(static_cast<double>(i), -12);  // p and 1-p both exact
        CHECK(std::abs(normal_quantile(1 - p) + normal_quantile(p)) <= 1e-12);
    }
}

TEST_CASE("fit_laplace on a single observation") {
    Eigen::MatrixXd x(1, 1);
    x << 1.0;
    Eigen::VectorXd y(1);
    y << 1.0;
    const auto prop = fit_laplace(x, y, 5.0);
    // mode solves beta / 25 = F(-beta); bisection oracle
    double lo = 0, hi = 10;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((mid / 25.0 - 1.0 / (1.0 + std::exp(mid))) < 0 ? lo : hi) = mid;
    }
    CHECK(prop.mode[0] == doctest::Approx(lo).epsilon(1e-6));
    CHECK(prop.mode[0] == doctest::Approx(2.293).epsilon(1e-3));
    CHECK(prop.gradient_norm <= 1e-8);
}

TEST_CASE("fit_laplace on a mirrored balanced design has mode 0") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 0.5, -1, -0.5, 2, -1, -2, 1;
    Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
    const auto prop = fit_laplace(x, y, 5.0);
    CHECK(prop.mode.norm() <= 1e-10);
}

TEST_CASE("fit_laplace proposal invariants and Hessian vs finite differences") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Dataset d = synthetic_logistic(200, 1 + seed % 4, seed, 0.7);
        const auto prop = fit_laplace(d.design, d.labels, 5.0);
        const LogisticPosterior post(d.design, d.labels, 5.0);
        CHECK(post.gradient(prop.mode).lpNorm<Eigen::Infinity>() <= 1e-8);
        CHECK((prop.hessian - prop.hessian.transpose()).lpNorm<Eigen::Infinity>() <= 1e-9);
        const Eigen::MatrixXd cov = prop.hessian.inverse();
        const Eigen::MatrixXd cct = prop.cholesky_factor * prop.cholesky_factor.transpose();
        CHECK((cct - cov).norm() <= 1e-8 * cov.norm());
        CHECK(prop.cholesky_factor.isLowerTriangular());

        // central differences of the gradient at a random point
        Rng rng(seed);
        Eigen::VectorXd b(d.s());
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.normal();
        const Eigen::MatrixXd h = post.neg_hessian(b);
        const double step = 1e-5;
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(b.size());
            e[j] = step;
            const Eigen::VectorXd col = -(post.gradient(b + e) - post.gradient(b - e)) / (2 * step);
            for (Eigen::Index i = 0; i < b.size(); ++i)
                CHECK(col[i] == doctest::Approx(h(i, j)).epsilon(1e-5).scale(h.norm()));
        }
        // gradient vs differences of the log density
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(b.size());
            e[j] = step;
            const double fd = (post.log_density(b + e) - post.log_density(b - e)) / (2 * step);
            CHECK(fd == doctest::Approx(post.gradient(b)[j]).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("fit_laplace errors") {
    Eigen::MatrixXd x(2, 1);
    x << 1, 2;
    Eigen::VectorXd y(2);
    y << 1, 0.5;
    CHECK_THROWS_AS(fit_laplace(x, y, 5.0), ArgumentError);
    y << 1, -1;
    CHECK_THROWS_AS(fit_laplace(x, y, 0.0), ArgumentError);
}

TEST_CASE("marginal likelihood integrand at the center and positivity") {
    const Dataset d = synthetic_logistic(300, 3, 77, 0.5);
    const auto prop = fit_laplace(d.design, d.labels, 5.0);
    const auto f = marginal_likelihood_integrand(prop, d.design, d.labels, 5.0);
    CHECK(f.dim == 3);
    CHECK_FALSE(f.analytic_integral.has_value());
    CHECK(f.log_scale == doctest::Approx(prop.log_posterior_at_mode));
    // exp{h(mode)} / q(mode), relative to exp(h(mode))
    CHECK(f.evaluate(std::vector{0.5, 0.5, 0.5}) == doctest::Approx(std::exp(-prop.log_det_term)));
    Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> x{rng.uniform(), rng.uniform(), rng.uniform()};
        CHECK(f.evaluate(x) > 0.0);
    }
    CHECK(f.evaluate(std::vector{0.0, 1.0, 0.5}) > 0.0);
}

TEST_CASE("marginal likelihood: 1-d MC mean matches trapezoid quadrature") {
    const Dataset d = synthetic_logistic(40, 1, 5, 1.0);
    const auto prop = fit_laplace(d.design, d.labels, 5.0);
    const auto f = marginal_likelihood_integrand(prop, d.design, d.labels, 5.0);
    const LogisticPosterior post(d.design, d.labels, 5.0);

    // p(y) exp(-h(mode)) = integral of exp(h(beta) - h(mode)) d beta
    const double sd = prop.cholesky_factor(0, 0);
    const double a = prop.mode[0] - 12 * sd, b = prop.mode[0] + 12 * sd;
    const int nodes = 10000;
    double quad = 0;
    Eigen::VectorXd beta(1);
    for (int i = 0; i < nodes; ++i) {
        beta[0] = a + (b - a) * i / (nodes - 1);
        const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
        quad += w * std::exp(post.log_density(beta) - f.log_scale);
    }
    quad *= (b - a) / (nodes - 1);

    const auto [mean, se] = mc_mean(f, 200000, 9);
    CHECK(std::abs(mean - quad) <= 3 * se);
}

TEST_CASE("marginal likelihood integrand reflection symmetry") {
    Eigen::MatrixXd x(4, 1);
    x << 1, -1, 2, -2;
    Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
    const auto prop = fit_laplace(x, y, 5.0);
    const auto f = marginal_likelihood_integrand(prop, x, y, 5.0);
    for (double u : {0.1, 0.25, 0.4, 0.01}) {
        CHECK(f.evaluate(std::vector{u}) == doctest::Approx(f.evaluate(std::vector{1 - u})).epsilon(1e-9));
    }
    // asymmetric posterior: no reflection symmetry
    Eigen::MatrixXd x1(1, 1);
    x1 << 1.0;
    Eigen::VectorXd y1(1);
    y1 << 1.0;
    const auto p1 = fit_laplace(x1, y1, 5.0);
    const auto f1 = marginal_likelihood_integrand(p1, x1, y1, 5.0);
    CHECK(std::abs(f1.evaluate(std::vector{0.1}) - f1.evaluate(std::vector{0.9})) > 1e-3);
}
