#include <doctest.h>

#include <cmath>

#include "adastrat/errors.hpp"
#include "adastrat/estimators.hpp"
#include "adastrat/oracle.hpp"
#include "adastrat/replicates.hpp"
#include "adastrat/stats.hpp"

using namespace adastrat;

namespace {

IntegrandSpec constant(std::size_t dim, double c) {
    IntegrandSpec f;
    f.name = "const";
    f.dim = dim;
    f.evaluate = [c](std::span<const double>) { return c; };
    f.analytic_integral = c;
    f.closed_form_delta = [](const Rectangle&) { return 0.0; };
    return f;
}

template <class Fn>
std::vector<double> replicate(std::size_t count, std::uint64_t master, Fn&& fn) {
    const auto reports = parallel_map(count, 0, [&](std::size_t i) { return fn(derive_seed(master, {i})); });
    std::vector<double> out;
    for (const auto& r : reports) out.push_back(r.estimate);
    return out;
}

double slope(const std::vector<double>& n, const std::vector<double>& rmse) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        mx += std::log2(n[i]);
        my += std::log2(rmse[i]);
    }
    mx /= n.size();
    my /= n.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        sxy += (std::log2(n[i]) - mx) * (std::log2(rmse[i]) - my);
        sxx += (std::log2(n[i]) - mx) * (std::log2(n[i]) - mx);
    }
    return sxy / sxx;
}

}  // namespace

TEST_CASE("constant integrands are integrated exactly") {
    const auto f = constant(3, 2.5);
    CHECK(estimate_mc(f, 100, 1).estimate == doctest::Approx(2.5));
    CHECK(*estimate_mc(f, 100, 1).variance_estimate == doctest::Approx(0.0));
    CHECK(estimate_haber1(f, 3, 1).estimate == doctest::Approx(2.5));
    CHECK(estimate_adastrat(f, 6, std::nullopt, 1).estimate == doctest::Approx(2.5));
    const auto v = estimate_adastrat_with_variance(f, 6, 1);
    CHECK(v.estimate == doctest::Approx(2.5));
    CHECK(*v.variance_estimate == 0.0);
    CHECK(estimate_oracle_stratified(f, 5, 1).estimate == doctest::Approx(2.5));
    CHECK(estimate_adastrat_rational(f, 37, 1).estimate == doctest::Approx(2.5));
}

TEST_CASE("evaluation accounting") {
    const auto f = toy(3);
    CHECK(estimate_mc(f, 77, 1).total_evaluations == 77);
    CHECK(estimate_haber1(f, 4, 1).total_evaluations == 64);
    CHECK(estimate_adastrat(f, 7, std::nullopt, 1).total_evaluations == 256);
    CHECK(estimate_adastrat(f, 7, 3, 1).total_evaluations == 256);
    CHECK(estimate_adastrat_with_variance(f, 7, 1).total_evaluations == 256);
    CHECK(estimate_oracle_stratified(f, 7, 1).total_evaluations == 128);
    CHECK(estimate_adastrat_rational(f, 100, 1).total_evaluations == 200);
}

TEST_CASE("argument errors") {
    const auto f = toy(2);
    CHECK_THROWS_AS(estimate_mc(f, 0, 1), ArgumentError);
    CHECK_THROWS_AS(estimate_haber1(f, 1, 1), ArgumentError);
    CHECK_THROWS_AS(estimate_haber1(toy(40), 4, 1), ArgumentError);  // 4^40 overflows
    CHECK_THROWS_AS(estimate_adastrat(f, 4, 5, 1), ArgumentError);
    CHECK_THROWS_AS(estimate_adastrat_with_variance(f, 0, 1), ArgumentError);

    IntegrandSpec no_delta = toy(2);
    no_delta.closed_form_delta = nullptr;
    CHECK_THROWS_AS(estimate_oracle_stratified(no_delta, 4, 1), UnsupportedError);
}

TEST_CASE("haber_edge_for") {
    CHECK(haber_edge_for(64, 2) == 8u);
    CHECK(haber_edge_for(64, 3) == 4u);
    CHECK(haber_edge_for(64, 6) == 2u);
    CHECK_FALSE(haber_edge_for(64, 5).has_value());
    CHECK_FALSE(haber_edge_for(1, 3).has_value());
    CHECK(haber_edge_for(1024, 5) == 4u);
    CHECK(haber_points(3, 4) == 81);
}

TEST_CASE("Haber with k = 2, s = 2 puts one point in each quarter") {
    std::vector<std::vector<double>> seen;
    IntegrandSpec f;
    f.name = "probe";
    f.dim = 2;
    f.evaluate = [&](std::span<const double> x) {
        seen.emplace_back(x.begin(), x.end());
        return 0.0;
    };
    estimate_haber1(f, 2, 3);
    REQUIRE(seen.size() == 4);
    int quadrant[4] = {0, 0, 0, 0};
    for (const auto& x : seen) ++quadrant[(x[0] >= 0.5 ? 1 : 0) + (x[1] >= 0.5 ? 2 : 0)];
    for (int q : quadrant) CHECK(q == 1);
}

TEST_CASE("determinism") {
    const auto f = toy(4);
    const auto a = estimate_adastrat(f, 8, std::nullopt, 123);
    const auto b = estimate_adastrat(f, 8, std::nullopt, 123);
    CHECK(a.estimate == b.estimate);
    CHECK(a.seed == 123);
    CHECK(estimate_adastrat_with_variance(f, 8, 5).variance_estimate ==
          estimate_adastrat_with_variance(f, 8, 5).variance_estimate);
    CHECK(estimate_mc(f, 100, 5).estimate == estimate_mc(f, 100, 5).estimate);
    CHECK(estimate_mc(f, 100, 5).estimate != estimate_mc(f, 100, 6).estimate);
}

TEST_CASE("MC variance on f(x) = x is 1/(12N)") {
    const auto f = linear({1.0});
    const auto est = replicate(4096, 1, [&](std::uint64_t s) { return estimate_mc(f, 32, s); });
    const double var = empirical_variance(est);
    // relative SE of a sample variance is about sqrt(2/(R-1)) ~ 2.2%
    CHECK(var == doctest::Approx(1.0 / (12 * 32)).epsilon(0.08));
}

TEST_CASE("unbiasedness on the toy integrand") {
    for (std::size_t s : {1u, 2u, 5u}) {
        const auto f = toy(s);
        const double truth = *f.analytic_integral;
        auto check = [&](const char* name, const std::vector<double>& est) {
            const auto sum = summarize_replicates(est, truth);
            INFO(name << " s=" << s << " z=" << sum.bias_z);
            CHECK(std::abs(sum.bias_z) <= 3.0);
        };
        check("mc", replicate(4096, 10 + s, [&](auto seed) { return estimate_mc(f, 64, seed); }));
        check("adastrat", replicate(4096, 20 + s, [&](auto seed) { return estimate_adastrat(f, 6, std::nullopt, seed); }));
        check("adastrat-var", replicate(4096, 30 + s, [&](auto seed) { return estimate_adastrat_with_variance(f, 6, seed); }));
        check("oracle", replicate(4096, 40 + s, [&](auto seed) { return estimate_oracle_stratified(f, 6, seed); }));
        check("rational", replicate(4096, 50 + s, [&](auto seed) { return estimate_adastrat_rational(f, 50, seed); }));
        const std::uint64_t hk = s == 1 ? 64 : s == 2 ? 8 : 2;
        check("haber", replicate(4096, 60 + s, [&](auto seed) { return estimate_haber1(f, hk, seed); }));
    }
}

TEST_CASE("adastrat at depth 0 is plain MC on fresh points") {
    const auto f = toy(3);
    const auto est = replicate(2048, 7, [&](auto seed) { return estimate_adastrat(f, 6, 0, seed); });
    const double mc_var = f.closed_form_delta(Rectangle::unit(3)) / 64;
    CHECK(empirical_variance(est) == doctest::Approx(mc_var).epsilon(0.12));
}

TEST_CASE("oracle estimator on f(x) = x[0] has variance 1/(12 N^3)") {
    const auto f = linear({1.0, 0.0, 0.0});
    for (int k : {2, 4}) {
        const double n = std::ldexp(1.0, k);
        const auto est = replicate(4096, 70 + k, [&](auto seed) { return estimate_oracle_stratified(f, k, seed); });
        CHECK(empirical_variance(est) == doctest::Approx(1.0 / (12 * n * n * n)).epsilon(0.1));
    }
}

TEST_CASE("oracle variance respects the s0 = 2 envelope") {
    const std::vector<double> lambda{1.0, 0.8};
    const auto f = linear(lambda);
    const double lambda_sq = lambda[0] * lambda[0] + lambda[1] * lambda[1];
    for (int k = 2; k <= 8; k += 2) {
        const double n = std::ldexp(1.0, k);
        const auto est = replicate(2048, 80 + k, [&](auto seed) { return estimate_oracle_stratified(f, k, seed); });
        // measured variance of the estimator vs (5/8)^k |lambda|^2 / 12 / N;
        // 15% slack for the replicate noise of a sample variance
        const double envelope = std::pow(5.0 / 8.0, k) * lambda_sq / 12.0 / n;
        CHECK(empirical_variance(est) <= 1.15 * envelope);
    }
}

TEST_CASE("Haber rate on f = x1 + x2 is about N^-1") {
    const auto f = linear({1.0, 1.0});
    std::vector<double> ns, rmse;
    for (std::uint64_t k : {2u, 4u, 8u, 16u, 32u}) {
        const auto est = replicate(512, 90 + k, [&](auto seed) { return estimate_haber1(f, k, seed); });
        ns.push_back(static_cast<double>(k * k));
        rmse.push_back(summarize_replicates(est, 1.0).rmse);
    }
    const double sl = slope(ns, rmse);
    CHECK(sl > -1.15);
    CHECK(sl < -0.85);
}

TEST_CASE("variance estimate is unbiased for the estimator variance") {
    const auto f = toy(5);
    const auto reports = parallel_map(1024, 0, [&](std::size_t i) {
        return estimate_adastrat_with_variance(f, 10, derive_seed(99, {i}));
    });
    std::vector<double> est, var;
    for (const auto& r : reports) {
        est.push_back(r.estimate);
        var.push_back(*r.variance_estimate);
    }
    double mean_var = 0;
    for (double v : var) mean_var += v;
    mean_var /= var.size();
    CHECK(mean_var == doctest::Approx(empirical_variance(est)).epsilon(0.1));
}
