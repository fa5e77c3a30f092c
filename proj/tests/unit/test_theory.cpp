#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "oracles.hpp"
#include "reci/error.hpp"
#include "reci/theory.hpp"

using namespace reci;

namespace {

bool throws_kind(ErrorKind k, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind() == k;
    }
    return false;
}

// Brute force: k nearest by |cond_i - cond_j|, variance with n - 1 divisor.
double knn_oracle(const std::vector<double>& cond, const std::vector<double>& target, std::size_t k) {
    double total = 0.0;
    for (std::size_t i = 0; i < cond.size(); ++i) {
        std::vector<std::size_t> idx(cond.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(cond[a] - cond[i]) < std::abs(cond[b] - cond[i]);
        });
        long double m = 0;
        for (std::size_t j = 0; j < k; ++j) m += target[idx[j]];
        m /= k;
        long double s = 0;
        for (std::size_t j = 0; j < k; ++j) s += (target[idx[j]] - m) * (target[idx[j]] - m);
        total += static_cast<double>(s / (k - 1));
    }
    return total / cond.size();
}

// Equal-count bins over the sorted conditioning values, each detrended by a
// pseudo-inverse line fit.
double binning_oracle(const std::vector<double>& cond, const std::vector<double>& target) {
    const std::size_t n = cond.size();
    const auto bins = static_cast<std::size_t>(std::llround(std::ceil(std::cbrt(static_cast<double>(n)) - 1e-9)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return cond[a] < cond[b]; });
    double total = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        std::vector<double> bx, by;
        for (std::size_t i = b * n / bins; i < (b + 1) * n / bins; ++i) {
            bx.push_back(cond[idx[i]]);
            by.push_back(target[idx[i]]);
        }
        const auto coef = oracle::poly_oracle(bx, by, 1);
        double rss = 0;
        for (std::size_t i = 0; i < bx.size(); ++i) {
            const double r = by[i] - coef[0] - coef[1] * bx[i];
            rss += r * r;
        }
        total += rss / (bx.size() - 2.0) * bx.size();
    }
    return total / n;
}

}  // namespace

TEST_CASE("quadrature agrees with a trapezoid oracle") {
    const auto r = integrate_unit([](double c) { return 4.0 / ((1 + 2 * c) * (1 + 2 * c)); });
    const long double ref = oracle::trapezoid_richardson(
        [](long double c) { return 4.0L / ((1 + 2 * c) * (1 + 2 * c)); }, 0.0L, 1.0L, 20000);
    CHECK(std::abs(r.value - static_cast<double>(ref)) < 1e-10);
    CHECK(std::abs(r.value - 4.0 / 3.0) < 1e-10);
    CHECK(r.error <= 1e-8);
    const auto s = integrate_unit([](double c) { return std::exp(-c) * std::sin(7 * c); });
    const long double sref = oracle::trapezoid_richardson(
        [](long double c) { return std::exp(-c) * std::sin(7 * c); }, 0.0L, 1.0L, 20000);
    CHECK(std::abs(s.value - static_cast<double>(sref)) < 1e-10);
}

TEST_CASE("variance ratio limit examples") {
    CHECK(variance_ratio_limit(linear_model()) == doctest::Approx(1.0).epsilon(1e-10));
    const long double ref = oracle::trapezoid_richardson(
        [](long double c) { return 4.0L / ((1 + 2 * c) * (1 + 2 * c)); }, 0.0L, 1.0L, 20000);
    CHECK(std::abs(variance_ratio_limit(quadratic_model()) - static_cast<double>(ref)) < 1e-8);
    const auto square = uniform_cause_model("square", [](double c) { return c * c; }, [](double c) { return 2 * c; });
    CHECK(throws_kind(ErrorKind::NonIntegrable, [&] { variance_ratio_limit(square); }));
}

TEST_CASE("halving the quadrature tolerance barely moves the limit") {
    for (const auto& m : random_sigmoid_models(10, 3)) {
        double a = 0, b = 0;
        try {
            a = variance_ratio_limit(m, 1e-8);
            b = variance_ratio_limit(m, 5e-9);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NonIntegrable);
            continue;
        }
        CHECK(std::abs(a - b) < 1e-6);
    }
    const double q1 = variance_ratio_limit(quadratic_model(), 1e-8);
    const double q2 = variance_ratio_limit(quadratic_model(), 5e-9);
    CHECK(std::abs(q1 - q2) < 1e-6);
}

TEST_CASE("limit is at least one whenever the covariance vanishes") {
    int checked = 0;
    for (const auto& m : random_sigmoid_models(30, 17)) {
        const auto cov = independence_covariance(m);
        REQUIRE(std::abs(cov.covariance) < 1e-8);
        double limit = 0.0;
        try {
            limit = variance_ratio_limit(m);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NonIntegrable);
            continue;
        }
        CHECK(limit >= 1.0 - 1e-6);
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("independence covariance examples") {
    for (const auto& m : {linear_model(), quadratic_model()}) {
        const auto r = independence_covariance(m);
        CHECK(std::abs(r.covariance) < 1e-12);
        CHECK(std::abs(r.weighted_slope - 1.0) < 1e-8);
    }
    // Var[N|c] p_C = phi' / int phi'^2: correlated by construction.
    auto m = quadratic_model();
    m.noise_variance = [](double c) { return (0.5 + c) * 12.0 / 13.0; };
    const auto r = independence_covariance(m);
    const long double w = oracle::trapezoid_richardson(
        [](long double c) { return (0.5L + c) * (0.5L + c) * 12.0L / 13.0L; }, 0.0L, 1.0L, 4000);
    const long double v =
        oracle::trapezoid_richardson([](long double c) { return (0.5L + c) * 12.0L / 13.0L; }, 0.0L, 1.0L, 4000);
    CHECK(r.covariance > 0.0);
    CHECK(r.covariance == doctest::Approx(static_cast<double>(w - 1.0L * v)).epsilon(1e-10));
    CHECK(r.covariance == doctest::Approx(1.0 / 13.0).epsilon(1e-10));
}

TEST_CASE("model assumptions") {
    CHECK(check_assumptions(quadratic_model()).holds());
    for (const auto& m : random_sigmoid_models(5, 1)) {
        const auto a = check_assumptions(m);
        CHECK(a.holds());
        CHECK(a.min_slope >= 0.0);
    }
    auto bad = linear_model();
    bad.noise_variance = [](double) { return 2.0; };
    CHECK_FALSE(check_assumptions(bad).holds());
}

TEST_CASE("conditional variance estimators match brute-force oracles") {
    Rng rng(21);
    std::vector<double> c(400), t(400);
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = rng.uniform();
        t[i] = std::sin(5 * c[i]) + 0.2 * (1 + c[i]) * rng.normal();
    }
    CHECK(expected_conditional_variance(c, t, CondVarEstimator::knn(50)) ==
          doctest::Approx(knn_oracle(c, t, 50)).epsilon(1e-10));
    CHECK(expected_conditional_variance(c, t, CondVarEstimator::knn(7)) ==
          doctest::Approx(knn_oracle(c, t, 7)).epsilon(1e-10));
    CHECK(expected_conditional_variance(c, t, CondVarEstimator::binning()) ==
          doctest::Approx(binning_oracle(c, t)).epsilon(1e-9));
    // True value: E[0.04 (1 + C)^2] with C ~ U(0, 1) = 0.04 * 7 / 3.
    CHECK(expected_conditional_variance(c, t, CondVarEstimator::knn(20)) == doctest::Approx(0.28 / 3).epsilon(0.2));
}

TEST_CASE("estimators refuse cells that are too small") {
    std::vector<double> c(40), t(40);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = t[i] = static_cast<double>(i);
    CHECK(throws_kind(ErrorKind::InsufficientSamples,
                      [&] { expected_conditional_variance(c, t, CondVarEstimator::knn(50)); }));
    CHECK(throws_kind(ErrorKind::InsufficientSamples,
                      [&] { expected_conditional_variance(c, t, CondVarEstimator::knn(3)); }));
    std::vector<double> c2(12), t2(12);
    CHECK(throws_kind(ErrorKind::InsufficientSamples,
                      [&] { expected_conditional_variance(c2, t2, CondVarEstimator::binning()); }));
}

TEST_CASE("Monte Carlo ratio at moderate sample size") {
    auto q = quadratic_model();
    q.alpha = 0.01;
    const double lim = variance_ratio_limit(q);
    const double b = mc_variance_ratio(q, uniform_unit_noise(), 50000, CondVarEstimator::binning(), 4);
    const double k = mc_variance_ratio(q, uniform_unit_noise(), 50000, CondVarEstimator::knn(), 4);
    CHECK(std::abs(b - lim) / lim < 0.1);
    CHECK(std::abs(k - lim) / lim < 0.1);
    CHECK(std::abs(b - k) / k < 0.1);
    CHECK(b == mc_variance_ratio(q, uniform_unit_noise(), 50000, CondVarEstimator::binning(), 4));

    auto l = linear_model();
    l.alpha = 0.01;
    const double r = mc_variance_ratio(l, uniform_unit_noise(), 50000, CondVarEstimator::binning(), 4);
    CHECK(std::abs(r - 1.0) < 0.1);
    l.alpha = 0.0;
    CHECK(throws_kind(ErrorKind::InvalidArgument,
                      [&] { mc_variance_ratio(l, uniform_unit_noise(), 1000, CondVarEstimator::binning(), 1); }));
}

TEST_CASE("Monte Carlo ratio approaches the limit as alpha shrinks") {
    auto q = quadratic_model();
    const double lim = variance_ratio_limit(q);
    auto gap = [&](double alpha) {
        q.alpha = alpha;
        return std::abs(mc_variance_ratio(q, uniform_unit_noise(), 200000, CondVarEstimator::binning(), 11) - lim);
    };
    const double g04 = gap(0.04), g02 = gap(0.02), g01 = gap(0.01);
    CHECK(g02 <= g04);
    CHECK(g01 <= g02);
    CHECK(g01 < gap(0.05));
    CHECK(g01 < gap(0.1));
}

TEST_CASE("noise samplers have the stated variance and support") {
    Rng rng(8);
    for (const auto& s : {uniform_unit_noise(), beta_noise(2.0, [](double) { return 1.0; }, 1.0)}) {
        CHECK(s.compact());
        double m2 = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double v = s.draw(0.3, rng);
            CHECK_FALSE((v < s.lower || v > s.upper));
            m2 += v * v;
        }
        CHECK(m2 / n == doctest::Approx(1.0).epsilon(0.02));
    }
    CHECK_FALSE(gaussian_noise([](double) { return 1.0; }).compact());
}

TEST_CASE("verify_theorem campaign shape and preconditions") {
    auto models = random_sigmoid_models(3, 5);
    models.insert(models.begin(), linear_model());
    const std::vector<double> alphas{0.01, 0.05};
    const auto rep =
        verify_theorem(models, alphas, uniform_unit_noise(), 20000, CondVarEstimator::binning(), 2, 0.02, 2);
    REQUIRE(rep.rows.size() == 8);
    CHECK(rep.rows[0].model_id == "linear");
    CHECK(rep.rows[0].linear);
    CHECK(rep.rows[1].alpha == 0.05);
    CHECK(rep.rows[0].quadrature_limit.has_value());
    const auto again =
        verify_theorem(models, alphas, uniform_unit_noise(), 20000, CondVarEstimator::binning(), 2, 0.02, 1);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) CHECK(rep.rows[i].mc_ratio == again.rows[i].mc_ratio);

    auto corr = quadratic_model();
    corr.noise_variance = [](double c) { return (0.5 + c); };
    std::vector<SyntheticModel> bad{corr};
    CHECK(throws_kind(ErrorKind::InvalidArgument, [&] {
        verify_theorem(bad, alphas, uniform_unit_noise(), 1000, CondVarEstimator::binning(), 1);
    }));
}
