#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "reci/error.hpp"
#include "reci/regress.hpp"
#include "reci/synthgen.hpp"

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

double correlation(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("sigmoid mixture parameters lie in range and the map is non-decreasing") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = sample_sigmoid_mixture(5, seed);
        REQUIRE(s.size() == 5);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(s.beta[i] >= 0.0);
            CHECK(s.beta[i] <= 1.0);
            CHECK(s.mu[i] >= 0.0);
            CHECK(s.mu[i] <= 1.0);
            CHECK(s.sigma[i] >= kSigmoidSigmaMin);
            CHECK(s.sigma[i] <= kSigmoidSigmaMax);
        }
        double prev = -1.0;
        for (int i = 0; i <= 10000; ++i) {
            const double c = -1.0 + 3.0 * i / 10000.0;
            const double v = s(c);
            CHECK(v >= prev);
            prev = v;
        }
        // derivative against a central difference
        for (double c : {0.1, 0.45, 0.8}) {
            const double h = 1e-6;
            CHECK(s.derivative(c) == doctest::Approx((s(c + h) - s(c - h)) / (2 * h)).epsilon(1e-4));
        }
    }
    CHECK(sample_sigmoid_mixture(5, 3).beta == sample_sigmoid_mixture(5, 3).beta);
    SigmoidMixture zero{{0, 0}, {0.2, 0.7}, {0.05, 0.05}};
    for (double c : {-1.0, 0.0, 0.5, 2.0}) CHECK(zero(c) == 0.0);
    CHECK(throws_kind(ErrorKind::InvalidArgument, [] { sample_sigmoid_mixture(0, 1); }));
}

TEST_CASE("rescale_interval") {
    const std::vector<double> v{0, 1};
    const auto r = rescale_interval(v, -2, 2);
    CHECK(r[0] == -2.0);
    CHECK(r[1] == 2.0);
    const std::vector<double> w{3, 4, 5};
    const auto s = rescale_interval(w, -2 * M_PI, 2 * M_PI);
    CHECK(s[0] == doctest::Approx(-2 * M_PI));
    CHECK(s[2] == doctest::Approx(2 * M_PI));
    CHECK(s[1] == doctest::Approx(0.0));
    const std::vector<double> c{1, 1};
    CHECK(throws_kind(ErrorKind::DegenerateRange, [&] { rescale_interval(c, 0, 1); }));
}

TEST_CASE("source distributions") {
    CHECK(SourceDist::uniform01().analytic_mean() == 0.5);
    CHECK(SourceDist::gauss(1.0, 0.3).analytic_mean() == 1.0);
    CHECK(SourceDist::gauss_mixture().analytic_mean() == doctest::Approx(0.5));
    Rng rng(5);
    double s = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) s += SourceDist::gauss_mixture().sample(rng);
    CHECK(s / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("generator kinds parse") {
    CHECK(GenKind::parse("linear").family == GenKind::Family::Linear);
    CHECK(GenKind::parse("invertible").family == GenKind::Family::Invertible);
    CHECK(GenKind::parse("noninvertible").family == GenKind::Family::NonInvertible);
    CHECK(GenKind::parse("noninvertible").name() == "noninvertible");
    CHECK(throws_kind(ErrorKind::InvalidArgument, [] { GenKind::parse("quadratic"); }));
}

TEST_CASE("generated pairs satisfy the construction invariants") {
    for (auto kind : {GenKind::linear(), GenKind::invertible(), GenKind::non_invertible()}) {
        for (std::uint64_t seed = 0; seed < 15; ++seed) {
            const auto g = generate_pair({kind, 0.3, 300, seed});
            const auto& p = g.pair;
            CHECK(p.size() == 300);
            CHECK(p.truth() == Direction::XtoY);
            CHECK(*std::min_element(p.x().begin(), p.x().end()) == 0.0);
            CHECK(*std::max_element(p.x().begin(), p.x().end()) == 1.0);
            CHECK(g.model.w1 >= 0.0);
            CHECK(g.model.w1 <= 1.0);
            for (const auto* src : {&g.model.source1, &g.model.source2})
                if (src->kind == SourceDist::Kind::Gauss) {
                    CHECK(src->sigma >= 0.1);
                    CHECK(src->sigma <= 1.0);
                    CHECK((src->mu == 0.0 || src->mu == 0.5 || src->mu == 1.0));
                }
            // Recover the noise: it is alpha times a standardized vector.
            std::vector<double> noise(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) {
                double phi = p.x()[i];
                if (g.model.phi_sigmoid) phi = (*g.model.phi_sigmoid)(p.x()[i]);
                if (g.model.phi_shape) phi = std::nan("");
                noise[i] = (p.y()[i] - phi) / 0.3;
            }
            if (!g.model.phi_shape) {
                const double m = std::accumulate(noise.begin(), noise.end(), 0.0) / noise.size();
                double v = 0;
                for (double e : noise) v += (e - m) * (e - m);
                v /= noise.size() - 1;
                CHECK(std::abs(m) < 1e-9);
                CHECK(std::abs(v - 1.0) < 1e-9);
            }
        }
    }
}

TEST_CASE("noise-free cases") {
    SUBCASE("linear with alpha 0 is an exact line") {
        const auto g = generate_pair({GenKind::linear(), 0.0, 200, 4});
        const auto m = fit(ModelSpec::poly(1), g.pair.x(), g.pair.y(), 0);
        CHECK(mse(m, g.pair.x(), g.pair.y()) < 1e-20);
    }
    SUBCASE("invertible with alpha 0 is strictly increasing in x") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto g = generate_pair({GenKind::invertible(), 0.0, 500, seed});
            std::vector<std::pair<double, double>> rows;
            for (std::size_t i = 0; i < g.pair.size(); ++i) rows.emplace_back(g.pair.x()[i], g.pair.y()[i]);
            std::sort(rows.begin(), rows.end());
            for (std::size_t i = 1; i < rows.size(); ++i)
                if (rows[i].first > rows[i - 1].first) CHECK(rows[i].second >= rows[i - 1].second);
        }
    }
}

TEST_CASE("non-invertible shapes") {
    const auto sq = generate_pair({GenKind::non_invertible(NonInvertibleShape::Square), 0.0, 200, 1});
    for (std::size_t i = 0; i < sq.pair.size(); ++i) {
        const double r = -2.0 + 4.0 * sq.pair.x()[i];
        CHECK(sq.pair.y()[i] == doctest::Approx(r * r).epsilon(1e-12));
    }
    const auto sn = generate_pair({GenKind::non_invertible(NonInvertibleShape::Sine), 0.0, 200, 1});
    for (std::size_t i = 0; i < sn.pair.size(); ++i) {
        const double r = -2.0 * M_PI + 4.0 * M_PI * sn.pair.x()[i];
        CHECK(sn.pair.y()[i] == doctest::Approx(std::sin(r)).epsilon(1e-9));
    }
}

TEST_CASE("cause and noise are dependent on average") {
    double sum_abs = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto g = generate_pair({GenKind::invertible(), 0.1, 500, seed});
        std::vector<double> noise(g.pair.size());
        for (std::size_t i = 0; i < noise.size(); ++i)
            noise[i] = g.pair.y()[i] - (*g.model.phi_sigmoid)(g.pair.x()[i]);
        sum_abs += std::abs(correlation(g.pair.x(), noise));
    }
    // Independent samples of size 500 give mean |r| near 0.036.
    CHECK(sum_abs / 100.0 > 0.15);
}

TEST_CASE("determinism and corpus layout") {
    const auto a = generate_pair({GenKind::invertible(), 0.2, 100, 9});
    const auto b = generate_pair({GenKind::invertible(), 0.2, 100, 9});
    CHECK(std::equal(a.pair.y().begin(), a.pair.y().end(), b.pair.y().begin(), b.pair.y().end()));
    const std::vector<double> alphas{0.1, 0.5};
    const auto corpus = generate_corpus(GenKind::linear(), alphas, 3, 50, 1);
    REQUIRE(corpus.size() == 6);
    CHECK(corpus[0].pair.id() == "linear_a0.100_0001");
    CHECK(corpus[5].pair.id() == "linear_a0.500_0003");
    CHECK(corpus[4].model.alpha == 0.5);
    CHECK(throws_kind(ErrorKind::InvalidArgument, [] { generate_pair({GenKind::linear(), 1.5, 100, 0}); }));
    CHECK(throws_kind(ErrorKind::InvalidArgument, [] { generate_pair({GenKind::linear(), 0.1, 5, 0}); }));
}
