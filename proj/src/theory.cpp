#include "reci/theory.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "reci/error.hpp"
#include "reci/parallel.hpp"

namespace reci {

SyntheticModel uniform_cause_model(std::string id, std::function<double(double)> phi,
                                   std::function<double(double)> phi_prime) {
    SyntheticModel m;
    m.id = std::move(id);
    m.phi = std::move(phi);
    m.phi_prime = std::move(phi_prime);
    m.cause_density = [](double c) { return (c >= 0.0 && c <= 1.0) ? 1.0 : 0.0; };
    m.noise_variance = [](double) { return 1.0; };
    m.sample_cause = [](Rng& rng) { return rng.uniform(); };
    return m;
}

SyntheticModel linear_model() {
    SyntheticModel m = uniform_cause_model("linear", [](double c) { return c; }, [](double) { return 1.0; });
    m.linear = true;
    return m;
}

SyntheticModel quadratic_model() {
    return uniform_cause_model(
        "quadratic", [](double c) { return 0.5 * (c + c * c); }, [](double c) { return 0.5 + c; });
}

SyntheticModel sigmoid_model(std::string id, SigmoidMixture s) {
    const double lo = s(0.0);
    const double range = s(1.0) - lo;
    if (!(range > 0.0)) throw Error(ErrorKind::DegenerateRange, "sigmoid mixture is flat on [0, 1]");
    auto shared = std::make_shared<const SigmoidMixture>(std::move(s));
    return uniform_cause_model(
        std::move(id), [shared, lo, range](double c) { return ((*shared)(c) - lo) / range; },
        [shared, range](double c) { return shared->derivative(c) / range; });
}

std::vector<SyntheticModel> random_sigmoid_models(int count, std::uint64_t seed) {
    std::vector<SyntheticModel> out;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i));
        out.push_back(sigmoid_model("s5_" + std::to_string(i), sample_sigmoid_mixture(5, s)));
    }
    return out;
}

bool NoiseSampler::compact() const { return std::isfinite(lower) && std::isfinite(upper); }

NoiseSampler uniform_noise(std::function<double(double)> variance, double max_variance) {
    const double half = std::sqrt(3.0 * max_variance);
    NoiseSampler s;
    s.name = "uniform";
    s.draw = [variance = std::move(variance)](double c, Rng& rng) {
        return std::sqrt(3.0 * variance(c)) * rng.uniform(-1.0, 1.0);
    };
    s.lower = -half;
    s.upper = half;
    return s;
}

NoiseSampler uniform_unit_noise() {
    return uniform_noise([](double) { return 1.0; }, 1.0);
}

NoiseSampler beta_noise(double a, std::function<double(double)> variance, double max_variance) {
    if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta shape must be > 0");
    // Beta(a, a) on [-h, h] has variance h^2 / (2a + 1).
    const double half = std::sqrt(max_variance * (2.0 * a + 1.0));
    NoiseSampler s;
    s.name = "beta(" + std::to_string(a) + ")";
    s.draw = [a, variance = std::move(variance)](double c, Rng& rng) {
        const double h = std::sqrt(variance(c) * (2.0 * a + 1.0));
        return h * (2.0 * rng.beta(a, a) - 1.0);
    };
    s.lower = -half;
    s.upper = half;
    return s;
}

NoiseSampler gaussian_noise(std::function<double(double)> variance) {
    NoiseSampler s;
    s.name = "gaussian";
    s.draw = [variance = std::move(variance)](double c, Rng& rng) {
        return std::sqrt(variance(c)) * rng.normal();
    };
    s.lower = -std::numeric_limits<double>::infinity();
    s.upper = std::numeric_limits<double>::infinity();
    return s;
}

Integral integrate_unit(const std::function<double(double)>& f, double tol) {
    using boost::math::quadrature::gauss_kronrod;
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "quadrature tolerance must be > 0");
    // Boost stops once error <= rel_tol * L1. The first pass yields L1 so the
    // bound can be made absolute. When 1/phi'^2 reaches 1e10 and beyond an
    // absolute 1e-8 is not representable, and refining past a relative 1e-10
    // only accumulates rounding in the error estimate, so the bound is floored.
    double l1 = 0.0, err = 0.0;
    double value = gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 0, 1.0, &err, &l1);
    const double rel = std::max(tol / std::max(1.0, l1), kQuadratureRelativeFloor);
    value = gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, kQuadratureMaxDepth, rel, &err, &l1);
    return {value, err, std::max(tol, kQuadratureRelativeFloor * l1)};
}

double variance_ratio_limit(const SyntheticModel& model, double tol) {
    constexpr double kMinSlope = 1e-9;
    constexpr int kGrid = 1000;
    for (int i = 0; i <= kGrid; ++i) {
        const double c = static_cast<double>(i) / kGrid;
        const double slope = model.phi_prime(c);
        if (!(slope >= kMinSlope))
            throw Error(ErrorKind::NonIntegrable,
                        model.id + ": phi' = " + std::to_string(slope) + " at c = " + std::to_string(c));
    }
    bool blown = false;
    auto integrand = [&](double c) {
        const double slope = model.phi_prime(c);
        if (!(slope >= kMinSlope)) {
            blown = true;
            return 0.0;
        }
        return model.noise_variance(c) * model.cause_density(c) / (slope * slope);
    };
    const Integral r = integrate_unit(integrand, tol);
    if (blown || !std::isfinite(r.value) || r.error > r.target)
        throw Error(ErrorKind::NonIntegrable,
                    model.id + ": quadrature did not reach tolerance (error " + std::to_string(r.error) + ")");
    return r.value;
}

std::string CondVarEstimator::name() const {
    return kind == Kind::Binning ? "binning" : "knn" + std::to_string(k);
}

namespace {

constexpr std::size_t kMinCellSize = 5;

std::vector<std::size_t> sorted_order(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    return order;
}

double binned_variance(std::span<const double> cond, std::span<const double> target) {
    const std::size_t n = cond.size();
    const auto bins = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(n)) - 1e-9));
    if (bins == 0 || n / bins < kMinCellSize)
        throw Error(ErrorKind::InsufficientSamples,
                    "binning: " + std::to_string(n) + " samples over " + std::to_string(bins) + " bins");
    const auto order = sorted_order(cond);
    double total = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t lo = b * n / bins, hi = (b + 1) * n / bins;
        const double m = static_cast<double>(hi - lo);
        double cm = 0.0, tm = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            cm += cond[order[i]];
            tm += target[order[i]];
        }
        cm /= m;
        tm /= m;
        double sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double dc = cond[order[i]] - cm, dt = target[order[i]] - tm;
            sxx += dc * dc;
            sxy += dc * dt;
            syy += dt * dt;
        }
        const double rss = sxx > 0.0 ? std::max(0.0, syy - sxy * sxy / sxx) : syy;
        total += rss / (m - 2.0) * m;
    }
    return total / static_cast<double>(n);
}

double knn_variance(std::span<const double> cond, std::span<const double> target, int k_in) {
    const std::size_t n = cond.size();
    if (k_in < static_cast<int>(kMinCellSize) || n < static_cast<std::size_t>(k_in))
        throw Error(ErrorKind::InsufficientSamples,
                    "knn: k = " + std::to_string(k_in) + " with " + std::to_string(n) + " samples");
    const auto k = static_cast<std::size_t>(k_in);
    const auto order = sorted_order(cond);
    std::vector<double> c(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = cond[order[i]];
        t[i] = target[order[i]];
    }
    double total = 0.0;
    std::size_t lo = 0;
    for (std::size_t i = 0; i < n; ++i) {
        // In 1-D the k nearest neighbours form a contiguous run; slide it
        // right while the entering point is closer than the leaving one.
        lo = std::max(lo, i + 1 >= k ? i + 1 - k : 0);
        while (lo + k < n && lo < i && c[lo + k] - c[i] < c[i] - c[lo]) ++lo;
        double mean = 0.0;
        for (std::size_t j = lo; j < lo + k; ++j) mean += t[j];
        mean /= static_cast<double>(k);
        double ss = 0.0;
        for (std::size_t j = lo; j < lo + k; ++j) ss += (t[j] - mean) * (t[j] - mean);
        total += ss / static_cast<double>(k - 1);
    }
    return total / static_cast<double>(n);
}

}  // namespace

double expected_conditional_variance(std::span<const double> cond, std::span<const double> target,
                                     const CondVarEstimator& estimator) {
    if (cond.size() != target.size())
        throw Error(ErrorKind::InvalidArgument, "conditional variance: size mismatch");
    return estimator.kind == CondVarEstimator::Kind::Binning ? binned_variance(cond, target)
                                                              : knn_variance(cond, target, estimator.k);
}

double mc_variance_ratio(const SyntheticModel& model, const NoiseSampler& noise, std::size_t n_samples,
                         const CondVarEstimator& estimator, std::uint64_t seed) {
    if (!(model.alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be > 0");
    Rng rng(seed);
    std::vector<double> cause(n_samples), effect(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double c = model.sample_cause(rng);
        cause[i] = c;
        effect[i] = model.phi(c) + model.alpha * noise.draw(c, rng);
    }
    double shift, width;
    if (noise.compact()) {
        shift = model.alpha * noise.lower;
        width = 1.0 + model.alpha * (noise.upper - noise.lower);
    } else {
        const auto [lo, hi] = std::minmax_element(effect.begin(), effect.end());
        shift = *lo;
        width = *hi - *lo;
    }
    for (double& e : effect) e = (e - shift) / width;

    const double anticausal = expected_conditional_variance(effect, cause, estimator);
    const double causal = expected_conditional_variance(cause, effect, estimator);
    if (!(causal > 0.0)) throw Error(ErrorKind::InsufficientSamples, "zero causal conditional variance");
    return anticausal / causal;
}

IndependenceCheck independence_covariance(const SyntheticModel& model) {
    auto vp = [&](double c) { return model.noise_variance(c) * model.cause_density(c); };
    IndependenceCheck r;
    r.weighted_slope = integrate_unit([&](double c) { return model.phi_prime(c) * vp(c); }).value;
    r.slope_integral = integrate_unit([&](double c) { return model.phi_prime(c); }).value;
    r.expected_noise_variance = integrate_unit(vp).value;
    r.covariance = r.weighted_slope - r.slope_integral * r.expected_noise_variance;
    return r;
}

AssumptionCheck check_assumptions(const SyntheticModel& model) {
    AssumptionCheck a;
    a.density_mass = integrate_unit(model.cause_density).value;
    a.expected_noise_variance =
        integrate_unit([&](double c) { return model.noise_variance(c) * model.cause_density(c); }).value;
    a.phi_at_0 = model.phi(0.0);
    a.phi_at_1 = model.phi(1.0);
    a.min_slope = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000; ++i) a.min_slope = std::min(a.min_slope, model.phi_prime(i / 1000.0));
    return a;
}

bool AssumptionCheck::holds(double tol) const {
    return std::abs(density_mass - 1.0) < tol && std::abs(expected_noise_variance - 1.0) < tol &&
           std::abs(phi_at_0) < tol && std::abs(phi_at_1 - 1.0) < tol && min_slope >= 0.0;
}

TheoremReport verify_theorem(const std::vector<SyntheticModel>& models, std::span<const double> alphas,
                             const NoiseSampler& noise, std::size_t n_samples,
                             const CondVarEstimator& estimator, std::uint64_t seed, double tolerance,
                             unsigned workers) {
    if (alphas.empty()) throw Error(ErrorKind::InvalidArgument, "verify_theorem: empty alpha grid");
    std::vector<IndependenceCheck> independence;
    for (const auto& m : models) {
        independence.push_back(independence_covariance(m));
        if (std::abs(independence.back().covariance) >= 1e-6)
            throw Error(ErrorKind::InvalidArgument,
                        m.id + " violates the independence postulate (covariance " +
                            std::to_string(independence.back().covariance) + ")");
        if (!check_assumptions(m).holds())
            throw Error(ErrorKind::InvalidArgument, m.id + " violates the model assumptions");
    }

    const std::size_t na = alphas.size();
    TheoremReport report;
    report.tolerance = tolerance;
    report.rows.resize(models.size() * na);
    parallel_for(report.rows.size(), workers, [&](std::size_t job) {
        const std::size_t mi = job / na, ai = job % na;
        SyntheticModel m = models[mi];
        m.alpha = alphas[ai];
        TheoremRow row;
        row.model_id = m.id;
        row.alpha = m.alpha;
        row.linear = m.linear;
        row.covariance = independence[mi].covariance;
        row.mc_ratio = mc_variance_ratio(m, noise, n_samples, estimator, mix_seed(seed, mi));
        try {
            row.quadrature_limit = variance_ratio_limit(m);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonIntegrable) throw;
        }
        report.rows[job] = std::move(row);
    });

    const std::size_t smallest =
        static_cast<std::size_t>(std::min_element(alphas.begin(), alphas.end()) - alphas.begin());
    for (std::size_t mi = 0; mi < models.size(); ++mi)
        if (report.rows[mi * na + smallest].mc_ratio < 1.0 - tolerance)
            report.violations.push_back(models[mi].id);
    return report;
}

}  // namespace reci
