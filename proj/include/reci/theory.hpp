#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reci/random.hpp"
#include "reci/synthgen.hpp"

namespace reci {

/// Closed-form description of E = phi(C) + alpha N on the unit square.
///
/// phi maps [0, 1] onto [0, 1] with phi(0) = 0 and phi(1) = 1, p_C is a
/// density on [0, 1] and noise_variance(c) is Var[N | c], normalised so that
/// E[Var[N | C]] = 1.
struct SyntheticModel {
    std::string id;
    std::function<double(double)> phi;
    std::function<double(double)> phi_prime;
    std::function<double(double)> cause_density;
    std::function<double(double)> noise_variance;
    std::function<double(Rng&)> sample_cause;
    double alpha = 0.01;
    bool linear = false;
};

/// Model with uniform p_C and constant unit noise variance.
SyntheticModel uniform_cause_model(std::string id, std::function<double(double)> phi,
                                   std::function<double(double)> phi_prime);
SyntheticModel linear_model();
/// phi(c) = (c + c^2) / 2.
SyntheticModel quadratic_model();
/// phi = s rescaled so that phi(0) = 0 and phi(1) = 1.
SyntheticModel sigmoid_model(std::string id, SigmoidMixture s);
/// `count` models built from s_5 draws, seeds fanned out from `seed`.
std::vector<SyntheticModel> random_sigmoid_models(int count, std::uint64_t seed);

/// Compactly supported noise with known support [lower, upper]. An
/// unbounded sampler (Gaussian) breaks the compact-support assumption and
/// is only meant for demonstrating that.
struct NoiseSampler {
    std::string name;
    std::function<double(double c, Rng&)> draw;
    double lower = 0.0;
    double upper = 0.0;

    bool compact() const;
};

/// Centered uniform with variance variance(c); support set by max_variance.
NoiseSampler uniform_noise(std::function<double(double)> variance, double max_variance);
NoiseSampler uniform_unit_noise();
/// Symmetric Beta(a, a) rescaled to variance variance(c).
NoiseSampler beta_noise(double a, std::function<double(double)> variance, double max_variance);
NoiseSampler gaussian_noise(std::function<double(double)> variance);

struct Integral {
    double value = 0.0;
    double error = 0.0;
    /// Error bound the refinement aimed for.
    double target = 0.0;
};

inline constexpr int kQuadratureMaxDepth = 20;
inline constexpr double kQuadratureRelativeFloor = 1e-10;

/// Adaptive Gauss-Kronrod on [0, 1] to absolute tolerance `tol`, or to
/// relative accuracy 1e-14 when the integral is too large for `tol`.
Integral integrate_unit(const std::function<double(double)>& f, double tol = 1e-8);

/// Integral of Var[N|c] p_C(c) / phi'(c)^2 over [0, 1]: the small-noise
/// limit of E[Var[C|E~]] / E[Var[E~|C]].
/// Throws NonIntegrable when phi' drops below 1e-9 anywhere on [0, 1].
double variance_ratio_limit(const SyntheticModel& model, double tol = 1e-8);

struct CondVarEstimator {
    enum class Kind { Binning, Knn };
    Kind kind = Kind::Binning;
    int k = 50;

    static CondVarEstimator binning() { return {Kind::Binning, 50}; }
    static CondVarEstimator knn(int k = 50) { return {Kind::Knn, k}; }
    std::string name() const;
};

/// Nonparametric E[Var[target | cond]].
///
/// Binning: ceil(n^(1/3)) equal-count bins on cond; inside each bin the
/// target is detrended by a least-squares line and the residual variance
/// (n - 2 divisor) is weighted by bin size.
/// Knn: variance (n - 1 divisor) of the target over the k nearest cond
/// neighbours of each point, averaged over points.
/// Throws InsufficientSamples when a cell would hold fewer than 5 points.
double expected_conditional_variance(std::span<const double> cond, std::span<const double> target,
                                     const CondVarEstimator& estimator);

/// Monte Carlo E[Var[C | E~]] / E[Var[E~ | C]] with E~ the effect shifted
/// and rescaled onto [0, 1] using the noise support.
double mc_variance_ratio(const SyntheticModel& model, const NoiseSampler& noise, std::size_t n_samples,
                         const CondVarEstimator& estimator, std::uint64_t seed);

struct IndependenceCheck {
    /// int phi' v p - int phi' * int v p, with v p = Var[N|c] p_C(c).
    double covariance = 0.0;
    /// int phi' v p; equals 1 whenever the covariance vanishes.
    double weighted_slope = 0.0;
    double slope_integral = 0.0;
    double expected_noise_variance = 0.0;
};

IndependenceCheck independence_covariance(const SyntheticModel& model);

struct AssumptionCheck {
    double density_mass = 0.0;           // int p_C
    double expected_noise_variance = 0.0;
    double phi_at_0 = 0.0;
    double phi_at_1 = 0.0;
    double min_slope = 0.0;              // min phi' on a 1001-point grid
    bool holds(double tol = 1e-6) const;
};

AssumptionCheck check_assumptions(const SyntheticModel& model);

struct TheoremRow {
    std::string model_id;
    double alpha = 0.0;
    double mc_ratio = 0.0;
    std::optional<double> quadrature_limit;
    double covariance = 0.0;
    bool linear = false;
};

struct TheoremReport {
    std::vector<TheoremRow> rows;
    /// Models whose ratio at the smallest alpha is below 1 - tolerance.
    std::vector<std::string> violations;
    double tolerance = 0.02;
};

/// Monte Carlo campaign over models x alphas. Every model must satisfy the
/// independence postulate (|covariance| < 1e-6).
TheoremReport verify_theorem(const std::vector<SyntheticModel>& models, std::span<const double> alphas,
                             const NoiseSampler& noise, std::size_t n_samples,
                             const CondVarEstimator& estimator, std::uint64_t seed,
                             double tolerance = 0.02, unsigned workers = 0);

}  // namespace reci
