#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reci/pair.hpp"
#include "reci/random.hpp"

namespace reci {

/// Source distributions for the hidden variables S1 and S2.
struct SourceDist {
    enum class Kind { Uniform01, Gauss, GaussMixture };

    Kind kind = Kind::Uniform01;
    double mu = 0.0;     // Gauss only: one of 0, 0.5, 1
    double sigma = 0.0;  // Gauss only

    static SourceDist uniform01() { return {Kind::Uniform01, 0.0, 0.0}; }
    static SourceDist gauss(double mu, double sigma) { return {Kind::Gauss, mu, sigma}; }
    /// Equal-weight mixture of N(0.3, 0.1^2) and N(0.7, 0.1^2).
    static SourceDist gauss_mixture() { return {Kind::GaussMixture, 0.0, 0.0}; }

    double analytic_mean() const;
    double sample(Rng& rng) const;
    std::string name() const;
};

/// s_n(c) = sum_i beta_i * Phi((c - mu_i) / sigma_i), a non-decreasing map.
struct SigmoidMixture {
    std::vector<double> beta;
    std::vector<double> mu;
    std::vector<double> sigma;

    double operator()(double c) const;
    double derivative(double c) const;
    std::size_t size() const { return beta.size(); }
};

inline constexpr double kSigmoidSigmaMin = 1e-3;
inline constexpr double kSigmoidSigmaMax = 0.1;

/// beta_i, mu_i ~ U(0, 1), sigma_i ~ U(1e-3, 0.1).
SigmoidMixture sample_sigmoid_mixture(int n, std::uint64_t seed);
SigmoidMixture sample_sigmoid_mixture(int n, Rng& rng);

/// Affine map sending min(v) to lo and max(v) to hi.
std::vector<double> rescale_interval(std::span<const double> v, double lo, double hi);

enum class NonInvertibleShape { Square, Quartic, Sine };

struct GenKind {
    enum class Family { Linear, Invertible, NonInvertible };

    Family family = Family::Linear;
    /// NonInvertible only; drawn per pair when unset.
    std::optional<NonInvertibleShape> shape;

    static GenKind linear() { return {Family::Linear, std::nullopt}; }
    static GenKind invertible() { return {Family::Invertible, std::nullopt}; }
    static GenKind non_invertible(std::optional<NonInvertibleShape> s = std::nullopt) {
        return {Family::NonInvertible, s};
    }
    static GenKind parse(std::string_view text);
    std::string name() const;
};

struct GenConfig {
    GenKind kind;
    double alpha = 0.1;
    std::size_t n_samples = 500;
    std::uint64_t seed = 0;
};

/// Element-wise transform f applied to a centered source.
struct SourceTransform {
    enum class Kind { Identity, Exp, Sigmoid };
    Kind kind = Kind::Identity;
    SigmoidMixture sigmoid;

    double operator()(double v) const;
    std::string name() const;
};

/// Everything drawn while generating one pair.
struct RealizedGenerator {
    GenKind kind;
    double alpha = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
    SourceDist source1;
    SourceDist source2;
    SourceTransform f[4];
    std::optional<SigmoidMixture> phi_sigmoid;     // Invertible
    std::optional<NonInvertibleShape> phi_shape;   // NonInvertible
    int attempts = 1;
};

struct GeneratedPair {
    CauseEffectPair pair;
    RealizedGenerator model;
};

inline constexpr int kGeneratorRetries = 10;

/// One labeled pair (x = cause, y = effect, truth = XtoY).
///
///   C' = w1 f1(S1) + (1 - w1) f2(S2)      N' = w2 f3(S1) + (1 - w2) f4(S2)
///   C  = normalize(C')                    N  = alpha * standardize(N')
///   E  = phi(C) + N
///
/// S1, S2 are centered by their analytic means. A draw with constant C' or
/// N' is redrawn up to 10 times before DegenerateRange is thrown.
GeneratedPair generate_pair(const GenConfig& cfg, std::string id = "generated");

/// `pairs_per_alpha` pairs for every alpha, seeds fanned out from `master_seed`.
/// Ids look like "invertible_a0.050_0007".
std::vector<GeneratedPair> generate_corpus(const GenKind& kind, std::span<const double> alphas,
                                           int pairs_per_alpha, std::size_t n_samples,
                                           std::uint64_t master_seed);

std::string format_alpha(double alpha);

}  // namespace reci
