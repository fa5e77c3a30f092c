#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reci {

/// Regression function class fitted in both directions.
///
///   Log       a + (b - a) / (1 + exp(c (d - x)))      parameters (a, b, c, d)
///   Mon(n)    a x^n + b, n in [2, 9]                  parameters (a, b)
///   Poly(k)   sum_{i=0..k} a_i x^i, k in [1, 9]       parameters (a_0, ..., a_k)
///   Svr       linear epsilon-insensitive regression   parameters (intercept, slope)
///   Nn        tanh MLP with 1 or 2 hidden layers      weights then biases, per layer
struct ModelSpec {
    enum class Kind { Log, Mon, Poly, Svr, Nn };

    Kind kind = Kind::Log;
    int order = 0;
    std::vector<int> hidden;

    static ModelSpec log();
    static ModelSpec mon(int n);
    static ModelSpec poly(int k);
    static ModelSpec svr();
    static ModelSpec nn(std::vector<int> hidden);

    /// Accepts the names produced by `name()`: log, mon2, poly3, svr, nn5, nn2-4.
    static ModelSpec parse(std::string_view text);

    std::string name() const;
    std::size_t parameter_count() const;
    bool linear_in_parameters() const { return kind == Kind::Mon || kind == Kind::Poly; }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Hidden-layer layouts tried by default for Nn.
const std::vector<std::vector<int>>& default_nn_layouts();

class FittedModel {
public:
    FittedModel(ModelSpec spec, std::vector<double> parameters, bool converged = true,
                std::vector<double> loss_trace = {});

    double predict(double x) const;
    std::vector<double> predict(std::span<const double> x) const;

    const ModelSpec& spec() const noexcept { return spec_; }
    std::span<const double> parameters() const noexcept { return parameters_; }
    /// False when an iterative fit hit its iteration cap; parameters are then
    /// the best found so far.
    bool converged() const noexcept { return converged_; }
    /// Training loss after each accepted optimizer step (iterative specs only).
    const std::vector<double>& loss_trace() const noexcept { return loss_trace_; }

private:
    ModelSpec spec_;
    std::vector<double> parameters_;
    bool converged_;
    std::vector<double> loss_trace_;
};

/// Least-squares fit of `spec` to (x, y). Deterministic given seed.
/// Throws SingularSystem when a linear-in-parameters design is rank deficient.
FittedModel fit(const ModelSpec& spec, std::span<const double> x, std::span<const double> y,
                std::uint64_t seed);

double mse(const FittedModel& model, std::span<const double> x, std::span<const double> y);

struct SplitConfig {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Random disjoint train/test cover with |train| = round(fraction * n).
Split split(std::size_t n, const SplitConfig& cfg);

/// Pinned optimizer settings for the iterative specs.
namespace fit_settings {
inline constexpr int kLogStarts = 5;
inline constexpr int kLogMaxIterations = 400;
inline constexpr int kNnEpochs = 2000;
inline constexpr double kNnLearningRate = 0.01;
inline constexpr int kSvrIterations = 5000;
inline constexpr double kSvrEpsilonFactor = 0.1;
inline constexpr double kSvrRegularization = 1.0;
}  // namespace fit_settings

}  // namespace reci
