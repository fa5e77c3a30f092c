#pragma once

#include <span>
#include <string>
#include <string_view>

#include "reci/pair.hpp"

namespace reci {

/// Information-geometric baseline: Uniform reference normalizes both
/// variables, Gaussian reference standardizes them.
struct IgciConfig {
    enum class Reference { Uniform, Gaussian };
    enum class Estimator { Slope, Entropy };

    Reference reference = Reference::Uniform;
    Estimator estimator = Estimator::Slope;

    /// "u-slope", "u-entropy", "g-slope", "g-entropy".
    static IgciConfig parse(std::string_view text);
    std::string name() const;
};

struct IgciScores {
    double x_to_y = 0.0;  // score of X -> Y; lower is preferred
    double y_to_x = 0.0;
};

inline constexpr double kIgciTieTolerance = 1e-9;

/// Mean log |dy/dx| over consecutive points sorted by x.
/// Repeated x values are collapsed to one point carrying the mean partner
/// value. Throws DegenerateSpacing when more than half of the raw
/// consecutive differences are zero.
double igci_slope_score(std::span<const double> x, std::span<const double> y);

/// 1-NN spacing entropy estimate: psi(n) - psi(1) + mean log |x_{i+1} - x_i|.
double spacing_entropy(std::span<const double> v);

IgciScores igci_scores(const CauseEffectPair& pair, const IgciConfig& cfg);

/// XtoY iff the X -> Y score is smaller; scores within 1e-9 give NoDecision.
/// confidence = 1 - exp(-|score difference|). Error fields are left at 0.
Decision igci_decide(const CauseEffectPair& pair, const IgciConfig& cfg);

inline constexpr std::size_t kIgciMinSamples = 20;

}  // namespace reci
