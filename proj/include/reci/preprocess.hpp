#pragma once

#include <span>
#include <vector>

#include "reci/pair.hpp"

namespace reci {

enum class ScalingKind { Normalize, Standardize };

/// Divisor used by `standardize`: n - 1 (sample) or n (population).
enum class VarianceConvention { Sample, Population };

/// (v - min) / (max - min). Throws DegenerateRange for constant input.
std::vector<double> normalize(std::span<const double> v);

/// (v - mean) / sd. Throws DegenerateRange for zero variance.
std::vector<double> standardize(std::span<const double> v,
                                VarianceConvention convention = VarianceConvention::Sample);

std::vector<double> scale(std::span<const double> v, ScalingKind kind);

/// Both columns scaled independently; id, weight and truth carried over.
CauseEffectPair scale_pair(const CauseEffectPair& pair, ScalingKind kind);

struct BandwidthRule {
    enum class Kind { Silverman, Fixed };
    Kind kind = Kind::Silverman;
    double h = 0.0;  // only read for Fixed

    static BandwidthRule silverman() { return {}; }
    static BandwidthRule fixed(double h) { return {Kind::Fixed, h}; }
};

/// Gaussian product-kernel density at every sample, on coordinates mapped
/// to [0, 1] per axis. Summation runs in a canonical (sorted) point order,
/// so the estimates do not depend on the input row order.
std::vector<double> density_estimates(std::span<const double> x, std::span<const double> y,
                                      BandwidthRule bandwidth = BandwidthRule::silverman());

/// Keeps rows whose density is at least `threshold` times the largest
/// density. Throws TooFewPointsRemain when fewer than 10 rows survive.
CauseEffectPair remove_low_density(const CauseEffectPair& pair, double threshold,
                                   BandwidthRule bandwidth = BandwidthRule::silverman());

inline constexpr std::size_t kMinRowsAfterDensityFilter = 10;

}  // namespace reci
