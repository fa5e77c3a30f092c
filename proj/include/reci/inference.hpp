#pragma once

#include <cstdint>

#include "reci/pair.hpp"
#include "reci/preprocess.hpp"
#include "reci/regress.hpp"

namespace reci {

enum class Aggregation { AveragedMse, PerRun };

struct InferenceConfig {
    ModelSpec spec = ModelSpec::log();
    ScalingKind scaling = ScalingKind::Normalize;
    /// split.seed is the master seed; run i uses run_seed(split.seed, i).
    SplitConfig split;
    int runs = 1;
    Aggregation aggregation = Aggregation::AveragedMse;
    /// Minimum confidence required to return a direction.
    double threshold = 0.0;
};

std::uint64_t run_seed(std::uint64_t master, int run) noexcept;

/// 1 - min / max of two non-negative errors. Throws BothZero when both are 0.
double confidence(double mse_a, double mse_b);

/// Test-set MSEs of one split+fit round in both directions.
struct DirectionalErrors {
    double mse_y_given_x = 0.0;
    double mse_x_given_y = 0.0;
};

/// Scales the pair, splits once with run_seed(master, run), fits the spec
/// Y-on-X and X-on-Y on the shared training rows, and scores the test rows.
DirectionalErrors regression_errors(const CauseEffectPair& pair, const InferenceConfig& cfg, int run);

/// Threshold rule applied to a pair of errors: the smaller-error direction
/// when confidence >= threshold, NoDecision otherwise or on exact equality.
Decision decide_from_errors(double mse_y_given_x, double mse_x_given_y, double threshold);

/// Plain comparison of both regression errors (threshold ignored).
Decision reci_decide(const CauseEffectPair& pair, const InferenceConfig& cfg);

/// Comparison with the confidence threshold cfg.threshold as rejection rule.
Decision reci_decide_threshold(const CauseEffectPair& pair, const InferenceConfig& cfg);

/// cfg.runs independent rounds, combined per cfg.aggregation.
Decision reci_aggregate(const CauseEffectPair& pair, const InferenceConfig& cfg);

}  // namespace reci
