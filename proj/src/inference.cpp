#include "reci/inference.hpp"

#include <algorithm>
#include <vector>

#include "reci/error.hpp"
#include "reci/random.hpp"

namespace reci {

std::uint64_t run_seed(std::uint64_t master, int run) noexcept {
    return mix_seed(master, static_cast<std::uint64_t>(run));
}

double confidence(double mse_a, double mse_b) {
    if (mse_a < 0.0 || mse_b < 0.0)
        throw Error(ErrorKind::InvalidArgument, "confidence: errors must be non-negative");
    const double hi = std::max(mse_a, mse_b);
    if (hi == 0.0) throw Error(ErrorKind::BothZero, "both regression errors are zero");
    return 1.0 - std::min(mse_a, mse_b) / hi;
}

namespace {

std::vector<double> gather(std::span<const double> v, const std::vector<std::size_t>& idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

double safe_confidence(double a, double b) {
    return std::max(a, b) > 0.0 ? confidence(a, b) : 0.0;
}

}  // namespace

DirectionalErrors regression_errors(const CauseEffectPair& pair, const InferenceConfig& cfg, int run) {
    if (pair.size() < 4) throw Error(ErrorKind::InvalidArgument, pair.id() + ": fewer than 4 rows");
    const auto x = scale(pair.x(), cfg.scaling);
    const auto y = scale(pair.y(), cfg.scaling);

    const std::uint64_t seed = run_seed(cfg.split.seed, run);
    const Split s = split(pair.size(), SplitConfig{cfg.split.train_fraction, seed});
    const auto x_train = gather(x, s.train), y_train = gather(y, s.train);
    const auto x_test = gather(x, s.test), y_test = gather(y, s.test);

    const std::uint64_t fit_seed = mix_seed(seed, 1);
    const FittedModel forward = fit(cfg.spec, x_train, y_train, fit_seed);
    const FittedModel backward = fit(cfg.spec, y_train, x_train, fit_seed);
    return {mse(forward, x_test, y_test), mse(backward, y_test, x_test)};
}

Decision decide_from_errors(double mse_y_given_x, double mse_x_given_y, double threshold) {
    Decision d;
    d.mse_y_given_x = mse_y_given_x;
    d.mse_x_given_y = mse_x_given_y;
    d.confidence = safe_confidence(mse_y_given_x, mse_x_given_y);
    if (mse_y_given_x == mse_x_given_y || d.confidence < threshold) return d;
    d.direction = mse_y_given_x < mse_x_given_y ? Direction::XtoY : Direction::YtoX;
    return d;
}

Decision reci_decide(const CauseEffectPair& pair, const InferenceConfig& cfg) {
    const DirectionalErrors e = regression_errors(pair, cfg, 0);
    Decision d;
    d.mse_y_given_x = e.mse_y_given_x;
    d.mse_x_given_y = e.mse_x_given_y;
    d.confidence = safe_confidence(e.mse_y_given_x, e.mse_x_given_y);
    if (e.mse_y_given_x < e.mse_x_given_y)
        d.direction = Direction::XtoY;
    else if (e.mse_x_given_y < e.mse_y_given_x)
        d.direction = Direction::YtoX;
    return d;
}

Decision reci_decide_threshold(const CauseEffectPair& pair, const InferenceConfig& cfg) {
    if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "threshold must lie in [0, 1]");
    const DirectionalErrors e = regression_errors(pair, cfg, 0);
    return decide_from_errors(e.mse_y_given_x, e.mse_x_given_y, cfg.threshold);
}

Decision reci_aggregate(const CauseEffectPair& pair, const InferenceConfig& cfg) {
    if (cfg.runs < 1) throw Error(ErrorKind::InvalidArgument, "runs must be >= 1");
    if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "threshold must lie in [0, 1]");

    std::vector<DirectionalErrors> rounds;
    rounds.reserve(static_cast<std::size_t>(cfg.runs));
    for (int r = 0; r < cfg.runs; ++r) rounds.push_back(regression_errors(pair, cfg, r));

    // Fixed index order keeps the sums bit-stable.
    double sum_yx = 0.0, sum_xy = 0.0;
    for (const auto& e : rounds) {
        sum_yx += e.mse_y_given_x;
        sum_xy += e.mse_x_given_y;
    }
    const double runs = static_cast<double>(cfg.runs);
    Decision averaged = decide_from_errors(sum_yx / runs, sum_xy / runs, cfg.threshold);
    if (cfg.aggregation == Aggregation::AveragedMse) return averaged;

    int votes_xy = 0, votes_yx = 0;
    for (const auto& e : rounds) {
        const Decision d = decide_from_errors(e.mse_y_given_x, e.mse_x_given_y, cfg.threshold);
        if (d.direction == Direction::XtoY) ++votes_xy;
        if (d.direction == Direction::YtoX) ++votes_yx;
    }
    Decision out = averaged;
    if (votes_xy > votes_yx)
        out.direction = Direction::XtoY;
    else if (votes_yx > votes_xy)
        out.direction = Direction::YtoX;
    else
        out.direction.reset();
    return out;
}

}  // namespace reci
