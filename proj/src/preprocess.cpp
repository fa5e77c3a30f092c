#include "reci/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reci/error.hpp"

namespace reci {

std::vector<double> normalize(std::span<const double> v) {
    if (v.size() < 2) throw Error(ErrorKind::InvalidArgument, "normalize needs at least 2 values");
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw Error(ErrorKind::DegenerateRange, "normalize: max == min");
    const double range = hi - lo;
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) / range;
    return out;
}

std::vector<double> standardize(std::span<const double> v, VarianceConvention convention) {
    if (v.size() < 2) throw Error(ErrorKind::InvalidArgument, "standardize needs at least 2 values");
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = ss / (convention == VarianceConvention::Sample ? n - 1.0 : n);
    if (!(var > 0.0)) throw Error(ErrorKind::DegenerateRange, "standardize: zero variance");
    const double sd = std::sqrt(var);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean) / sd;
    return out;
}

std::vector<double> scale(std::span<const double> v, ScalingKind kind) {
    return kind == ScalingKind::Normalize ? normalize(v) : standardize(v);
}

CauseEffectPair scale_pair(const CauseEffectPair& pair, ScalingKind kind) {
    return CauseEffectPair(pair.id(), scale(pair.x(), kind), scale(pair.y(), kind), pair.weight(),
                           pair.truth());
}

namespace {

double silverman_bandwidth(std::span<const double> v) {
    // Multivariate rule of thumb for d = 2: sd * (4 / ((d + 2) n))^(1 / (d + 4)).
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return sd * std::pow(1.0 / n, 1.0 / 6.0);
}

}  // namespace

std::vector<double> density_estimates(std::span<const double> x, std::span<const double> y,
                                      BandwidthRule bandwidth) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorKind::InvalidArgument, "density_estimates: bad input sizes");
    const auto xs = normalize(x);
    const auto ys = normalize(y);
    const std::size_t n = xs.size();

    double hx, hy;
    if (bandwidth.kind == BandwidthRule::Kind::Fixed) {
        if (!(bandwidth.h > 0.0)) throw Error(ErrorKind::InvalidArgument, "bandwidth must be > 0");
        hx = hy = bandwidth.h;
    } else {
        hx = silverman_bandwidth(xs);
        hy = silverman_bandwidth(ys);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return xs[a] != xs[b] ? xs[a] < xs[b] : ys[a] < ys[b];
    });

    const double norm = 1.0 / (2.0 * M_PI * hx * hy * static_cast<double>(n));
    std::vector<double> density(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j : order) {
            const double dx = (xs[i] - xs[j]) / hx;
            const double dy = (ys[i] - ys[j]) / hy;
            sum += std::exp(-0.5 * (dx * dx + dy * dy));
        }
        density[i] = sum * norm;
    }
    return density;
}

CauseEffectPair remove_low_density(const CauseEffectPair& pair, double threshold,
                                   BandwidthRule bandwidth) {
    if (!(threshold >= 0.0 && threshold < 1.0))
        throw Error(ErrorKind::InvalidArgument, "density threshold must lie in [0, 1)");
    if (pair.size() < kMinRowsAfterDensityFilter)
        throw Error(ErrorKind::TooFewPointsRemain,
                    pair.id() + ": only " + std::to_string(pair.size()) + " rows");
    const auto density = density_estimates(pair.x(), pair.y(), bandwidth);
    const double cut = threshold * *std::max_element(density.begin(), density.end());
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < density.size(); ++i)
        if (density[i] >= cut) keep.push_back(i);
    if (keep.size() < kMinRowsAfterDensityFilter)
        throw Error(ErrorKind::TooFewPointsRemain,
                    pair.id() + ": " + std::to_string(keep.size()) + " rows survive");
    return pair.select(keep);
}

}  // namespace reci
