#include "reci/igci.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "reci/error.hpp"
#include "reci/preprocess.hpp"

namespace reci {

IgciConfig IgciConfig::parse(std::string_view text) {
    IgciConfig c;
    if (text.size() < 3 || text[1] != '-')
        throw Error(ErrorKind::InvalidArgument, "bad IGCI config '" + std::string(text) + "'");
    if (text[0] == 'u')
        c.reference = Reference::Uniform;
    else if (text[0] == 'g')
        c.reference = Reference::Gaussian;
    else
        throw Error(ErrorKind::InvalidArgument, "bad IGCI reference in '" + std::string(text) + "'");
    const auto est = text.substr(2);
    if (est == "slope")
        c.estimator = Estimator::Slope;
    else if (est == "entropy")
        c.estimator = Estimator::Entropy;
    else
        throw Error(ErrorKind::InvalidArgument, "bad IGCI estimator in '" + std::string(text) + "'");
    return c;
}

std::string IgciConfig::name() const {
    return std::string(reference == Reference::Uniform ? "u" : "g") +
           (estimator == Estimator::Slope ? "-slope" : "-entropy");
}

namespace {

struct Sorted {
    std::vector<double> key;
    std::vector<double> partner;
};

Sorted sort_by(std::span<const double> key, std::span<const double> partner) {
    std::vector<std::size_t> order(key.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    Sorted s;
    s.key.reserve(key.size());
    s.partner.reserve(key.size());
    for (std::size_t i : order) {
        s.key.push_back(key[i]);
        s.partner.push_back(partner[i]);
    }
    return s;
}

void check_spacing(const std::vector<double>& sorted_key) {
    std::size_t zeros = 0;
    for (std::size_t i = 0; i + 1 < sorted_key.size(); ++i)
        if (sorted_key[i + 1] == sorted_key[i]) ++zeros;
    if (2 * zeros > sorted_key.size() - 1)
        throw Error(ErrorKind::DegenerateSpacing, "more than half of the spacings are zero");
}

}  // namespace

double igci_slope_score(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorKind::InvalidArgument, "slope score: bad input sizes");
    Sorted s = sort_by(x, y);
    check_spacing(s.key);

    // Collapse repeated keys; the partner becomes the group mean.
    std::vector<double> kx, ky;
    for (std::size_t i = 0; i < s.key.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < s.key.size() && s.key[j] == s.key[i]) sum += s.partner[j++];
        kx.push_back(s.key[i]);
        ky.push_back(sum / static_cast<double>(j - i));
        i = j;
    }

    double total = 0.0;
    std::size_t terms = 0;
    for (std::size_t i = 0; i + 1 < kx.size(); ++i) {
        const double dy = ky[i + 1] - ky[i];
        if (dy == 0.0) continue;
        total += std::log(std::abs(dy / (kx[i + 1] - kx[i])));
        ++terms;
    }
    if (terms == 0) throw Error(ErrorKind::DegenerateSpacing, "no usable slope terms");
    return total / static_cast<double>(terms);
}

double spacing_entropy(std::span<const double> v) {
    if (v.size() < 2) throw Error(ErrorKind::InvalidArgument, "entropy needs at least 2 values");
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    check_spacing(s);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double d = s[i + 1] - s[i];
        if (d != 0.0) total += std::log(d);
    }
    const double n = static_cast<double>(s.size());
    using boost::math::digamma;
    return digamma(n) - digamma(1.0) + total / (n - 1.0);
}

IgciScores igci_scores(const CauseEffectPair& pair, const IgciConfig& cfg) {
    if (pair.size() < kIgciMinSamples)
        throw Error(ErrorKind::InvalidArgument, pair.id() + ": IGCI needs at least 20 samples");
    const ScalingKind kind =
        cfg.reference == IgciConfig::Reference::Uniform ? ScalingKind::Normalize : ScalingKind::Standardize;
    const auto x = scale(pair.x(), kind);
    const auto y = scale(pair.y(), kind);
    IgciScores s;
    if (cfg.estimator == IgciConfig::Estimator::Slope) {
        s.x_to_y = igci_slope_score(x, y);
        s.y_to_x = igci_slope_score(y, x);
    } else {
        const double hx = spacing_entropy(x), hy = spacing_entropy(y);
        s.x_to_y = hy - hx;
        s.y_to_x = hx - hy;
    }
    return s;
}

Decision igci_decide(const CauseEffectPair& pair, const IgciConfig& cfg) {
    const IgciScores s = igci_scores(pair, cfg);
    Decision d;
    const double gap = s.y_to_x - s.x_to_y;
    d.confidence = 1.0 - std::exp(-std::abs(gap));
    if (std::abs(gap) > kIgciTieTolerance) d.direction = gap > 0.0 ? Direction::XtoY : Direction::YtoX;
    return d;
}

}  // namespace reci
