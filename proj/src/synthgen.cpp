#include "reci/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "reci/error.hpp"
#include "reci/preprocess.hpp"

namespace reci {

double SourceDist::analytic_mean() const {
    switch (kind) {
        case Kind::Uniform01: return 0.5;
        case Kind::Gauss: return mu;
        case Kind::GaussMixture: return 0.5;
    }
    return 0.0;
}

double SourceDist::sample(Rng& rng) const {
    switch (kind) {
        case Kind::Uniform01: return rng.uniform();
        case Kind::Gauss: return rng.normal(mu, sigma);
        case Kind::GaussMixture: return rng.uniform() < 0.5 ? rng.normal(0.3, 0.1) : rng.normal(0.7, 0.1);
    }
    return 0.0;
}

std::string SourceDist::name() const {
    char buf[64];
    switch (kind) {
        case Kind::Uniform01: return "U(0,1)";
        case Kind::Gauss:
            std::snprintf(buf, sizeof buf, "N(%g,%.6g^2)", mu, sigma);
            return buf;
        case Kind::GaussMixture: return "GM([0.3,0.7],[0.1,0.1])";
    }
    return "?";
}

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

}  // namespace

double SigmoidMixture::operator()(double c) const {
    double s = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i) s += beta[i] * std_normal_cdf((c - mu[i]) / sigma[i]);
    return s;
}

double SigmoidMixture::derivative(double c) const {
    double s = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i)
        s += beta[i] * std_normal_pdf((c - mu[i]) / sigma[i]) / sigma[i];
    return s;
}

SigmoidMixture sample_sigmoid_mixture(int n, Rng& rng) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "sigmoid mixture needs n >= 1");
    SigmoidMixture m;
    for (int i = 0; i < n; ++i) {
        m.beta.push_back(rng.uniform());
        m.mu.push_back(rng.uniform());
        m.sigma.push_back(rng.uniform(kSigmoidSigmaMin, kSigmoidSigmaMax));
    }
    return m;
}

SigmoidMixture sample_sigmoid_mixture(int n, std::uint64_t seed) {
    Rng rng(seed);
    return sample_sigmoid_mixture(n, rng);
}

std::vector<double> rescale_interval(std::span<const double> v, double lo, double hi) {
    auto unit = normalize(v);
    for (double& u : unit) u = lo + (hi - lo) * u;
    return unit;
}

GenKind GenKind::parse(std::string_view text) {
    if (text == "linear") return linear();
    if (text == "invertible") return invertible();
    if (text == "noninvertible" || text == "non-invertible") return non_invertible();
    if (text == "noninvertible:square") return non_invertible(NonInvertibleShape::Square);
    if (text == "noninvertible:quartic") return non_invertible(NonInvertibleShape::Quartic);
    if (text == "noninvertible:sine") return non_invertible(NonInvertibleShape::Sine);
    throw Error(ErrorKind::InvalidArgument, "unknown generator kind '" + std::string(text) + "'");
}

std::string GenKind::name() const {
    switch (family) {
        case Family::Linear: return "linear";
        case Family::Invertible: return "invertible";
        case Family::NonInvertible: return "noninvertible";
    }
    return "?";
}

double SourceTransform::operator()(double v) const {
    switch (kind) {
        case Kind::Identity: return v;
        case Kind::Exp: return std::exp(v);
        case Kind::Sigmoid: return sigmoid(v);
    }
    return v;
}

std::string SourceTransform::name() const {
    switch (kind) {
        case Kind::Identity: return "identity";
        case Kind::Exp: return "exp";
        case Kind::Sigmoid: return "s5";
    }
    return "?";
}

namespace {

SourceDist draw_source(Rng& rng) {
    switch (rng.index(5)) {
        case 0: return SourceDist::uniform01();
        case 1: return SourceDist::gauss(0.0, rng.uniform(0.1, 1.0));
        case 2: return SourceDist::gauss(0.5, rng.uniform(0.1, 1.0));
        case 3: return SourceDist::gauss(1.0, rng.uniform(0.1, 1.0));
        default: return SourceDist::gauss_mixture();
    }
}

SourceTransform draw_transform(Rng& rng) {
    SourceTransform t;
    switch (rng.index(3)) {
        case 0: t.kind = SourceTransform::Kind::Identity; break;
        case 1: t.kind = SourceTransform::Kind::Exp; break;
        default:
            t.kind = SourceTransform::Kind::Sigmoid;
            t.sigmoid = sample_sigmoid_mixture(5, rng);
    }
    return t;
}

bool constant(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return !(*hi > *lo);
}

double apply_shape(NonInvertibleShape shape, double c) {
    switch (shape) {
        case NonInvertibleShape::Square: return c * c;
        case NonInvertibleShape::Quartic: return c * c * c * c;
        case NonInvertibleShape::Sine: return std::sin(c);
    }
    return c;
}

}  // namespace

GeneratedPair generate_pair(const GenConfig& cfg, std::string id) {
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
    if (cfg.n_samples < 10) throw Error(ErrorKind::InvalidArgument, "need at least 10 samples");

    Rng rng(cfg.seed);
    const std::size_t n = cfg.n_samples;
    for (int attempt = 1; attempt <= kGeneratorRetries; ++attempt) {
        RealizedGenerator g;
        g.kind = cfg.kind;
        g.alpha = cfg.alpha;
        g.attempts = attempt;
        g.w1 = rng.uniform();
        g.w2 = rng.uniform();
        g.source1 = draw_source(rng);
        g.source2 = draw_source(rng);
        for (auto& f : g.f) f = draw_transform(rng);
        switch (cfg.kind.family) {
            case GenKind::Family::Linear: break;
            case GenKind::Family::Invertible: g.phi_sigmoid = sample_sigmoid_mixture(5, rng); break;
            case GenKind::Family::NonInvertible:
                g.phi_shape = cfg.kind.shape ? *cfg.kind.shape
                                             : static_cast<NonInvertibleShape>(rng.index(3));
                break;
        }

        const double m1 = g.source1.analytic_mean(), m2 = g.source2.analytic_mean();
        std::vector<double> c_raw(n), n_raw(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double s1 = g.source1.sample(rng) - m1;
            const double s2 = g.source2.sample(rng) - m2;
            c_raw[i] = g.w1 * g.f[0](s1) + (1.0 - g.w1) * g.f[1](s2);
            n_raw[i] = g.w2 * g.f[2](s1) + (1.0 - g.w2) * g.f[3](s2);
        }
        if (constant(c_raw) || constant(n_raw)) continue;

        const auto cause = normalize(c_raw);
        auto noise = standardize(n_raw);
        std::vector<double> effect(n);
        std::vector<double> phi_input = cause;
        if (g.phi_shape) {
            const double half_width = *g.phi_shape == NonInvertibleShape::Sine ? 2.0 * M_PI : 2.0;
            phi_input = rescale_interval(cause, -half_width, half_width);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double phi = cause[i];
            if (g.phi_sigmoid) phi = (*g.phi_sigmoid)(cause[i]);
            if (g.phi_shape) phi = apply_shape(*g.phi_shape, phi_input[i]);
            effect[i] = phi + cfg.alpha * noise[i];
        }
        CauseEffectPair pair(std::move(id), cause, std::move(effect), 1.0, Direction::XtoY);
        return GeneratedPair{std::move(pair), std::move(g)};
    }
    throw Error(ErrorKind::DegenerateRange,
                "generator produced a constant cause or noise " + std::to_string(kGeneratorRetries) +
                    " times");
}

std::string format_alpha(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", alpha);
    return buf;
}

std::vector<GeneratedPair> generate_corpus(const GenKind& kind, std::span<const double> alphas,
                                           int pairs_per_alpha, std::size_t n_samples,
                                           std::uint64_t master_seed) {
    std::vector<GeneratedPair> out;
    out.reserve(alphas.size() * static_cast<std::size_t>(std::max(pairs_per_alpha, 0)));
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        for (int k = 0; k < pairs_per_alpha; ++k) {
            char suffix[16];
            std::snprintf(suffix, sizeof suffix, "%04d", k + 1);
            std::string id = kind.name() + "_a" + format_alpha(alphas[a]) + "_" + suffix;
            const std::uint64_t seed =
                mix_seed(mix_seed(master_seed, a), static_cast<std::uint64_t>(k));
            out.push_back(generate_pair(GenConfig{kind, alphas[a], n_samples, seed}, std::move(id)));
        }
    }
    return out;
}

}  // namespace reci
