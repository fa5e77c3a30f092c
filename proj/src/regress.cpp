#include "reci/regress.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "neural.hpp"
#include "reci/error.hpp"
#include "reci/random.hpp"

namespace reci {

ModelSpec ModelSpec::log() { return ModelSpec{Kind::Log, 0, {}}; }

ModelSpec ModelSpec::mon(int n) {
    if (n < 2 || n > 9) throw Error(ErrorKind::InvalidArgument, "Mon exponent must be in [2, 9]");
    return ModelSpec{Kind::Mon, n, {}};
}

ModelSpec ModelSpec::poly(int k) {
    if (k < 1 || k > 9) throw Error(ErrorKind::InvalidArgument, "Poly degree must be in [1, 9]");
    return ModelSpec{Kind::Poly, k, {}};
}

ModelSpec ModelSpec::svr() { return ModelSpec{Kind::Svr, 0, {}}; }

ModelSpec ModelSpec::nn(std::vector<int> hidden) {
    if (hidden.empty() || hidden.size() > 2)
        throw Error(ErrorKind::InvalidArgument, "Nn needs 1 or 2 hidden layers");
    for (int h : hidden)
        if (h < 1) throw Error(ErrorKind::InvalidArgument, "Nn layer widths must be positive");
    return ModelSpec{Kind::Nn, 0, std::move(hidden)};
}

const std::vector<std::vector<int>>& default_nn_layouts() {
    static const std::vector<std::vector<int>> layouts{{2}, {5}, {10}, {20}, {2, 4}, {4, 8}};
    return layouts;
}

namespace {

int parse_int(std::string_view s, std::string_view whole) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw Error(ErrorKind::InvalidArgument, "bad model spec '" + std::string(whole) + "'");
    return v;
}

}  // namespace

ModelSpec ModelSpec::parse(std::string_view text) {
    if (text == "log") return log();
    if (text == "svr") return svr();
    if (text.starts_with("mon")) return mon(parse_int(text.substr(3), text));
    if (text.starts_with("poly")) return poly(parse_int(text.substr(4), text));
    if (text.starts_with("nn")) {
        std::string_view rest = text.substr(2);
        std::vector<int> hidden;
        const auto dash = rest.find('-');
        if (dash == std::string_view::npos) {
            hidden.push_back(parse_int(rest, text));
        } else {
            hidden.push_back(parse_int(rest.substr(0, dash), text));
            hidden.push_back(parse_int(rest.substr(dash + 1), text));
        }
        return nn(std::move(hidden));
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model spec '" + std::string(text) + "'");
}

std::string ModelSpec::name() const {
    switch (kind) {
        case Kind::Log: return "log";
        case Kind::Mon: return "mon" + std::to_string(order);
        case Kind::Poly: return "poly" + std::to_string(order);
        case Kind::Svr: return "svr";
        case Kind::Nn: {
            std::string s = "nn" + std::to_string(hidden.at(0));
            if (hidden.size() > 1) s += "-" + std::to_string(hidden[1]);
            return s;
        }
    }
    return "?";
}

std::size_t ModelSpec::parameter_count() const {
    switch (kind) {
        case Kind::Log: return 4;
        case Kind::Mon: return 2;
        case Kind::Poly: return static_cast<std::size_t>(order) + 1;
        case Kind::Svr: return 2;
        case Kind::Nn: return detail::mlp_parameter_count(detail::mlp_layout(*this));
    }
    return 0;
}

namespace {

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double log_curve(std::span<const double> p, double x) {
    // a + (b - a) / (1 + exp(c (d - x))) == a + (b - a) * logistic(c (x - d))
    return p[0] + (p[1] - p[0]) * logistic(p[2] * (x - p[3]));
}

}  // namespace

FittedModel::FittedModel(ModelSpec spec, std::vector<double> parameters, bool converged,
                         std::vector<double> loss_trace)
    : spec_(std::move(spec)),
      parameters_(std::move(parameters)),
      converged_(converged),
      loss_trace_(std::move(loss_trace)) {
    if (parameters_.size() != spec_.parameter_count())
        throw Error(ErrorKind::InvalidArgument,
                    "model " + spec_.name() + " expects " + std::to_string(spec_.parameter_count()) +
                        " parameters");
}

double FittedModel::predict(double x) const {
    const auto& p = parameters_;
    switch (spec_.kind) {
        case ModelSpec::Kind::Log: return log_curve(p, x);
        case ModelSpec::Kind::Mon: return p[0] * std::pow(x, spec_.order) + p[1];
        case ModelSpec::Kind::Poly: {
            double acc = 0.0;
            for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
            return acc;
        }
        case ModelSpec::Kind::Svr: return p[0] + p[1] * x;
        case ModelSpec::Kind::Nn: {
            const auto layout = detail::mlp_layout(spec_);
            return detail::mlp_predict(layout, p, x);
        }
    }
    return 0.0;
}

std::vector<double> FittedModel::predict(std::span<const double> x) const {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = predict(x[i]);
    return out;
}

double mse(const FittedModel& model, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw Error(ErrorKind::InvalidArgument, "mse: x and y must be non-empty and aligned");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - model.predict(x[i]);
        sum += r * r;
    }
    return sum / static_cast<double>(x.size());
}

namespace {

double mean_squared_residual(std::span<const double> x, std::span<const double> y,
                             std::span<const double> params) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = log_curve(params, x[i]) - y[i];
        s += r * r;
    }
    return s / static_cast<double>(x.size());
}

FittedModel fit_linear(const ModelSpec& spec, std::span<const double> x, std::span<const double> y) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    const Eigen::Index p = static_cast<Eigen::Index>(spec.parameter_count());
    Eigen::MatrixXd design(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        if (spec.kind == ModelSpec::Kind::Mon) {
            design(i, 0) = std::pow(xi, spec.order);
            design(i, 1) = 1.0;
        } else {
            double v = 1.0;
            for (Eigen::Index j = 0; j < p; ++j, v *= xi) design(i, j) = v;
        }
    }
    const Eigen::Map<const Eigen::VectorXd> rhs(y.data(), n);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < p)
        throw Error(ErrorKind::SingularSystem,
                    spec.name() + ": design matrix has rank " + std::to_string(qr.rank()) + " < " +
                        std::to_string(p));
    const Eigen::VectorXd sol = qr.solve(rhs);
    return FittedModel(spec, std::vector<double>(sol.data(), sol.data() + p));
}

struct LmResult {
    std::array<double, 4> params;
    double loss;
    bool converged;
    std::vector<double> trace;
};

LmResult levenberg_marquardt(std::span<const double> x, std::span<const double> y,
                             std::array<double, 4> start) {
    const std::size_t n = x.size();
    std::array<double, 4> p = start;
    double loss = mean_squared_residual(x, y, p);
    std::vector<double> trace{loss};
    double lambda = 1e-3;
    bool converged = false;

    Eigen::Matrix<double, Eigen::Dynamic, 4> jac(static_cast<Eigen::Index>(n), 4);
    Eigen::VectorXd res(static_cast<Eigen::Index>(n));

    for (int iter = 0; iter < fit_settings::kLogMaxIterations && !converged; ++iter) {
        const double a = p[0], b = p[1], c = p[2], d = p[3];
        for (std::size_t i = 0; i < n; ++i) {
            const double s = logistic(c * (x[i] - d));
            const double ds = s * (1.0 - s);
            const auto row = static_cast<Eigen::Index>(i);
            jac(row, 0) = 1.0 - s;
            jac(row, 1) = s;
            jac(row, 2) = (b - a) * ds * (x[i] - d);
            jac(row, 3) = -(b - a) * ds * c;
            res(row) = a + (b - a) * s - y[i];
        }
        const Eigen::Matrix4d jtj = jac.transpose() * jac;
        const Eigen::Vector4d grad = jac.transpose() * res;
        if (grad.lpNorm<Eigen::Infinity>() < 1e-15) {
            converged = true;
            break;
        }

        bool accepted = false;
        while (!accepted) {
            Eigen::Matrix4d damped = jtj;
            for (int k = 0; k < 4; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            const Eigen::Vector4d step = damped.ldlt().solve(-grad);
            std::array<double, 4> trial{p[0] + step(0), p[1] + step(1), p[2] + step(2), p[3] + step(3)};
            const double trial_loss = mean_squared_residual(x, y, trial);
            if (std::isfinite(trial_loss) && trial_loss < loss) {
                const double gain = loss - trial_loss;
                p = trial;
                loss = trial_loss;
                trace.push_back(loss);
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (gain <= 1e-12 * loss || step.lpNorm<Eigen::Infinity>() < 1e-12) converged = true;
            } else {
                lambda *= 4.0;
                if (lambda > 1e12) {
                    // No descent direction left at this damping: a local minimum.
                    converged = true;
                    break;
                }
            }
        }
    }
    return {p, loss, converged, std::move(trace)};
}

FittedModel fit_logistic(const ModelSpec& spec, std::span<const double> x, std::span<const double> y,
                         std::uint64_t seed) {
    const auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
    const auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
    std::vector<double> sorted(x.begin(), x.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                     sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double span = std::max(*xhi - *xlo, 1e-12);

    Rng rng(seed);
    std::vector<std::array<double, 4>> starts;
    for (double c : {1.0, -1.0, 5.0, -5.0}) starts.push_back({*ylo, *yhi, c / span, median});
    while (starts.size() < static_cast<std::size_t>(fit_settings::kLogStarts)) {
        const double c = rng.uniform(-20.0, 20.0) / span;
        const double d = rng.uniform(*xlo, *xhi);
        starts.push_back({*ylo, *yhi, c, d});
    }

    LmResult best{};
    bool have = false;
    for (const auto& s : starts) {
        LmResult r = levenberg_marquardt(x, y, s);
        if (!have || r.loss < best.loss) {
            best = std::move(r);
            have = true;
        }
    }
    return FittedModel(spec, std::vector<double>(best.params.begin(), best.params.end()),
                       best.converged, std::move(best.trace));
}

FittedModel fit_svr(const ModelSpec& spec, std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const double nd = static_cast<double>(n);
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / nd;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / nd;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
        syy += (y[i] - ym) * (y[i] - ym);
    }
    const double eps = fit_settings::kSvrEpsilonFactor * std::sqrt(syy / (nd - 1.0));
    // (1 / (C n)) * (0.5 w^2 + C * sum max(0, |r| - eps))
    const double lambda = 1.0 / (fit_settings::kSvrRegularization * nd);

    auto objective = [&](double b, double w) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::max(0.0, std::abs(y[i] - b - w * x[i]) - eps);
        return s / nd + 0.5 * lambda * w * w;
    };

    // Start from ordinary least squares.
    double w = sxx > 0.0 ? sxy / sxx : 0.0;
    double b = ym - w * xm;
    double best_b = b, best_w = w, best = objective(b, w);
    std::vector<double> trace{best};
    constexpr double step0 = 0.1;
    for (int t = 1; t <= fit_settings::kSvrIterations; ++t) {
        double gb = 0.0, gw = lambda * w;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - b - w * x[i];
            if (std::abs(r) > eps) {
                const double sgn = r > 0.0 ? 1.0 : -1.0;
                gb -= sgn / nd;
                gw -= sgn * x[i] / nd;
            }
        }
        const double eta = step0 / static_cast<double>(t);
        b -= eta * gb;
        w -= eta * gw;
        const double obj = objective(b, w);
        if (obj < best) {
            best = obj;
            best_b = b;
            best_w = w;
            trace.push_back(best);
        }
    }
    return FittedModel(spec, {best_b, best_w}, true, std::move(trace));
}

}  // namespace

FittedModel fit(const ModelSpec& spec, std::span<const double> x, std::span<const double> y,
                std::uint64_t seed) {
    if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "fit: x and y differ in length");
    if (spec.kind != ModelSpec::Kind::Nn && x.size() < spec.parameter_count() + 1)
        throw Error(ErrorKind::InvalidArgument,
                    "fit: " + spec.name() + " needs at least " +
                        std::to_string(spec.parameter_count() + 1) + " points");
    if (x.size() < 2) throw Error(ErrorKind::InvalidArgument, "fit: need at least 2 points");
    switch (spec.kind) {
        case ModelSpec::Kind::Mon:
        case ModelSpec::Kind::Poly: return fit_linear(spec, x, y);
        case ModelSpec::Kind::Log: return fit_logistic(spec, x, y, seed);
        case ModelSpec::Kind::Svr: return fit_svr(spec, x, y);
        case ModelSpec::Kind::Nn: return detail::fit_mlp(spec, x, y, seed);
    }
    throw Error(ErrorKind::InvalidArgument, "fit: unknown spec");
}

Split split(std::size_t n, const SplitConfig& cfg) {
    if (n < 4) throw Error(ErrorKind::InvalidArgument, "split needs at least 4 rows");
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
        throw Error(ErrorKind::InvalidArgument, "train fraction must lie in (0, 1)");
    auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(cfg.seed);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);

    Split s;
    s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

}  // namespace reci
