#include "neural.hpp"

#include <algorithm>
#include <cmath>

#include "reci/random.hpp"

namespace reci::detail {

std::vector<int> mlp_layout(const ModelSpec& spec) {
    std::vector<int> layout{1};
    layout.insert(layout.end(), spec.hidden.begin(), spec.hidden.end());
    layout.push_back(1);
    return layout;
}

std::size_t mlp_parameter_count(std::span<const int> layout) {
    std::size_t p = 0;
    for (std::size_t l = 0; l + 1 < layout.size(); ++l)
        p += static_cast<std::size_t>(layout[l + 1]) * static_cast<std::size_t>(layout[l] + 1);
    return p;
}

namespace {

// Activations of every layer for one input; acts[0] = {x}.
void forward(std::span<const int> layout, std::span<const double> params, double x,
             std::vector<std::vector<double>>& acts) {
    acts.resize(layout.size());
    acts[0].assign(1, x);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < layout.size(); ++l) {
        const int in = layout[l], out = layout[l + 1];
        const double* w = params.data() + off;
        const double* b = w + static_cast<std::size_t>(in * out);
        acts[l + 1].assign(static_cast<std::size_t>(out), 0.0);
        const bool output_layer = l + 2 == layout.size();
        for (int o = 0; o < out; ++o) {
            double z = b[o];
            for (int i = 0; i < in; ++i) z += w[o * in + i] * acts[l][static_cast<std::size_t>(i)];
            acts[l + 1][static_cast<std::size_t>(o)] = output_layer ? z : std::tanh(z);
        }
        off += static_cast<std::size_t>(in * out + out);
    }
}

// Mean squared error and its gradient over the full batch.
double loss_and_gradient(std::span<const int> layout, std::span<const double> params,
                         std::span<const double> x, std::span<const double> y,
                         std::vector<double>& grad) {
    grad.assign(params.size(), 0.0);
    std::vector<std::vector<double>> acts;
    std::vector<double> delta, next_delta;
    const double n = static_cast<double>(x.size());
    double loss = 0.0;

    std::vector<std::size_t> offsets;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < layout.size(); ++l) {
        offsets.push_back(off);
        off += static_cast<std::size_t>(layout[l] * layout[l + 1] + layout[l + 1]);
    }

    for (std::size_t s = 0; s < x.size(); ++s) {
        forward(layout, params, x[s], acts);
        const double r = acts.back()[0] - y[s];
        loss += r * r;
        delta.assign(1, 2.0 * r / n);
        for (std::size_t l = layout.size() - 1; l-- > 0;) {
            const int in = layout[l], out = layout[l + 1];
            double* gw = grad.data() + offsets[l];
            double* gb = gw + static_cast<std::size_t>(in * out);
            const double* w = params.data() + offsets[l];
            for (int o = 0; o < out; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                gb[o] += d;
                for (int i = 0; i < in; ++i) gw[o * in + i] += d * acts[l][static_cast<std::size_t>(i)];
            }
            if (l == 0) break;
            next_delta.assign(static_cast<std::size_t>(in), 0.0);
            for (int i = 0; i < in; ++i) {
                double sum = 0.0;
                for (int o = 0; o < out; ++o) sum += w[o * in + i] * delta[static_cast<std::size_t>(o)];
                const double a = acts[l][static_cast<std::size_t>(i)];
                next_delta[static_cast<std::size_t>(i)] = sum * (1.0 - a * a);
            }
            delta.swap(next_delta);
        }
    }
    return loss / n;
}

}  // namespace

double mlp_predict(std::span<const int> layout, std::span<const double> params, double x) {
    std::vector<std::vector<double>> acts;
    forward(layout, params, x, acts);
    return acts.back()[0];
}

FittedModel fit_mlp(const ModelSpec& spec, std::span<const double> x, std::span<const double> y,
                    std::uint64_t seed) {
    const std::vector<int> layout = mlp_layout(spec);
    std::vector<double> params;
    params.reserve(mlp_parameter_count(layout));
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < layout.size(); ++l) {
        const int in = layout[l], out = layout[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (int k = 0; k < in * out + out; ++k) params.push_back(rng.uniform(-bound, bound));
    }

    // Full-batch Adam. A step that raises the loss is rejected and the
    // learning rate halved, so the accepted losses never increase.
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    const double base_lr = fit_settings::kNnLearningRate;
    double lr = base_lr;
    std::vector<double> grad, trial_grad, trial(params.size());
    std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
    double loss = loss_and_gradient(layout, params, x, y, grad);
    std::vector<double> trace{loss};
    double b1t = 1.0, b2t = 1.0;

    for (int epoch = 1; epoch <= fit_settings::kNnEpochs; ++epoch) {
        b1t *= beta1;
        b2t *= beta2;
        for (std::size_t k = 0; k < params.size(); ++k) {
            m[k] = beta1 * m[k] + (1.0 - beta1) * grad[k];
            v[k] = beta2 * v[k] + (1.0 - beta2) * grad[k] * grad[k];
            const double mhat = m[k] / (1.0 - b1t);
            const double vhat = v[k] / (1.0 - b2t);
            trial[k] = params[k] - lr * mhat / (std::sqrt(vhat) + eps);
        }
        const double trial_loss = loss_and_gradient(layout, trial, x, y, trial_grad);
        if (std::isfinite(trial_loss) && trial_loss <= loss) {
            params.swap(trial);
            grad.swap(trial_grad);
            loss = trial_loss;
            lr = std::min(base_lr, lr * 1.1);
        } else {
            lr *= 0.5;
        }
        trace.push_back(loss);
    }
    return FittedModel(spec, std::move(params), std::isfinite(loss), std::move(trace));
}

}  // namespace reci::detail
