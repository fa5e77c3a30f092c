#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reci/regress.hpp"

namespace reci::detail {

/// Layer widths including the scalar input and output, e.g. {1, 4, 8, 1}.
std::vector<int> mlp_layout(const ModelSpec& spec);
std::size_t mlp_parameter_count(std::span<const int> layout);
double mlp_predict(std::span<const int> layout, std::span<const double> params, double x);

FittedModel fit_mlp(const ModelSpec& spec, std::span<const double> x, std::span<const double> y,
                    std::uint64_t seed);

}  // namespace reci::detail
