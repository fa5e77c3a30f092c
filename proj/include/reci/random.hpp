#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace reci {

/// Seeded generator with platform-independent variate transforms.
///
/// The standard library distributions are implementation-defined, so every
/// transform here is written out explicitly on top of the raw 64-bit engine.
/// Identical seeds give bit-identical streams on any conforming toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n), unbiased.
    std::size_t index(std::size_t n);
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    /// Gamma(shape, 1) by Marsaglia-Tsang.
    double gamma(double shape);
    double beta(double a, double b);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// splitmix64 finalizer over (master, stream); used for seed fan-out.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) noexcept;

/// FNV-1a, for deriving stable per-item seeds from identifiers.
std::uint64_t hash_string(std::string_view s) noexcept;

}  // namespace reci
