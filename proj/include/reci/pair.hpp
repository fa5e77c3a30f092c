#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reci {

enum class Direction { XtoY, YtoX };

Direction opposite(Direction d) noexcept;
std::string_view to_string(Direction d) noexcept;
/// "XtoY" / "YtoX" / "NoDecision" for an optional direction.
std::string_view to_string(const std::optional<Direction>& d) noexcept;
std::optional<Direction> parse_direction(std::string_view s);

/// Inferred direction plus the evidence behind it.
///
/// For regression-based methods the two error fields hold the test MSEs of
/// Y regressed on X and X regressed on Y. An empty `direction` means no
/// decision was made.
struct Decision {
    std::optional<Direction> direction;
    double mse_y_given_x = 0.0;
    double mse_x_given_y = 0.0;
    double confidence = 0.0;

    bool decided() const noexcept { return direction.has_value(); }
    friend bool operator==(const Decision&, const Decision&) = default;
};

/// Two aligned samples with optional ground truth and a dataset weight.
/// Validated on construction and immutable afterwards.
class CauseEffectPair {
public:
    CauseEffectPair(std::string id, std::vector<double> x, std::vector<double> y,
                    double weight = 1.0, std::optional<Direction> truth = std::nullopt);

    const std::string& id() const noexcept { return id_; }
    std::span<const double> x() const noexcept { return x_; }
    std::span<const double> y() const noexcept { return y_; }
    double weight() const noexcept { return weight_; }
    const std::optional<Direction>& truth() const noexcept { return truth_; }
    std::size_t size() const noexcept { return x_.size(); }

    /// Same data with the roles of x and y exchanged; truth is flipped too.
    CauseEffectPair swapped() const;
    /// Rows at `rows`, in the given order.
    CauseEffectPair select(std::span<const std::size_t> rows) const;
    CauseEffectPair with_weight(double weight) const;
    CauseEffectPair with_truth(std::optional<Direction> truth) const;

private:
    std::string id_;
    std::vector<double> x_;
    std::vector<double> y_;
    double weight_;
    std::optional<Direction> truth_;
};

/// Reads a whitespace-separated pair file; columns 1 and 2 become x and y.
/// Blank lines and lines starting with '#' are skipped.
CauseEffectPair load_pair(const std::filesystem::path& path);
CauseEffectPair parse_pair(std::string_view text, std::string id);

/// Writes x and y as two columns with round-trip precision.
void write_pair(const CauseEffectPair& pair, const std::filesystem::path& path);

struct MetaEntry {
    std::string id;
    int cause_first = 0;
    int cause_last = 0;
    int effect_first = 0;
    int effect_last = 0;
    double weight = 1.0;
};

std::vector<MetaEntry> load_meta(const std::filesystem::path& path);

struct LoadedDataset {
    std::vector<CauseEffectPair> pairs;
    /// Ids of meta rows that describe multivariate pairs.
    std::vector<std::string> skipped;
};

/// Loads every scalar pair listed in `meta` from `dir`.
///
/// A numeric id such as "0001" resolves to "pair0001.txt"; any other id
/// resolves to "<id>.txt". Rows whose cause or effect spans more than one
/// column are skipped and listed in `skipped`.
LoadedDataset load_dataset(const std::filesystem::path& dir, const std::filesystem::path& meta);

/// Loads every "*.txt" pair file in `dir` (sorted by name) with weight 1.
LoadedDataset load_directory(const std::filesystem::path& dir);

/// Uniform sample of n rows without replacement, original order kept.
CauseEffectPair subsample(const CauseEffectPair& pair, std::size_t n, std::uint64_t seed);

}  // namespace reci
