#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reci/igci.hpp"
#include "reci/inference.hpp"
#include "reci/pair.hpp"

namespace reci {

/// One inference method in a benchmark, parsed from strings such as
/// "reci:log", "reci:poly3", "reci:mon2", "reci:nn4-8" or "igci:u-slope".
struct Method {
    enum class Family { Reci, Igci };

    Family family = Family::Reci;
    ModelSpec spec = ModelSpec::log();
    IgciConfig igci;

    static Method parse(std::string_view text);
    static std::vector<Method> parse_list(std::string_view comma_separated);
    std::string name() const;
};

struct BenchmarkConfig {
    std::uint64_t seed = 0;
    /// Relative density threshold for low-density removal; empty disables it.
    std::optional<double> density_threshold;
    /// Pairs larger than this are subsampled; 0 disables subsampling.
    std::size_t max_samples = 500;
    ScalingKind scaling = ScalingKind::Normalize;
    int runs = 1;
    Aggregation aggregation = Aggregation::AveragedMse;
    double train_fraction = 0.7;
    double threshold = 0.0;
    /// 0 uses all hardware threads. Does not affect results.
    unsigned workers = 0;
};

/// Minimal view of a record needed for scoring.
struct ScoredRecord {
    std::string pair_id;
    std::optional<Direction> decision;
    std::optional<Direction> truth;
    double weight = 1.0;
    double confidence = 0.0;
};

/// Weighted fraction of records whose decision equals the truth.
/// Undecided records and records without truth count as incorrect.
/// Throws ZeroWeight when the weights sum to 0.
double accuracy(std::span<const ScoredRecord> records);

struct CurvePoint {
    double rate = 0.0;
    std::size_t selected = 0;
    double accuracy = 0.0;
};

/// For each rate r, the ceil(r * M) records with the highest confidence
/// (ties broken by pair id) are scored. Rates must be strictly increasing
/// in (0, 1]. A selection whose weights sum to 0 scores 0.
std::vector<CurvePoint> decision_rate_curve(std::span<const ScoredRecord> records, std::span<const double> rates);

/// "0.1:0.1:1.0" (start:step:stop) or a comma-separated list.
std::vector<double> parse_rates(std::string_view text);

struct PairRecord {
    std::string pair_id;
    std::string method;
    Decision decision;
    std::optional<Direction> truth;
    double weight = 1.0;
    std::size_t samples_used = 0;
    double wall_time_s = 0.0;
    /// Set when this pair failed for this method; the decision is then empty.
    std::optional<std::string> error;

    ScoredRecord scored() const;
};

struct MethodSummary {
    std::string method;
    double accuracy = 0.0;
    std::size_t pairs = 0;
    std::size_t decided = 0;
    std::size_t failed = 0;
    double time_total_s = 0.0;
    double time_mean_s = 0.0;
    double time_std_s = 0.0;
    std::vector<CurvePoint> curve;
};

struct BenchmarkReport {
    BenchmarkConfig config;
    std::vector<std::string> methods;
    std::vector<std::string> skipped_pairs;
    /// Sorted by (pair id, method).
    std::vector<PairRecord> records;
    std::vector<MethodSummary> summaries;

    std::vector<ScoredRecord> scored(std::string_view method) const;
};

std::vector<double> default_curve_rates();

/// Runs every method on every pair. Per-pair failures are stored in the
/// records. Throws EmptyCorpus when `corpus` is empty.
BenchmarkReport run_benchmark(std::span<const CauseEffectPair> corpus, std::span<const Method> methods,
                              const BenchmarkConfig& config);

/// Recomputes summaries (accuracy, timings, curves) from the records.
std::vector<MethodSummary> summarize(const std::vector<PairRecord>& records,
                                     std::span<const std::string> methods, std::span<const double> rates);

// Report I/O.

struct ReportOptions {
    bool include_timing = true;
};

std::string report_to_json(const BenchmarkReport& report, const ReportOptions& opts = {});
BenchmarkReport report_from_json(std::string_view text);
std::string records_to_csv(const BenchmarkReport& report, const ReportOptions& opts = {});
std::string curve_to_csv(std::span<const MethodSummary> summaries);

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    double y_min = 0.0;
    double y_max = 1.0;
};

/// Standalone SVG line plot, one polyline per series.
std::string line_plot_svg(std::span<const PlotSeries> series, const PlotSpec& spec);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace reci
