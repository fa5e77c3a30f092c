#include "reci/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "reci/error.hpp"
#include "reci/parallel.hpp"
#include "reci/preprocess.hpp"
#include "reci/random.hpp"

namespace reci {

Method Method::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw Error(ErrorKind::InvalidArgument, "method '" + std::string(text) + "' lacks a family prefix");
    const auto family = text.substr(0, colon);
    const auto rest = text.substr(colon + 1);
    Method m;
    if (family == "reci") {
        m.family = Family::Reci;
        m.spec = ModelSpec::parse(rest);
    } else if (family == "igci") {
        m.family = Family::Igci;
        m.igci = IgciConfig::parse(rest);
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown method family '" + std::string(family) + "'");
    }
    return m;
}

std::vector<Method> Method::parse_list(std::string_view text) {
    std::vector<Method> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        const auto item = text.substr(start, end - start);
        if (!item.empty()) out.push_back(parse(item));
        start = end + 1;
    }
    if (out.empty()) throw Error(ErrorKind::InvalidArgument, "no methods given");
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (out[i].name() == out[j].name())
                throw Error(ErrorKind::InvalidArgument, "duplicate method " + out[i].name());
    return out;
}

std::string Method::name() const {
    return family == Family::Reci ? "reci:" + spec.name() : "igci:" + igci.name();
}

double accuracy(std::span<const ScoredRecord> records) {
    double total = 0.0, hit = 0.0;
    for (const auto& r : records) {
        total += r.weight;
        if (r.decision && r.truth && *r.decision == *r.truth) hit += r.weight;
    }
    if (!(total > 0.0)) throw Error(ErrorKind::ZeroWeight, "record weights sum to zero");
    return hit / total;
}

std::vector<CurvePoint> decision_rate_curve(std::span<const ScoredRecord> records, std::span<const double> rates) {
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(rates[i] > 0.0 && rates[i] <= 1.0))
            throw Error(ErrorKind::InvalidArgument, "decision rates must lie in (0, 1]");
        if (i > 0 && !(rates[i] > rates[i - 1]))
            throw Error(ErrorKind::InvalidArgument, "decision rates must be strictly increasing");
    }
    std::vector<const ScoredRecord*> ranked;
    ranked.reserve(records.size());
    for (const auto& r : records) ranked.push_back(&r);
    std::sort(ranked.begin(), ranked.end(), [](const ScoredRecord* a, const ScoredRecord* b) {
        if (a->confidence != b->confidence) return a->confidence > b->confidence;
        return a->pair_id < b->pair_id;
    });

    std::vector<CurvePoint> curve;
    const auto m = static_cast<double>(ranked.size());
    for (double rate : rates) {
        // The small slack keeps e.g. 0.3 * 10 from rounding up to 4.
        auto k = static_cast<std::size_t>(std::ceil(rate * m - 1e-9));
        k = std::clamp<std::size_t>(k, ranked.empty() ? 0 : 1, ranked.size());
        double total = 0.0, hit = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const auto& r = *ranked[i];
            total += r.weight;
            if (r.decision && r.truth && *r.decision == *r.truth) hit += r.weight;
        }
        curve.push_back({rate, k, total > 0.0 ? hit / total : 0.0});
    }
    return curve;
}

std::vector<double> parse_rates(std::string_view text) {
    auto to_double = [](std::string_view s) {
        try {
            std::size_t used = 0;
            const std::string str(s);
            const double v = std::stod(str, &used);
            if (used != str.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "bad number '" + std::string(s) + "' in rates");
        }
    };
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string_view::npos) throw Error(ErrorKind::InvalidArgument, "rates need start:step:stop");
        const double start = to_double(text.substr(0, a));
        const double step = to_double(text.substr(a + 1, b - a - 1));
        const double stop = to_double(text.substr(b + 1));
        if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "rate step must be positive");
        for (int i = 0;; ++i) {
            const double v = start + i * step;
            if (v > stop + 1e-9) break;
            out.push_back(std::min(v, 1.0));
        }
    } else {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto end = text.find(',', start);
            if (end == std::string_view::npos) end = text.size();
            if (end > start) out.push_back(to_double(text.substr(start, end - start)));
            start = end + 1;
        }
    }
    if (out.empty()) throw Error(ErrorKind::InvalidArgument, "no rates given");
    return out;
}

ScoredRecord PairRecord::scored() const {
    return {pair_id, decision.direction, truth, weight, decision.confidence};
}

std::vector<ScoredRecord> BenchmarkReport::scored(std::string_view method) const {
    std::vector<ScoredRecord> out;
    for (const auto& r : records)
        if (r.method == method) out.push_back(r.scored());
    return out;
}

std::vector<double> default_curve_rates() {
    std::vector<double> r;
    for (int i = 1; i <= 10; ++i) r.push_back(i / 10.0);
    return r;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Prepared {
    std::optional<CauseEffectPair> pair;
    std::optional<std::string> error;
    double seconds = 0.0;
    std::uint64_t seed = 0;
};

Prepared prepare(const CauseEffectPair& raw, const BenchmarkConfig& cfg) {
    Prepared p;
    p.seed = mix_seed(cfg.seed, hash_string(raw.id()));
    const auto t0 = Clock::now();
    try {
        CauseEffectPair pair = raw;
        if (cfg.density_threshold) pair = remove_low_density(pair, *cfg.density_threshold);
        if (cfg.max_samples > 0 && pair.size() > cfg.max_samples)
            pair = subsample(pair, cfg.max_samples, mix_seed(p.seed, 0));
        p.pair = std::move(pair);
    } catch (const Error& e) {
        p.error = e.what();
    }
    p.seconds = seconds_since(t0);
    return p;
}

Decision run_method(const Method& m, const CauseEffectPair& pair, const BenchmarkConfig& cfg, std::uint64_t seed) {
    if (m.family == Method::Family::Igci) return igci_decide(pair, m.igci);
    InferenceConfig ic;
    ic.spec = m.spec;
    ic.scaling = cfg.scaling;
    ic.split.train_fraction = cfg.train_fraction;
    ic.split.seed = mix_seed(seed, 1);
    ic.runs = cfg.runs;
    ic.aggregation = cfg.aggregation;
    ic.threshold = cfg.threshold;
    return reci_aggregate(pair, ic);
}

}  // namespace

BenchmarkReport run_benchmark(std::span<const CauseEffectPair> corpus, std::span<const Method> methods,
                              const BenchmarkConfig& config) {
    if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus has no pairs");
    if (methods.empty()) throw Error(ErrorKind::InvalidArgument, "no methods given");
    if (config.runs < 1) throw Error(ErrorKind::InvalidArgument, "runs must be at least 1");
    for (std::size_t i = 0; i < corpus.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (corpus[i].id() == corpus[j].id())
                throw Error(ErrorKind::InvalidArgument, "duplicate pair id " + corpus[i].id());

    BenchmarkReport report;
    report.config = config;
    for (const auto& m : methods) report.methods.push_back(m.name());

    std::vector<Prepared> prepared(corpus.size());
    parallel_for(corpus.size(), config.workers, [&](std::size_t i) { prepared[i] = prepare(corpus[i], config); });

    const std::size_t jobs = corpus.size() * methods.size();
    report.records.resize(jobs);
    parallel_for(jobs, config.workers, [&](std::size_t job) {
        const std::size_t pi = job / methods.size();
        const std::size_t mi = job % methods.size();
        const auto& raw = corpus[pi];
        const auto& prep = prepared[pi];
        PairRecord& rec = report.records[job];
        rec.pair_id = raw.id();
        rec.method = report.methods[mi];
        rec.truth = raw.truth();
        rec.weight = raw.weight();
        rec.wall_time_s = prep.seconds;
        if (prep.error) {
            rec.error = *prep.error;
            return;
        }
        rec.samples_used = prep.pair->size();
        const auto t0 = Clock::now();
        try {
            rec.decision = run_method(methods[mi], *prep.pair, config, prep.seed);
        } catch (const Error& e) {
            rec.decision = Decision{};
            rec.error = e.what();
        }
        rec.wall_time_s += seconds_since(t0);
    });

    std::sort(report.records.begin(), report.records.end(), [](const PairRecord& a, const PairRecord& b) {
        if (a.pair_id != b.pair_id) return a.pair_id < b.pair_id;
        return a.method < b.method;
    });
    const auto rates = default_curve_rates();
    report.summaries = summarize(report.records, report.methods, rates);
    return report;
}

std::vector<MethodSummary> summarize(const std::vector<PairRecord>& records, std::span<const std::string> methods,
                                     std::span<const double> rates) {
    std::vector<MethodSummary> out;
    for (const auto& name : methods) {
        MethodSummary s;
        s.method = name;
        std::vector<ScoredRecord> scored;
        std::vector<double> times;
        for (const auto& r : records) {
            if (r.method != name) continue;
            scored.push_back(r.scored());
            times.push_back(r.wall_time_s);
            if (r.decision.decided()) ++s.decided;
            if (r.error) ++s.failed;
        }
        s.pairs = scored.size();
        if (!scored.empty()) {
            double weight = 0.0;
            for (const auto& r : scored) weight += r.weight;
            if (weight > 0.0) s.accuracy = accuracy(scored);
            s.curve = decision_rate_curve(scored, rates);
            s.time_total_s = std::accumulate(times.begin(), times.end(), 0.0);
            s.time_mean_s = s.time_total_s / static_cast<double>(times.size());
            if (times.size() > 1) {
                double ss = 0.0;
                for (double t : times) ss += (t - s.time_mean_s) * (t - s.time_mean_s);
                s.time_std_s = std::sqrt(ss / static_cast<double>(times.size() - 1));
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace reci
