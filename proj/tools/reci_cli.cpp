// reci: causal direction inference from regression errors, plus the
// benchmark harness and the synthetic/theory tooling around it.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reci/benchmark.hpp"
#include "reci/error.hpp"
#include "reci/igci.hpp"
#include "reci/inference.hpp"
#include "reci/pair.hpp"
#include "reci/synthgen.hpp"
#include "reci/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reci;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

ScalingKind parse_scaling(const std::string& s) {
    if (s == "normalize") return ScalingKind::Normalize;
    if (s == "standardize") return ScalingKind::Standardize;
    throw Error(ErrorKind::InvalidArgument, "scaling must be normalize or standardize");
}

Aggregation parse_aggregation(const std::string& s) {
    if (s == "averaged-mse") return Aggregation::AveragedMse;
    if (s == "per-run") return Aggregation::PerRun;
    throw Error(ErrorKind::InvalidArgument, "aggregation must be averaged-mse or per-run");
}

std::optional<double> parse_preprocess(const std::string& s) {
    if (s == "none") return std::nullopt;
    if (s.rfind("kde", 0) == 0 && s.size() > 3) {
        try {
            std::size_t used = 0;
            const double t = std::stod(s.substr(3), &used);
            if (used == s.size() - 3) return t;
        } catch (const std::exception&) {
        }
    }
    throw Error(ErrorKind::InvalidArgument, "preprocess must be none or kde<threshold>, e.g. kde0.1");
}

// "0.1,0.2" or "start:step:stop".
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    auto num = [](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw Error(ErrorKind::InvalidArgument, "bad number '" + s + "'");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        const auto a = text.find(':'), b = text.find(':', a + 1);
        if (b == std::string::npos) throw Error(ErrorKind::InvalidArgument, "grid needs start:step:stop");
        const double start = num(text.substr(0, a)), step = num(text.substr(a + 1, b - a - 1)),
                     stop = num(text.substr(b + 1));
        if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid step must be positive");
        for (int i = 0; start + i * step <= stop + 1e-9; ++i) out.push_back(start + i * step);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.push_back(num(item));
    }
    if (out.empty()) throw Error(ErrorKind::InvalidArgument, "empty grid");
    return out;
}

json direction_json(const std::optional<Direction>& d) {
    return d ? json(std::string(to_string(*d))) : json(nullptr);
}

json sigmoid_json(const SigmoidMixture& s) { return {{"beta", s.beta}, {"mu", s.mu}, {"sigma", s.sigma}}; }

json source_json(const SourceDist& s) {
    json j = {{"name", s.name()}};
    if (s.kind == SourceDist::Kind::Gauss) {
        j["mu"] = s.mu;
        j["sigma"] = s.sigma;
    }
    return j;
}

const char* shape_name(NonInvertibleShape s) {
    switch (s) {
        case NonInvertibleShape::Square: return "square";
        case NonInvertibleShape::Quartic: return "quartic";
        case NonInvertibleShape::Sine: return "sine";
    }
    return "?";
}

json generator_json(const RealizedGenerator& g) {
    json f = json::array();
    for (const auto& t : g.f) {
        json o = {{"kind", t.name()}};
        if (t.kind == SourceTransform::Kind::Sigmoid) o["sigmoid"] = sigmoid_json(t.sigmoid);
        f.push_back(std::move(o));
    }
    json j = {{"kind", g.kind.name()}, {"alpha", g.alpha},          {"w1", g.w1},   {"w2", g.w2},
              {"source1", source_json(g.source1)}, {"source2", source_json(g.source2)}, {"f", std::move(f)},
              {"attempts", g.attempts}};
    if (g.phi_sigmoid) j["phi_sigmoid"] = sigmoid_json(*g.phi_sigmoid);
    if (g.phi_shape) j["phi_shape"] = shape_name(*g.phi_shape);
    return j;
}

LoadedDataset load_corpus(const fs::path& dir, const std::string& meta) {
    if (!meta.empty()) return load_dataset(dir, meta);
    if (fs::exists(dir / "meta.txt")) return load_dataset(dir, dir / "meta.txt");
    return load_directory(dir);
}

// infer ----------------------------------------------------------------------

struct InferArgs {
    std::string file;
    std::string model = "log";
    std::string method;
    std::string scaling = "normalize";
    std::string aggregation = "averaged-mse";
    int runs = 1;
    double threshold = 0.0;
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
};

int run_infer(const InferArgs& a) {
    const CauseEffectPair pair = load_pair(a.file);
    json out = {{"pair", pair.id()}, {"samples", pair.size()}};
    Decision d;
    if (!a.method.empty() && a.method.rfind("igci:", 0) == 0) {
        const auto m = Method::parse(a.method);
        d = igci_decide(pair, m.igci);
        out["method"] = m.name();
    } else {
        InferenceConfig cfg;
        cfg.spec = a.method.empty() ? ModelSpec::parse(a.model) : Method::parse(a.method).spec;
        cfg.scaling = parse_scaling(a.scaling);
        cfg.aggregation = parse_aggregation(a.aggregation);
        cfg.runs = a.runs;
        cfg.threshold = a.threshold;
        cfg.split.train_fraction = a.train_fraction;
        cfg.split.seed = a.seed;
        d = reci_aggregate(pair, cfg);
        out["method"] = "reci:" + cfg.spec.name();
        out["mse_y_given_x"] = d.mse_y_given_x;
        out["mse_x_given_y"] = d.mse_x_given_y;
    }
    out["decision"] = direction_json(d.direction);
    out["confidence"] = d.confidence;
    std::cout << out.dump(2) << '\n';
    return kOk;
}

// benchmark --------------------------------------------------------------------

struct BenchArgs {
    std::string corpus;
    std::string meta;
    std::string methods = "reci:log";
    std::string preprocess = "none";
    std::string scaling = "normalize";
    std::string aggregation = "averaged-mse";
    std::size_t max_samples = 500;
    int runs = 1;
    double threshold = 0.0;
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string out;
    std::string csv;
    std::string svg;
    bool no_timing = false;
};

int run_bench(const BenchArgs& a) {
    const auto methods = Method::parse_list(a.methods);
    BenchmarkConfig cfg;
    cfg.seed = a.seed;
    cfg.density_threshold = parse_preprocess(a.preprocess);
    cfg.max_samples = a.max_samples;
    cfg.scaling = parse_scaling(a.scaling);
    cfg.aggregation = parse_aggregation(a.aggregation);
    cfg.runs = a.runs;
    cfg.threshold = a.threshold;
    cfg.train_fraction = a.train_fraction;
    cfg.workers = a.workers;

    const auto data = load_corpus(a.corpus, a.meta);
    auto report = run_benchmark(data.pairs, methods, cfg);
    report.skipped_pairs = data.skipped;

    const ReportOptions opts{!a.no_timing};
    const std::string text = report_to_json(report, opts);
    if (a.out.empty())
        std::cout << text;
    else
        write_text_file(a.out, text);
    if (!a.csv.empty()) write_text_file(a.csv, records_to_csv(report, opts));
    if (!a.svg.empty()) {
        std::vector<PlotSeries> series;
        for (const auto& s : report.summaries) {
            PlotSeries p{s.method, {}};
            for (const auto& c : s.curve) p.points.emplace_back(c.rate, c.accuracy);
            series.push_back(std::move(p));
        }
        write_text_file(a.svg, line_plot_svg(series, {"Accuracy by decision rate", "decision rate", "accuracy"}));
    }
    for (const auto& s : report.summaries) {
        std::fprintf(stderr, "%-16s accuracy %.4f  pairs %zu  failed %zu", s.method.c_str(), s.accuracy, s.pairs,
                     s.failed);
        if (!a.no_timing) std::fprintf(stderr, "  time %.4g +- %.4g s", s.time_mean_s, s.time_std_s);
        std::fputc('\n', stderr);
    }
    return kOk;
}

// generate -------------------------------------------------------------------

struct GenArgs {
    std::string kind = "invertible";
    std::string alphas = "0.1";
    int pairs = 100;
    std::size_t samples = 500;
    std::uint64_t seed = 0;
    std::string out;
};

int run_generate(const GenArgs& a) {
    if (a.pairs < 1) throw Error(ErrorKind::InvalidArgument, "--pairs must be at least 1");
    const GenKind kind = GenKind::parse(a.kind);
    const auto alphas = parse_grid(a.alphas);
    const auto corpus = generate_corpus(kind, alphas, a.pairs, a.samples, a.seed);

    const fs::path dir(a.out);
    fs::create_directories(dir);
    std::string meta;
    json gens = json::array();
    for (const auto& g : corpus) {
        write_pair(g.pair, dir / (g.pair.id() + ".txt"));
        meta += g.pair.id() + " 1 1 2 2 1\n";
        json o = generator_json(g.model);
        o["id"] = g.pair.id();
        gens.push_back(std::move(o));
    }
    write_text_file(dir / "meta.txt", meta);
    const json manifest = {{"config",
                            {{"kind", kind.name()},
                             {"alphas", alphas},
                             {"pairs_per_alpha", a.pairs},
                             {"samples", a.samples},
                             {"seed", a.seed}}},
                           {"pairs", std::move(gens)}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    std::fprintf(stderr, "wrote %zu pairs to %s\n", corpus.size(), dir.string().c_str());
    return kOk;
}

// curve ----------------------------------------------------------------------

struct CurveArgs {
    std::string report;
    std::string rates = "0.1:0.1:1.0";
    std::string method;
    std::string svg;
};

int run_curve(const CurveArgs& a) {
    const auto report = report_from_json(read_text_file(a.report));
    const auto rates = parse_rates(a.rates);
    std::vector<std::string> methods = report.methods;
    if (!a.method.empty()) {
        if (std::find(methods.begin(), methods.end(), a.method) == methods.end())
            throw Error(ErrorKind::InvalidArgument, "method '" + a.method + "' is not in the report");
        methods = {a.method};
    }
    const auto summaries = summarize(report.records, methods, rates);
    std::cout << curve_to_csv(summaries);
    if (!a.svg.empty()) {
        std::vector<PlotSeries> series;
        for (const auto& s : summaries) {
            PlotSeries p{s.method, {}};
            for (const auto& c : s.curve) p.points.emplace_back(c.rate, c.accuracy);
            series.push_back(std::move(p));
        }
        write_text_file(a.svg, line_plot_svg(series, {"Accuracy by decision rate", "decision rate", "accuracy"}));
    }
    return kOk;
}

// verify-theory --------------------------------------------------------------

struct TheoryArgs {
    int models = 20;
    std::string alphas = "0.01,0.05,0.1";
    std::uint64_t seed = 0;
    std::size_t samples = 200000;
    std::string estimator = "binning";
    std::string noise = "uniform";
    bool no_reference = false;
    unsigned workers = 0;
    std::string out;
    std::string csv;
};

int run_theory(const TheoryArgs& a) {
    if (a.models < 0) throw Error(ErrorKind::InvalidArgument, "--models must be non-negative");
    const auto alphas = parse_grid(a.alphas);
    CondVarEstimator est;
    if (a.estimator == "binning")
        est = CondVarEstimator::binning();
    else if (a.estimator == "knn")
        est = CondVarEstimator::knn();
    else
        throw Error(ErrorKind::InvalidArgument, "estimator must be binning or knn");
    NoiseSampler noise;
    auto unit = [](double) { return 1.0; };
    if (a.noise == "uniform")
        noise = uniform_unit_noise();
    else if (a.noise == "beta")
        noise = beta_noise(2.0, unit, 1.0);
    else if (a.noise == "gaussian")
        noise = gaussian_noise(unit);  // outside the compact-support assumption
    else
        throw Error(ErrorKind::InvalidArgument, "noise must be uniform, beta or gaussian");

    std::vector<SyntheticModel> models;
    if (!a.no_reference) {
        models.push_back(linear_model());
        models.push_back(quadratic_model());
    }
    for (auto& m : random_sigmoid_models(a.models, a.seed)) models.push_back(std::move(m));
    if (models.empty()) throw Error(ErrorKind::InvalidArgument, "no models to verify");

    const auto rep = verify_theorem(models, alphas, noise, a.samples, est, a.seed, 0.02, a.workers);

    json rows = json::array();
    std::string csv = "model_id,alpha,mc_ratio,quadrature_limit,covariance,linear\n";
    for (const auto& r : rep.rows) {
        rows.push_back({{"model_id", r.model_id},
                        {"alpha", r.alpha},
                        {"mc_ratio", r.mc_ratio},
                        {"quadrature_limit", r.quadrature_limit ? json(*r.quadrature_limit) : json(nullptr)},
                        {"covariance", r.covariance},
                        {"linear", r.linear}});
        char limit[64] = "";
        if (r.quadrature_limit) std::snprintf(limit, sizeof limit, "%.17g", *r.quadrature_limit);
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%s,%.17g,%d\n", r.model_id.c_str(), r.alpha, r.mc_ratio,
                      limit, r.covariance, r.linear ? 1 : 0);
        csv += buf;
    }
    const json out = {{"config",
                       {{"models", a.models},
                        {"alphas", alphas},
                        {"seed", a.seed},
                        {"samples", a.samples},
                        {"estimator", est.name()},
                        {"noise", noise.name}}},
                      {"tolerance", rep.tolerance},
                      {"violations", rep.violations},
                      {"rows", std::move(rows)}};
    if (a.out.empty())
        std::cout << out.dump(2) << '\n';
    else
        write_text_file(a.out, out.dump(2) + "\n");
    if (!a.csv.empty()) write_text_file(a.csv, csv);
    std::fprintf(stderr, "%zu rows, %zu violations\n", rep.rows.size(), rep.violations.size());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal direction inference from regression errors"};
    app.require_subcommand(1);

    InferArgs ia;
    auto* infer = app.add_subcommand("infer", "Infer the causal direction of one pair file");
    infer->add_option("pairfile", ia.file, "Two-column data file")->required();
    infer->add_option("--model", ia.model, "log, monN, polyN, svr, nnA or nnA-B")->capture_default_str();
    infer->add_option("--method", ia.method, "Full method name, e.g. reci:poly3 or igci:u-slope");
    infer->add_option("--scaling", ia.scaling, "normalize or standardize")->capture_default_str();
    infer->add_option("--aggregation", ia.aggregation, "averaged-mse or per-run")->capture_default_str();
    infer->add_option("--runs", ia.runs)->capture_default_str();
    infer->add_option("--threshold", ia.threshold, "Minimum confidence to decide")->capture_default_str();
    infer->add_option("--train-fraction", ia.train_fraction)->capture_default_str();
    infer->add_option("--seed", ia.seed)->capture_default_str();

    BenchArgs ba;
    auto* bench = app.add_subcommand("benchmark", "Run methods over a corpus and report accuracy");
    bench->add_option("--corpus", ba.corpus, "Directory of pair files")->required();
    bench->add_option("--meta", ba.meta, "Meta file (defaults to <corpus>/meta.txt when present)");
    bench->add_option("--methods", ba.methods, "Comma-separated methods")->capture_default_str();
    bench->add_option("--preprocess", ba.preprocess, "none or kde<threshold>")->capture_default_str();
    bench->add_option("--max-samples", ba.max_samples, "Subsample larger pairs; 0 keeps all")
        ->capture_default_str();
    bench->add_option("--scaling", ba.scaling)->capture_default_str();
    bench->add_option("--aggregation", ba.aggregation)->capture_default_str();
    bench->add_option("--runs", ba.runs)->capture_default_str();
    bench->add_option("--threshold", ba.threshold)->capture_default_str();
    bench->add_option("--train-fraction", ba.train_fraction)->capture_default_str();
    bench->add_option("--seed", ba.seed)->capture_default_str();
    bench->add_option("--workers", ba.workers, "0 uses every hardware thread")->capture_default_str();
    bench->add_option("--out", ba.out, "JSON report path (stdout when omitted)");
    bench->add_option("--csv", ba.csv, "Per-pair CSV path");
    bench->add_option("--svg", ba.svg, "Decision-rate plot path");
    bench->add_flag("--no-timing", ba.no_timing, "Omit wall-clock fields");

    GenArgs ga;
    auto* gen = app.add_subcommand("generate", "Write a synthetic labeled corpus");
    gen->add_option("--kind", ga.kind, "linear, invertible or noninvertible")->capture_default_str();
    gen->add_option("--alpha-grid", ga.alphas, "Comma list or start:step:stop")->capture_default_str();
    gen->add_option("--pairs", ga.pairs, "Pairs per alpha")->capture_default_str();
    gen->add_option("--samples", ga.samples)->capture_default_str();
    gen->add_option("--seed", ga.seed)->capture_default_str();
    gen->add_option("--out", ga.out)->required();

    CurveArgs ca;
    auto* curve = app.add_subcommand("curve", "Decision-rate curve from a benchmark report");
    curve->add_option("--report", ca.report)->required();
    curve->add_option("--rates", ca.rates, "start:step:stop or comma list")->capture_default_str();
    curve->add_option("--method", ca.method, "Restrict to one method");
    curve->add_option("--svg", ca.svg, "Plot path");

    TheoryArgs ta;
    auto* theory = app.add_subcommand("verify-theory", "Monte Carlo check of the error asymmetry");
    theory->add_option("--models", ta.models, "Random sigmoid-mixture models")->capture_default_str();
    theory->add_option("--alphas", ta.alphas)->capture_default_str();
    theory->add_option("--seed", ta.seed)->capture_default_str();
    theory->add_option("--samples", ta.samples)->capture_default_str();
    theory->add_option("--estimator", ta.estimator, "binning or knn")->capture_default_str();
    theory->add_option("--noise", ta.noise, "uniform, beta or gaussian")->capture_default_str();
    theory->add_flag("--no-reference", ta.no_reference, "Skip the linear and quadratic reference models");
    theory->add_option("--workers", ta.workers)->capture_default_str();
    theory->add_option("--out", ta.out, "JSON path (stdout when omitted)");
    theory->add_option("--csv", ta.csv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*infer) return run_infer(ia);
        if (*bench) return run_bench(ba);
        if (*gen) return run_generate(ga);
        if (*curve) return run_curve(ca);
        if (*theory) return run_theory(ta);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.category()) {
            case ErrorCategory::Usage: return kUsage;
            case ErrorCategory::Data: return kData;
            case ErrorCategory::Numerical: return kNumerical;
        }
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}
