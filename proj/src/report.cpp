#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "reci/benchmark.hpp"
#include "reci/error.hpp"

namespace reci {

using nlohmann::json;

namespace {

const char* scaling_name(ScalingKind k) { return k == ScalingKind::Normalize ? "normalize" : "standardize"; }

ScalingKind parse_scaling(const std::string& s) {
    if (s == "normalize") return ScalingKind::Normalize;
    if (s == "standardize") return ScalingKind::Standardize;
    throw Error(ErrorKind::InvalidArgument, "unknown scaling '" + s + "'");
}

const char* aggregation_name(Aggregation a) { return a == Aggregation::AveragedMse ? "averaged-mse" : "per-run"; }

Aggregation parse_aggregation(const std::string& s) {
    if (s == "averaged-mse") return Aggregation::AveragedMse;
    if (s == "per-run") return Aggregation::PerRun;
    throw Error(ErrorKind::InvalidArgument, "unknown aggregation '" + s + "'");
}

json optional_direction(const std::optional<Direction>& d) {
    return d ? json(std::string(to_string(*d))) : json(nullptr);
}

json curve_json(const std::vector<CurvePoint>& curve) {
    json arr = json::array();
    for (const auto& p : curve) arr.push_back({{"rate", p.rate}, {"selected", p.selected}, {"accuracy", p.accuracy}});
    return arr;
}

}  // namespace

std::string report_to_json(const BenchmarkReport& report, const ReportOptions& opts) {
    const auto& c = report.config;
    json j;
    j["config"] = {
        {"seed", c.seed},
        {"density_threshold", c.density_threshold ? json(*c.density_threshold) : json(nullptr)},
        {"max_samples", c.max_samples},
        {"scaling", scaling_name(c.scaling)},
        {"runs", c.runs},
        {"aggregation", aggregation_name(c.aggregation)},
        {"train_fraction", c.train_fraction},
        {"threshold", c.threshold},
        {"no_decision_rule", "counted as incorrect"},
    };
    j["methods"] = report.methods;
    j["skipped_pairs"] = report.skipped_pairs;

    json sums = json::array();
    for (const auto& s : report.summaries) {
        json o = {{"method", s.method},   {"accuracy", s.accuracy}, {"pairs", s.pairs},
                  {"decided", s.decided}, {"failed", s.failed},     {"curve", curve_json(s.curve)}};
        if (opts.include_timing) {
            o["time_total_s"] = s.time_total_s;
            o["time_mean_s"] = s.time_mean_s;
            o["time_std_s"] = s.time_std_s;
        }
        sums.push_back(std::move(o));
    }
    j["summaries"] = std::move(sums);

    json recs = json::array();
    for (const auto& r : report.records) {
        json o = {{"pair_id", r.pair_id},
                  {"method", r.method},
                  {"decision", optional_direction(r.decision.direction)},
                  {"truth", optional_direction(r.truth)},
                  {"weight", r.weight},
                  {"confidence", r.decision.confidence},
                  {"mse_y_given_x", r.decision.mse_y_given_x},
                  {"mse_x_given_y", r.decision.mse_x_given_y},
                  {"samples_used", r.samples_used},
                  {"error", r.error ? json(*r.error) : json(nullptr)}};
        if (opts.include_timing) o["wall_time_s"] = r.wall_time_s;
        recs.push_back(std::move(o));
    }
    j["records"] = std::move(recs);
    return j.dump(2) + "\n";
}

BenchmarkReport report_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedLine, std::string("report is not valid JSON: ") + e.what());
    }
    try {
        BenchmarkReport r;
        const auto& c = j.at("config");
        r.config.seed = c.at("seed").get<std::uint64_t>();
        if (!c.at("density_threshold").is_null()) r.config.density_threshold = c.at("density_threshold").get<double>();
        r.config.max_samples = c.at("max_samples").get<std::size_t>();
        r.config.scaling = parse_scaling(c.at("scaling").get<std::string>());
        r.config.runs = c.at("runs").get<int>();
        r.config.aggregation = parse_aggregation(c.at("aggregation").get<std::string>());
        r.config.train_fraction = c.at("train_fraction").get<double>();
        r.config.threshold = c.at("threshold").get<double>();
        r.methods = j.at("methods").get<std::vector<std::string>>();
        r.skipped_pairs = j.value("skipped_pairs", std::vector<std::string>{});
        for (const auto& o : j.at("records")) {
            PairRecord p;
            p.pair_id = o.at("pair_id").get<std::string>();
            p.method = o.at("method").get<std::string>();
            if (!o.at("decision").is_null()) p.decision.direction = parse_direction(o.at("decision").get<std::string>());
            if (!o.at("truth").is_null()) p.truth = parse_direction(o.at("truth").get<std::string>());
            p.weight = o.at("weight").get<double>();
            p.decision.confidence = o.at("confidence").get<double>();
            p.decision.mse_y_given_x = o.at("mse_y_given_x").get<double>();
            p.decision.mse_x_given_y = o.at("mse_x_given_y").get<double>();
            p.samples_used = o.at("samples_used").get<std::size_t>();
            p.wall_time_s = o.value("wall_time_s", 0.0);
            if (!o.at("error").is_null()) p.error = o.at("error").get<std::string>();
            r.records.push_back(std::move(p));
        }
        r.summaries = summarize(r.records, r.methods, default_curve_rates());
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedLine, std::string("report is missing fields: ") + e.what());
    }
}

namespace {

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string records_to_csv(const BenchmarkReport& report, const ReportOptions& opts) {
    std::ostringstream out;
    out << "pair_id,method,decision,truth,weight,confidence,mse_y_given_x,mse_x_given_y,samples_used";
    if (opts.include_timing) out << ",wall_time_s";
    out << ",error\n";
    for (const auto& r : report.records) {
        out << csv_field(r.pair_id) << ',' << csv_field(r.method) << ',' << to_string(r.decision.direction) << ','
            << (r.truth ? to_string(*r.truth) : "") << ',' << num(r.weight) << ',' << num(r.decision.confidence)
            << ',' << num(r.decision.mse_y_given_x) << ',' << num(r.decision.mse_x_given_y) << ','
            << r.samples_used;
        if (opts.include_timing) out << ',' << num(r.wall_time_s);
        out << ',' << (r.error ? csv_field(*r.error) : "") << '\n';
    }
    return out.str();
}

std::string curve_to_csv(std::span<const MethodSummary> summaries) {
    std::ostringstream out;
    out << "method,rate,selected,accuracy\n";
    for (const auto& s : summaries)
        for (const auto& p : s.curve)
            out << csv_field(s.method) << ',' << num(p.rate) << ',' << p.selected << ',' << num(p.accuracy) << '\n';
    return out.str();
}

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string fmt(double v, int digits = 2) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

std::string line_plot_svg(std::span<const PlotSeries> series, const PlotSpec& spec) {
    constexpr double width = 640, height = 420;
    constexpr double left = 64, right = 160, top = 40, bottom = 56;
    constexpr std::array<const char*, 8> palette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    double x_min = 0.0, x_max = 1.0;
    bool any = false;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (!any) x_min = x_max = x;
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            any = true;
        }
    if (x_max == x_min) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    const double y_min = spec.y_min;
    const double y_max = spec.y_max > spec.y_min ? spec.y_max : spec.y_min + 1.0;
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(spec.title) << "</text>\n";

    for (int i = 0; i <= 5; ++i) {
        const double fy = y_min + (y_max - y_min) * i / 5.0;
        const double fx = x_min + (x_max - x_min) * i / 5.0;
        o << "<line x1=\"" << left << "\" y1=\"" << fmt(py(fy)) << "\" x2=\"" << left + pw << "\" y2=\""
          << fmt(py(fy)) << "\" stroke=\"#dddddd\"/>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << fmt(py(fy) + 4) << "\" text-anchor=\"end\">" << fmt(fy)
          << "</text>\n";
        o << "<text x=\"" << fmt(px(fx)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << fmt(fx)
          << "</text>\n";
    }
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 14 << "\" text-anchor=\"middle\">"
      << xml_escape(spec.x_label) << "</text>\n";
    o << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << xml_escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* colour = palette[k % palette.size()];
        auto pts = series[k].points;
        std::sort(pts.begin(), pts.end());
        o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            o << (i ? " " : "") << fmt(px(pts[i].first)) << ',' << fmt(py(pts[i].second));
        o << "\"/>\n";
        for (const auto& [x, y] : pts)
            o << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"3\" fill=\"" << colour
              << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(k);
        o << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 32 << "\" y2=\""
          << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\">" << xml_escape(series[k].name)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace reci
