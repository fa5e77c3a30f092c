#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "reci/benchmark.hpp"
#include "reci/error.hpp"
#include "reci/synthgen.hpp"

using namespace reci;

namespace {

bool throws_kind(ErrorKind k, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind() == k;
    }
    return false;
}

ScoredRecord rec(std::string id, bool correct, double weight = 1.0, double conf = 0.5) {
    return {std::move(id), correct ? Direction::XtoY : Direction::YtoX, Direction::XtoY, weight, conf};
}

std::vector<CauseEffectPair> small_corpus(int n, std::uint64_t seed) {
    const std::vector<double> alphas{0.1};
    std::vector<CauseEffectPair> out;
    for (auto& g : generate_corpus(GenKind::invertible(), alphas, n, 200, seed)) out.push_back(g.pair);
    return out;
}

}  // namespace

TEST_CASE("accuracy examples") {
    const std::vector<ScoredRecord> all{rec("a", true, 3), rec("b", true, 0.1)};
    CHECK(accuracy(all) == 1.0);
    const std::vector<ScoredRecord> mixed{rec("a", true, 1), rec("b", false, 1), rec("c", true, 2)};
    CHECK(accuracy(mixed) == 0.75);
    const std::vector<ScoredRecord> unit{rec("a", true), rec("b", false), rec("c", false), rec("d", true),
                                         rec("e", true)};
    CHECK(accuracy(unit) == doctest::Approx(3.0 / 5.0));
    std::vector<ScoredRecord> undecided{rec("a", true)};
    undecided[0].decision.reset();
    CHECK(accuracy(undecided) == 0.0);
    const std::vector<ScoredRecord> zero{rec("a", true, 0.0)};
    CHECK(throws_kind(ErrorKind::ZeroWeight, [&] { accuracy(zero); }));
    CHECK(throws_kind(ErrorKind::ZeroWeight, [&] { accuracy(std::vector<ScoredRecord>{}); }));
}

TEST_CASE("decision-rate curve") {
    std::vector<ScoredRecord> r;
    for (int i = 0; i < 10; ++i) r.push_back(rec("p" + std::to_string(i), i < 6, 1.0, 1.0 - i / 10.0));
    const auto rates = default_curve_rates();

    SUBCASE("rate 1 equals full accuracy and ordered confidence gives a non-increasing curve") {
        const auto c = decision_rate_curve(r, rates);
        REQUIRE(c.size() == 10);
        CHECK(std::abs(c.back().accuracy - accuracy(r)) < 1e-12);
        for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].accuracy <= c[i - 1].accuracy);
        CHECK(c[0].selected == 1);
        CHECK(c[2].selected == 3);
        CHECK(c[5].accuracy == 1.0);
    }
    SUBCASE("equal confidences give a flat curve when ids do not correlate with correctness") {
        std::vector<ScoredRecord> flat;
        for (int i = 0; i < 20; ++i) flat.push_back(rec("p" + std::to_string(100 + i), i % 2 == 0, 1.0, 0.3));
        const std::vector<double> even{0.1, 0.2, 0.4, 0.5, 1.0};
        for (const auto& pt : decision_rate_curve(flat, even)) CHECK(pt.accuracy == doctest::Approx(0.5));
    }
    SUBCASE("ties are broken by pair id") {
        std::vector<ScoredRecord> t{rec("b", false, 1, 0.5), rec("a", true, 1, 0.5)};
        const std::vector<double> half{0.5};
        CHECK(decision_rate_curve(t, half)[0].accuracy == 1.0);
    }
    SUBCASE("invalid rates") {
        const std::vector<double> bad1{0.0, 0.5}, bad2{0.5, 0.5}, bad3{0.5, 1.1};
        CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { decision_rate_curve(r, bad1); }));
        CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { decision_rate_curve(r, bad2); }));
        CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { decision_rate_curve(r, bad3); }));
    }
}

TEST_CASE("rate parsing") {
    const auto a = parse_rates("0.1:0.1:1.0");
    REQUIRE(a.size() == 10);
    CHECK(a.back() == 1.0);
    CHECK(parse_rates("0.2,0.5,1") == std::vector<double>{0.2, 0.5, 1.0});
    CHECK(throws_kind(ErrorKind::InvalidArgument, [] { parse_rates("x"); }));
    CHECK(throws_kind(ErrorKind::InvalidArgument, [] { parse_rates("0.1:0:1"); }));
}

TEST_CASE("method parsing") {
    CHECK(Method::parse("reci:poly3").spec == ModelSpec::poly(3));
    CHECK(Method::parse("igci:g-entropy").family == Method::Family::Igci);
    CHECK(Method::parse_list("reci:log,reci:mon2,igci:u-slope").size() == 3);
    CHECK(Method::parse("reci:nn4-8").name() == "reci:nn4-8");
    for (const char* s : {"log", "reci:", "anm:log", "igci:slope"})
        CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { Method::parse(s); }));
    CHECK(throws_kind(ErrorKind::InvalidArgument, [] { Method::parse_list("reci:log,reci:log"); }));
}

TEST_CASE("run_benchmark") {
    auto corpus = small_corpus(12, 3);
    corpus.push_back(CauseEffectPair("flat", {1, 2, 3, 4, 5, 6}, {2, 2, 2, 2, 2, 2}, 1.0, Direction::XtoY));
    const auto methods = Method::parse_list("reci:poly3,reci:log,igci:u-slope");
    BenchmarkConfig cfg;
    cfg.seed = 9;
    cfg.runs = 2;
    cfg.max_samples = 150;
    cfg.workers = 3;

    const auto rep = run_benchmark(corpus, methods, cfg);
    REQUIRE(rep.records.size() == corpus.size() * 3);
    for (std::size_t i = 1; i < rep.records.size(); ++i) {
        const auto& a = rep.records[i - 1];
        const auto& b = rep.records[i];
        CHECK((a.pair_id < b.pair_id || (a.pair_id == b.pair_id && a.method < b.method)));
    }
    std::size_t failures = 0;
    for (const auto& r : rep.records) {
        if (r.pair_id == "flat") {
            CHECK(r.error.has_value());
            CHECK_FALSE(r.decision.decided());
            ++failures;
        } else {
            CHECK(r.samples_used == 150);
            CHECK_FALSE(r.error.has_value());
        }
        CHECK(r.wall_time_s >= 0.0);
    }
    CHECK(failures == 3);
    for (const auto& s : rep.summaries) {
        const auto scored = rep.scored(s.method);
        CHECK(std::abs(accuracy(scored) - s.accuracy) < 1e-12);
        CHECK(std::abs(s.curve.back().accuracy - s.accuracy) < 1e-12);
        CHECK(s.failed == 1);
        CHECK(s.pairs == corpus.size());
    }

    SUBCASE("deterministic across worker counts") {
        auto one = cfg;
        one.workers = 1;
        const auto again = run_benchmark(corpus, methods, one);
        CHECK(report_to_json(again, {false}) == report_to_json(rep, {false}));
    }
    SUBCASE("JSON round trip and CSV") {
        const auto text = report_to_json(rep);
        const auto back = report_from_json(text);
        CHECK(report_to_json(back) == text);
        const auto no_time = report_to_json(rep, {false});
        CHECK(no_time.find("wall_time_s") == std::string::npos);
        CHECK(no_time.find("time_mean_s") == std::string::npos);
        const auto csv = records_to_csv(rep);
        CHECK(csv.rfind("pair_id,method,decision", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(rep.records.size() + 1));
        CHECK(throws_kind(ErrorKind::MalformedLine, [] { report_from_json("{"); }));
        CHECK(throws_kind(ErrorKind::MalformedLine, [] { report_from_json("{}"); }));
    }
    SUBCASE("preprocessing option") {
        auto kde = cfg;
        kde.density_threshold = 0.1;
        kde.max_samples = 0;
        const auto r2 = run_benchmark(corpus, methods, kde);
        bool smaller = false;
        for (const auto& r : r2.records)
            if (!r.error && r.samples_used < 200) smaller = true;
        CHECK(smaller);
    }
}

TEST_CASE("run_benchmark preconditions") {
    const auto methods = Method::parse_list("reci:log");
    CHECK(throws_kind(ErrorKind::EmptyCorpus, [&] { run_benchmark({}, methods, BenchmarkConfig{}); }));
    const auto corpus = small_corpus(2, 1);
    CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { run_benchmark(corpus, {}, BenchmarkConfig{}); }));
    std::vector<CauseEffectPair> dup{corpus[0], corpus[0]};
    CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { run_benchmark(dup, methods, BenchmarkConfig{}); }));
}

TEST_CASE("svg plot") {
    const std::vector<PlotSeries> s{{"a<b", {{0.1, 0.9}, {0.5, 0.7}, {1.0, 0.6}}}, {"c", {{0.1, 0.5}}}};
    const auto svg = line_plot_svg(s, {"t", "x", "y"});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("a&lt;b") != std::string::npos);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
}
