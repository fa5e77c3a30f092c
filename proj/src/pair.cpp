#include "reci/pair.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "reci/error.hpp"
#include "reci/random.hpp"

namespace reci {

Direction opposite(Direction d) noexcept {
    return d == Direction::XtoY ? Direction::YtoX : Direction::XtoY;
}

std::string_view to_string(Direction d) noexcept {
    return d == Direction::XtoY ? "XtoY" : "YtoX";
}

std::string_view to_string(const std::optional<Direction>& d) noexcept {
    return d ? to_string(*d) : std::string_view("NoDecision");
}

std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "XtoY") return Direction::XtoY;
    if (s == "YtoX") return Direction::YtoX;
    if (s == "NoDecision") return std::nullopt;
    throw Error(ErrorKind::InvalidArgument, "unknown direction '" + std::string(s) + "'");
}

CauseEffectPair::CauseEffectPair(std::string id, std::vector<double> x, std::vector<double> y,
                                 double weight, std::optional<Direction> truth)
    : id_(std::move(id)), x_(std::move(x)), y_(std::move(y)), weight_(weight), truth_(truth) {
    if (x_.size() != y_.size())
        throw Error(ErrorKind::InvalidArgument, "pair '" + id_ + "': x and y differ in length");
    if (x_.size() < 2) throw Error(ErrorKind::EmptyFile, "pair '" + id_ + "' has fewer than 2 rows");
    if (!(weight_ >= 0.0) || !std::isfinite(weight_))
        throw Error(ErrorKind::InvalidArgument, "pair '" + id_ + "': weight must be finite and >= 0");
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
            throw Error(ErrorKind::NonFiniteValue,
                        "pair '" + id_ + "' has a non-finite value in row " + std::to_string(i + 1),
                        static_cast<long>(i + 1));
    }
}

CauseEffectPair CauseEffectPair::swapped() const {
    std::optional<Direction> t;
    if (truth_) t = opposite(*truth_);
    return CauseEffectPair(id_, y_, x_, weight_, t);
}

CauseEffectPair CauseEffectPair::select(std::span<const std::size_t> rows) const {
    std::vector<double> xs, ys;
    xs.reserve(rows.size());
    ys.reserve(rows.size());
    for (std::size_t r : rows) {
        xs.push_back(x_.at(r));
        ys.push_back(y_.at(r));
    }
    return CauseEffectPair(id_, std::move(xs), std::move(ys), weight_, truth_);
}

CauseEffectPair CauseEffectPair::with_weight(double weight) const {
    return CauseEffectPair(id_, x_, y_, weight, truth_);
}

CauseEffectPair CauseEffectPair::with_truth(std::optional<Direction> truth) const {
    return CauseEffectPair(id_, x_, y_, weight_, truth);
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::optional<double> parse_number(std::string_view field) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
    return v;
}

bool skippable(const std::vector<std::string_view>& fields) {
    return fields.empty() || fields.front().front() == '#';
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Parses all data rows; returns the requested columns (0-based).
std::vector<std::vector<double>> parse_columns(std::string_view text, const std::string& id,
                                               int needed_columns) {
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(needed_columns));
    long line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        auto fields = split_fields(line);
        if (!skippable(fields)) {
            if (fields.size() < static_cast<std::size_t>(std::max(needed_columns, 2)))
                throw Error(ErrorKind::MalformedLine,
                            id + ": line " + std::to_string(line_no) + " has too few columns",
                            line_no);
            for (int c = 0; c < needed_columns; ++c) {
                auto v = parse_number(fields[static_cast<std::size_t>(c)]);
                if (!v)
                    throw Error(ErrorKind::MalformedLine,
                                id + ": non-numeric field on line " + std::to_string(line_no),
                                line_no);
                if (!std::isfinite(*v))
                    throw Error(ErrorKind::NonFiniteValue,
                                id + ": non-finite value on line " + std::to_string(line_no),
                                line_no);
                cols[static_cast<std::size_t>(c)].push_back(*v);
            }
        }
        if (end == text.size()) break;
    }
    if (cols.empty() || cols[0].size() < 2)
        throw Error(ErrorKind::EmptyFile, id + ": fewer than 2 data rows");
    return cols;
}

}  // namespace

CauseEffectPair parse_pair(std::string_view text, std::string id) {
    auto cols = parse_columns(text, id, 2);
    return CauseEffectPair(std::move(id), std::move(cols[0]), std::move(cols[1]));
}

CauseEffectPair load_pair(const std::filesystem::path& path) {
    return parse_pair(read_file(path), path.stem().string());
}

void write_pair(const CauseEffectPair& pair, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    char buf[64];
    for (std::size_t i = 0; i < pair.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", pair.x()[i], pair.y()[i]);
        out << buf;
    }
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::vector<MetaEntry> load_meta(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::vector<MetaEntry> entries;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line);
        if (skippable(fields)) continue;
        if (fields.size() < 6)
            throw Error(ErrorKind::MalformedLine,
                        "meta line " + std::to_string(line_no) + " needs 6 fields", line_no);
        MetaEntry e;
        e.id = std::string(fields[0]);
        int* cols[] = {&e.cause_first, &e.cause_last, &e.effect_first, &e.effect_last};
        for (int k = 0; k < 4; ++k) {
            auto v = parse_number(fields[static_cast<std::size_t>(k + 1)]);
            if (!v || *v < 1 || *v != std::floor(*v))
                throw Error(ErrorKind::MalformedLine,
                            "meta line " + std::to_string(line_no) + " has a bad column index",
                            line_no);
            *cols[k] = static_cast<int>(*v);
        }
        auto w = parse_number(fields[5]);
        if (!w || !std::isfinite(*w) || *w < 0)
            throw Error(ErrorKind::MalformedLine,
                        "meta line " + std::to_string(line_no) + " has a bad weight", line_no);
        e.weight = *w;
        entries.push_back(std::move(e));
    }
    return entries;
}

namespace {

std::filesystem::path pair_file_for(const std::filesystem::path& dir, const std::string& id) {
    const bool numeric = !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
    });
    return dir / ((numeric ? "pair" + id : id) + ".txt");
}

}  // namespace

LoadedDataset load_dataset(const std::filesystem::path& dir, const std::filesystem::path& meta) {
    LoadedDataset out;
    for (const MetaEntry& e : load_meta(meta)) {
        const bool scalar = e.cause_first == e.cause_last && e.effect_first == e.effect_last;
        if (!scalar) {
            out.skipped.push_back(e.id);
            continue;
        }
        const std::filesystem::path file = pair_file_for(dir, e.id);
        if (!std::filesystem::exists(file))
            throw Error(ErrorKind::MetaMismatch,
                        "meta references '" + e.id + "' but " + file.string() + " is missing");
        const int need = std::max(e.cause_first, e.effect_first);
        auto cols = parse_columns(read_file(file), e.id, need);
        // Keep the file's column order; truth says which way the arrow points.
        const int a = std::min(e.cause_first, e.effect_first) - 1;
        const int b = std::max(e.cause_first, e.effect_first) - 1;
        if (a == b)
            throw Error(ErrorKind::MalformedLine, e.id + ": cause and effect share a column");
        const Direction truth = e.cause_first < e.effect_first ? Direction::XtoY : Direction::YtoX;
        out.pairs.emplace_back(e.id, std::move(cols[static_cast<std::size_t>(a)]),
                               std::move(cols[static_cast<std::size_t>(b)]), e.weight, truth);
    }
    return out;
}

LoadedDataset load_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw Error(ErrorKind::Io, "'" + dir.string() + "' is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    LoadedDataset out;
    for (const auto& f : files) out.pairs.push_back(load_pair(f));
    return out;
}

CauseEffectPair subsample(const CauseEffectPair& pair, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "subsample size must be >= 2");
    if (pair.size() <= n) return pair;
    std::vector<std::size_t> idx(pair.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    // Partial Fisher-Yates: the first n slots become the sample.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + rng.index(idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return pair.select(idx);
}

}  // namespace reci
