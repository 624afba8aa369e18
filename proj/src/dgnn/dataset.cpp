#include "dgnn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <vector>

#include "dgnn/preprocess.hpp"

namespace dgnn {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, const CsvFormat& fmt) {
    std::vector<std::string_view> out;
    if (fmt.whitespace) {
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
                ++i;
            const std::size_t b = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t')
                ++i;
            if (i > b)
                out.push_back(line.substr(b, i - b));
        }
        return out;
    }
    std::size_t b = 0;
    for (;;) {
        const auto e = line.find(fmt.delimiter, b);
        out.push_back(trim(line.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b)));
        if (e == std::string_view::npos)
            break;
        b = e + 1;
    }
    return out;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

RawId parse_id(std::string_view f, std::size_t line) {
    RawId v = 0;
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || p != f.data() + f.size())
        parse_fail(line, "invalid node id '" + std::string(f) + "'");
    return v;
}

float parse_weight(std::string_view f, std::size_t line) {
    float v = 0;
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || p != f.data() + f.size() || !std::isfinite(v))
        parse_fail(line, "invalid weight '" + std::string(f) + "'");
    return v;
}

std::int64_t parse_time(std::string_view f, std::size_t line) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec == std::errc() && p == f.data() + f.size()) {
        if (v < 0)
            parse_fail(line, "negative timestamp");
        return v;
    }
    // fractional seconds are truncated
    double d = 0;
    auto [p2, ec2] = std::from_chars(f.data(), f.data() + f.size(), d);
    if (ec2 != std::errc() || p2 != f.data() + f.size() || !std::isfinite(d) || d < 0 || d > 9.0e18)
        parse_fail(line, "invalid timestamp '" + std::string(f) + "'");
    return static_cast<std::int64_t>(d);
}

} // namespace

std::optional<CsvFormat> parse_csv_format(std::string_view text) {
    if (text == "bitcoin")
        return CsvFormat{};
    if (text == "uci")
        return CsvFormat{0, 1, 2, 3, ' ', true, false};
    if (text == "collegemsg")
        return CsvFormat{0, 1, -1, 2, ' ', true, false};
    if (text.substr(0, 4) != "csv:")
        return std::nullopt;
    text.remove_prefix(4);

    std::vector<std::string_view> parts;
    for (std::size_t b = 0;;) {
        auto e = text.find(':', b);
        parts.push_back(text.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
        if (e == std::string_view::npos)
            break;
        b = e + 1;
    }
    if (parts.empty() || parts.size() > 3)
        return std::nullopt;

    std::vector<int> cols;
    for (std::size_t b = 0;;) {
        auto e = parts[0].find(',', b);
        auto f = parts[0].substr(b, e == std::string_view::npos ? std::string_view::npos : e - b);
        int v = 0;
        auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc() || p != f.data() + f.size() || v < -1)
            return std::nullopt;
        cols.push_back(v);
        if (e == std::string_view::npos)
            break;
        b = e + 1;
    }
    if (cols.size() != 4 || cols[0] < 0 || cols[1] < 0 || cols[3] < 0)
        return std::nullopt;
    CsvFormat fmt{cols[0], cols[1], cols[2], cols[3], ',', false, false};
    std::vector<int> used{cols[0], cols[1], cols[3]};
    if (cols[2] >= 0)
        used.push_back(cols[2]);
    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end())
        return std::nullopt;

    if (parts.size() >= 2) {
        const auto d = parts[1];
        if (d == "comma")
            fmt.delimiter = ',';
        else if (d == "tab")
            fmt.delimiter = '\t';
        else if (d == "space")
            fmt.delimiter = ' ';
        else if (d == "semicolon")
            fmt.delimiter = ';';
        else if (d == "ws")
            fmt.whitespace = true;
        else
            return std::nullopt;
    }
    if (parts.size() == 3) {
        if (parts[2] != "header")
            return std::nullopt;
        fmt.header = true;
    }
    return fmt;
}

std::optional<SyntheticSpec> parse_synthetic(std::string_view text) {
    if (text.substr(0, 9) != "synthetic")
        return std::nullopt;
    text.remove_prefix(9);
    SyntheticSpec spec;
    if (text.empty())
        return spec;
    if (text.front() != ':')
        return std::nullopt;
    text.remove_prefix(1);
    for (std::size_t b = 0; b <= text.size();) {
        auto e = text.find(',', b);
        auto kv = text.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b);
        auto eq = kv.find('=');
        if (eq == std::string_view::npos)
            return std::nullopt;
        auto key = kv.substr(0, eq);
        auto val = kv.substr(eq + 1);
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
        if (ec != std::errc() || p != val.data() + val.size())
            return std::nullopt;
        if (key == "snapshots")
            spec.snapshots = v;
        else if (key == "nodes")
            spec.nodes = v;
        else if (key == "edges")
            spec.edges = v;
        else if (key == "universe")
            spec.universe = v;
        else if (key == "window")
            spec.window_seconds = static_cast<std::int64_t>(v);
        else if (key == "seed")
            spec.seed = v;
        else
            return std::nullopt;
        if (e == std::string_view::npos)
            break;
        b = e + 1;
    }
    return spec;
}

TemporalEdgeList parse_temporal_csv(std::istream& in, const CsvFormat& fmt) {
    const int need = std::max({fmt.src_col, fmt.dst_col, fmt.weight_col, fmt.time_col}) + 1;
    std::vector<TemporalEdge> edges;
    std::string raw;
    std::size_t line_no = 0;
    bool header_pending = fmt.header;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '%' || line.front() == '#')
            continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        auto fields = split(line, fmt);
        if (static_cast<int>(fields.size()) < need)
            fail(ErrorCode::MissingColumn, "line " + std::to_string(line_no) + ": expected at least " +
                                               std::to_string(need) + " columns, found " +
                                               std::to_string(fields.size()));
        TemporalEdge e;
        e.src = parse_id(fields[fmt.src_col], line_no);
        e.dst = parse_id(fields[fmt.dst_col], line_no);
        e.weight = fmt.weight_col >= 0 ? parse_weight(fields[fmt.weight_col], line_no) : 1.0f;
        e.time = parse_time(fields[fmt.time_col], line_no);
        edges.push_back(e);
    }
    if (edges.empty())
        fail(ErrorCode::EmptyFile, "no data rows");
    return TemporalEdgeList(std::move(edges));
}

TemporalEdgeList load_temporal_csv(const DatasetSpec& spec) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in)
        fail(ErrorCode::IoError, "cannot open '" + spec.path + "'");
    try {
        return parse_temporal_csv(in, spec.format);
    } catch (const Error& e) {
        throw Error(e.code(), spec.path + ": " + std::string(e.what()));
    }
}

TemporalEdgeList make_synthetic(const SyntheticSpec& spec) {
    if (spec.snapshots == 0 || spec.nodes < 2 || spec.window_seconds <= 0)
        fail(ErrorCode::InvalidArgument, "synthetic workload needs snapshots >= 1, nodes >= 2, window > 0");
    const std::size_t universe = spec.universe == 0 ? 2 * spec.nodes : spec.universe;
    if (universe < spec.nodes)
        fail(ErrorCode::InvalidArgument, "synthetic universe smaller than nodes per snapshot");

    std::uint64_t state = spec.seed;
    auto next = [&state] { return splitmix64(state); };
    std::vector<RawId> ids(universe);
    std::iota(ids.begin(), ids.end(), RawId{0});
    std::vector<TemporalEdge> edges;
    edges.reserve(spec.snapshots * std::max(spec.edges, spec.nodes));
    for (std::size_t k = 0; k < spec.snapshots; ++k) {
        // partial Fisher-Yates picks this window's node set
        for (std::size_t i = 0; i < spec.nodes; ++i)
            std::swap(ids[i], ids[i + next() % (universe - i)]);
        const auto t0 = static_cast<std::int64_t>(k) * spec.window_seconds;
        auto stamp = [&] { return t0 + static_cast<std::int64_t>(next() % spec.window_seconds); };
        auto weight = [&] { return static_cast<float>(next() % 21) - 10.0f; };
        // the first edge sits on the window start so windows align with the splitter
        for (std::size_t i = 0; i < spec.nodes; ++i)
            edges.push_back({ids[i], ids[(i + 1) % spec.nodes], weight(), i == 0 ? t0 : stamp()});
        for (std::size_t e = spec.nodes; e < spec.edges; ++e)
            edges.push_back({ids[next() % spec.nodes], ids[next() % spec.nodes], weight(), stamp()});
    }
    return TemporalEdgeList(std::move(edges));
}

TemporalEdgeList load_dataset(const DatasetSpec& spec) {
    if (spec.synthetic)
        return make_synthetic(*spec.synthetic);
    return load_temporal_csv(spec);
}

} // namespace dgnn
