#include "dgnn/preprocess.hpp"

#include <algorithm>
#include <numeric>

namespace dgnn {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

std::size_t count_distinct_endpoints(std::span<const TemporalEdge> group) {
    std::vector<RawId> ids;
    ids.reserve(group.size() * 2);
    for (const auto& e : group) {
        ids.push_back(e.src);
        ids.push_back(e.dst);
    }
    std::sort(ids.begin(), ids.end());
    return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

} // namespace

std::vector<EdgeGroup> slice_snapshots(const TemporalEdgeList& edges, const SplitterConfig& cfg) {
    if (cfg.window_seconds <= 0)
        fail(ErrorCode::InvalidArgument, "window_seconds must be positive");
    if (edges.empty())
        fail(ErrorCode::EmptyEdgeList, "cannot slice an empty edge list");

    const std::int64_t t0 = edges.t_min();
    const auto span = static_cast<std::uint64_t>((edges.t_max() - t0) / cfg.window_seconds) + 1;
    if (!cfg.drop_empty && span > kMaxKeptWindows)
        fail(ErrorCode::InvalidArgument, "keeping empty windows would create " + std::to_string(span) + " snapshots");

    // window index per edge; a stable sort keeps input order inside a window
    std::vector<std::size_t> order(edges.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto window_of = [&](std::size_t i) {
        return static_cast<std::size_t>((edges.edges()[i].time - t0) / cfg.window_seconds);
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return window_of(a) < window_of(b); });

    std::vector<EdgeGroup> out;
    auto open = [&](std::size_t k) {
        EdgeGroup g;
        g.window = k;
        g.t_begin = t0 + static_cast<std::int64_t>(k) * cfg.window_seconds;
        out.push_back(std::move(g));
    };
    for (std::size_t i : order) {
        const std::size_t k = window_of(i);
        if (!cfg.drop_empty)
            while (out.size() < k)
                open(out.size());
        if (out.empty() || out.back().window != k)
            open(k);
        out.back().edges.push_back(edges.edges()[i]);
    }
    for (auto& g : out)
        g.node_count = count_distinct_endpoints(g.edges);
    return out;
}

RenumberTable build_renumber_table(std::span<const TemporalEdge> group) {
    RenumberTable t;
    t.local_to_raw.reserve(group.size() * 2);
    for (const auto& e : group) {
        t.local_to_raw.push_back(e.src);
        t.local_to_raw.push_back(e.dst);
    }
    std::sort(t.local_to_raw.begin(), t.local_to_raw.end());
    t.local_to_raw.erase(std::unique(t.local_to_raw.begin(), t.local_to_raw.end()), t.local_to_raw.end());
    t.raw_to_local.reserve(t.local_to_raw.size());
    for (std::size_t i = 0; i < t.local_to_raw.size(); ++i)
        t.raw_to_local.emplace(t.local_to_raw[i], static_cast<LocalId>(i));
    return t;
}

CsrGraph coo_to_csr(std::span<const TemporalEdge> group, const RenumberTable& table) {
    struct Entry {
        LocalId dst, src;
        float weight;
    };
    std::vector<Entry> entries;
    entries.reserve(group.size());
    for (const auto& e : group) {
        auto s = table.find(e.src);
        auto d = table.find(e.dst);
        if (!s || !d)
            fail(ErrorCode::EndpointNotInTable, "edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                                                    " has an endpoint missing from the renumber table");
        entries.push_back({*d, *s, e.weight});
    }
    // stable: duplicates keep input order so their weights sum deterministically
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.dst != b.dst ? a.dst < b.dst : a.src < b.src;
    });

    CsrGraph g;
    g.n_nodes = table.size();
    g.row_ptr.assign(g.n_nodes + 1, 0);
    g.col_idx.reserve(entries.size());
    g.edge_weight.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& en = entries[i];
        if (i > 0 && entries[i - 1].dst == en.dst && entries[i - 1].src == en.src) {
            g.edge_weight.back() += en.weight;
            continue;
        }
        g.col_idx.push_back(en.src);
        g.edge_weight.push_back(en.weight);
        ++g.row_ptr[en.dst + 1];
    }
    std::partial_sum(g.row_ptr.begin(), g.row_ptr.end(), g.row_ptr.begin());
    return g;
}

void SeededFeatures::fill(RawId id, std::span<float> out) const {
    std::uint64_t state = seed_ ^ (id * 0xd1b54a32d192ed03ULL);
    splitmix64(state);
    for (auto& v : out) {
        auto bits = splitmix64(state) >> 40; // 24 random bits
        v = static_cast<float>(bits) * (2.0f / 16777216.0f) - 1.0f;
    }
}

void ZeroFeatures::fill(RawId, std::span<float> out) const { std::fill(out.begin(), out.end(), 0.0f); }

Snapshot build_snapshot(std::size_t index, const EdgeGroup& group, RenumberTable table, CsrGraph csr,
                        const FeatureProvider& features) {
    if (table.size() != csr.n_nodes)
        fail(ErrorCode::ShapeMismatch, "renumber table and CSR disagree on node count");
    Snapshot s;
    s.index = index;
    s.raw_edges = group.edge_count();
    s.node_embed = Matrix(csr.n_nodes, features.dim());
    for (std::size_t i = 0; i < table.local_to_raw.size(); ++i)
        features.fill(table.local_to_raw[i], s.node_embed.row(i));
    s.renumber = std::move(table);
    s.csr = std::move(csr);
    ensure_valid(s);
    return s;
}

std::vector<Snapshot> preprocess(const TemporalEdgeList& edges, const SplitterConfig& cfg,
                                 const FeatureProvider& features) {
    auto groups = slice_snapshots(edges, cfg);
    std::vector<Snapshot> out;
    out.reserve(groups.size());
    for (std::size_t t = 0; t < groups.size(); ++t) {
        auto table = build_renumber_table(groups[t].edges);
        auto csr = coo_to_csr(groups[t].edges, table);
        out.push_back(build_snapshot(t, groups[t], std::move(table), std::move(csr), features));
    }
    return out;
}

DatasetStats compute_stats(std::span<const Snapshot> snapshots) {
    DatasetStats st;
    st.snapshots = snapshots.size();
    if (snapshots.empty())
        return st;
    double nodes = 0, edges = 0, raw = 0;
    for (const auto& s : snapshots) {
        nodes += static_cast<double>(s.n_nodes());
        edges += static_cast<double>(s.n_edges());
        raw += static_cast<double>(s.raw_edges);
        st.max_nodes = std::max(st.max_nodes, s.n_nodes());
        st.max_edges = std::max(st.max_edges, s.n_edges());
        st.max_raw_edges = std::max(st.max_raw_edges, s.raw_edges);
    }
    const auto n = static_cast<double>(snapshots.size());
    st.avg_nodes = nodes / n;
    st.avg_edges = edges / n;
    st.avg_raw_edges = raw / n;
    return st;
}

} // namespace dgnn
