#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dgnn/types.hpp"

namespace dgnn {

struct SplitterConfig {
    std::int64_t window_seconds = 0;
    bool drop_empty = true;
};

/// The COO edges of one time window, in input order.
struct EdgeGroup {
    std::size_t window = 0;         // k, counted from t_min
    std::int64_t t_begin = 0;       // t_min + k * window_seconds
    std::vector<TemporalEdge> edges;
    std::size_t node_count = 0;     // distinct endpoints

    std::size_t edge_count() const { return edges.size(); }
};

/// Upper bound on the snapshot count when empty windows are kept.
inline constexpr std::uint64_t kMaxKeptWindows = std::uint64_t{1} << 24;

/// Cuts the edge list into fixed, non-overlapping windows anchored at t_min.
/// Only windows holding edges are materialised unless drop_empty is off.
std::vector<EdgeGroup> slice_snapshots(const TemporalEdgeList& edges, const SplitterConfig& cfg);

/// Sorted distinct endpoints of the group, local id = rank.
RenumberTable build_renumber_table(std::span<const TemporalEdge> group);

/// Destination-major CSR. Duplicate (src, dst) pairs are merged by summing
/// their weights in input order.
CsrGraph coo_to_csr(std::span<const TemporalEdge> group, const RenumberTable& table);

class FeatureProvider {
public:
    virtual ~FeatureProvider() = default;
    virtual std::size_t dim() const = 0;
    virtual void fill(RawId id, std::span<float> out) const = 0;
};

/// Pseudo-random features in [-1, 1) derived only from (raw id, seed), so a
/// node sees the same vector in every snapshot.
class SeededFeatures final : public FeatureProvider {
public:
    SeededFeatures(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}
    std::size_t dim() const override { return dim_; }
    void fill(RawId id, std::span<float> out) const override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

class ZeroFeatures final : public FeatureProvider {
public:
    explicit ZeroFeatures(std::size_t dim) : dim_(dim) {}
    std::size_t dim() const override { return dim_; }
    void fill(RawId, std::span<float> out) const override;

private:
    std::size_t dim_;
};

Snapshot build_snapshot(std::size_t index, const EdgeGroup& group, RenumberTable table, CsrGraph csr,
                        const FeatureProvider& features);

/// slice -> renumber -> CSR -> snapshot for every window.
std::vector<Snapshot> preprocess(const TemporalEdgeList& edges, const SplitterConfig& cfg,
                                 const FeatureProvider& features);

struct DatasetStats {
    std::size_t snapshots = 0;
    double avg_nodes = 0.0;
    double avg_edges = 0.0;
    std::size_t max_nodes = 0;
    std::size_t max_edges = 0;
    double avg_raw_edges = 0.0;
    std::size_t max_raw_edges = 0;
};

/// Averages are taken over the snapshots given (the retained windows).
DatasetStats compute_stats(std::span<const Snapshot> snapshots);

std::uint64_t splitmix64(std::uint64_t& state);

} // namespace dgnn
