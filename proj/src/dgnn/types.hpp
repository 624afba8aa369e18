#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dgnn/error.hpp"

namespace dgnn {

/// Opaque node identifier as it appears in the dataset.
using RawId = std::uint64_t;
/// Dense per-snapshot node index.
using LocalId = std::uint32_t;

struct TemporalEdge {
    RawId src = 0;
    RawId dst = 0;
    float weight = 1.0f;
    std::int64_t time = 0;
};

/// COO edge stream with cached time extrema. Order is preserved as given.
class TemporalEdgeList {
public:
    TemporalEdgeList() = default;
    explicit TemporalEdgeList(std::vector<TemporalEdge> edges);

    std::span<const TemporalEdge> edges() const { return edges_; }
    std::size_t size() const { return edges_.size(); }
    bool empty() const { return edges_.empty(); }
    std::int64_t t_min() const { return t_min_; }
    std::int64_t t_max() const { return t_max_; }

private:
    std::vector<TemporalEdge> edges_;
    std::int64_t t_min_ = 0;
    std::int64_t t_max_ = 0;
};

/// Row-major f32 matrix. Used for node embeddings, messages and weights.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, float fill = 0.0f)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<float> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    std::span<float> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const float> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    float& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    float operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<float> data_;
};

using EmbeddingMatrix = Matrix;

/// True when both matrices have the same shape and identical bytes.
bool bitwise_equal(const Matrix& a, const Matrix& b);

struct RenumberTable {
    std::unordered_map<RawId, LocalId> raw_to_local;
    std::vector<RawId> local_to_raw;

    std::size_t size() const { return local_to_raw.size(); }
    std::optional<LocalId> find(RawId raw) const;
};

/// Destination-major CSR: row v lists the in-neighbours of v.
struct CsrGraph {
    std::size_t n_nodes = 0;
    std::vector<std::uint32_t> row_ptr{0};
    std::vector<LocalId> col_idx;
    std::vector<float> edge_weight;

    std::size_t n_edges() const { return col_idx.size(); }
    std::uint32_t in_degree(LocalId v) const { return row_ptr[v + 1] - row_ptr[v]; }
};

struct Snapshot {
    std::size_t index = 0;
    RenumberTable renumber;
    CsrGraph csr;
    EmbeddingMatrix node_embed;
    // Edge count of the window before duplicate merging.
    std::size_t raw_edges = 0;

    std::size_t n_nodes() const { return csr.n_nodes; }
    std::size_t n_edges() const { return csr.n_edges(); }
};

struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    static std::size_t element_count(std::span<const std::uint32_t> dims);
};

/// Named parameter tensors. Ordered by name so serialization is stable.
class WeightSet {
public:
    void insert(std::string name, Tensor tensor);
    void insert_matrix(std::string name, const Matrix& m);
    void insert_vector(std::string name, std::span<const float> v);

    bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
    const Tensor& at(const std::string& name) const;
    Tensor& at(const std::string& name);

    Matrix matrix(const std::string& name, std::size_t rows, std::size_t cols) const;
    std::vector<float> vector(const std::string& name, std::size_t n) const;

    std::size_t size() const { return tensors_.size(); }
    auto begin() const { return tensors_.begin(); }
    auto end() const { return tensors_.end(); }

    bool all_finite() const;

private:
    std::map<std::string, Tensor> tensors_;
};

bool bitwise_equal(const WeightSet& a, const WeightSet& b);

struct NodeState {
    std::vector<float> h;
    std::vector<float> c;
};

/// Recurrent state per raw node id, carried across snapshots. A missing id
/// means zero state.
class NodeStateStore {
public:
    const NodeState* find(RawId id) const;
    void put(RawId id, NodeState state);
    std::size_t size() const { return states_.size(); }

    /// Entries sorted by raw id.
    std::vector<std::pair<RawId, const NodeState*>> sorted() const;

private:
    std::unordered_map<RawId, NodeState> states_;
};

bool bitwise_equal(const NodeStateStore& a, const NodeStateStore& b);

struct ValidationResult {
    ErrorCode code = ErrorCode::Ok;
    std::string detail;

    bool ok() const { return code == ErrorCode::Ok; }
};

/// Checks every CSR, renumber-table and embedding invariant and reports the
/// first violation found.
ValidationResult validate_snapshot(const Snapshot& s);

/// Throws Error when validate_snapshot fails.
void ensure_valid(const Snapshot& s);

} // namespace dgnn
