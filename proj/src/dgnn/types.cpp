#include "dgnn/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace dgnn {

namespace {

bool finite(std::span<const float> v) {
    return std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); });
}

bool same_bytes(std::span<const float> a, std::span<const float> b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

} // namespace

TemporalEdgeList::TemporalEdgeList(std::vector<TemporalEdge> edges) : edges_(std::move(edges)) {
    if (edges_.empty())
        return;
    t_min_ = std::numeric_limits<std::int64_t>::max();
    t_max_ = std::numeric_limits<std::int64_t>::min();
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& e = edges_[i];
        if (!std::isfinite(e.weight))
            fail(ErrorCode::NonFiniteValue, "edge " + std::to_string(i) + " has a non-finite weight");
        if (e.time < 0)
            fail(ErrorCode::InvalidArgument, "edge " + std::to_string(i) + " has a negative timestamp");
        t_min_ = std::min(t_min_, e.time);
        t_max_ = std::max(t_max_, e.time);
    }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
        fail(ErrorCode::ShapeMismatch, "matrix data length " + std::to_string(data_.size()) +
                                           " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
}

bool Matrix::all_finite() const { return finite(data_); }

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && same_bytes(a.data(), b.data());
}

std::optional<LocalId> RenumberTable::find(RawId raw) const {
    auto it = raw_to_local.find(raw);
    if (it == raw_to_local.end())
        return std::nullopt;
    return it->second;
}

std::size_t Tensor::element_count(std::span<const std::uint32_t> dims) {
    std::size_t n = 1;
    for (auto d : dims)
        n *= d;
    return n;
}

void WeightSet::insert(std::string name, Tensor tensor) {
    if (tensor.data.size() != Tensor::element_count(tensor.dims))
        fail(ErrorCode::ShapeMismatch, "tensor '" + name + "' data length does not match its dims");
    auto [it, inserted] = tensors_.emplace(std::move(name), std::move(tensor));
    if (!inserted)
        fail(ErrorCode::DuplicateTensor, "tensor '" + it->first + "' already present");
}

void WeightSet::insert_matrix(std::string name, const Matrix& m) {
    Tensor t;
    t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
    t.data.assign(m.data().begin(), m.data().end());
    insert(std::move(name), std::move(t));
}

void WeightSet::insert_vector(std::string name, std::span<const float> v) {
    Tensor t;
    t.dims = {static_cast<std::uint32_t>(v.size())};
    t.data.assign(v.begin(), v.end());
    insert(std::move(name), std::move(t));
}

const Tensor& WeightSet::at(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end())
        fail(ErrorCode::MissingTensor, "weight set has no tensor '" + name + "'");
    return it->second;
}

Tensor& WeightSet::at(const std::string& name) {
    auto it = tensors_.find(name);
    if (it == tensors_.end())
        fail(ErrorCode::MissingTensor, "weight set has no tensor '" + name + "'");
    return it->second;
}

Matrix WeightSet::matrix(const std::string& name, std::size_t rows, std::size_t cols) const {
    const auto& t = at(name);
    if (t.dims.size() != 2 || t.dims[0] != rows || t.dims[1] != cols)
        fail(ErrorCode::ShapeMismatch, "tensor '" + name + "' expected shape " + std::to_string(rows) +
                                           "x" + std::to_string(cols));
    return Matrix(rows, cols, t.data);
}

std::vector<float> WeightSet::vector(const std::string& name, std::size_t n) const {
    const auto& t = at(name);
    if (t.dims.size() != 1 || t.dims[0] != n)
        fail(ErrorCode::ShapeMismatch, "tensor '" + name + "' expected length " + std::to_string(n));
    return t.data;
}

bool WeightSet::all_finite() const {
    return std::all_of(tensors_.begin(), tensors_.end(),
                       [](const auto& kv) { return finite(kv.second.data); });
}

bool bitwise_equal(const WeightSet& a, const WeightSet& b) {
    if (a.size() != b.size())
        return false;
    auto ib = b.begin();
    for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
        if (ia->first != ib->first || ia->second.dims != ib->second.dims ||
            !same_bytes(ia->second.data, ib->second.data))
            return false;
    }
    return true;
}

const NodeState* NodeStateStore::find(RawId id) const {
    auto it = states_.find(id);
    return it == states_.end() ? nullptr : &it->second;
}

void NodeStateStore::put(RawId id, NodeState state) { states_[id] = std::move(state); }

std::vector<std::pair<RawId, const NodeState*>> NodeStateStore::sorted() const {
    std::vector<std::pair<RawId, const NodeState*>> out;
    out.reserve(states_.size());
    for (const auto& [id, st] : states_)
        out.emplace_back(id, &st);
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return out;
}

bool bitwise_equal(const NodeStateStore& a, const NodeStateStore& b) {
    if (a.size() != b.size())
        return false;
    auto sa = a.sorted();
    auto sb = b.sorted();
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (sa[i].first != sb[i].first || !same_bytes(sa[i].second->h, sb[i].second->h) ||
            !same_bytes(sa[i].second->c, sb[i].second->c))
            return false;
    }
    return true;
}

ValidationResult validate_snapshot(const Snapshot& s) {
    const auto& g = s.csr;
    const std::size_t n = g.n_nodes;
    auto err = [](ErrorCode c, std::string d) { return ValidationResult{c, std::move(d)}; };

    if (g.row_ptr.size() != n + 1 || g.row_ptr[0] != 0)
        return err(ErrorCode::RowPtrNotMonotone, "row_ptr must have n_nodes+1 entries starting at 0");
    for (std::size_t v = 0; v < n; ++v) {
        if (g.row_ptr[v + 1] < g.row_ptr[v])
            return err(ErrorCode::RowPtrNotMonotone, "row_ptr decreases at row " + std::to_string(v));
    }
    if (g.row_ptr[n] != g.col_idx.size())
        return err(ErrorCode::RowPtrNotMonotone, "row_ptr[n_nodes] != n_edges");
    if (g.edge_weight.size() != g.col_idx.size())
        return err(ErrorCode::ShapeMismatch, "edge_weight length != n_edges");
    for (std::size_t v = 0; v < n; ++v) {
        for (auto k = g.row_ptr[v]; k < g.row_ptr[v + 1]; ++k) {
            if (g.col_idx[k] >= n)
                return err(ErrorCode::ColIdxOutOfRange,
                           "col_idx[" + std::to_string(k) + "]=" + std::to_string(g.col_idx[k]));
            if (k > g.row_ptr[v] && g.col_idx[k] <= g.col_idx[k - 1])
                return err(ErrorCode::ColIdxNotAscending, "row " + std::to_string(v) + " not strictly ascending");
        }
    }

    const auto& t = s.renumber;
    if (t.local_to_raw.size() != n || t.raw_to_local.size() != n)
        return err(ErrorCode::RenumberNotBijective, "renumber table size != n_nodes");
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && t.local_to_raw[i] <= t.local_to_raw[i - 1])
            return err(ErrorCode::RenumberNotBijective, "local_to_raw not strictly ascending at " + std::to_string(i));
        auto back = t.find(t.local_to_raw[i]);
        if (!back || *back != i)
            return err(ErrorCode::RenumberNotBijective, "raw_to_local does not invert local " + std::to_string(i));
    }

    if (s.node_embed.rows() != n)
        return err(ErrorCode::EmbedShapeMismatch, "node_embed has " + std::to_string(s.node_embed.rows()) +
                                                      " rows for " + std::to_string(n) + " nodes");
    if (!s.node_embed.all_finite())
        return err(ErrorCode::NonFiniteValue, "node_embed contains a non-finite value");
    if (!finite(g.edge_weight))
        return err(ErrorCode::NonFiniteValue, "edge_weight contains a non-finite value");
    return {};
}

void ensure_valid(const Snapshot& s) {
    auto r = validate_snapshot(s);
    if (!r.ok())
        fail(r.code, "snapshot " + std::to_string(s.index) + ": " + r.detail);
}

} // namespace dgnn
