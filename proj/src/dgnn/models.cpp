#include "dgnn/models.hpp"

#include <random>

namespace dgnn {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::WeightsEvolved: return "evolvegcn";
    case ModelKind::Integrated: return "gcrn-m2";
    case ModelKind::Stacked: return "stacked";
    }
    return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
    if (name == "evolvegcn" || name == "weights-evolved")
        return ModelKind::WeightsEvolved;
    if (name == "gcrn-m2" || name == "integrated")
        return ModelKind::Integrated;
    if (name == "stacked")
        return ModelKind::Stacked;
    return std::nullopt;
}

std::string_view to_string(Stage s) {
    switch (s) {
    case Stage::GL: return "GL";
    case Stage::MP: return "MP";
    case Stage::NT: return "NT";
    case Stage::RNN: return "RNN";
    }
    return "?";
}

std::vector<Stage> stage_order(ModelKind kind) {
    if (kind == ModelKind::WeightsEvolved)
        return {Stage::GL, Stage::RNN, Stage::MP, Stage::NT};
    return {Stage::GL, Stage::MP, Stage::NT, Stage::RNN};
}

namespace {

using Layout = std::vector<std::pair<std::string, std::vector<std::uint32_t>>>;

void add_gcn(Layout& l, const std::string& prefix, std::uint32_t in, std::uint32_t out) {
    l.push_back({prefix + ".W", {in, out}});
    l.push_back({prefix + ".b", {out}});
}

void add_gru(Layout& l, std::uint32_t in, std::uint32_t hidden) {
    for (const char* g : {"z", "r", "h"}) {
        l.push_back({std::string("gru.W_") + g, {in, hidden}});
        l.push_back({std::string("gru.U_") + g, {hidden, hidden}});
        l.push_back({std::string("gru.b_") + g, {hidden}});
    }
}

void add_lstm(Layout& l, std::uint32_t in, std::uint32_t hidden) {
    for (const char* g : {"i", "f", "o", "g"}) {
        l.push_back({std::string("lstm.W_") + g, {in, hidden}});
        l.push_back({std::string("lstm.U_") + g, {hidden, hidden}});
        l.push_back({std::string("lstm.b_") + g, {hidden}});
    }
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

GcnWeights load_gcn(const WeightSet& w, const std::string& prefix, std::size_t in, std::size_t out) {
    GcnWeights g{w.matrix(prefix + ".W", in, out), w.vector(prefix + ".b", out)};
    g.check();
    return g;
}

GruParams load_gru(const WeightSet& w, std::size_t in, std::size_t hidden) {
    GruParams p;
    p.W_z = w.matrix("gru.W_z", in, hidden);
    p.W_r = w.matrix("gru.W_r", in, hidden);
    p.W_h = w.matrix("gru.W_h", in, hidden);
    p.U_z = w.matrix("gru.U_z", hidden, hidden);
    p.U_r = w.matrix("gru.U_r", hidden, hidden);
    p.U_h = w.matrix("gru.U_h", hidden, hidden);
    p.b_z = w.vector("gru.b_z", hidden);
    p.b_r = w.vector("gru.b_r", hidden);
    p.b_h = w.vector("gru.b_h", hidden);
    p.check();
    return p;
}

LstmParams load_lstm(const WeightSet& w, std::size_t in, std::size_t hidden) {
    LstmParams p;
    p.W_i = w.matrix("lstm.W_i", in, hidden);
    p.W_f = w.matrix("lstm.W_f", in, hidden);
    p.W_o = w.matrix("lstm.W_o", in, hidden);
    p.W_g = w.matrix("lstm.W_g", in, hidden);
    p.U_i = w.matrix("lstm.U_i", hidden, hidden);
    p.U_f = w.matrix("lstm.U_f", hidden, hidden);
    p.U_o = w.matrix("lstm.U_o", hidden, hidden);
    p.U_g = w.matrix("lstm.U_g", hidden, hidden);
    p.b_i = w.vector("lstm.b_i", hidden);
    p.b_f = w.vector("lstm.b_f", hidden);
    p.b_o = w.vector("lstm.b_o", hidden);
    p.b_g = w.vector("lstm.b_g", hidden);
    p.check();
    return p;
}

} // namespace

std::vector<std::pair<std::string, std::vector<std::uint32_t>>> weight_layout(ModelKind kind, ModelDims dims) {
    const auto f = static_cast<std::uint32_t>(dims.feature_dim);
    const auto h = static_cast<std::uint32_t>(dims.hidden_dim);
    Layout l;
    switch (kind) {
    case ModelKind::WeightsEvolved:
        add_gcn(l, "gcn", f, h);
        add_gru(l, f, f);
        break;
    case ModelKind::Integrated:
        add_gcn(l, "gnn1", f, h);
        add_gcn(l, "gnn2", f, h);
        add_lstm(l, 2 * h, h);
        break;
    case ModelKind::Stacked:
        add_gcn(l, "gnn", f, h);
        add_gru(l, h, h);
        break;
    }
    return l;
}

WeightSet init_weights(ModelKind kind, ModelDims dims, std::uint64_t seed) {
    if (dims.feature_dim == 0 || dims.hidden_dim == 0)
        fail(ErrorCode::InvalidArgument, "feature and hidden dims must be positive");
    WeightSet w;
    for (auto& [name, shape] : weight_layout(kind, dims)) {
        std::mt19937_64 rng(seed ^ fnv1a(name));
        Tensor t;
        t.dims = shape;
        t.data.resize(Tensor::element_count(shape));
        for (auto& v : t.data) {
            // 24 random bits mapped onto [-0.1, 0.1]
            const auto bits = static_cast<float>(rng() >> 40);
            v = (bits * (2.0f / 16777215.0f) - 1.0f) * 0.1f;
        }
        w.insert(name, std::move(t));
    }
    return w;
}

void check_weights(ModelKind kind, const WeightSet& w, ModelDims dims) {
    for (const auto& [name, shape] : weight_layout(kind, dims)) {
        const auto& t = w.at(name);
        if (t.dims != shape)
            fail(ErrorCode::ShapeMismatch, "tensor '" + name + "' has the wrong shape for " +
                                               std::string(to_string(kind)) + " with F=" +
                                               std::to_string(dims.feature_dim) +
                                               " H=" + std::to_string(dims.hidden_dim));
    }
    if (!w.all_finite())
        fail(ErrorCode::NonFiniteValue, "weight set contains non-finite values");
}

EvolveGcnModel EvolveGcnModel::from(const WeightSet& w, ModelDims d) {
    check_weights(ModelKind::WeightsEvolved, w, d);
    return {load_gcn(w, "gcn", d.feature_dim, d.hidden_dim), load_gru(w, d.feature_dim, d.feature_dim)};
}

GcrnM2Model GcrnM2Model::from(const WeightSet& w, ModelDims d) {
    check_weights(ModelKind::Integrated, w, d);
    GcrnM2Model m;
    m.gnn1 = load_gcn(w, "gnn1", d.feature_dim, d.hidden_dim);
    m.gnn2 = load_gcn(w, "gnn2", d.feature_dim, d.hidden_dim);
    m.lstm = load_lstm(w, 2 * d.hidden_dim, d.hidden_dim);
    return m;
}

StackedModel StackedModel::from(const WeightSet& w, ModelDims d) {
    check_weights(ModelKind::Stacked, w, d);
    return {load_gcn(w, "gnn", d.feature_dim, d.hidden_dim), load_gru(w, d.hidden_dim, d.hidden_dim)};
}

void graph_load(const Snapshot& s, StagedSnapshot& dst) {
    dst.index = s.index;
    dst.source = &s;
    dst.csr.n_nodes = s.csr.n_nodes;
    dst.csr.row_ptr.assign(s.csr.row_ptr.begin(), s.csr.row_ptr.end());
    dst.csr.col_idx.assign(s.csr.col_idx.begin(), s.csr.col_idx.end());
    dst.csr.edge_weight.assign(s.csr.edge_weight.begin(), s.csr.edge_weight.end());
    if (dst.embed.rows() != s.node_embed.rows() || dst.embed.cols() != s.node_embed.cols())
        dst.embed = s.node_embed;
    else
        std::copy(s.node_embed.data().begin(), s.node_embed.data().end(), dst.embed.data().begin());
}

void apply_hidden_feedback(StagedSnapshot& staged, const NodeStateStore& states) {
    const auto& raw = staged.source->renumber.local_to_raw;
    for (std::size_t v = 0; v < raw.size(); ++v) {
        const NodeState* st = states.find(raw[v]);
        if (!st)
            continue;
        if (st->h.size() != staged.embed.cols())
            fail(ErrorCode::ShapeMismatch, "hidden feedback requires feature_dim == hidden_dim");
        std::copy(st->h.begin(), st->h.end(), staged.embed.row(v).begin());
    }
}

Matrix gather_hidden(const Snapshot& s, const NodeStateStore& states, std::size_t hidden) {
    Matrix m(s.n_nodes(), hidden);
    const auto& raw = s.renumber.local_to_raw;
    for (std::size_t v = 0; v < raw.size(); ++v) {
        if (const NodeState* st = states.find(raw[v]); st && !st->h.empty())
            std::copy(st->h.begin(), st->h.end(), m.row(v).begin());
    }
    return m;
}

Matrix gather_cell(const Snapshot& s, const NodeStateStore& states, std::size_t hidden) {
    Matrix m(s.n_nodes(), hidden);
    const auto& raw = s.renumber.local_to_raw;
    for (std::size_t v = 0; v < raw.size(); ++v) {
        if (const NodeState* st = states.find(raw[v]); st && !st->c.empty())
            std::copy(st->c.begin(), st->c.end(), m.row(v).begin());
    }
    return m;
}

void commit_states(const Snapshot& s, const Matrix& hidden, const Matrix* cell, NodeStateStore& states) {
    const auto& raw = s.renumber.local_to_raw;
    for (std::size_t v = 0; v < raw.size(); ++v) {
        NodeState st;
        st.h.assign(hidden.row(v).begin(), hidden.row(v).end());
        if (cell)
            st.c.assign(cell->row(v).begin(), cell->row(v).end());
        states.put(raw[v], std::move(st));
    }
}

std::vector<float> concat(std::span<const float> a, std::span<const float> b) {
    std::vector<float> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

StepOutput evolvegcn_step(const Snapshot& s, const EvolveGcnModel& m, Matrix& weight) {
    weight = matrix_gru_evolve(weight, m.evolver);
    auto msg = message_pass(s.csr, s.node_embed);
    return {node_transform(msg, GcnWeights{weight, m.gcn.b}, true)};
}

StepOutput gcrn_m2_step(const Snapshot& s, const GcrnM2Model& m, NodeStateStore& states) {
    StagedSnapshot staged;
    graph_load(s, staged);
    if (m.feed_hidden)
        apply_hidden_feedback(staged, states);
    auto msg = message_pass(staged.csr, staged.embed);
    auto x1 = node_transform(msg, m.gnn1, true);
    auto x2 = node_transform(msg, m.gnn2, true);

    const std::size_t hidden = m.lstm.hidden_dim();
    auto h = gather_hidden(s, states, hidden);
    auto c = gather_cell(s, states, hidden);
    Matrix h_next(s.n_nodes(), hidden), c_next(s.n_nodes(), hidden);
    for (std::size_t v = 0; v < s.n_nodes(); ++v) {
        auto out = lstm_cell(concat(x1.row(v), x2.row(v)), h.row(v), c.row(v), m.lstm);
        std::copy(out.h.begin(), out.h.end(), h_next.row(v).begin());
        std::copy(out.c.begin(), out.c.end(), c_next.row(v).begin());
    }
    commit_states(s, h_next, &c_next, states);
    return {std::move(h_next)};
}

StepOutput stacked_step(const Snapshot& s, const StackedModel& m, NodeStateStore& states) {
    auto x = node_transform(message_pass(s.csr, s.node_embed), m.gnn, true);
    const std::size_t hidden = m.gru.hidden_dim();
    auto h = gather_hidden(s, states, hidden);
    Matrix h_next(s.n_nodes(), hidden);
    for (std::size_t v = 0; v < s.n_nodes(); ++v) {
        auto out = gru_cell(x.row(v), h.row(v), m.gru);
        std::copy(out.begin(), out.end(), h_next.row(v).begin());
    }
    commit_states(s, h_next, nullptr, states);
    return {std::move(h_next)};
}

} // namespace dgnn
