#include "dgnn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dgnn {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond)
        fail(ErrorCode::ShapeMismatch, what);
}

void check_shape(const Matrix& m, std::size_t r, std::size_t c, const char* name) {
    require(m.rows() == r && m.cols() == c, std::string(name) + " expected " + std::to_string(r) + "x" +
                                                std::to_string(c) + ", got " + std::to_string(m.rows()) +
                                                "x" + std::to_string(m.cols()));
}

void check_len(const std::vector<float>& v, std::size_t n, const char* name) {
    require(v.size() == n, std::string(name) + " expected length " + std::to_string(n));
}

// pre[j] = (x W)[j] + (h U)[j] + b[j]
void preactivation(std::span<const float> x, const Matrix& W, std::span<const float> h, const Matrix& U,
                   const std::vector<float>& b, std::vector<float>& out, std::vector<float>& scratch) {
    out.resize(W.cols());
    scratch.resize(U.cols());
    vec_mat(x, W, out);
    vec_mat(h, U, scratch);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = out[j] + scratch[j] + b[j];
}

} // namespace

void GcnWeights::check() const {
    check_len(b, W.cols(), "gcn.b");
    require(W.all_finite(), "gcn weights contain non-finite values");
}

void GruParams::check() const {
    const auto fx = input_dim(), h = hidden_dim();
    check_shape(W_r, fx, h, "gru.W_r");
    check_shape(W_h, fx, h, "gru.W_h");
    check_shape(U_z, h, h, "gru.U_z");
    check_shape(U_r, h, h, "gru.U_r");
    check_shape(U_h, h, h, "gru.U_h");
    check_len(b_z, h, "gru.b_z");
    check_len(b_r, h, "gru.b_r");
    check_len(b_h, h, "gru.b_h");
}

GruParams GruParams::zeros(std::size_t fx, std::size_t h) {
    GruParams p;
    p.W_z = p.W_r = p.W_h = Matrix(fx, h);
    p.U_z = p.U_r = p.U_h = Matrix(h, h);
    p.b_z = p.b_r = p.b_h = std::vector<float>(h, 0.0f);
    return p;
}

void LstmParams::check() const {
    const auto fx = input_dim(), h = hidden_dim();
    check_shape(W_f, fx, h, "lstm.W_f");
    check_shape(W_o, fx, h, "lstm.W_o");
    check_shape(W_g, fx, h, "lstm.W_g");
    check_shape(U_i, h, h, "lstm.U_i");
    check_shape(U_f, h, h, "lstm.U_f");
    check_shape(U_o, h, h, "lstm.U_o");
    check_shape(U_g, h, h, "lstm.U_g");
    check_len(b_i, h, "lstm.b_i");
    check_len(b_f, h, "lstm.b_f");
    check_len(b_o, h, "lstm.b_o");
    check_len(b_g, h, "lstm.b_g");
}

LstmParams LstmParams::zeros(std::size_t fx, std::size_t h) {
    LstmParams p;
    p.W_i = p.W_f = p.W_o = p.W_g = Matrix(fx, h);
    p.U_i = p.U_f = p.U_o = p.U_g = Matrix(h, h);
    p.b_i = p.b_f = p.b_o = p.b_g = std::vector<float>(h, 0.0f);
    return p;
}

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

void vec_mat(std::span<const float> x, const Matrix& W, std::span<float> out) {
    std::fill(out.begin(), out.end(), 0.0f);
    const std::size_t cols = W.cols();
    for (std::size_t k = 0; k < x.size(); ++k) {
        const float xk = x[k];
        const float* wk = W.row(k).data();
        for (std::size_t j = 0; j < cols; ++j)
            out[j] += xk * wk[j];
    }
}

float gcn_norm(const CsrGraph& g, LocalId u, LocalId v) {
    const auto du = static_cast<float>(g.in_degree(u) + 1);
    const auto dv = static_cast<float>(g.in_degree(v) + 1);
    return 1.0f / std::sqrt(du * dv);
}

void message_pass_row(const CsrGraph& g, const EmbeddingMatrix& h, LocalId v, std::span<float> out) {
    std::fill(out.begin(), out.end(), 0.0f);
    const std::size_t f = h.cols();
    for (auto k = g.row_ptr[v]; k < g.row_ptr[v + 1]; ++k) {
        const LocalId u = g.col_idx[k];
        const float coef = gcn_norm(g, u, v) * g.edge_weight[k];
        const float* hu = h.row(u).data();
        for (std::size_t j = 0; j < f; ++j)
            out[j] += coef * hu[j];
    }
    // implicit self loop with weight 1, always last
    const float self = gcn_norm(g, v, v) * 1.0f;
    const float* hv = h.row(v).data();
    for (std::size_t j = 0; j < f; ++j)
        out[j] += self * hv[j];
}

EmbeddingMatrix message_pass(const CsrGraph& g, const EmbeddingMatrix& h) {
    require(h.rows() == g.n_nodes, "message_pass: embedding rows " + std::to_string(h.rows()) +
                                       " != n_nodes " + std::to_string(g.n_nodes));
    EmbeddingMatrix m(g.n_nodes, h.cols());
    for (std::size_t v = 0; v < g.n_nodes; ++v)
        message_pass_row(g, h, static_cast<LocalId>(v), m.row(v));
    return m;
}

void node_transform_row(std::span<const float> m, const GcnWeights& w, bool activate, std::span<float> out) {
    vec_mat(m, w.W, out);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const float y = out[j] + w.b[j];
        out[j] = activate ? std::max(y, 0.0f) : y;
    }
}

EmbeddingMatrix node_transform(const EmbeddingMatrix& m, const GcnWeights& w, bool activate) {
    require(m.cols() == w.in_dim(), "node_transform: input width " + std::to_string(m.cols()) +
                                        " != weight rows " + std::to_string(w.in_dim()));
    check_len(w.b, w.out_dim(), "gcn.b");
    EmbeddingMatrix out(m.rows(), w.out_dim());
    for (std::size_t v = 0; v < m.rows(); ++v)
        node_transform_row(m.row(v), w, activate, out.row(v));
    return out;
}

void gru_gates(std::span<const float> x, std::span<const float> h, const GruParams& p, GruPartial& st) {
    std::vector<float> scratch;
    preactivation(x, p.W_z, h, p.U_z, p.b_z, st.z, scratch);
    preactivation(x, p.W_r, h, p.U_r, p.b_r, st.r, scratch);
    for (auto& v : st.z)
        v = sigmoid(v);
    for (auto& v : st.r)
        v = sigmoid(v);
    st.xh.resize(p.hidden_dim());
    vec_mat(x, p.W_h, st.xh);
}

void gru_candidate(std::span<const float> h, const GruParams& p, GruPartial& st) {
    const std::size_t n = p.hidden_dim();
    std::vector<float> rh(n);
    for (std::size_t j = 0; j < n; ++j)
        rh[j] = st.r[j] * h[j];
    st.cand.resize(n);
    vec_mat(rh, p.U_h, st.cand);
    for (std::size_t j = 0; j < n; ++j)
        st.cand[j] = std::tanh(st.xh[j] + st.cand[j] + p.b_h[j]);
}

void gru_combine(std::span<const float> h, const GruPartial& st, std::span<float> out) {
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = (1.0f - st.z[j]) * h[j] + st.z[j] * st.cand[j];
}

std::vector<float> gru_cell(std::span<const float> x, std::span<const float> h, const GruParams& p) {
    require(x.size() == p.input_dim() && h.size() == p.hidden_dim(), "gru_cell: input/state size mismatch");
    GruPartial st;
    gru_gates(x, h, p, st);
    gru_candidate(h, p, st);
    std::vector<float> out(p.hidden_dim());
    gru_combine(h, st, out);
    return out;
}

void lstm_gates(std::span<const float> x, std::span<const float> h, const LstmParams& p, LstmPartial& st) {
    std::vector<float> scratch;
    preactivation(x, p.W_i, h, p.U_i, p.b_i, st.i, scratch);
    preactivation(x, p.W_f, h, p.U_f, p.b_f, st.f, scratch);
    preactivation(x, p.W_o, h, p.U_o, p.b_o, st.o, scratch);
    preactivation(x, p.W_g, h, p.U_g, p.b_g, st.g, scratch);
    for (std::size_t j = 0; j < st.i.size(); ++j) {
        st.i[j] = sigmoid(st.i[j]);
        st.f[j] = sigmoid(st.f[j]);
        st.o[j] = sigmoid(st.o[j]);
        st.g[j] = std::tanh(st.g[j]);
    }
}

void lstm_update(std::span<const float> c, LstmPartial& st) {
    st.c_next.resize(st.i.size());
    for (std::size_t j = 0; j < st.c_next.size(); ++j)
        st.c_next[j] = st.f[j] * c[j] + st.i[j] * st.g[j];
}

void lstm_output(const LstmPartial& st, std::span<float> h_out, std::span<float> c_out) {
    for (std::size_t j = 0; j < st.c_next.size(); ++j) {
        c_out[j] = st.c_next[j];
        h_out[j] = st.o[j] * std::tanh(st.c_next[j]);
    }
}

LstmOutput lstm_cell(std::span<const float> x, std::span<const float> h, std::span<const float> c,
                     const LstmParams& p) {
    require(x.size() == p.input_dim() && h.size() == p.hidden_dim() && c.size() == p.hidden_dim(),
            "lstm_cell: input/state size mismatch");
    LstmPartial st;
    lstm_gates(x, h, p, st);
    lstm_update(c, st);
    LstmOutput out{std::vector<float>(p.hidden_dim()), std::vector<float>(p.hidden_dim())};
    lstm_output(st, out.h, out.c);
    return out;
}

std::vector<float> column(const Matrix& m, std::size_t c) {
    std::vector<float> v(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        v[r] = m(r, c);
    return v;
}

void set_column(Matrix& m, std::size_t c, std::span<const float> v) {
    for (std::size_t r = 0; r < m.rows(); ++r)
        m(r, c) = v[r];
}

Matrix matrix_gru_evolve(const Matrix& w_prev, const GruParams& p) {
    require(p.input_dim() == w_prev.rows() && p.hidden_dim() == w_prev.rows(),
            "matrix_gru_evolve: GRU must be " + std::to_string(w_prev.rows()) + "x" +
                std::to_string(w_prev.rows()));
    Matrix out(w_prev.rows(), w_prev.cols());
    for (std::size_t c = 0; c < w_prev.cols(); ++c) {
        auto col = column(w_prev, c);
        set_column(out, c, gru_cell(col, col, p));
    }
    return out;
}

} // namespace dgnn
