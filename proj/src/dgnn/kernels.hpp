#pragma once

#include <span>
#include <vector>

#include "dgnn/types.hpp"

// Single-threaded GNN and RNN primitives. All reductions run in a fixed
// order (CSR order then self loop; ascending k in vector-matrix products)
// so identical inputs always give identical bytes.

namespace dgnn {

struct GcnWeights {
    Matrix W;                // F_in x F_out
    std::vector<float> b;    // F_out

    std::size_t in_dim() const { return W.rows(); }
    std::size_t out_dim() const { return W.cols(); }
    void check() const;
};

struct GruParams {
    Matrix W_z, W_r, W_h;    // F_x x H
    Matrix U_z, U_r, U_h;    // H x H
    std::vector<float> b_z, b_r, b_h;

    std::size_t input_dim() const { return W_z.rows(); }
    std::size_t hidden_dim() const { return W_z.cols(); }
    void check() const;
    static GruParams zeros(std::size_t input_dim, std::size_t hidden_dim);
};

struct LstmParams {
    Matrix W_i, W_f, W_o, W_g;   // F_x x H
    Matrix U_i, U_f, U_o, U_g;   // H x H
    std::vector<float> b_i, b_f, b_o, b_g;

    std::size_t input_dim() const { return W_i.rows(); }
    std::size_t hidden_dim() const { return W_i.cols(); }
    void check() const;
    static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim);
};

float sigmoid(float x);

/// out = x * W, accumulated over rows of W in ascending order.
void vec_mat(std::span<const float> x, const Matrix& W, std::span<float> out);

/// GCN coefficient 1/sqrt(d(u) d(v)) with d = 1 + in-degree.
float gcn_norm(const CsrGraph& g, LocalId u, LocalId v);

void message_pass_row(const CsrGraph& g, const EmbeddingMatrix& h, LocalId v, std::span<float> out);
EmbeddingMatrix message_pass(const CsrGraph& g, const EmbeddingMatrix& h);

void node_transform_row(std::span<const float> m, const GcnWeights& w, bool activate, std::span<float> out);
EmbeddingMatrix node_transform(const EmbeddingMatrix& m, const GcnWeights& w, bool activate);

// GRU split into the three pipeline sub-stages:
//   gates:     z, r, and x*W_h
//   candidate: tanh(x*W_h + (r . h)*U_h + b_h)
//   combine:   (1 - z) . h + z . candidate
struct GruPartial {
    std::vector<float> z, r, xh, cand;
};

void gru_gates(std::span<const float> x, std::span<const float> h, const GruParams& p, GruPartial& st);
void gru_candidate(std::span<const float> h, const GruParams& p, GruPartial& st);
void gru_combine(std::span<const float> h, const GruPartial& st, std::span<float> out);
std::vector<float> gru_cell(std::span<const float> x, std::span<const float> h, const GruParams& p);

// LSTM sub-stages:
//   gates:   i, f, o (sigmoid) and g (tanh)
//   update:  c' = f . c + i . g
//   output:  h' = o . tanh(c')
struct LstmPartial {
    std::vector<float> i, f, o, g, c_next;
};

struct LstmOutput {
    std::vector<float> h, c;
};

void lstm_gates(std::span<const float> x, std::span<const float> h, const LstmParams& p, LstmPartial& st);
void lstm_update(std::span<const float> c, LstmPartial& st);
void lstm_output(const LstmPartial& st, std::span<float> h_out, std::span<float> c_out);
LstmOutput lstm_cell(std::span<const float> x, std::span<const float> h, std::span<const float> c,
                     const LstmParams& p);

/// Evolves each column of the weight matrix independently with the GRU,
/// using the column as both input and hidden state.
Matrix matrix_gru_evolve(const Matrix& w_prev, const GruParams& p);

std::vector<float> column(const Matrix& m, std::size_t c);
void set_column(Matrix& m, std::size_t c, std::span<const float> v);

} // namespace dgnn
