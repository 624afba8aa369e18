#pragma once

// Test-side oracles. Written straight from the model equations in double
// precision, independent of both the engine kernels and the library's dense
// reference, so agreement means something.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "dgnn/kernels.hpp"
#include "dgnn/preprocess.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Mat to_mat(const dgnn::Matrix& m) {
    Mat out(m.rows(), Vec(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            out[r][c] = m(r, c);
    return out;
}

inline Vec to_vec(std::span<const float> v) { return {v.begin(), v.end()}; }

// y[j] = sum_k x[k] * M[k][j]
inline Vec vecmat(const Vec& x, const dgnn::Matrix& m) {
    Vec y(m.cols(), 0.0);
    for (std::size_t k = 0; k < m.rows(); ++k)
        for (std::size_t j = 0; j < m.cols(); ++j)
            y[j] += x[k] * static_cast<double>(m(k, j));
    return y;
}

inline Vec gru(const Vec& x, const Vec& h, const dgnn::GruParams& p) {
    const Vec xz = vecmat(x, p.W_z), xr = vecmat(x, p.W_r), xh = vecmat(x, p.W_h);
    const Vec hz = vecmat(h, p.U_z), hr = vecmat(h, p.U_r);
    const std::size_t n = h.size();
    Vec z(n), r(n), rh(n);
    for (std::size_t j = 0; j < n; ++j) {
        z[j] = sigmoid(xz[j] + hz[j] + p.b_z[j]);
        r[j] = sigmoid(xr[j] + hr[j] + p.b_r[j]);
        rh[j] = r[j] * h[j];
    }
    const Vec u = vecmat(rh, p.U_h);
    Vec out(n);
    for (std::size_t j = 0; j < n; ++j)
        out[j] = (1.0 - z[j]) * h[j] + z[j] * std::tanh(xh[j] + u[j] + p.b_h[j]);
    return out;
}

inline std::pair<Vec, Vec> lstm(const Vec& x, const Vec& h, const Vec& c, const dgnn::LstmParams& p) {
    auto gate = [&](const dgnn::Matrix& W, const dgnn::Matrix& U, const std::vector<float>& b) {
        Vec a = vecmat(x, W);
        const Vec u = vecmat(h, U);
        for (std::size_t j = 0; j < a.size(); ++j)
            a[j] += u[j] + b[j];
        return a;
    };
    const Vec i = gate(p.W_i, p.U_i, p.b_i), f = gate(p.W_f, p.U_f, p.b_f);
    const Vec o = gate(p.W_o, p.U_o, p.b_o), g = gate(p.W_g, p.U_g, p.b_g);
    Vec h2(h.size()), c2(h.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
        c2[j] = sigmoid(f[j]) * c[j] + sigmoid(i[j]) * std::tanh(g[j]);
        h2[j] = sigmoid(o[j]) * std::tanh(c2[j]);
    }
    return {h2, c2};
}

/// Merged edge map keyed by (src, dst) local ids.
using EdgeMap = std::map<std::pair<std::uint32_t, std::uint32_t>, double>;

/// act(D^-1/2 (A_w + I) D^-1/2 H W + b) from an edge map; A[v][u] holds the
/// weight of u -> v and D counts distinct in-neighbours plus one.
inline Mat dense_gcn(std::size_t n, const EdgeMap& edges, const Mat& H, const dgnn::Matrix* W,
                     const std::vector<float>* b, bool relu) {
    Mat A(n, Vec(n, 0.0));
    Vec deg(n, 1.0);
    for (const auto& [key, w] : edges) {
        A[key.second][key.first] += w;
        deg[key.second] += 1.0;
    }
    for (std::size_t v = 0; v < n; ++v)
        A[v][v] += 1.0;
    const std::size_t f = H.empty() ? 0 : H[0].size();
    Mat M(n, Vec(f, 0.0));
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t u = 0; u < n; ++u) {
            const double a = A[v][u] / std::sqrt(deg[v] * deg[u]);
            for (std::size_t j = 0; j < f; ++j)
                M[v][j] += a * H[u][j];
        }
    if (!W)
        return M;
    Mat out(n);
    for (std::size_t v = 0; v < n; ++v) {
        out[v] = vecmat(M[v], *W);
        for (std::size_t j = 0; j < out[v].size(); ++j) {
            out[v][j] += (*b)[j];
            if (relu && out[v][j] < 0.0)
                out[v][j] = 0.0;
        }
    }
    return out;
}

/// Normwise relative error max|a - b| / max|b| (0 when both are zero).
inline double rel_error(const Mat& got, const Mat& want) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i)
        for (std::size_t j = 0; j < want[i].size(); ++j) {
            diff = std::max(diff, std::abs(got[i][j] - want[i][j]));
            scale = std::max(scale, std::abs(want[i][j]));
        }
    return diff == 0.0 ? 0.0 : diff / scale;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

inline void fill_uniform(std::mt19937_64& rng, dgnn::Matrix& m, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    for (auto& v : m.data())
        v = static_cast<float>(d(rng));
}

inline void fill_uniform(std::mt19937_64& rng, std::vector<float>& v, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    for (auto& x : v)
        x = static_cast<float>(d(rng));
}

inline dgnn::Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double lo = -1.0,
                                  double hi = 1.0) {
    dgnn::Matrix m(r, c);
    fill_uniform(rng, m, lo, hi);
    return m;
}

inline dgnn::GruParams random_gru(std::mt19937_64& rng, std::size_t fx, std::size_t h, double scale = 0.5) {
    auto p = dgnn::GruParams::zeros(fx, h);
    for (auto* m : {&p.W_z, &p.W_r, &p.W_h, &p.U_z, &p.U_r, &p.U_h})
        fill_uniform(rng, *m, -scale, scale);
    for (auto* b : {&p.b_z, &p.b_r, &p.b_h})
        fill_uniform(rng, *b, -scale, scale);
    return p;
}

inline dgnn::LstmParams random_lstm(std::mt19937_64& rng, std::size_t fx, std::size_t h, double scale = 0.5) {
    auto p = dgnn::LstmParams::zeros(fx, h);
    for (auto* m : {&p.W_i, &p.W_f, &p.W_o, &p.W_g, &p.U_i, &p.U_f, &p.U_o, &p.U_g})
        fill_uniform(rng, *m, -scale, scale);
    for (auto* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_g})
        fill_uniform(rng, *b, -scale, scale);
    return p;
}

/// Random temporal edges over raw ids [0, universe) with times in [0, span).
inline std::vector<dgnn::TemporalEdge> random_edges(std::mt19937_64& rng, std::size_t count, std::uint64_t universe,
                                                    std::int64_t span) {
    std::uniform_int_distribution<std::uint64_t> id(0, universe - 1);
    std::uniform_int_distribution<std::int64_t> t(0, span - 1);
    std::uniform_int_distribution<int> w(-10, 10);
    std::vector<dgnn::TemporalEdge> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back({id(rng), id(rng), static_cast<float>(w(rng)), t(rng)});
    return out;
}

} // namespace oracle
