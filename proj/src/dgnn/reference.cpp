#include "dgnn/reference.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace dgnn::reference {

namespace {

double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Dense tensor_matrix(const WeightSet& w, const std::string& name) {
    const auto& t = w.at(name);
    Dense d(t.dims.at(0), t.dims.at(1));
    for (std::size_t i = 0; i < t.data.size(); ++i)
        d.v[i] = t.data[i];
    return d;
}

std::vector<double> tensor_vector(const WeightSet& w, const std::string& name) {
    const auto& t = w.at(name);
    return {t.data.begin(), t.data.end()};
}

// x * M for a row vector x
std::vector<double> rowmul(const std::vector<double>& x, const Dense& m) {
    std::vector<double> out(m.cols, 0.0);
    for (std::size_t k = 0; k < m.rows; ++k)
        for (std::size_t j = 0; j < m.cols; ++j)
            out[j] += x[k] * m(k, j);
    return out;
}

struct Gru {
    Dense Wz, Wr, Wh, Uz, Ur, Uh;
    std::vector<double> bz, br, bh;

    static Gru load(const WeightSet& w) {
        return {tensor_matrix(w, "gru.W_z"), tensor_matrix(w, "gru.W_r"), tensor_matrix(w, "gru.W_h"),
                tensor_matrix(w, "gru.U_z"), tensor_matrix(w, "gru.U_r"), tensor_matrix(w, "gru.U_h"),
                tensor_vector(w, "gru.b_z"), tensor_vector(w, "gru.b_r"), tensor_vector(w, "gru.b_h")};
    }

    std::vector<double> step(const std::vector<double>& x, const std::vector<double>& h) const {
        const auto xz = rowmul(x, Wz), hz = rowmul(h, Uz);
        const auto xr = rowmul(x, Wr), hr = rowmul(h, Ur);
        const auto xh = rowmul(x, Wh);
        const std::size_t n = h.size();
        std::vector<double> z(n), r(n), rh(n);
        for (std::size_t j = 0; j < n; ++j) {
            z[j] = sigm(xz[j] + hz[j] + bz[j]);
            r[j] = sigm(xr[j] + hr[j] + br[j]);
            rh[j] = r[j] * h[j];
        }
        const auto u = rowmul(rh, Uh);
        std::vector<double> out(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double cand = std::tanh(xh[j] + u[j] + bh[j]);
            out[j] = (1.0 - z[j]) * h[j] + z[j] * cand;
        }
        return out;
    }
};

struct Lstm {
    Dense W[4], U[4];
    std::vector<double> b[4];

    static Lstm load(const WeightSet& w) {
        Lstm l;
        const char* gates[4] = {"i", "f", "o", "g"};
        for (int k = 0; k < 4; ++k) {
            l.W[k] = tensor_matrix(w, std::string("lstm.W_") + gates[k]);
            l.U[k] = tensor_matrix(w, std::string("lstm.U_") + gates[k]);
            l.b[k] = tensor_vector(w, std::string("lstm.b_") + gates[k]);
        }
        return l;
    }

    void step(const std::vector<double>& x, std::vector<double>& h, std::vector<double>& c) const {
        const std::size_t n = h.size();
        std::vector<double> pre[4];
        for (int k = 0; k < 4; ++k) {
            const auto a = rowmul(x, W[k]);
            const auto bb = rowmul(h, U[k]);
            pre[k].resize(n);
            for (std::size_t j = 0; j < n; ++j)
                pre[k][j] = a[j] + bb[j] + b[k][j];
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double i = sigm(pre[0][j]), f = sigm(pre[1][j]), o = sigm(pre[2][j]);
            const double g = std::tanh(pre[3][j]);
            c[j] = f * c[j] + i * g;
            h[j] = o * std::tanh(c[j]);
        }
    }
};

struct State {
    std::vector<double> h, c;
};

std::vector<double> row_of(const Dense& m, std::size_t r) {
    return {m.v.begin() + static_cast<std::ptrdiff_t>(r * m.cols),
            m.v.begin() + static_cast<std::ptrdiff_t>((r + 1) * m.cols)};
}

} // namespace

Dense from_matrix(const Matrix& m) {
    Dense d(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.size(); ++i)
        d.v[i] = m.data()[i];
    return d;
}

Dense normalized_adjacency(const CsrGraph& g) {
    const std::size_t n = g.n_nodes;
    Dense a(n, n);
    std::vector<double> deg(n, 1.0);
    for (std::size_t v = 0; v < n; ++v) {
        for (auto k = g.row_ptr[v]; k < g.row_ptr[v + 1]; ++k) {
            a(v, g.col_idx[k]) += g.edge_weight[k];
            deg[v] += 1.0;
        }
        a(v, v) += 1.0;
    }
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t u = 0; u < n; ++u)
            a(v, u) /= std::sqrt(deg[v] * deg[u]);
    return a;
}

Dense matmul(const Dense& a, const Dense& b) {
    Dense out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k)
            for (std::size_t j = 0; j < b.cols; ++j)
                out(i, j) += a(i, k) * b(k, j);
    return out;
}

Dense gcn_layer(const Dense& a_hat, const Dense& h, const Dense& w, std::span<const double> b, bool relu) {
    Dense out = matmul(matmul(a_hat, h), w);
    for (std::size_t i = 0; i < out.rows; ++i)
        for (std::size_t j = 0; j < out.cols; ++j) {
            const double y = out(i, j) + b[j];
            out(i, j) = relu && y < 0.0 ? 0.0 : y;
        }
    return out;
}

std::vector<Dense> run(const ModelConfig& model, std::span<const Snapshot> snapshots, const WeightSet& w) {
    check_weights(model.kind, w, model.dims);
    std::vector<Dense> outs;
    std::map<RawId, State> states;
    const std::size_t H = model.dims.hidden_dim;

    switch (model.kind) {
    case ModelKind::WeightsEvolved: {
        Dense W = tensor_matrix(w, "gcn.W");
        const auto b = tensor_vector(w, "gcn.b");
        const Gru gru = Gru::load(w);
        for (const auto& s : snapshots) {
            Dense next(W.rows, W.cols);
            for (std::size_t c = 0; c < W.cols; ++c) {
                std::vector<double> col(W.rows);
                for (std::size_t r = 0; r < W.rows; ++r)
                    col[r] = W(r, c);
                const auto evolved = gru.step(col, col);
                for (std::size_t r = 0; r < W.rows; ++r)
                    next(r, c) = evolved[r];
            }
            W = std::move(next);
            outs.push_back(gcn_layer(normalized_adjacency(s.csr), from_matrix(s.node_embed), W, b, true));
        }
        break;
    }
    case ModelKind::Integrated: {
        const Dense W1 = tensor_matrix(w, "gnn1.W"), W2 = tensor_matrix(w, "gnn2.W");
        const auto b1 = tensor_vector(w, "gnn1.b"), b2 = tensor_vector(w, "gnn2.b");
        const Lstm lstm = Lstm::load(w);
        for (const auto& s : snapshots) {
            Dense x = from_matrix(s.node_embed);
            if (model.feed_hidden) {
                for (std::size_t v = 0; v < s.n_nodes(); ++v) {
                    auto it = states.find(s.renumber.local_to_raw[v]);
                    if (it != states.end())
                        for (std::size_t j = 0; j < x.cols; ++j)
                            x(v, j) = it->second.h.at(j);
                }
            }
            const Dense a = normalized_adjacency(s.csr);
            const Dense x1 = gcn_layer(a, x, W1, b1, true);
            const Dense x2 = gcn_layer(a, x, W2, b2, true);
            Dense out(s.n_nodes(), H);
            std::vector<State> updated(s.n_nodes());
            for (std::size_t v = 0; v < s.n_nodes(); ++v) {
                auto in = row_of(x1, v);
                const auto second = row_of(x2, v);
                in.insert(in.end(), second.begin(), second.end());
                State st{std::vector<double>(H, 0.0), std::vector<double>(H, 0.0)};
                if (auto it = states.find(s.renumber.local_to_raw[v]); it != states.end())
                    st = it->second;
                lstm.step(in, st.h, st.c);
                for (std::size_t j = 0; j < H; ++j)
                    out(v, j) = st.h[j];
                updated[v] = std::move(st);
            }
            for (std::size_t v = 0; v < s.n_nodes(); ++v)
                states[s.renumber.local_to_raw[v]] = std::move(updated[v]);
            outs.push_back(std::move(out));
        }
        break;
    }
    case ModelKind::Stacked: {
        const Dense W = tensor_matrix(w, "gnn.W");
        const auto b = tensor_vector(w, "gnn.b");
        const Gru gru = Gru::load(w);
        for (const auto& s : snapshots) {
            const Dense x = gcn_layer(normalized_adjacency(s.csr), from_matrix(s.node_embed), W, b, true);
            Dense out(s.n_nodes(), H);
            for (std::size_t v = 0; v < s.n_nodes(); ++v) {
                std::vector<double> h(H, 0.0);
                if (auto it = states.find(s.renumber.local_to_raw[v]); it != states.end())
                    h = it->second.h;
                h = gru.step(row_of(x, v), h);
                for (std::size_t j = 0; j < H; ++j)
                    out(v, j) = h[j];
                states[s.renumber.local_to_raw[v]].h = std::move(h);
            }
            outs.push_back(std::move(out));
        }
        break;
    }
    }
    return outs;
}

Deviation compare(const Matrix& got, const Dense& want) {
    Deviation d;
    if (got.rows() != want.rows || got.cols() != want.cols) {
        d.max_abs = d.max_rel = std::numeric_limits<double>::infinity();
        return d;
    }
    double scale = 0.0;
    for (std::size_t r = 0; r < want.rows; ++r)
        for (std::size_t c = 0; c < want.cols; ++c) {
            scale = std::max(scale, std::abs(want(r, c)));
            const double diff = std::abs(static_cast<double>(got(r, c)) - want(r, c));
            if (diff > d.max_abs || std::isnan(diff)) {
                d.max_abs = std::isnan(diff) ? std::numeric_limits<double>::infinity() : diff;
                d.row = r;
                d.col = c;
            }
        }
    if (d.max_abs > 0.0)
        d.max_rel = d.max_abs / std::max(scale, std::numeric_limits<double>::min());
    return d;
}

} // namespace dgnn::reference
