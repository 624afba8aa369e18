#pragma once

#include <span>
#include <vector>

#include "dgnn/executors.hpp"

// Dense double-precision re-implementation of the three models. Shares no
// kernel code with the engine: adjacency is expanded to a full matrix and
// every product is a plain triple loop. Used as the crosscheck oracle.

namespace dgnn::reference {

struct Dense {
    std::size_t rows = 0, cols = 0;
    std::vector<double> v;

    Dense() = default;
    Dense(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

Dense from_matrix(const Matrix& m);

/// (D^-1/2 (A_w + I) D^-1/2), row = destination. D counts distinct in-edges
/// plus the self loop.
Dense normalized_adjacency(const CsrGraph& g);

Dense matmul(const Dense& a, const Dense& b);

/// act(Ahat H W + b)
Dense gcn_layer(const Dense& a_hat, const Dense& h, const Dense& w, std::span<const double> b, bool relu);

/// One output matrix per snapshot.
std::vector<Dense> run(const ModelConfig& model, std::span<const Snapshot> snapshots, const WeightSet& w);

struct Deviation {
    double max_abs = 0.0;
    double max_rel = 0.0;   // max_abs / max |reference| of the snapshot
    std::size_t row = 0, col = 0;
};

/// Shapes must match; a shape mismatch reports an infinite deviation.
Deviation compare(const Matrix& got, const Dense& want);

} // namespace dgnn::reference
