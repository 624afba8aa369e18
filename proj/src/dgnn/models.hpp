#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dgnn/kernels.hpp"
#include "dgnn/types.hpp"

namespace dgnn {

/// The three discrete-time DGNN dataflow classes.
enum class ModelKind {
    WeightsEvolved, // EvolveGCN: W^t = GRU(W^{t-1}), O^t = GCN(W^t, G^t)
    Integrated,     // GCRN-M2: two GCNs feed an LSTM within one step
    Stacked,        // GCN output fed step by step into a GRU
};

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

/// Per-timestep stage taxonomy: graph loading, message passing, node
/// transformation, recurrent update.
enum class Stage { GL = 0, MP = 1, NT = 2, RNN = 3 };
inline constexpr std::size_t kStageCount = 4;

std::string_view to_string(Stage s);

/// Execution order of the stages within one timestep for a given model.
std::vector<Stage> stage_order(ModelKind kind);

struct ModelDims {
    std::size_t feature_dim = 32; // F
    std::size_t hidden_dim = 32;  // H
};

/// Names and shapes every weight set for `kind` must contain.
std::vector<std::pair<std::string, std::vector<std::uint32_t>>> weight_layout(ModelKind kind, ModelDims dims);

/// Seeded uniform values in [-0.1, 0.1] for every tensor in the layout.
WeightSet init_weights(ModelKind kind, ModelDims dims, std::uint64_t seed);

/// Throws MissingTensor / ShapeMismatch / NonFiniteValue.
void check_weights(ModelKind kind, const WeightSet& w, ModelDims dims);

struct EvolveGcnModel {
    GcnWeights gcn;     // initial weights, evolved before the first step
    GruParams evolver;  // F x F
    static EvolveGcnModel from(const WeightSet& w, ModelDims dims);
};

struct GcrnM2Model {
    GcnWeights gnn1, gnn2;
    LstmParams lstm;    // input is concat(X1, X2): 2H x H
    // Feed the stored hidden state as the next snapshot's node input
    // (requires F == H). Off by default.
    bool feed_hidden = false;
    static GcrnM2Model from(const WeightSet& w, ModelDims dims);
};

struct StackedModel {
    GcnWeights gnn;
    GruParams gru;      // H x H
    static StackedModel from(const WeightSet& w, ModelDims dims);
};

struct StepOutput {
    EmbeddingMatrix out_embed; // rows keyed by local index
};

/// Snapshot data staged for compute (the graph-loading stage).
struct StagedSnapshot {
    std::size_t index = 0;
    const Snapshot* source = nullptr;
    CsrGraph csr;
    EmbeddingMatrix embed;

    std::size_t n_nodes() const { return csr.n_nodes; }
};

void graph_load(const Snapshot& s, StagedSnapshot& dst);

/// Replaces input rows with the stored hidden state of nodes that have one.
void apply_hidden_feedback(StagedSnapshot& staged, const NodeStateStore& states);

/// Hidden (and cell) state rows for the snapshot's nodes; zero if absent.
Matrix gather_hidden(const Snapshot& s, const NodeStateStore& states, std::size_t hidden);
Matrix gather_cell(const Snapshot& s, const NodeStateStore& states, std::size_t hidden);

/// Writes back per-node state by raw id. `cell` may be null (GRU models).
void commit_states(const Snapshot& s, const Matrix& hidden, const Matrix* cell, NodeStateStore& states);

std::vector<float> concat(std::span<const float> a, std::span<const float> b);

/// `weight` holds W^{t-1} on entry and W^t on return.
StepOutput evolvegcn_step(const Snapshot& s, const EvolveGcnModel& m, Matrix& weight);
StepOutput gcrn_m2_step(const Snapshot& s, const GcrnM2Model& m, NodeStateStore& states);
StepOutput stacked_step(const Snapshot& s, const StackedModel& m, NodeStateStore& states);

} // namespace dgnn
