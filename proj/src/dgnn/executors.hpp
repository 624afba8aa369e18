#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dgnn/models.hpp"

namespace dgnn {

enum class ExecutorKind { Sequential, V1, V2 };

/// Baseline: stages strictly in order. O1: the recurrent cell runs as a
/// three-stage FIFO pipeline. O2: O1 plus overlap of the GNN and RNN modules
/// (across timesteps for V1, per node within a timestep for V2).
enum class Ablation { Baseline, O1, O2 };

std::string_view to_string(ExecutorKind e);
std::string_view to_string(Ablation a);
std::optional<ExecutorKind> parse_executor(std::string_view s);
std::optional<Ablation> parse_ablation(std::string_view s);

/// Which executor can run which model class.
bool is_compatible(ModelKind model, ExecutorKind exec);

struct PipelineConfig {
    ExecutorKind executor = ExecutorKind::Sequential;
    Ablation ablation = Ablation::O2;
    std::size_t gnn_workers = 1;
    std::size_t rnn_workers = 1;
    std::size_t queue_depth = 64;
    std::uint64_t seed = 1;

    void check() const;
};

struct ModelConfig {
    ModelKind kind = ModelKind::WeightsEvolved;
    ModelDims dims;
    bool feed_hidden = false; // Integrated only
};

struct SnapshotTiming {
    double latency_ms = 0.0;
    double end_ms = 0.0;                          // since run start
    std::array<double, kStageCount> stage_ms{};   // indexed by Stage
};

struct RunResult {
    ModelKind model = ModelKind::WeightsEvolved;
    PipelineConfig config;
    std::vector<StepOutput> outputs;
    std::optional<Matrix> final_weight;  // WeightsEvolved only
    NodeStateStore final_states;         // recurrent models only
    std::vector<SnapshotTiming> timing;
    double total_ms = 0.0;
    std::size_t pingpong_violations = 0;
    std::map<std::string, std::size_t> queue_items;
};

/// Byte equality of every output row, the final weights and the final
/// node states.
bool outputs_bitwise_equal(const RunResult& a, const RunResult& b);

/// FNV-1a over all output bytes; stable across runs and executors.
std::uint64_t output_digest(const RunResult& r);

struct TimingReport {
    ModelKind model = ModelKind::WeightsEvolved;
    PipelineConfig config;
    std::vector<double> per_snapshot_ms;
    std::vector<double> end_ms;
    std::vector<std::array<double, kStageCount>> stage_ms;
    std::array<double, kStageCount> stage_total_ms{};
    double mean_ms = 0.0;
    double total_ms = 0.0;
};

TimingReport collect_timing(const RunResult& run);

RunResult run_sequential(const ModelConfig& model, std::span<const Snapshot> snapshots, const WeightSet& w,
                         const PipelineConfig& cfg);
RunResult run_v1(const ModelConfig& model, std::span<const Snapshot> snapshots, const WeightSet& w,
                 const PipelineConfig& cfg);
RunResult run_v2(const ModelConfig& model, std::span<const Snapshot> snapshots, const WeightSet& w,
                 const PipelineConfig& cfg);

/// Dispatches on cfg.executor after the compatibility check. State is
/// threaded strictly in snapshot order whatever the executor.
RunResult run_sequence(const ModelConfig& model, std::span<const Snapshot> snapshots, const WeightSet& w,
                       const PipelineConfig& cfg);

} // namespace dgnn
