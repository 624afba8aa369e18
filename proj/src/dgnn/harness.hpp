#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dgnn/dataset.hpp"
#include "dgnn/executors.hpp"
#include "dgnn/preprocess.hpp"

namespace dgnn {

struct RunManifest {
    DatasetSpec dataset;
    std::string dataset_label;          // as given on the command line
    ModelConfig model;
    PipelineConfig pipeline;
    std::int64_t splitter_seconds = 0;  // 0: synthetic window, 3 weeks for bitcoin, else 1 day
    std::string weights_path;           // empty: seeded init
    std::string oracle_weights_path;    // crosscheck only; empty: same as weights
    std::size_t repeats = 5;            // sweep
    std::vector<std::pair<std::size_t, std::size_t>> splits;  // sweep (gnn, rnn) worker pairs
    double tolerance = 1e-5;            // crosscheck, relative to the dense reference

    void check() const;
    std::int64_t window() const;
};

/// Default worker counts: available hardware threads split evenly, at least
/// one each.
std::pair<std::size_t, std::size_t> default_worker_split();

struct Workload {
    TemporalEdgeList edges;
    std::vector<Snapshot> snapshots;
    DatasetStats stats;
    double load_ms = 0.0;
    double preprocess_ms = 0.0;
};

Workload prepare_workload(const RunManifest& m);

/// Loads `path` (validated against the model layout) or seeds fresh weights.
WeightSet resolve_weights(const RunManifest& m, const std::string& path, double* load_ms = nullptr);

struct Report {
    nlohmann::json json;
    std::string table;
    bool pass = true;
};

nlohmann::json manifest_json(const RunManifest& m);
nlohmann::json stats_json(const DatasetStats& s);

Report run_stats(const RunManifest& m);
Report run_bench(const RunManifest& m);
Report run_crosscheck(const RunManifest& m);
Report run_sweep(const RunManifest& m);

double median(std::vector<double> v);

} // namespace dgnn
