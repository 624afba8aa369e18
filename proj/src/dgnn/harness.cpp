#include "dgnn/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>

#include "dgnn/exec_detail.hpp"
#include "dgnn/reference.hpp"
#include "dgnn/weight_io.hpp"

namespace dgnn {

using detail::Clock;
using detail::ms_between;
using nlohmann::json;

namespace {

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string hex64(std::uint64_t v) { return fmt("%016llx", static_cast<unsigned long long>(v)); }

/// Sequential manifests still need a pipelined executor to compare against.
ExecutorKind pipelined_executor(const RunManifest& m) {
    if (m.pipeline.executor != ExecutorKind::Sequential)
        return m.pipeline.executor;
    return m.model.kind == ModelKind::WeightsEvolved ? ExecutorKind::V1 : ExecutorKind::V2;
}

json timing_json(const TimingReport& t, double weight_load_ms, const Workload& w) {
    json stages = json::object();
    const double n = std::max<double>(1.0, static_cast<double>(t.per_snapshot_ms.size()));
    for (auto s : {Stage::GL, Stage::MP, Stage::NT, Stage::RNN}) {
        const double total = t.stage_total_ms[static_cast<std::size_t>(s)];
        stages[std::string(to_string(s))] = {{"total_ms", total}, {"mean_ms", total / n}};
    }
    json order = json::array();
    for (auto s : stage_order(t.model))
        order.push_back(std::string(to_string(s)));
    stages["order"] = order;
    return {{"per_snapshot_ms", t.per_snapshot_ms},
            {"mean_ms", t.mean_ms},
            {"total_ms", t.total_ms},
            {"stage_breakdown", stages},
            {"weight_load_ms", weight_load_ms},
            {"dataset_load_ms", w.load_ms},
            {"preprocess_ms", w.preprocess_ms}};
}

std::string stats_table(const DatasetStats& s) {
    std::string out = "snapshots  avg_nodes  avg_edges  max_nodes  max_edges\n";
    out += fmt("%9zu  %9.1f  %9.1f  %9zu  %9zu\n", s.snapshots, s.avg_nodes, s.avg_edges, s.max_nodes,
               s.max_edges);
    return out;
}

std::string header_line(const RunManifest& m, ExecutorKind exec) {
    return fmt("model=%s executor=%s ablation=%s F=%zu H=%zu workers=%zu/%zu queue_depth=%zu\n",
               std::string(to_string(m.model.kind)).c_str(), std::string(to_string(exec)).c_str(),
               std::string(to_string(m.pipeline.ablation)).c_str(), m.model.dims.feature_dim,
               m.model.dims.hidden_dim, m.pipeline.gnn_workers, m.pipeline.rnn_workers, m.pipeline.queue_depth);
}

} // namespace

void RunManifest::check() const {
    pipeline.check();
    if (model.dims.feature_dim == 0 || model.dims.hidden_dim == 0)
        fail(ErrorCode::InvalidArgument, "feature and hidden dims must be positive");
    if (splitter_seconds < 0)
        fail(ErrorCode::InvalidArgument, "splitter seconds must be positive");
    if (model.feed_hidden && model.dims.feature_dim != model.dims.hidden_dim)
        fail(ErrorCode::InvalidArgument, "hidden feedback requires feature_dim == hidden_dim");
    if (!is_compatible(model.kind, pipeline.executor))
        fail(ErrorCode::IncompatibleExecutor, std::string(to_string(model.kind)) + " cannot run on executor " +
                                                  std::string(to_string(pipeline.executor)));
    if (repeats == 0)
        fail(ErrorCode::InvalidArgument, "repeats must be at least 1");
    for (auto [g, r] : splits)
        if (g == 0 || r == 0)
            fail(ErrorCode::InvalidArgument, "worker split entries must be at least 1");
}

std::int64_t RunManifest::window() const {
    if (splitter_seconds > 0)
        return splitter_seconds;
    if (dataset.synthetic)
        return dataset.synthetic->window_seconds;
    return dataset.format_name == "bitcoin" ? 1814400 : 86400;
}

std::pair<std::size_t, std::size_t> default_worker_split() {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t gnn = std::max<std::size_t>(1, hw / 2);
    const std::size_t rnn = std::max<std::size_t>(1, hw - hw / 2);
    return {gnn, rnn};
}

Workload prepare_workload(const RunManifest& m) {
    m.check();
    Workload w;
    auto t0 = Clock::now();
    w.edges = load_dataset(m.dataset);
    auto t1 = Clock::now();
    SeededFeatures features(m.model.dims.feature_dim, m.pipeline.seed);
    w.snapshots = preprocess(w.edges, SplitterConfig{m.window(), true}, features);
    auto t2 = Clock::now();
    w.stats = compute_stats(w.snapshots);
    w.load_ms = ms_between(t0, t1);
    w.preprocess_ms = ms_between(t1, t2);
    return w;
}

WeightSet resolve_weights(const RunManifest& m, const std::string& path, double* load_ms) {
    const auto t0 = Clock::now();
    WeightSet w;
    if (path.empty()) {
        w = init_weights(m.model.kind, m.model.dims, m.pipeline.seed);
    } else {
        w = load_weights(path);
        check_weights(m.model.kind, w, m.model.dims);
    }
    if (load_ms)
        *load_ms = ms_between(t0, Clock::now());
    return w;
}

json manifest_json(const RunManifest& m) {
    json splits = json::array();
    for (auto [g, r] : m.splits)
        splits.push_back({{"gnn_workers", g}, {"rnn_workers", r}});
    return {{"dataset", m.dataset_label.empty() ? m.dataset.path : m.dataset_label},
            {"model", std::string(to_string(m.model.kind))},
            {"executor", std::string(to_string(m.pipeline.executor))},
            {"ablation", std::string(to_string(m.pipeline.ablation))},
            {"splitter_seconds", m.window()},
            {"feature_dim", m.model.dims.feature_dim},
            {"hidden_dim", m.model.dims.hidden_dim},
            {"seed", m.pipeline.seed},
            {"gnn_workers", m.pipeline.gnn_workers},
            {"rnn_workers", m.pipeline.rnn_workers},
            {"queue_depth", m.pipeline.queue_depth},
            {"weights", m.weights_path.empty() ? json(nullptr) : json(m.weights_path)},
            {"feed_hidden", m.model.feed_hidden},
            {"splits", splits}};
}

json stats_json(const DatasetStats& s) {
    return {{"snapshots", s.snapshots},
            {"avg_nodes", s.avg_nodes},
            {"avg_edges", s.avg_edges},
            {"max_nodes", s.max_nodes},
            {"max_edges", s.max_edges},
            {"avg_raw_edges", s.avg_raw_edges},
            {"max_raw_edges", s.max_raw_edges},
            {"averaged_over", "retained non-empty snapshots"},
            {"edges_counted", "after merging duplicate (src, dst) pairs; raw_* before"}};
}

Report run_stats(const RunManifest& m) {
    const auto w = prepare_workload(m);
    Report r;
    r.json = {{"manifest", manifest_json(m)},
              {"stats", stats_json(w.stats)},
              {"input_edges", w.edges.size()},
              {"timing", {{"dataset_load_ms", w.load_ms}, {"preprocess_ms", w.preprocess_ms}}}};
    r.table = fmt("dataset %s: %zu edges, window %lld s\n", manifest_json(m)["dataset"].get<std::string>().c_str(),
                  w.edges.size(), static_cast<long long>(m.window()));
    r.table += stats_table(w.stats);
    r.table += fmt("preprocess %.2f ms\n", w.preprocess_ms);
    return r;
}

Report run_bench(const RunManifest& m) {
    const auto w = prepare_workload(m);
    double weight_ms = 0.0;
    const auto weights = resolve_weights(m, m.weights_path, &weight_ms);
    const auto run = run_sequence(m.model, w.snapshots, weights, m.pipeline);
    const auto t = collect_timing(run);

    Report r;
    json queues = json::object();
    for (const auto& [k, v] : run.queue_items)
        queues[k] = v;
    r.json = {{"manifest", manifest_json(m)},
              {"stats", stats_json(w.stats)},
              {"timing", timing_json(t, weight_ms, w)},
              {"output", {{"digest", hex64(output_digest(run))}, {"snapshots", run.outputs.size()}}},
              {"queues", queues},
              {"pingpong_violations", run.pingpong_violations}};

    r.table = header_line(m, m.pipeline.executor) + stats_table(w.stats);
    r.table += fmt("latency per snapshot: mean %.3f ms, total %.2f ms, weight load %.3f ms\n", t.mean_ms,
                   t.total_ms, weight_ms);
    r.table += "stage      total_ms    mean_ms\n";
    for (auto s : stage_order(m.model.kind)) {
        const double total = t.stage_total_ms[static_cast<std::size_t>(s)];
        r.table += fmt("%-6s %12.3f %10.4f\n", std::string(to_string(s)).c_str(), total,
                       total / std::max<double>(1.0, static_cast<double>(t.per_snapshot_ms.size())));
    }
    r.table += "output digest " + hex64(output_digest(run)) + "\n";
    return r;
}

Report run_crosscheck(const RunManifest& m) {
    const auto w = prepare_workload(m);
    double weight_ms = 0.0;
    const auto weights = resolve_weights(m, m.weights_path, &weight_ms);
    const auto oracle_weights =
        m.oracle_weights_path.empty() ? weights : resolve_weights(m, m.oracle_weights_path);

    PipelineConfig pcfg = m.pipeline;
    pcfg.executor = pipelined_executor(m);
    const auto seq = run_sequential(m.model, w.snapshots, weights, m.pipeline);
    const auto pipe = run_sequence(m.model, w.snapshots, weights, pcfg);
    const bool identical = outputs_bitwise_equal(seq, pipe);
    const auto ref = reference::run(m.model, w.snapshots, oracle_weights);

    json per = json::array();
    reference::Deviation worst;
    std::size_t worst_snap = 0;
    double pipe_max = 0.0;
    for (std::size_t t = 0; t < w.snapshots.size(); ++t) {
        const auto d = reference::compare(seq.outputs[t].out_embed, ref[t]);
        const auto p = reference::compare(pipe.outputs[t].out_embed, reference::from_matrix(seq.outputs[t].out_embed));
        pipe_max = std::max(pipe_max, p.max_abs);
        per.push_back({{"snapshot", t}, {"max_abs", d.max_abs}, {"max_rel", d.max_rel},
                       {"pipelined_max_abs", p.max_abs}});
        if (t == 0 || d.max_rel > worst.max_rel) {
            worst = d;
            worst_snap = t;
        }
    }
    double max_abs = 0.0;
    for (const auto& e : per)
        max_abs = std::max(max_abs, e["max_abs"].get<double>());
    const bool oracle_ok = worst.max_rel <= m.tolerance;

    Report r;
    r.pass = identical && oracle_ok;
    json worst_j = nullptr;
    if (!w.snapshots.empty()) {
        const auto& s = w.snapshots[worst_snap];
        worst_j = {{"snapshot", worst_snap},
                   {"row", worst.row},
                   {"col", worst.col},
                   {"node", s.renumber.local_to_raw.empty() ? 0 : s.renumber.local_to_raw[worst.row]},
                   {"got", seq.outputs[worst_snap].out_embed(worst.row, worst.col)},
                   {"want", ref[worst_snap](worst.row, worst.col)}};
    }
    const auto t = collect_timing(pipe);
    r.json = {{"manifest", manifest_json(m)},
              {"stats", stats_json(w.stats)},
              {"timing", timing_json(t, weight_ms, w)},
              {"crosscheck",
               {{"max_abs", max_abs},
                {"max_rel", worst.max_rel},
                {"pass", r.pass},
                {"tolerance", m.tolerance},
                {"oracle_pass", oracle_ok},
                {"worst", worst_j},
                {"pipelined",
                 {{"executor", std::string(to_string(pcfg.executor))},
                  {"ablation", std::string(to_string(pcfg.ablation))},
                  {"identical", identical},
                  {"max_abs", pipe_max},
                  {"digest", hex64(output_digest(pipe))}}},
                {"per_snapshot", per}}}};

    r.table = header_line(m, pcfg.executor) + stats_table(w.stats);
    r.table += fmt("pipelined vs sequential: %s (max abs %.3g)\n", identical ? "byte-identical" : "DIFFERENT",
                   pipe_max);
    r.table += fmt("sequential vs dense reference: max abs %.3g, max rel %.3g (tolerance %.1g)\n", max_abs,
                   worst.max_rel, m.tolerance);
    if (!w.snapshots.empty())
        r.table += fmt("largest deviation at snapshot %zu row %zu col %zu\n", worst_snap, worst.row, worst.col);
    r.table += r.pass ? "PASS\n" : "FAIL\n";
    return r;
}

double median(std::vector<double> v) {
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Report run_sweep(const RunManifest& m) {
    const auto w = prepare_workload(m);
    const auto weights = resolve_weights(m, m.weights_path);
    auto splits = m.splits;
    if (splits.empty())
        splits.push_back({m.pipeline.gnn_workers, m.pipeline.rnn_workers});

    json rows = json::array();
    std::string digest;
    bool identical = true;
    PipelineConfig cfg = m.pipeline;
    cfg.executor = pipelined_executor(m);
    Report r;
    r.table = header_line(m, cfg.executor) + stats_table(w.stats);
    r.table += fmt("repeats %zu (median of per-run mean per-snapshot latency)\n", m.repeats);
    r.table += "gnn rnn  ablation   median_ms  speedup   gnn%   rnn%\n";
    for (auto [g, rn] : splits) {
        cfg.gnn_workers = g;
        cfg.rnn_workers = rn;
        double baseline_ms = 0.0;
        for (auto level : {Ablation::Baseline, Ablation::O1, Ablation::O2}) {
            cfg.ablation = level;
            run_sequence(m.model, w.snapshots, weights, cfg);  // warm-up
            std::vector<double> means;
            std::array<double, kStageCount> stage{};
            std::string row_digest;
            for (std::size_t k = 0; k < m.repeats; ++k) {
                const auto run = run_sequence(m.model, w.snapshots, weights, cfg);
                const auto t = collect_timing(run);
                means.push_back(t.mean_ms);
                for (std::size_t s = 0; s < kStageCount; ++s)
                    stage[s] += t.stage_total_ms[s];
                row_digest = hex64(output_digest(run));
                if (digest.empty())
                    digest = row_digest;
                identical = identical && row_digest == digest;
            }
            const double med = median(means);
            if (level == Ablation::Baseline)
                baseline_ms = med;
            const double speedup = med > 0.0 ? baseline_ms / med : 0.0;
            const double gnn = stage[1] + stage[2];
            const double rnn = stage[3];
            const double sum = gnn + rnn;
            const double gnn_pct = sum > 0.0 ? 100.0 * gnn / sum : 0.0;
            const double rnn_pct = sum > 0.0 ? 100.0 - gnn_pct : 0.0;
            rows.push_back({{"gnn_workers", g},
                            {"rnn_workers", rn},
                            {"ablation", std::string(to_string(level))},
                            {"median_ms", med},
                            {"runs_ms", means},
                            {"speedup", speedup},
                            {"gnn_share_pct", gnn_pct},
                            {"rnn_share_pct", rnn_pct},
                            {"gl_ms", stage[0] / static_cast<double>(m.repeats)},
                            {"digest", row_digest}});
            r.table += fmt("%3zu %3zu  %-8s %11.4f %8.3f %6.1f %6.1f\n", g, rn,
                           std::string(to_string(level)).c_str(), med, speedup, gnn_pct, rnn_pct);
        }
    }
    r.pass = identical;
    r.json = {{"manifest", manifest_json(m)},
              {"stats", stats_json(w.stats)},
              {"sweep",
               {{"executor", std::string(to_string(cfg.executor))},
                {"repeats", m.repeats},
                {"warmup_runs", 1},
                {"hardware_threads", std::thread::hardware_concurrency()},
                {"rows", rows},
                {"outputs_identical", identical}}}};
    r.table += identical ? "outputs identical across all rows\n" : "OUTPUTS DIFFER BETWEEN ROWS\n";
    return r;
}

} // namespace dgnn
