#include "dgnn/executors.hpp"

#include <cstring>

#include "dgnn/exec_detail.hpp"

namespace dgnn {

using detail::Clock;
using detail::idx;
using detail::ms_between;
using detail::timed;

std::string_view to_string(ExecutorKind e) {
    switch (e) {
    case ExecutorKind::Sequential: return "seq";
    case ExecutorKind::V1: return "v1";
    case ExecutorKind::V2: return "v2";
    }
    return "?";
}

std::string_view to_string(Ablation a) {
    switch (a) {
    case Ablation::Baseline: return "baseline";
    case Ablation::O1: return "o1";
    case Ablation::O2: return "o2";
    }
    return "?";
}

std::optional<ExecutorKind> parse_executor(std::string_view s) {
    if (s == "seq" || s == "sequential")
        return ExecutorKind::Sequential;
    if (s == "v1")
        return ExecutorKind::V1;
    if (s == "v2")
        return ExecutorKind::V2;
    return std::nullopt;
}

std::optional<Ablation> parse_ablation(std::string_view s) {
    if (s == "baseline")
        return Ablation::Baseline;
    if (s == "o1")
        return Ablation::O1;
    if (s == "o2")
        return Ablation::O2;
    return std::nullopt;
}

bool is_compatible(ModelKind model, ExecutorKind exec) {
    switch (exec) {
    case ExecutorKind::Sequential: return true;
    case ExecutorKind::V1: return model != ModelKind::Integrated;
    case ExecutorKind::V2: return model != ModelKind::WeightsEvolved;
    }
    return false;
}

void PipelineConfig::check() const {
    if (gnn_workers < 1 || rnn_workers < 1)
        fail(ErrorCode::InvalidArgument, "worker counts must be at least 1");
    if (queue_depth < 1)
        fail(ErrorCode::InvalidArgument, "queue_depth must be at least 1");
}

bool outputs_bitwise_equal(const RunResult& a, const RunResult& b) {
    if (a.outputs.size() != b.outputs.size())
        return false;
    for (std::size_t t = 0; t < a.outputs.size(); ++t)
        if (!bitwise_equal(a.outputs[t].out_embed, b.outputs[t].out_embed))
            return false;
    if (a.final_weight.has_value() != b.final_weight.has_value())
        return false;
    if (a.final_weight && !bitwise_equal(*a.final_weight, *b.final_weight))
        return false;
    return bitwise_equal(a.final_states, b.final_states);
}

std::uint64_t output_digest(const RunResult& r) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& o : r.outputs) {
        const std::uint64_t dims[2] = {o.out_embed.rows(), o.out_embed.cols()};
        feed(dims, sizeof dims);
        feed(o.out_embed.data().data(), o.out_embed.size() * sizeof(float));
    }
    return h;
}

TimingReport collect_timing(const RunResult& run) {
    TimingReport rep;
    rep.model = run.model;
    rep.config = run.config;
    rep.total_ms = run.total_ms;
    for (const auto& t : run.timing) {
        rep.per_snapshot_ms.push_back(t.latency_ms);
        rep.end_ms.push_back(t.end_ms);
        rep.stage_ms.push_back(t.stage_ms);
        for (std::size_t s = 0; s < kStageCount; ++s)
            rep.stage_total_ms[s] += t.stage_ms[s];
    }
    if (!rep.per_snapshot_ms.empty()) {
        double sum = 0.0;
        for (double v : rep.per_snapshot_ms)
            sum += v;
        rep.mean_ms = sum / static_cast<double>(rep.per_snapshot_ms.size());
    }
    return rep;
}

namespace {

RunResult start_result(const ModelConfig& model, std::size_t n, const PipelineConfig& cfg) {
    RunResult r;
    r.model = model.kind;
    r.config = cfg;
    r.outputs.resize(n);
    r.timing.resize(n);
    return r;
}

} // namespace

RunResult run_sequential(const ModelConfig& mc, std::span<const Snapshot> snaps, const WeightSet& w,
                         const PipelineConfig& cfg) {
    cfg.check();
    RunResult res = start_result(mc, snaps.size(), cfg);
    const auto t_run = Clock::now();
    StagedSnapshot staged;

    auto finish_step = [&](std::size_t t, Clock::time_point t0) {
        const auto now = Clock::now();
        res.timing[t].latency_ms = ms_between(t0, now);
        res.timing[t].end_ms = ms_between(t_run, now);
    };

    switch (mc.kind) {
    case ModelKind::WeightsEvolved: {
        const auto m = EvolveGcnModel::from(w, mc.dims);
        Matrix weight = m.gcn.W;
        for (std::size_t t = 0; t < snaps.size(); ++t) {
            const auto t0 = Clock::now();
            auto& st = res.timing[t].stage_ms;
            EmbeddingMatrix msg;
            st[idx(Stage::GL)] = timed([&] { graph_load(snaps[t], staged); });
            st[idx(Stage::RNN)] = timed([&] { weight = matrix_gru_evolve(weight, m.evolver); });
            st[idx(Stage::MP)] = timed([&] { msg = message_pass(staged.csr, staged.embed); });
            st[idx(Stage::NT)] = timed(
                [&] { res.outputs[t].out_embed = node_transform(msg, GcnWeights{weight, m.gcn.b}, true); });
            finish_step(t, t0);
        }
        res.final_weight = std::move(weight);
        break;
    }
    case ModelKind::Integrated: {
        auto m = GcrnM2Model::from(w, mc.dims);
        m.feed_hidden = mc.feed_hidden;
        const std::size_t hidden = mc.dims.hidden_dim;
        for (std::size_t t = 0; t < snaps.size(); ++t) {
            const auto t0 = Clock::now();
            auto& st = res.timing[t].stage_ms;
            EmbeddingMatrix msg, x1, x2;
            st[idx(Stage::GL)] = timed([&] {
                graph_load(snaps[t], staged);
                if (m.feed_hidden)
                    apply_hidden_feedback(staged, res.final_states);
            });
            st[idx(Stage::MP)] = timed([&] { msg = message_pass(staged.csr, staged.embed); });
            st[idx(Stage::NT)] = timed([&] {
                x1 = node_transform(msg, m.gnn1, true);
                x2 = node_transform(msg, m.gnn2, true);
            });
            st[idx(Stage::RNN)] = timed([&] {
                const auto& s = snaps[t];
                auto h = gather_hidden(s, res.final_states, hidden);
                auto c = gather_cell(s, res.final_states, hidden);
                Matrix h_next(s.n_nodes(), hidden), c_next(s.n_nodes(), hidden);
                for (std::size_t v = 0; v < s.n_nodes(); ++v) {
                    auto out = lstm_cell(concat(x1.row(v), x2.row(v)), h.row(v), c.row(v), m.lstm);
                    std::copy(out.h.begin(), out.h.end(), h_next.row(v).begin());
                    std::copy(out.c.begin(), out.c.end(), c_next.row(v).begin());
                }
                commit_states(s, h_next, &c_next, res.final_states);
                res.outputs[t].out_embed = std::move(h_next);
            });
            finish_step(t, t0);
        }
        break;
    }
    case ModelKind::Stacked: {
        const auto m = StackedModel::from(w, mc.dims);
        const std::size_t hidden = mc.dims.hidden_dim;
        for (std::size_t t = 0; t < snaps.size(); ++t) {
            const auto t0 = Clock::now();
            auto& st = res.timing[t].stage_ms;
            EmbeddingMatrix msg, x;
            st[idx(Stage::GL)] = timed([&] { graph_load(snaps[t], staged); });
            st[idx(Stage::MP)] = timed([&] { msg = message_pass(staged.csr, staged.embed); });
            st[idx(Stage::NT)] = timed([&] { x = node_transform(msg, m.gnn, true); });
            st[idx(Stage::RNN)] = timed([&] {
                const auto& s = snaps[t];
                auto h = gather_hidden(s, res.final_states, hidden);
                Matrix h_next(s.n_nodes(), hidden);
                for (std::size_t v = 0; v < s.n_nodes(); ++v) {
                    auto out = gru_cell(x.row(v), h.row(v), m.gru);
                    std::copy(out.begin(), out.end(), h_next.row(v).begin());
                }
                commit_states(s, h_next, nullptr, res.final_states);
                res.outputs[t].out_embed = std::move(h_next);
            });
            finish_step(t, t0);
        }
        break;
    }
    }
    res.total_ms = ms_between(t_run, Clock::now());
    return res;
}

RunResult run_sequence(const ModelConfig& model, std::span<const Snapshot> snapshots, const WeightSet& w,
                       const PipelineConfig& cfg) {
    if (!is_compatible(model.kind, cfg.executor))
        fail(ErrorCode::IncompatibleExecutor, std::string(to_string(model.kind)) + " cannot run on executor " +
                                                  std::string(to_string(cfg.executor)));
    switch (cfg.executor) {
    case ExecutorKind::Sequential: return run_sequential(model, snapshots, w, cfg);
    case ExecutorKind::V1: return run_v1(model, snapshots, w, cfg);
    case ExecutorKind::V2: return run_v2(model, snapshots, w, cfg);
    }
    fail(ErrorCode::Internal, "unknown executor");
}

} // namespace dgnn
