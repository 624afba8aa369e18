// V1: overlap of GNN and RNN work from adjacent timesteps.
//
// EvolveGCN schedule (per timestep t):
//   phase 1:  MP(t)  || RNN(t+1)   weights ping-pong: RNN reads W^t, writes W^{t+1}
//   phase 2:  NT(t)  || GL(t+1)    snapshot ping-pong: GL stages t+1 into the back half
//   barrier:  flip both pairs
//
// Stacked schedule (GNN runs one step ahead of the RNN):
//   phase 1:  RNN(t) || MP(t+1)
//   phase 2:  NT(t+1) || GL(t+2)   GNN-output ping-pong: NT writes X^{t+1}
//   barrier:  commit node states of t, flip

#include "dgnn/exec_detail.hpp"
#include "dgnn/executors.hpp"
#include "dgnn/ping_pong.hpp"

namespace dgnn {

using detail::Clock;
using detail::CounterSource;
using detail::idx;
using detail::ms_between;
using detail::RnnItem;
using detail::TaskGroup;
using detail::timed;

namespace {

struct Evolver {
    const EvolveGcnModel& model;
    const PipelineConfig& cfg;
    bool pipelined;
    std::map<std::string, std::size_t>& queue_items;

    // W^{t} -> W^{t+1}; each column is one item. Returns the RNN stage time.
    double operator()(const Matrix& prev, Matrix& next) const {
        if (next.rows() != prev.rows() || next.cols() != prev.cols())
            next = Matrix(prev.rows(), prev.cols());
        auto make = [&prev](std::size_t c) {
            RnnItem it;
            it.index = c;
            it.x = column(prev, c);
            it.h = it.x;
            return it;
        };
        CounterSource source(prev.cols(), make);
        auto sink = [&next](const RnnItem& it, std::span<const float> h, std::span<const float>) {
            set_column(next, it.index, h);
        };
        detail::GruOps ops{&model.evolver};
        const auto stats = detail::run_rnn(ops, cfg.rnn_workers, cfg.queue_depth, pipelined, source, sink);
        queue_items["rnn.gates->candidate"] += stats.gates_to_middle;
        queue_items["rnn.candidate->combine"] += stats.middle_to_finish;
        return stats.busy_ms / static_cast<double>(std::max<std::size_t>(cfg.rnn_workers, 1));
    }
};

RunResult v1_evolvegcn(const ModelConfig& mc, std::span<const Snapshot> snaps, const WeightSet& w,
                       const PipelineConfig& cfg, RunResult res) {
    const auto model = EvolveGcnModel::from(w, mc.dims);
    const std::size_t T = snaps.size();
    const Evolver evolve{model, cfg, cfg.ablation != Ablation::Baseline, res.queue_items};
    const auto t_run = Clock::now();
    auto iter_start = t_run;
    auto close_iter = [&](std::size_t t) {
        const auto now = Clock::now();
        res.timing[t].latency_ms = ms_between(iter_start, now);
        res.timing[t].end_ms = ms_between(t_run, now);
        iter_start = now;
    };

    if (cfg.ablation != Ablation::O2) {
        Matrix weight = model.gcn.W;
        StagedSnapshot staged;
        for (std::size_t t = 0; t < T; ++t) {
            auto& st = res.timing[t].stage_ms;
            EmbeddingMatrix msg;
            st[idx(Stage::GL)] = timed([&] { graph_load(snaps[t], staged); });
            Matrix next;
            st[idx(Stage::RNN)] = evolve(weight, next);
            weight = std::move(next);
            st[idx(Stage::MP)] =
                timed([&] { msg = detail::message_pass_parallel(staged.csr, staged.embed, cfg.gnn_workers); });
            st[idx(Stage::NT)] = timed([&] {
                res.outputs[t].out_embed =
                    detail::node_transform_parallel(msg, GcnWeights{weight, model.gcn.b}, true, cfg.gnn_workers);
            });
            close_iter(t);
        }
        res.final_weight = std::move(weight);
        res.total_ms = ms_between(t_run, Clock::now());
        return res;
    }

    PingPongPair<Matrix> weights;
    PingPongPair<StagedSnapshot> staged;
    if (T > 0) {
        res.timing[0].stage_ms[idx(Stage::GL)] = timed([&] { graph_load(snaps[0], staged.write()); });
        res.timing[0].stage_ms[idx(Stage::RNN)] = evolve(model.gcn.W, weights.write());
        staged.flip();
        weights.flip();
    }
    for (std::size_t t = 0; t < T; ++t) {
        const bool has_next = t + 1 < T;
        auto& st = res.timing[t].stage_ms;

        EmbeddingMatrix msg;
        {
            TaskGroup group;
            if (has_next) {
                group.spawn([&] {
                    res.timing[t + 1].stage_ms[idx(Stage::RNN)] = evolve(weights.read(), weights.write());
                });
            }
            group.run_here([&] {
                st[idx(Stage::MP)] = timed([&] {
                    const auto& cur = staged.read();
                    msg = detail::message_pass_parallel(cur.csr, cur.embed, cfg.gnn_workers);
                });
            });
            group.wait();
        }
        {
            TaskGroup group;
            if (has_next) {
                group.spawn([&] {
                    res.timing[t + 1].stage_ms[idx(Stage::GL)] =
                        timed([&] { graph_load(snaps[t + 1], staged.write()); });
                });
            }
            group.run_here([&] {
                st[idx(Stage::NT)] = timed([&] {
                    res.outputs[t].out_embed = detail::node_transform_parallel(
                        msg, GcnWeights{weights.read(), model.gcn.b}, true, cfg.gnn_workers);
                });
            });
            group.wait();
        }
        if (!has_next)
            res.final_weight = weights.read();
        staged.flip();
        weights.flip();
        close_iter(t);
    }
    res.pingpong_violations = weights.violations() + staged.violations();
    res.total_ms = ms_between(t_run, Clock::now());
    return res;
}

struct StackedRnn {
    const StackedModel& model;
    const PipelineConfig& cfg;
    bool pipelined;
    std::map<std::string, std::size_t>& queue_items;

    // Runs the GRU for every node of `s` and returns the stage time. Node
    // state is read from `states` and the new hidden rows go to `h_next`.
    double operator()(const Snapshot& s, const EmbeddingMatrix& x, const NodeStateStore& states,
                      Matrix& h_next) const {
        const auto t0 = Clock::now();
        const std::size_t hidden = model.gru.hidden_dim();
        const Matrix h = gather_hidden(s, states, hidden);
        const double gather_ms = ms_between(t0, Clock::now());
        h_next = Matrix(s.n_nodes(), hidden);
        auto make = [&](std::size_t v) {
            RnnItem it;
            it.index = v;
            it.x.assign(x.row(v).begin(), x.row(v).end());
            it.h.assign(h.row(v).begin(), h.row(v).end());
            return it;
        };
        CounterSource source(s.n_nodes(), make);
        auto sink = [&h_next](const RnnItem& it, std::span<const float> hv, std::span<const float>) {
            std::copy(hv.begin(), hv.end(), h_next.row(it.index).begin());
        };
        detail::GruOps ops{&model.gru};
        const auto stats = detail::run_rnn(ops, cfg.rnn_workers, cfg.queue_depth, pipelined, source, sink);
        queue_items["rnn.gates->candidate"] += stats.gates_to_middle;
        queue_items["rnn.candidate->combine"] += stats.middle_to_finish;
        return gather_ms + stats.busy_ms / static_cast<double>(std::max<std::size_t>(cfg.rnn_workers, 1));
    }
};

RunResult v1_stacked(const ModelConfig& mc, std::span<const Snapshot> snaps, const WeightSet& w,
                     const PipelineConfig& cfg, RunResult res) {
    const auto model = StackedModel::from(w, mc.dims);
    const std::size_t T = snaps.size();
    const StackedRnn rnn{model, cfg, cfg.ablation != Ablation::Baseline, res.queue_items};
    const auto t_run = Clock::now();
    auto iter_start = t_run;
    auto close_iter = [&](std::size_t t) {
        const auto now = Clock::now();
        res.timing[t].latency_ms = ms_between(iter_start, now);
        res.timing[t].end_ms = ms_between(t_run, now);
        iter_start = now;
    };
    auto mp = [&](const StagedSnapshot& s) {
        return detail::message_pass_parallel(s.csr, s.embed, cfg.gnn_workers);
    };
    auto nt = [&](const EmbeddingMatrix& msg) {
        return detail::node_transform_parallel(msg, model.gnn, true, cfg.gnn_workers);
    };

    if (cfg.ablation != Ablation::O2) {
        StagedSnapshot staged;
        for (std::size_t t = 0; t < T; ++t) {
            auto& st = res.timing[t].stage_ms;
            EmbeddingMatrix msg, x;
            st[idx(Stage::GL)] = timed([&] { graph_load(snaps[t], staged); });
            st[idx(Stage::MP)] = timed([&] { msg = mp(staged); });
            st[idx(Stage::NT)] = timed([&] { x = nt(msg); });
            Matrix h_next;
            st[idx(Stage::RNN)] = rnn(snaps[t], x, res.final_states, h_next);
            commit_states(snaps[t], h_next, nullptr, res.final_states);
            res.outputs[t].out_embed = std::move(h_next);
            close_iter(t);
        }
        res.total_ms = ms_between(t_run, Clock::now());
        return res;
    }

    PingPongPair<StagedSnapshot> staged;
    PingPongPair<EmbeddingMatrix> gnn_out;
    if (T > 0) {
        auto& st0 = res.timing[0].stage_ms;
        st0[idx(Stage::GL)] = timed([&] { graph_load(snaps[0], staged.write()); });
        staged.flip();
        EmbeddingMatrix msg;
        st0[idx(Stage::MP)] = timed([&] { msg = mp(staged.read()); });
        TaskGroup group;
        if (T > 1) {
            group.spawn([&] {
                res.timing[1].stage_ms[idx(Stage::GL)] = timed([&] { graph_load(snaps[1], staged.write()); });
            });
        }
        group.run_here([&] { st0[idx(Stage::NT)] = timed([&] { gnn_out.write() = nt(msg); }); });
        group.wait();
        staged.flip();
        gnn_out.flip();
    }
    for (std::size_t t = 0; t < T; ++t) {
        const bool has_next = t + 1 < T;
        Matrix h_next;
        EmbeddingMatrix msg;
        {
            TaskGroup group;
            if (has_next) {
                group.spawn([&] {
                    res.timing[t + 1].stage_ms[idx(Stage::MP)] = timed([&] { msg = mp(staged.read()); });
                });
            }
            group.run_here([&] {
                res.timing[t].stage_ms[idx(Stage::RNN)] =
                    rnn(snaps[t], gnn_out.read(), res.final_states, h_next);
            });
            group.wait();
        }
        if (has_next) {
            TaskGroup group;
            if (t + 2 < T) {
                group.spawn([&] {
                    res.timing[t + 2].stage_ms[idx(Stage::GL)] =
                        timed([&] { graph_load(snaps[t + 2], staged.write()); });
                });
            }
            group.run_here(
                [&] { res.timing[t + 1].stage_ms[idx(Stage::NT)] = timed([&] { gnn_out.write() = nt(msg); }); });
            group.wait();
        }
        commit_states(snaps[t], h_next, nullptr, res.final_states);
        res.outputs[t].out_embed = std::move(h_next);
        staged.flip();
        gnn_out.flip();
        close_iter(t);
    }
    res.pingpong_violations = staged.violations() + gnn_out.violations();
    res.total_ms = ms_between(t_run, Clock::now());
    return res;
}

} // namespace

RunResult run_v1(const ModelConfig& mc, std::span<const Snapshot> snaps, const WeightSet& w,
                 const PipelineConfig& cfg) {
    if (!is_compatible(mc.kind, ExecutorKind::V1))
        fail(ErrorCode::IncompatibleExecutor, std::string(to_string(mc.kind)) + " cannot run on executor v1");
    cfg.check();
    RunResult res;
    res.model = mc.kind;
    res.config = cfg;
    res.outputs.resize(snaps.size());
    res.timing.resize(snaps.size());
    if (mc.kind == ModelKind::WeightsEvolved)
        return v1_evolvegcn(mc, snaps, w, cfg, std::move(res));
    return v1_stacked(mc, snaps, w, cfg, std::move(res));
}

} // namespace dgnn
