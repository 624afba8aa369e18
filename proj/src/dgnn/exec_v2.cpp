// V2: node-level streaming inside one timestep. GNN workers run message
// passing and node transformation per node and push the result into a node
// queue; RNN lanes pop nodes in FIFO order and run the recurrent cell. For
// GCRN-M2 the two GCN outputs travel in separate queues and are joined by
// local index before the LSTM. Node state is committed at the timestep
// barrier.

#include <unordered_map>

#include "dgnn/exec_detail.hpp"
#include "dgnn/executors.hpp"

namespace dgnn {

using detail::Clock;
using detail::CounterSource;
using detail::idx;
using detail::ms_between;
using detail::RnnItem;
using detail::TaskGroup;
using detail::timed;

namespace {

struct NodeRow {
    std::size_t v = 0;
    std::vector<float> row;
};

using NodeQueue = BoundedQueue<NodeRow>;

/// Pairs X1[v] and X2[v] arriving on two queues in any relative order.
class JoinSource {
public:
    JoinSource(NodeQueue& q1, NodeQueue& q2, const Matrix& h, const Matrix& c) : q1_(q1), q2_(q2), h_(h), c_(c) {}

    std::optional<RnnItem> operator()() {
        for (;;) {
            {
                std::lock_guard lock(mutex_);
                if (!ready_.empty()) {
                    RnnItem it = std::move(ready_.back());
                    ready_.pop_back();
                    return it;
                }
            }
            auto a = q1_.pop();
            auto b = q2_.pop();
            std::lock_guard lock(mutex_);
            if (!a && !b) {
                if (ready_.empty())
                    return std::nullopt;
                continue;
            }
            if (a)
                offer(std::move(*a), first_, second_, true);
            if (b)
                offer(std::move(*b), second_, first_, false);
        }
    }

private:
    void offer(NodeRow r, std::unordered_map<std::size_t, std::vector<float>>& mine,
               std::unordered_map<std::size_t, std::vector<float>>& other, bool is_first) {
        auto it = other.find(r.v);
        if (it == other.end()) {
            mine.emplace(r.v, std::move(r.row));
            return;
        }
        RnnItem item;
        item.index = r.v;
        item.x = is_first ? concat(r.row, it->second) : concat(it->second, r.row);
        item.h.assign(h_.row(r.v).begin(), h_.row(r.v).end());
        item.c.assign(c_.row(r.v).begin(), c_.row(r.v).end());
        other.erase(it);
        ready_.push_back(std::move(item));
    }

    NodeQueue& q1_;
    NodeQueue& q2_;
    const Matrix& h_;
    const Matrix& c_;
    std::mutex mutex_;
    std::unordered_map<std::size_t, std::vector<float>> first_, second_;
    std::vector<RnnItem> ready_;
};

struct StageBusy {
    std::mutex mutex;
    double mp = 0.0, nt = 0.0;
    void add(double m, double n) {
        std::lock_guard lock(mutex);
        mp += m;
        nt += n;
    }
};

RunResult v2_run(const ModelConfig& mc, std::span<const Snapshot> snaps, const WeightSet& w,
                 const PipelineConfig& cfg) {
    const bool integrated = mc.kind == ModelKind::Integrated;
    GcrnM2Model gcrn;
    StackedModel stacked;
    if (integrated) {
        gcrn = GcrnM2Model::from(w, mc.dims);
        gcrn.feed_hidden = mc.feed_hidden;
    } else {
        stacked = StackedModel::from(w, mc.dims);
    }
    const std::size_t hidden = mc.dims.hidden_dim;
    const bool pipelined = cfg.ablation != Ablation::Baseline;
    const bool streaming = cfg.ablation == Ablation::O2;
    const auto gnn_workers = std::max<std::size_t>(cfg.gnn_workers, 1);
    const auto rnn_lanes = static_cast<double>(std::max<std::size_t>(cfg.rnn_workers, 1));

    RunResult res;
    res.model = mc.kind;
    res.config = cfg;
    res.outputs.resize(snaps.size());
    res.timing.resize(snaps.size());
    StagedSnapshot staged;
    const auto t_run = Clock::now();

    for (std::size_t t = 0; t < snaps.size(); ++t) {
        const auto t0 = Clock::now();
        const Snapshot& s = snaps[t];
        const std::size_t n = s.n_nodes();
        auto& st = res.timing[t].stage_ms;

        st[idx(Stage::GL)] = timed([&] {
            graph_load(s, staged);
            if (integrated && gcrn.feed_hidden)
                apply_hidden_feedback(staged, res.final_states);
        });

        Matrix h, c, h_next(n, hidden), c_next;
        const double gather_ms = timed([&] {
            h = gather_hidden(s, res.final_states, hidden);
            if (integrated) {
                c = gather_cell(s, res.final_states, hidden);
                c_next = Matrix(n, hidden);
            }
        });
        auto sink = [&](const RnnItem& it, std::span<const float> hv, std::span<const float> cv) {
            std::copy(hv.begin(), hv.end(), h_next.row(it.index).begin());
            if (integrated)
                std::copy(cv.begin(), cv.end(), c_next.row(it.index).begin());
        };
        auto run_cell = [&](auto& source, const std::function<void()>& abort) {
            detail::RnnStats stats;
            if (integrated)
                stats = detail::run_rnn(detail::LstmOps{&gcrn.lstm}, cfg.rnn_workers, cfg.queue_depth, pipelined,
                                        source, sink, abort);
            else
                stats = detail::run_rnn(detail::GruOps{&stacked.gru}, cfg.rnn_workers, cfg.queue_depth, pipelined,
                                        source, sink, abort);
            res.queue_items[integrated ? "rnn.gates->update" : "rnn.gates->candidate"] += stats.gates_to_middle;
            res.queue_items[integrated ? "rnn.update->output" : "rnn.candidate->combine"] += stats.middle_to_finish;
            return stats.busy_ms / rnn_lanes;
        };

        if (!streaming) {
            EmbeddingMatrix msg, x1, x2;
            st[idx(Stage::MP)] =
                timed([&] { msg = detail::message_pass_parallel(staged.csr, staged.embed, cfg.gnn_workers); });
            st[idx(Stage::NT)] = timed([&] {
                if (integrated) {
                    x1 = detail::node_transform_parallel(msg, gcrn.gnn1, true, cfg.gnn_workers);
                    x2 = detail::node_transform_parallel(msg, gcrn.gnn2, true, cfg.gnn_workers);
                } else {
                    x1 = detail::node_transform_parallel(msg, stacked.gnn, true, cfg.gnn_workers);
                }
            });
            auto make = [&](std::size_t v) {
                RnnItem it;
                it.index = v;
                it.x = integrated ? concat(x1.row(v), x2.row(v)) : std::vector<float>(x1.row(v).begin(), x1.row(v).end());
                it.h.assign(h.row(v).begin(), h.row(v).end());
                if (integrated)
                    it.c.assign(c.row(v).begin(), c.row(v).end());
                return it;
            };
            CounterSource source(n, make);
            st[idx(Stage::RNN)] = gather_ms + run_cell(source, {});
        } else {
            NodeQueue q1(cfg.queue_depth), q2(cfg.queue_depth);
            auto close_all = [&] {
                q1.close();
                q2.close();
            };
            std::atomic<std::size_t> next_node{0};
            std::atomic<std::size_t> producers_left{gnn_workers};
            StageBusy busy;

            TaskGroup gnn(close_all);
            for (std::size_t wk = 0; wk < gnn_workers; ++wk) {
                gnn.spawn([&] {
                    double mp_ms = 0.0, nt_ms = 0.0;
                    std::vector<float> msg(staged.embed.cols());
                    for (;;) {
                        const std::size_t v = next_node.fetch_add(1, std::memory_order_relaxed);
                        if (v >= n)
                            break;
                        auto ta = Clock::now();
                        message_pass_row(staged.csr, staged.embed, static_cast<LocalId>(v), msg);
                        auto tb = Clock::now();
                        NodeRow r1{v, std::vector<float>(hidden)};
                        NodeRow r2;
                        if (integrated) {
                            node_transform_row(msg, gcrn.gnn1, true, r1.row);
                            r2 = NodeRow{v, std::vector<float>(hidden)};
                            node_transform_row(msg, gcrn.gnn2, true, r2.row);
                        } else {
                            node_transform_row(msg, stacked.gnn, true, r1.row);
                        }
                        auto tc = Clock::now();
                        mp_ms += ms_between(ta, tb);
                        nt_ms += ms_between(tb, tc);
                        if (!q1.push(std::move(r1)))
                            break;
                        if (integrated && !q2.push(std::move(r2)))
                            break;
                    }
                    busy.add(mp_ms, nt_ms);
                    if (producers_left.fetch_sub(1) == 1)
                        close_all();
                });
            }

            double rnn_ms = 0.0;
            try {
                if (integrated) {
                    JoinSource source(q1, q2, h, c);
                    rnn_ms = run_cell(source, close_all);
                } else {
                    auto source = [&]() -> std::optional<RnnItem> {
                        auto r = q1.pop();
                        if (!r)
                            return std::nullopt;
                        RnnItem it;
                        it.index = r->v;
                        it.x = std::move(r->row);
                        it.h.assign(h.row(it.index).begin(), h.row(it.index).end());
                        return it;
                    };
                    rnn_ms = run_cell(source, close_all);
                }
            } catch (...) {
                close_all();
                throw;
            }
            gnn.wait();

            res.queue_items[integrated ? "gnn1->rnn" : "gnn->rnn"] += q1.pushed();
            if (integrated)
                res.queue_items["gnn2->rnn"] += q2.pushed();
            st[idx(Stage::MP)] = busy.mp / static_cast<double>(gnn_workers);
            st[idx(Stage::NT)] = busy.nt / static_cast<double>(gnn_workers);
            st[idx(Stage::RNN)] = gather_ms + rnn_ms;
        }

        commit_states(s, h_next, integrated ? &c_next : nullptr, res.final_states);
        res.outputs[t].out_embed = std::move(h_next);
        const auto now = Clock::now();
        res.timing[t].latency_ms = ms_between(t0, now);
        res.timing[t].end_ms = ms_between(t_run, now);
    }
    res.total_ms = ms_between(t_run, Clock::now());
    return res;
}

} // namespace

RunResult run_v2(const ModelConfig& mc, std::span<const Snapshot> snaps, const WeightSet& w,
                 const PipelineConfig& cfg) {
    if (!is_compatible(mc.kind, ExecutorKind::V2))
        fail(ErrorCode::IncompatibleExecutor, std::string(to_string(mc.kind)) + " cannot run on executor v2");
    cfg.check();
    return v2_run(mc, snaps, w, cfg);
}

} // namespace dgnn
