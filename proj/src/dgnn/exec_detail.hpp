#pragma once

// Threading helpers shared by the executors. Not part of the public surface.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "dgnn/bounded_queue.hpp"
#include "dgnn/executors.hpp"
#include "dgnn/kernels.hpp"

namespace dgnn::detail {

using Clock = std::chrono::steady_clock;

inline double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

template <typename F>
double timed(F&& f) {
    const auto t0 = Clock::now();
    f();
    return ms_between(t0, Clock::now());
}

inline std::size_t idx(Stage s) { return static_cast<std::size_t>(s); }

/// Joins every spawned thread before returning from wait() and rethrows the
/// first exception any task raised. `on_error` runs once per failing task so
/// blocked peers can be released (typically by closing queues).
class TaskGroup {
public:
    explicit TaskGroup(std::function<void()> on_error = {}) : on_error_(std::move(on_error)) {}
    TaskGroup(const TaskGroup&) = delete;
    TaskGroup& operator=(const TaskGroup&) = delete;
    ~TaskGroup() { join_all(); }

    template <typename F>
    void spawn(F f) {
        threads_.emplace_back([this, f = std::move(f)]() mutable { guarded(f); });
    }

    template <typename F>
    void run_here(F&& f) {
        guarded(f);
    }

    void wait() {
        join_all();
        if (error_)
            std::rethrow_exception(std::exchange(error_, nullptr));
    }

private:
    template <typename F>
    void guarded(F& f) {
        try {
            f();
        } catch (...) {
            {
                std::lock_guard lock(mutex_);
                if (!error_)
                    error_ = std::current_exception();
            }
            if (on_error_)
                on_error_();
        }
    }

    void join_all() {
        for (auto& t : threads_)
            if (t.joinable())
                t.join();
        threads_.clear();
    }

    std::function<void()> on_error_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::exception_ptr error_;
};

/// Static contiguous partition of [0, n) over `workers` threads; the calling
/// thread takes the first chunk.
template <typename F>
void parallel_for(std::size_t workers, std::size_t n, F&& body) {
    if (workers <= 1 || n < 2) {
        body(std::size_t{0}, n);
        return;
    }
    workers = std::min(workers, n);
    TaskGroup group;
    for (std::size_t w = 1; w < workers; ++w)
        group.spawn([&body, w, workers, n] { body(n * w / workers, n * (w + 1) / workers); });
    group.run_here([&] { body(std::size_t{0}, n / workers); });
    group.wait();
}

inline EmbeddingMatrix message_pass_parallel(const CsrGraph& g, const EmbeddingMatrix& h, std::size_t workers) {
    if (h.rows() != g.n_nodes)
        fail(ErrorCode::ShapeMismatch, "message_pass: embedding rows != n_nodes");
    EmbeddingMatrix m(g.n_nodes, h.cols());
    parallel_for(workers, g.n_nodes, [&](std::size_t b, std::size_t e) {
        for (std::size_t v = b; v < e; ++v)
            message_pass_row(g, h, static_cast<LocalId>(v), m.row(v));
    });
    return m;
}

inline EmbeddingMatrix node_transform_parallel(const EmbeddingMatrix& m, const GcnWeights& w, bool activate,
                                               std::size_t workers) {
    if (m.cols() != w.in_dim())
        fail(ErrorCode::ShapeMismatch, "node_transform: input width != weight rows");
    EmbeddingMatrix out(m.rows(), w.out_dim());
    parallel_for(workers, m.rows(), [&](std::size_t b, std::size_t e) {
        for (std::size_t v = b; v < e; ++v)
            node_transform_row(m.row(v), w, activate, out.row(v));
    });
    return out;
}

/// One unit of recurrent work: a node (x = GNN output, h/c = its state) or a
/// weight column (x = h = the column).
struct RnnItem {
    std::size_t index = 0;
    std::vector<float> x, h, c;
};

struct GruOps {
    const GruParams* p;
    using Partial = GruPartial;
    void gates(const RnnItem& it, Partial& st) const { gru_gates(it.x, it.h, *p, st); }
    void middle(const RnnItem& it, Partial& st) const { gru_candidate(it.h, *p, st); }
    void finish(const RnnItem& it, const Partial& st, std::span<float> h_out, std::span<float>) const {
        gru_combine(it.h, st, h_out);
    }
    std::size_t hidden() const { return p->hidden_dim(); }
};

struct LstmOps {
    const LstmParams* p;
    using Partial = LstmPartial;
    void gates(const RnnItem& it, Partial& st) const { lstm_gates(it.x, it.h, *p, st); }
    void middle(const RnnItem& it, Partial& st) const { lstm_update(it.c, st); }
    void finish(const RnnItem&, const Partial& st, std::span<float> h_out, std::span<float> c_out) const {
        lstm_output(st, h_out, c_out);
    }
    std::size_t hidden() const { return p->hidden_dim(); }
};

struct RnnStats {
    double busy_ms = 0.0;          // summed over all recurrent threads
    std::size_t gates_to_middle = 0;
    std::size_t middle_to_finish = 0;
};

/// Runs the recurrent cell over every item `source` yields. `lanes` copies
/// run in parallel; with `pipelined` each lane is three threads joined by
/// bounded FIFOs (gates -> middle -> finish), otherwise one thread does all
/// three sub-stages per item. `sink(item, h, c)` receives finished results
/// and must tolerate concurrent calls for distinct items. `abort` is invoked
/// if any lane fails so upstream producers can be released.
template <typename Ops, typename Source, typename Sink>
RnnStats run_rnn(const Ops& ops, std::size_t lanes, std::size_t depth, bool pipelined, Source& source, Sink& sink,
                 const std::function<void()>& abort = {}) {
    using Partial = typename Ops::Partial;
    struct Work {
        RnnItem item;
        Partial st;
    };

    RnnStats stats;
    std::mutex stats_mutex;
    auto add_busy = [&](double ms) {
        std::lock_guard lock(stats_mutex);
        stats.busy_ms += ms;
    };
    const std::size_t hidden = ops.hidden();
    lanes = std::max<std::size_t>(lanes, 1);

    if (!pipelined) {
        TaskGroup group([&] { if (abort) abort(); });
        auto lane = [&] {
            double busy = 0.0;
            std::vector<float> h_out(hidden), c_out(hidden);
            while (auto it = source()) {
                const auto t0 = Clock::now();
                Partial st;
                ops.gates(*it, st);
                ops.middle(*it, st);
                ops.finish(*it, st, h_out, c_out);
                sink(*it, h_out, c_out);
                busy += ms_between(t0, Clock::now());
            }
            add_busy(busy);
        };
        for (std::size_t l = 1; l < lanes; ++l)
            group.spawn(lane);
        group.run_here(lane);
        group.wait();
        return stats;
    }

    std::vector<std::unique_ptr<BoundedQueue<Work>>> q_mid, q_fin;
    for (std::size_t l = 0; l < lanes; ++l) {
        q_mid.push_back(std::make_unique<BoundedQueue<Work>>(depth));
        q_fin.push_back(std::make_unique<BoundedQueue<Work>>(depth));
    }
    TaskGroup group([&] {
        for (auto& q : q_mid)
            q->close();
        for (auto& q : q_fin)
            q->close();
        if (abort)
            abort();
    });
    for (std::size_t l = 0; l < lanes; ++l) {
        auto& qm = *q_mid[l];
        auto& qf = *q_fin[l];
        group.spawn([&] {
            double busy = 0.0;
            while (auto it = source()) {
                const auto t0 = Clock::now();
                Work w{std::move(*it), {}};
                ops.gates(w.item, w.st);
                busy += ms_between(t0, Clock::now());
                if (!qm.push(std::move(w)))
                    break;
            }
            qm.close();
            add_busy(busy);
        });
        group.spawn([&] {
            double busy = 0.0;
            while (auto w = qm.pop()) {
                const auto t0 = Clock::now();
                ops.middle(w->item, w->st);
                busy += ms_between(t0, Clock::now());
                if (!qf.push(std::move(*w)))
                    break;
            }
            qf.close();
            add_busy(busy);
        });
        group.spawn([&] {
            double busy = 0.0;
            std::vector<float> h_out(hidden), c_out(hidden);
            while (auto w = qf.pop()) {
                const auto t0 = Clock::now();
                ops.finish(w->item, w->st, h_out, c_out);
                sink(w->item, h_out, c_out);
                busy += ms_between(t0, Clock::now());
            }
            add_busy(busy);
        });
    }
    group.wait();
    for (std::size_t l = 0; l < lanes; ++l) {
        stats.gates_to_middle += q_mid[l]->pushed();
        stats.middle_to_finish += q_fin[l]->pushed();
    }
    return stats;
}

/// Source handing out 0..n-1 once each, safe for concurrent callers.
template <typename Make>
class CounterSource {
public:
    CounterSource(std::size_t n, Make make) : n_(n), make_(std::move(make)) {}
    std::optional<RnnItem> operator()() {
        const std::size_t i = next_.fetch_add(1, std::memory_order_relaxed);
        if (i >= n_)
            return std::nullopt;
        return make_(i);
    }

private:
    std::size_t n_;
    Make make_;
    std::atomic<std::size_t> next_{0};
};

} // namespace dgnn::detail
