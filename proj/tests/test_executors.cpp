#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "dgnn/dataset.hpp"
#include "dgnn/executors.hpp"
#include "dgnn/preprocess.hpp"

using namespace dgnn;

namespace {

const ModelKind kKinds[] = {ModelKind::WeightsEvolved, ModelKind::Integrated, ModelKind::Stacked};
const Ablation kAblations[] = {Ablation::Baseline, Ablation::O1, Ablation::O2};

std::vector<Snapshot> synthetic(std::size_t snaps, std::size_t nodes, std::size_t edges, std::uint64_t seed,
                                std::size_t dim) {
    SyntheticSpec spec;
    spec.snapshots = snaps;
    spec.nodes = nodes;
    spec.edges = edges;
    spec.seed = seed;
    return preprocess(make_synthetic(spec), {static_cast<std::int64_t>(spec.window_seconds), true},
                      SeededFeatures(dim, seed));
}

PipelineConfig config(ExecutorKind e, Ablation a, std::size_t g, std::size_t r, std::size_t depth) {
    PipelineConfig c;
    c.executor = e;
    c.ablation = a;
    c.gnn_workers = g;
    c.rnn_workers = r;
    c.queue_depth = depth;
    return c;
}

struct Shape {
    std::size_t g, r, depth;
};
const Shape kShapes[] = {{1, 1, 1}, {2, 3, 4}, {4, 2, 64}};

} // namespace

TEST_CASE("every compatible executor matches sequential byte for byte") {
    const ModelDims d{8, 8};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto snaps = synthetic(6, 24, 60, seed, d.feature_dim);
        for (auto kind : kKinds) {
            ModelConfig mc{kind, d, false};
            auto w = init_weights(kind, d, seed + 10);
            auto ref = run_sequential(mc, snaps, w, {});
            for (auto exec : {ExecutorKind::V1, ExecutorKind::V2}) {
                if (!is_compatible(kind, exec))
                    continue;
                for (auto abl : kAblations)
                    for (auto sh : kShapes) {
                        auto cfg = config(exec, abl, sh.g, sh.r, sh.depth);
                        CAPTURE(to_string(kind));
                        CAPTURE(to_string(exec));
                        CAPTURE(to_string(abl));
                        CAPTURE(sh.depth);
                        auto got = run_sequence(mc, snaps, w, cfg);
                        CHECK(outputs_bitwise_equal(got, ref));
                        CHECK(output_digest(got) == output_digest(ref));
                        CHECK(got.pingpong_violations == 0);
                    }
            }
        }
    }
}

TEST_CASE("hidden feedback variant stays equivalent on v2") {
    const ModelDims d{6, 6};
    auto snaps = synthetic(5, 20, 50, 4, d.feature_dim);
    ModelConfig mc{ModelKind::Integrated, d, true};
    auto w = init_weights(ModelKind::Integrated, d, 2);
    auto ref = run_sequential(mc, snaps, w, {});
    ModelConfig plain = mc;
    plain.feed_hidden = false;
    CHECK_FALSE(outputs_bitwise_equal(ref, run_sequential(plain, snaps, w, {})));
    for (auto abl : kAblations)
        CHECK(outputs_bitwise_equal(run_sequence(mc, snaps, w, config(ExecutorKind::V2, abl, 2, 2, 1)), ref));
}

TEST_CASE("single-node snapshots move exactly one item per queue per snapshot") {
    std::vector<TemporalEdge> edges;
    for (int t = 0; t < 7; ++t)
        edges.push_back({3, 3, 1.0f, t * 10});
    auto snaps = preprocess(TemporalEdgeList(edges), {10, true}, SeededFeatures(4, 1));
    REQUIRE(snaps.size() == 7);
    for (auto kind : {ModelKind::Integrated, ModelKind::Stacked}) {
        auto res = run_sequence({kind, {4, 4}, false}, snaps, init_weights(kind, {4, 4}, 1),
                                config(ExecutorKind::V2, Ablation::O2, 2, 2, 1));
        CHECK_FALSE(res.queue_items.empty());
        for (const auto& [name, count] : res.queue_items) {
            CAPTURE(name);
            CHECK(count == 7);
        }
    }
}

TEST_CASE("weight evolution pipeline moves one item per column") {
    auto snaps = synthetic(4, 10, 20, 2, 5);
    auto res = run_sequence({ModelKind::WeightsEvolved, {5, 3}, false}, snaps,
                            init_weights(ModelKind::WeightsEvolved, {5, 3}, 1),
                            config(ExecutorKind::V1, Ablation::O1, 1, 2, 1));
    for (const auto& [name, count] : res.queue_items)
        CHECK(count == 4 * 3);
}

TEST_CASE("queue depth one completes on larger inputs") {
    const ModelDims d{16, 16};
    auto snaps = synthetic(10, 128, 512, 9, d.feature_dim);
    for (auto kind : kKinds) {
        auto w = init_weights(kind, d, 1);
        auto ref = run_sequential({kind, d, false}, snaps, w, {});
        const auto exec = kind == ModelKind::WeightsEvolved ? ExecutorKind::V1 : ExecutorKind::V2;
        auto got = run_sequence({kind, d, false}, snaps, w, config(exec, Ablation::O2, 3, 3, 1));
        CHECK(outputs_bitwise_equal(got, ref));
    }
}

TEST_CASE("timing structure and config echo") {
    auto snaps = synthetic(5, 16, 40, 1, 4);
    auto cfg = config(ExecutorKind::V2, Ablation::O1, 2, 3, 7);
    auto res = run_sequence({ModelKind::Stacked, {4, 4}, false}, snaps, init_weights(ModelKind::Stacked, {4, 4}, 1),
                            cfg);
    CHECK(res.model == ModelKind::Stacked);
    CHECK(res.config.executor == ExecutorKind::V2);
    CHECK(res.config.ablation == Ablation::O1);
    CHECK(res.config.gnn_workers == 2);
    CHECK(res.config.rnn_workers == 3);
    CHECK(res.config.queue_depth == 7);
    REQUIRE(res.timing.size() == 5);
    double prev_end = 0.0;
    for (const auto& t : res.timing) {
        CHECK(t.latency_ms >= 0.0);
        CHECK(t.end_ms >= prev_end);
        prev_end = t.end_ms;
        for (double s : t.stage_ms)
            CHECK(s >= 0.0);
    }
    CHECK(res.total_ms >= prev_end - 1e-9);

    auto rep = collect_timing(res);
    CHECK(rep.per_snapshot_ms.size() == 5);
    double sum = 0.0;
    for (double v : rep.per_snapshot_ms)
        sum += v;
    CHECK(rep.mean_ms == doctest::Approx(sum / 5));
}

TEST_CASE("empty snapshot sequence") {
    for (auto kind : kKinds) {
        const auto exec = kind == ModelKind::WeightsEvolved ? ExecutorKind::V1 : ExecutorKind::V2;
        auto res = run_sequence({kind, {4, 4}, false}, {}, init_weights(kind, {4, 4}, 1),
                                config(exec, Ablation::O2, 2, 2, 2));
        CHECK(res.outputs.empty());
        CHECK(res.timing.empty());
    }
}

TEST_CASE("bad pipeline configs are rejected") {
    auto snaps = synthetic(2, 8, 10, 1, 4);
    auto w = init_weights(ModelKind::Stacked, {4, 4}, 1);
    for (auto cfg : {config(ExecutorKind::V2, Ablation::O2, 0, 1, 1), config(ExecutorKind::V2, Ablation::O2, 1, 0, 1),
                     config(ExecutorKind::V2, Ablation::O2, 1, 1, 0)}) {
        try {
            run_sequence({ModelKind::Stacked, {4, 4}, false}, snaps, w, cfg);
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidArgument);
        }
    }
}

TEST_CASE("digest is stable across repeated runs") {
    auto snaps = synthetic(6, 30, 90, 5, 8);
    auto w = init_weights(ModelKind::Integrated, {8, 8}, 3);
    auto a = run_sequence({ModelKind::Integrated, {8, 8}, false}, snaps, w, config(ExecutorKind::V2, Ablation::O2, 2, 2, 2));
    for (int i = 0; i < 3; ++i) {
        auto b = run_sequence({ModelKind::Integrated, {8, 8}, false}, snaps, w,
                              config(ExecutorKind::V2, Ablation::O2, 2, 2, 2));
        CHECK(output_digest(a) == output_digest(b));
    }
}
