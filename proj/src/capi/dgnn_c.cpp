#include "dgnn/dgnn.h"

#include <charconv>
#include <cstring>
#include <memory>
#include <string>
#include <string_view>

#include "dgnn/harness.hpp"
#include "dgnn/weight_io.hpp"

struct dgnn_manifest {
    dgnn::RunManifest m;
};

struct dgnn_report {
    std::string json;
    std::string table;
    bool pass = true;
};

struct dgnn_weights {
    dgnn::WeightSet w;
};

struct dgnn_sequence {
    dgnn::Workload work;
};

struct dgnn_result {
    dgnn::RunResult run;
    double mean_ms = 0.0;
};

namespace {

thread_local std::string g_last_error;

dgnn_status to_status(dgnn::ErrorCode c) {
    // ErrorCode and dgnn_status share numbering
    return static_cast<dgnn_status>(static_cast<int>(c));
}

template <typename F>
dgnn_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return DGNN_OK;
    } catch (const dgnn::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return DGNN_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DGNN_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return DGNN_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p)
        dgnn::fail(dgnn::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
    T out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        dgnn::fail(dgnn::ErrorCode::InvalidArgument,
                   "invalid value '" + std::string(v) + "' for " + std::string(key));
    return out;
}

std::size_t parse_count(std::string_view key, std::string_view v) {
    const auto n = parse_number<std::size_t>(key, v);
    if (n == 0)
        dgnn::fail(dgnn::ErrorCode::InvalidArgument, std::string(key) + " must be at least 1");
    return n;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_splits(std::string_view v) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (v.empty())
        return out;
    for (std::size_t b = 0;;) {
        auto e = v.find(',', b);
        auto item = v.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b);
        auto colon = item.find(':');
        if (colon == std::string_view::npos)
            dgnn::fail(dgnn::ErrorCode::InvalidArgument, "split '" + std::string(item) + "' is not G:R");
        out.push_back({parse_count("splits", item.substr(0, colon)), parse_count("splits", item.substr(colon + 1))});
        if (e == std::string_view::npos)
            break;
        b = e + 1;
    }
    return out;
}

void set_key(dgnn::RunManifest& m, std::string_view key, std::string_view v) {
    using dgnn::ErrorCode;
    auto bad = [&](const char* allowed) {
        dgnn::fail(ErrorCode::InvalidArgument,
                   "invalid " + std::string(key) + " '" + std::string(v) + "' (expected " + allowed + ")");
    };
    if (key == "dataset") {
        m.dataset_label = std::string(v);
        if (v.substr(0, 9) == "synthetic") {
            auto s = dgnn::parse_synthetic(v);
            if (!s)
                bad("synthetic[:snapshots=S,nodes=N,edges=E,universe=U,window=W,seed=X]");
            m.dataset.synthetic = *s;
            m.dataset.path.clear();
        } else {
            m.dataset.synthetic.reset();
            m.dataset.path = std::string(v);
        }
    } else if (key == "format") {
        auto f = dgnn::parse_csv_format(v);
        if (!f)
            bad("bitcoin|uci|collegemsg|csv:S,D,W,T[:DELIM[:header]]");
        m.dataset.format = *f;
        m.dataset.format_name = v.substr(0, 4) == "csv:" ? "csv" : std::string(v);
    } else if (key == "model") {
        auto k = dgnn::parse_model_kind(v);
        if (!k)
            bad("evolvegcn|gcrn-m2|stacked");
        m.model.kind = *k;
    } else if (key == "executor") {
        auto e = dgnn::parse_executor(v);
        if (!e)
            bad("seq|v1|v2");
        m.pipeline.executor = *e;
    } else if (key == "ablation") {
        auto a = dgnn::parse_ablation(v);
        if (!a)
            bad("baseline|o1|o2");
        m.pipeline.ablation = *a;
    } else if (key == "splitter-seconds") {
        m.splitter_seconds = static_cast<std::int64_t>(parse_count(key, v));
    } else if (key == "feature-dim") {
        m.model.dims.feature_dim = parse_count(key, v);
    } else if (key == "hidden-dim") {
        m.model.dims.hidden_dim = parse_count(key, v);
    } else if (key == "seed") {
        m.pipeline.seed = parse_number<std::uint64_t>(key, v);
    } else if (key == "gnn-workers") {
        m.pipeline.gnn_workers = parse_count(key, v);
    } else if (key == "rnn-workers") {
        m.pipeline.rnn_workers = parse_count(key, v);
    } else if (key == "queue-depth") {
        m.pipeline.queue_depth = parse_count(key, v);
    } else if (key == "repeats") {
        m.repeats = parse_count(key, v);
    } else if (key == "weights") {
        m.weights_path = std::string(v);
    } else if (key == "oracle-weights") {
        m.oracle_weights_path = std::string(v);
    } else if (key == "splits") {
        m.splits = parse_splits(v);
    } else if (key == "feed-hidden") {
        if (v != "0" && v != "1")
            bad("0|1");
        m.model.feed_hidden = v == "1";
    } else if (key == "tolerance") {
        const auto t = parse_number<double>(key, v);
        if (!(t >= 0.0))
            bad("a non-negative number");
        m.tolerance = t;
    } else {
        dgnn::fail(ErrorCode::InvalidArgument, "unknown manifest key '" + std::string(key) + "'");
    }
}

} // namespace

extern "C" {

const char* dgnn_version(void) { return "1.0.0"; }

const char* dgnn_status_name(dgnn_status status) {
    if (status < DGNN_OK || status > DGNN_ERR_INTERNAL)
        return "Unknown";
    return dgnn::to_string(static_cast<dgnn::ErrorCode>(status)).data();
}

const char* dgnn_last_error(void) { return g_last_error.c_str(); }

dgnn_status dgnn_manifest_create(dgnn_manifest** out) {
    return guarded([&] {
        need(out, "out");
        auto m = std::make_unique<dgnn_manifest>();
        auto [g, r] = dgnn::default_worker_split();
        m->m.pipeline.gnn_workers = g;
        m->m.pipeline.rnn_workers = r;
        *out = m.release();
    });
}

void dgnn_manifest_destroy(dgnn_manifest* m) { delete m; }

dgnn_status dgnn_manifest_set(dgnn_manifest* m, const char* key, const char* value) {
    return guarded([&] {
        need(m, "manifest");
        need(key, "key");
        need(value, "value");
        set_key(m->m, key, value);
    });
}

dgnn_status dgnn_manifest_validate(const dgnn_manifest* m) {
    return guarded([&] {
        need(m, "manifest");
        m->m.check();
    });
}

dgnn_status dgnn_run(const dgnn_manifest* m, dgnn_operation op, dgnn_report** out) {
    return guarded([&] {
        need(m, "manifest");
        need(out, "out");
        dgnn::Report rep;
        switch (op) {
        case DGNN_OP_STATS: rep = dgnn::run_stats(m->m); break;
        case DGNN_OP_BENCH: rep = dgnn::run_bench(m->m); break;
        case DGNN_OP_CROSSCHECK: rep = dgnn::run_crosscheck(m->m); break;
        case DGNN_OP_SWEEP: rep = dgnn::run_sweep(m->m); break;
        default: dgnn::fail(dgnn::ErrorCode::InvalidArgument, "unknown operation");
        }
        auto r = std::make_unique<dgnn_report>();
        r->json = rep.json.dump(2);
        r->table = std::move(rep.table);
        r->pass = rep.pass;
        *out = r.release();
    });
}

void dgnn_report_destroy(dgnn_report* r) { delete r; }
const char* dgnn_report_json(const dgnn_report* r) { return r ? r->json.c_str() : ""; }
const char* dgnn_report_table(const dgnn_report* r) { return r ? r->table.c_str() : ""; }
int dgnn_report_passed(const dgnn_report* r) { return r && r->pass ? 1 : 0; }

dgnn_status dgnn_weights_generate(const dgnn_manifest* m, dgnn_weights** out) {
    return guarded([&] {
        need(m, "manifest");
        need(out, "out");
        auto w = std::make_unique<dgnn_weights>();
        w->w = dgnn::init_weights(m->m.model.kind, m->m.model.dims, m->m.pipeline.seed);
        *out = w.release();
    });
}

dgnn_status dgnn_weights_load(const char* path, dgnn_weights** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        auto w = std::make_unique<dgnn_weights>();
        w->w = dgnn::load_weights(path);
        *out = w.release();
    });
}

dgnn_status dgnn_weights_load_bytes(const uint8_t* data, size_t size, dgnn_weights** out) {
    return guarded([&] {
        if (size > 0)
            need(data, "data");
        need(out, "out");
        auto w = std::make_unique<dgnn_weights>();
        w->w = dgnn::deserialize_weights({data, size});
        *out = w.release();
    });
}

dgnn_status dgnn_weights_save(const dgnn_weights* w, const char* path) {
    return guarded([&] {
        need(w, "weights");
        need(path, "path");
        dgnn::save_weights(w->w, path);
    });
}

size_t dgnn_weights_count(const dgnn_weights* w) { return w ? w->w.size() : 0; }
void dgnn_weights_destroy(dgnn_weights* w) { delete w; }

dgnn_status dgnn_sequence_prepare(const dgnn_manifest* m, dgnn_sequence** out) {
    return guarded([&] {
        need(m, "manifest");
        need(out, "out");
        auto s = std::make_unique<dgnn_sequence>();
        s->work = dgnn::prepare_workload(m->m);
        *out = s.release();
    });
}

void dgnn_sequence_destroy(dgnn_sequence* s) { delete s; }
size_t dgnn_sequence_length(const dgnn_sequence* s) { return s ? s->work.snapshots.size() : 0; }

dgnn_status dgnn_sequence_snapshot_size(const dgnn_sequence* s, size_t index, size_t* nodes, size_t* edges) {
    return guarded([&] {
        need(s, "sequence");
        if (index >= s->work.snapshots.size())
            dgnn::fail(dgnn::ErrorCode::InvalidArgument, "snapshot index out of range");
        if (nodes)
            *nodes = s->work.snapshots[index].n_nodes();
        if (edges)
            *edges = s->work.snapshots[index].n_edges();
    });
}

dgnn_status dgnn_sequence_run(const dgnn_sequence* s, const dgnn_manifest* m, const dgnn_weights* w,
                              dgnn_result** out) {
    return guarded([&] {
        need(s, "sequence");
        need(m, "manifest");
        need(out, "out");
        m->m.check();
        auto r = std::make_unique<dgnn_result>();
        const auto weights =
            w ? w->w : dgnn::resolve_weights(m->m, m->m.weights_path);
        dgnn::check_weights(m->m.model.kind, weights, m->m.model.dims);
        r->run = dgnn::run_sequence(m->m.model, s->work.snapshots, weights, m->m.pipeline);
        r->mean_ms = dgnn::collect_timing(r->run).mean_ms;
        *out = r.release();
    });
}

void dgnn_result_destroy(dgnn_result* r) { delete r; }
uint64_t dgnn_result_digest(const dgnn_result* r) { return r ? dgnn::output_digest(r->run) : 0; }
double dgnn_result_mean_latency_ms(const dgnn_result* r) { return r ? r->mean_ms : 0.0; }

dgnn_status dgnn_result_output(const dgnn_result* r, size_t index, const float** data, size_t* rows,
                               size_t* cols) {
    return guarded([&] {
        need(r, "result");
        need(data, "data");
        if (index >= r->run.outputs.size())
            dgnn::fail(dgnn::ErrorCode::InvalidArgument, "snapshot index out of range");
        const auto& o = r->run.outputs[index].out_embed;
        *data = o.data().data();
        if (rows)
            *rows = o.rows();
        if (cols)
            *cols = o.cols();
    });
}

int dgnn_result_equal(const dgnn_result* a, const dgnn_result* b) {
    if (!a || !b)
        return 0;
    return dgnn::outputs_bitwise_equal(a->run, b->run) ? 1 : 0;
}

} // extern "C"
