// Command-line driver. Talks to the engine only through the C API.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "dgnn/dgnn.h"

namespace {

constexpr int kExitFailedCheck = 1;
constexpr int kExitError = 2;

int report_error() {
    std::cerr << "error: " << dgnn_last_error() << "\n";
    return kExitError;
}

struct ManifestHandle {
    dgnn_manifest* m = nullptr;
    ~ManifestHandle() { dgnn_manifest_destroy(m); }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming inference for discrete-time dynamic GNNs"};
    app.require_subcommand(1);
    app.fallthrough();

    // Only flags the user gave are forwarded; the library owns the defaults.
    std::map<std::string, std::string> values;
    auto opt = [&](const char* flag, const char* key, const char* help) {
        app.add_option_function<std::string>(flag, [&values, key](const std::string& v) { values[key] = v; }, help);
    };
    opt("--dataset", "dataset", "CSV path or synthetic[:snapshots=S,nodes=N,edges=E]");
    opt("--format", "format", "bitcoin | uci | collegemsg | csv:S,D,W,T[:DELIM[:header]]");
    opt("--model", "model", "evolvegcn | gcrn-m2 | stacked");
    opt("--executor", "executor", "seq | v1 | v2");
    opt("--ablation", "ablation", "baseline | o1 | o2");
    opt("--splitter-seconds", "splitter-seconds", "snapshot window width in seconds");
    opt("--feature-dim", "feature-dim", "input feature width F (default 32)");
    opt("--hidden-dim", "hidden-dim", "hidden width H (default 32)");
    opt("--seed", "seed", "seed for features and generated weights (default 1)");
    opt("--gnn-workers", "gnn-workers", "GNN worker threads");
    opt("--rnn-workers", "rnn-workers", "RNN lanes");
    opt("--queue-depth", "queue-depth", "bounded queue capacity (default 64)");
    opt("--weights", "weights", "DGNW weight file (default: seeded weights)");
    opt("--feed-hidden", "feed-hidden", "gcrn-m2: feed stored hidden state back as input (0|1)");

    std::string report = "table";
    std::string json_out;
    app.add_option("--report", report, "report format")->check(CLI::IsMember({"json", "table"}));
    app.add_option("--json-out", json_out, "also write the JSON report to this file");

    auto* bench = app.add_subcommand("bench", "preprocess and time one executor run");
    auto* cross = app.add_subcommand("crosscheck", "compare pipelined, sequential and dense reference outputs");
    cross->add_option_function<std::string>(
        "--oracle-weights", [&values](const std::string& v) { values["oracle-weights"] = v; },
        "weights for the dense reference (default: same as --weights)");
    cross->add_option_function<std::string>(
        "--tolerance", [&values](const std::string& v) { values["tolerance"] = v; },
        "relative tolerance against the reference (default 1e-5)");
    auto* sweep = app.add_subcommand("sweep", "run baseline, o1 and o2 and compare latency");
    sweep->add_option_function<std::string>(
        "--repeats", [&values](const std::string& v) { values["repeats"] = v; }, "timed runs per level (default 5)");
    sweep->add_option_function<std::string>(
        "--splits", [&values](const std::string& v) { values["splits"] = v; }, "worker pairs, e.g. 1:3,2:2");
    auto* stats = app.add_subcommand("stats", "dataset statistics only");
    auto* gen = app.add_subcommand("gen-weights", "write seeded weights for the model");
    std::string gen_out;
    gen->add_option("--out", gen_out, "output DGNW file")->required();

    CLI11_PARSE(app, argc, argv);

    ManifestHandle mh;
    if (auto st = dgnn_manifest_create(&mh.m); st != DGNN_OK)
        return report_error();
    // format first so a dataset default window follows it
    if (auto it = values.find("format"); it != values.end())
        if (auto st = dgnn_manifest_set(mh.m, "format", it->second.c_str()); st != DGNN_OK)
            return report_error();
    for (const auto& [k, v] : values) {
        if (k == "format")
            continue;
        if (auto st = dgnn_manifest_set(mh.m, k.c_str(), v.c_str()); st != DGNN_OK)
            return report_error();
    }

    if (gen->parsed()) {
        dgnn_weights* w = nullptr;
        if (auto st = dgnn_weights_generate(mh.m, &w); st != DGNN_OK)
            return report_error();
        const auto st = dgnn_weights_save(w, gen_out.c_str());
        const auto count = dgnn_weights_count(w);
        dgnn_weights_destroy(w);
        if (st != DGNN_OK)
            return report_error();
        std::cout << "wrote " << count << " tensors to " << gen_out << "\n";
        return 0;
    }

    if (!values.count("dataset")) {
        std::cerr << "error: --dataset is required\n";
        return kExitError;
    }

    dgnn_operation op = DGNN_OP_BENCH;
    if (cross->parsed())
        op = DGNN_OP_CROSSCHECK;
    else if (sweep->parsed())
        op = DGNN_OP_SWEEP;
    else if (stats->parsed())
        op = DGNN_OP_STATS;
    (void)bench;

    dgnn_report* rep = nullptr;
    if (auto st = dgnn_run(mh.m, op, &rep); st != DGNN_OK)
        return report_error();
    std::cout << (report == "json" ? dgnn_report_json(rep) : dgnn_report_table(rep));
    if (report == "json")
        std::cout << "\n";
    if (!json_out.empty()) {
        std::ofstream f(json_out);
        f << dgnn_report_json(rep) << "\n";
        if (!f) {
            std::cerr << "error: cannot write " << json_out << "\n";
            dgnn_report_destroy(rep);
            return kExitError;
        }
    }
    const bool passed = dgnn_report_passed(rep) != 0;
    dgnn_report_destroy(rep);
    return passed ? 0 : kExitFailedCheck;
}
