#ifndef DGNN_DGNN_H
#define DGNN_DGNN_H

/* C interface to the dynamic GNN inference engine.
 *
 * Every function returns a dgnn_status. On failure the calling thread's
 * dgnn_last_error() holds a message naming the cause. Handles are opaque and
 * must be released with the matching *_destroy function; destroy functions
 * accept NULL. Strings returned by the library stay valid until the owning
 * handle is destroyed. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DGNN_API __declspec(dllexport)
#else
#define DGNN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dgnn_status {
    DGNN_OK = 0,
    DGNN_ERR_ROW_PTR_NOT_MONOTONE = 1,
    DGNN_ERR_COL_IDX_OUT_OF_RANGE = 2,
    DGNN_ERR_COL_IDX_NOT_ASCENDING = 3,
    DGNN_ERR_RENUMBER_NOT_BIJECTIVE = 4,
    DGNN_ERR_EMBED_SHAPE_MISMATCH = 5,
    DGNN_ERR_NON_FINITE_VALUE = 6,
    DGNN_ERR_EMPTY_EDGE_LIST = 7,
    DGNN_ERR_ENDPOINT_NOT_IN_TABLE = 8,
    DGNN_ERR_SHAPE_MISMATCH = 9,
    DGNN_ERR_MISSING_TENSOR = 10,
    DGNN_ERR_INCOMPATIBLE_EXECUTOR = 11,
    DGNN_ERR_PARSE = 12,
    DGNN_ERR_MISSING_COLUMN = 13,
    DGNN_ERR_EMPTY_FILE = 14,
    DGNN_ERR_IO = 15,
    DGNN_ERR_BAD_MAGIC = 16,
    DGNN_ERR_VERSION_MISMATCH = 17,
    DGNN_ERR_TRUNCATED_FILE = 18,
    DGNN_ERR_SHAPE_OVERFLOW = 19,
    DGNN_ERR_TRAILING_DATA = 20,
    DGNN_ERR_DUPLICATE_TENSOR = 21,
    DGNN_ERR_INVALID_ARGUMENT = 22,
    DGNN_ERR_INTERNAL = 23
} dgnn_status;

typedef enum dgnn_operation {
    DGNN_OP_STATS = 0,
    DGNN_OP_BENCH = 1,
    DGNN_OP_CROSSCHECK = 2,
    DGNN_OP_SWEEP = 3
} dgnn_operation;

typedef struct dgnn_manifest dgnn_manifest;
typedef struct dgnn_report dgnn_report;
typedef struct dgnn_weights dgnn_weights;
typedef struct dgnn_sequence dgnn_sequence;
typedef struct dgnn_result dgnn_result;

DGNN_API const char* dgnn_version(void);
DGNN_API const char* dgnn_status_name(dgnn_status status);
/* Message of the last failed call on this thread, "" if none. */
DGNN_API const char* dgnn_last_error(void);

/* Run manifest. Keys (values are strings, as on the command line):
 *   dataset            file path or "synthetic[:snapshots=S,nodes=N,edges=E]"
 *   format             bitcoin | uci | collegemsg | csv:S,D,W,T[:DELIM[:header]]
 *   model              evolvegcn | gcrn-m2 | stacked
 *   executor           seq | v1 | v2
 *   ablation           baseline | o1 | o2
 *   splitter-seconds, feature-dim, hidden-dim, seed,
 *   gnn-workers, rnn-workers, queue-depth, repeats
 *   weights, oracle-weights   DGNW file paths ("" clears)
 *   splits             "G:R,G:R,..." worker pairs for sweep
 *   feed-hidden        0 | 1
 *   tolerance          crosscheck relative tolerance
 * Worker counts default to the hardware threads split evenly. */
DGNN_API dgnn_status dgnn_manifest_create(dgnn_manifest** out);
DGNN_API void dgnn_manifest_destroy(dgnn_manifest* m);
DGNN_API dgnn_status dgnn_manifest_set(dgnn_manifest* m, const char* key, const char* value);
/* Full consistency check (model/executor compatibility, positive sizes). */
DGNN_API dgnn_status dgnn_manifest_validate(const dgnn_manifest* m);

/* Runs one harness operation. A report is produced even when a crosscheck
 * fails; inspect dgnn_report_passed. */
DGNN_API dgnn_status dgnn_run(const dgnn_manifest* m, dgnn_operation op, dgnn_report** out);
DGNN_API void dgnn_report_destroy(dgnn_report* r);
DGNN_API const char* dgnn_report_json(const dgnn_report* r);
DGNN_API const char* dgnn_report_table(const dgnn_report* r);
DGNN_API int dgnn_report_passed(const dgnn_report* r);

/* Weight sets in the DGNW format. */
DGNN_API dgnn_status dgnn_weights_generate(const dgnn_manifest* m, dgnn_weights** out);
DGNN_API dgnn_status dgnn_weights_load(const char* path, dgnn_weights** out);
DGNN_API dgnn_status dgnn_weights_load_bytes(const uint8_t* data, size_t size, dgnn_weights** out);
DGNN_API dgnn_status dgnn_weights_save(const dgnn_weights* w, const char* path);
DGNN_API size_t dgnn_weights_count(const dgnn_weights* w);
DGNN_API void dgnn_weights_destroy(dgnn_weights* w);

/* Preprocessed snapshot sequence for the manifest's dataset. */
DGNN_API dgnn_status dgnn_sequence_prepare(const dgnn_manifest* m, dgnn_sequence** out);
DGNN_API void dgnn_sequence_destroy(dgnn_sequence* s);
DGNN_API size_t dgnn_sequence_length(const dgnn_sequence* s);
DGNN_API dgnn_status dgnn_sequence_snapshot_size(const dgnn_sequence* s, size_t index, size_t* nodes,
                                                 size_t* edges);

/* Runs the manifest's model and executor over the sequence. `w` may be NULL
 * for seeded weights. */
DGNN_API dgnn_status dgnn_sequence_run(const dgnn_sequence* s, const dgnn_manifest* m, const dgnn_weights* w,
                                       dgnn_result** out);
DGNN_API void dgnn_result_destroy(dgnn_result* r);
DGNN_API uint64_t dgnn_result_digest(const dgnn_result* r);
DGNN_API double dgnn_result_mean_latency_ms(const dgnn_result* r);
/* Row-major output embedding of snapshot `index`. */
DGNN_API dgnn_status dgnn_result_output(const dgnn_result* r, size_t index, const float** data, size_t* rows,
                                        size_t* cols);
/* 1 when both results hold byte-identical outputs and final state. */
DGNN_API int dgnn_result_equal(const dgnn_result* a, const dgnn_result* b);

#ifdef __cplusplus
}
#endif

#endif
