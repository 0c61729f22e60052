/*
 * streamgnn — incremental inference for min/max-aggregation GNNs on
 * streaming graphs.
 *
 * C API over the engine. All objects are opaque handles created and destroyed
 * through these functions; every fallible call returns an sgnn_status, with a
 * human-readable message available from sgnn_last_error() (thread-local).
 */
#ifndef STREAMGNN_H
#define STREAMGNN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgnn_status {
  SGNN_OK = 0,
  SGNN_ERR_IO = 1,
  SGNN_ERR_FORMAT = 2,
  SGNN_ERR_DIMENSION = 3,
  SGNN_ERR_DUPLICATE_EDGE = 4,
  SGNN_ERR_MISSING_EDGE = 5,
  SGNN_ERR_UNSUPPORTED_MODEL = 6,
  SGNN_ERR_INVALID_ARGUMENT = 7,
  SGNN_ERR_STALE_DELTA = 8,
  SGNN_ERR_CONTRACT = 9,
  SGNN_ERR_NAN_INPUT = 10,
  SGNN_ERR_VERIFY_MISMATCH = 11,
  SGNN_ERR_UNKNOWN = 12
} sgnn_status;

typedef struct sgnn_graph sgnn_graph;
typedef struct sgnn_model sgnn_model;
typedef struct sgnn_engine sgnn_engine;
typedef struct sgnn_stream_reader sgnn_stream_reader;

const char* sgnn_status_name(sgnn_status status);
/* Message of the most recent failure on this thread; empty string if none. */
const char* sgnn_last_error(void);

/* ---- graph ---------------------------------------------------------- */

sgnn_status sgnn_graph_create(uint32_t num_nodes, sgnn_graph** out);
/* Edge-list file: one "src dst" line per edge. symmetrize != 0 loads every
 * edge in both directions. */
sgnn_status sgnn_graph_load(const char* path, int symmetrize, sgnn_graph** out);
void sgnn_graph_destroy(sgnn_graph* g);
uint32_t sgnn_graph_num_nodes(const sgnn_graph* g);
uint64_t sgnn_graph_num_edges(const sgnn_graph* g);
sgnn_status sgnn_graph_add_edge(sgnn_graph* g, uint32_t src, uint32_t dst);
/* Fills up to cap ids; *count is always set to the full degree. */
sgnn_status sgnn_graph_out_neighbors(const sgnn_graph* g, uint32_t node, uint32_t* buf, size_t cap,
                                   size_t* count);
sgnn_status sgnn_graph_in_neighbors(const sgnn_graph* g, uint32_t node, uint32_t* buf, size_t cap,
                                  size_t* count);
sgnn_status sgnn_graph_save(const sgnn_graph* g, const char* path);

/* ---- model ---------------------------------------------------------- */

sgnn_status sgnn_model_load(const char* description_path, const char* weights_manifest_path,
                          sgnn_model** out);
void sgnn_model_destroy(sgnn_model* m);
int sgnn_model_num_layers(const sgnn_model* m);
/* 0 = min, 1 = max */
int sgnn_model_aggregator(const sgnn_model* m);

/* ---- engine --------------------------------------------------------- */

/* Stage selector for embedding reads. Layer runs 1..k for both stages; the
 * final output embedding is layer k+1 with SGNN_STAGE_MESSAGE. */
#define SGNN_STAGE_MESSAGE 0
#define SGNN_STAGE_AGGREGATED 1

/* Copies the graph, loads features (rank-2 tensor file, num_nodes x
 * feature_len) and runs full inference to build the initial checkpoints. */
sgnn_status sgnn_engine_create(const sgnn_graph* g, const sgnn_model* m, const char* features_path,
                             sgnn_engine** out);
/* Resumes from checkpoints saved by sgnn_engine_save_checkpoints; the graph
 * must be the snapshot the checkpoints were computed on. */
sgnn_status sgnn_engine_open(const sgnn_graph* g, const sgnn_model* m, const char* features_path,
                           const char* checkpoint_dir, sgnn_engine** out);
void sgnn_engine_destroy(sgnn_engine* e);

sgnn_status sgnn_engine_save_checkpoints(const sgnn_engine* e, const char* dir);
sgnn_status sgnn_engine_save_graph(const sgnn_engine* e, const char* path);

/* Applies one batch of edge updates as a single round. ops[i] is '+' for
 * insertion, '-' for deletion. */
sgnn_status sgnn_engine_apply_update(sgnn_engine* e, const char* ops, const uint32_t* src,
                                   const uint32_t* dst, size_t count);

/* Options: "baseline_counters", "duplicate_seed_events" (value 0/1). */
sgnn_status sgnn_engine_set_option(sgnn_engine* e, const char* name, int64_t value);

/* Key=value record of the last round. *len receives the full length; when the
 * buffer is too small the line is truncated and SGNN_ERR_INVALID_ARGUMENT is
 * returned. */
sgnn_status sgnn_engine_stats_line(const sgnn_engine* e, char* buf, size_t cap, size_t* len);

sgnn_status sgnn_engine_embedding_dim(const sgnn_engine* e, int layer, int stage, uint32_t* dim);
sgnn_status sgnn_engine_read_embedding(const sgnn_engine* e, int layer, int stage, uint32_t node,
                                     float* buf, size_t cap);

/* Recomputes full inference on the current graph and compares it with the
 * checkpoints. Returns SGNN_OK when identical, SGNN_ERR_VERIFY_MISMATCH with
 * the first differing position otherwise. Out-pointers may be NULL. */
sgnn_status sgnn_engine_verify(const sgnn_engine* e, uint32_t* layer, uint32_t* stage,
                             uint32_t* node, uint32_t* index);

/* ---- update-stream files -------------------------------------------- */

sgnn_status sgnn_stream_open(const char* path, sgnn_stream_reader** out);
/* 1 = event read, 0 = end of stream. */
int sgnn_stream_next(sgnn_stream_reader* r, char* op, uint32_t* src, uint32_t* dst);
void sgnn_stream_destroy(sgnn_stream_reader* r);

/* ---- synthetic data ------------------------------------------------- */

typedef struct sgnn_gen_config {
  uint32_t num_nodes;
  double avg_degree;
  uint32_t feature_len;
  uint32_t stream_len;
  uint64_t seed;
  double insert_fraction;
} sgnn_gen_config;

/* Writes edges.txt, features.tnsr, stream.txt, gen.txt into out_dir. */
sgnn_status sgnn_gen_synthetic(const sgnn_gen_config* cfg, const char* out_dir);

/* kind: "gcn" | "sage" | "gin". Writes description.txt, weights.txt and
 * tensor files into out_dir. */
sgnn_status sgnn_gen_model(const char* kind, uint32_t feature_len, uint32_t hidden, uint32_t layers,
                         uint64_t seed, double epsilon, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* STREAMGNN_H */
