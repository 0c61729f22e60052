#include "streamgnn/streamgnn.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "core/engine.hpp"
#include "core/synth.hpp"
#include "core/tensor_io.hpp"

using namespace streamgnn;

struct sgnn_graph {
  DynamicGraph g;
};

// The description and weights parse eagerly; dimension binding happens at
// engine creation, once the feature length is known.
struct sgnn_model {
  ModelSpec spec;
  WeightSet ws;
};

struct sgnn_engine {
  std::unique_ptr<Engine> e;
  RoundStats last;
  uint64_t rounds = 0;
};

struct sgnn_stream_reader {
  std::vector<EdgeDelta> events;
  size_t pos = 0;
};

namespace {

thread_local std::string g_last_error;

sgnn_status map_errc(Errc c) {
  switch (c) {
    case Errc::io: return SGNN_ERR_IO;
    case Errc::format: return SGNN_ERR_FORMAT;
    case Errc::dimension: return SGNN_ERR_DIMENSION;
    case Errc::duplicate_edge: return SGNN_ERR_DUPLICATE_EDGE;
    case Errc::missing_edge: return SGNN_ERR_MISSING_EDGE;
    case Errc::unsupported_model: return SGNN_ERR_UNSUPPORTED_MODEL;
    case Errc::invalid_argument: return SGNN_ERR_INVALID_ARGUMENT;
    case Errc::stale_delta: return SGNN_ERR_STALE_DELTA;
    case Errc::contract: return SGNN_ERR_CONTRACT;
    case Errc::nan_input: return SGNN_ERR_NAN_INPUT;
  }
  return SGNN_ERR_UNKNOWN;
}

template <typename Fn>
sgnn_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_errc(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SGNN_ERR_UNKNOWN;
  }
}

sgnn_status set_error(sgnn_status status, const char* msg) {
  g_last_error = msg;
  return status;
}

sgnn_status copy_neighbors(std::span<const NodeId> nbrs, uint32_t* buf, size_t cap, size_t* count) {
  if (count) *count = nbrs.size();
  if (buf) {
    size_t n = nbrs.size() < cap ? nbrs.size() : cap;
    std::memcpy(buf, nbrs.data(), n * sizeof(uint32_t));
  }
  return SGNN_OK;
}

Stage to_stage(int stage) {
  if (stage == SGNN_STAGE_MESSAGE) return Stage::Message;
  if (stage == SGNN_STAGE_AGGREGATED) return Stage::Aggregated;
  fail(Errc::invalid_argument, "stage must be 0 (message) or 1 (aggregated)");
}

}  // namespace

extern "C" {

const char* sgnn_status_name(sgnn_status status) {
  switch (status) {
    case SGNN_OK: return "ok";
    case SGNN_ERR_IO: return "io error";
    case SGNN_ERR_FORMAT: return "format error";
    case SGNN_ERR_DIMENSION: return "dimension mismatch";
    case SGNN_ERR_DUPLICATE_EDGE: return "duplicate edge";
    case SGNN_ERR_MISSING_EDGE: return "missing edge";
    case SGNN_ERR_UNSUPPORTED_MODEL: return "unsupported model";
    case SGNN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SGNN_ERR_STALE_DELTA: return "stale delta";
    case SGNN_ERR_CONTRACT: return "contract violation";
    case SGNN_ERR_NAN_INPUT: return "NaN input";
    case SGNN_ERR_VERIFY_MISMATCH: return "verification mismatch";
    case SGNN_ERR_UNKNOWN: return "unknown error";
  }
  return "unknown error";
}

const char* sgnn_last_error(void) { return g_last_error.c_str(); }

/* ---- graph ---------------------------------------------------------- */

sgnn_status sgnn_graph_create(uint32_t num_nodes, sgnn_graph** out) {
  if (!out) return set_error(SGNN_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    *out = new sgnn_graph{DynamicGraph(num_nodes)};
    return SGNN_OK;
  });
}

sgnn_status sgnn_graph_load(const char* path, int symmetrize, sgnn_graph** out) {
  if (!path || !out) return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new sgnn_graph{load_edge_list(path, symmetrize != 0)};
    return SGNN_OK;
  });
}

void sgnn_graph_destroy(sgnn_graph* g) { delete g; }

uint32_t sgnn_graph_num_nodes(const sgnn_graph* g) { return g ? g->g.num_nodes() : 0; }

uint64_t sgnn_graph_num_edges(const sgnn_graph* g) { return g ? g->g.num_edges() : 0; }

sgnn_status sgnn_graph_add_edge(sgnn_graph* g, uint32_t src, uint32_t dst) {
  if (!g) return set_error(SGNN_ERR_INVALID_ARGUMENT, "graph is null");
  return guarded([&] {
    g->g.add_edge(src, dst);
    return SGNN_OK;
  });
}

sgnn_status sgnn_graph_out_neighbors(const sgnn_graph* g, uint32_t node, uint32_t* buf, size_t cap,
                                   size_t* count) {
  if (!g) return set_error(SGNN_ERR_INVALID_ARGUMENT, "graph is null");
  return guarded(
      [&] { return copy_neighbors(g->g.neighbors(node, Direction::Out), buf, cap, count); });
}

sgnn_status sgnn_graph_in_neighbors(const sgnn_graph* g, uint32_t node, uint32_t* buf, size_t cap,
                                  size_t* count) {
  if (!g) return set_error(SGNN_ERR_INVALID_ARGUMENT, "graph is null");
  return guarded(
      [&] { return copy_neighbors(g->g.neighbors(node, Direction::In), buf, cap, count); });
}

sgnn_status sgnn_graph_save(const sgnn_graph* g, const char* path) {
  if (!g || !path) return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    save_edge_list(g->g, path);
    return SGNN_OK;
  });
}

/* ---- model ---------------------------------------------------------- */

sgnn_status sgnn_model_load(const char* description_path, const char* weights_manifest_path,
                          sgnn_model** out) {
  if (!description_path || !weights_manifest_path || !out)
    return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ifstream in(description_path);
    if (!in) fail(Errc::io, std::string("cannot open: ") + description_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto handle = std::make_unique<sgnn_model>();
    handle->spec = ModelSpec::parse(text);
    handle->ws = load_weights(weights_manifest_path);
    *out = handle.release();
    return SGNN_OK;
  });
}

void sgnn_model_destroy(sgnn_model* m) { delete m; }

int sgnn_model_num_layers(const sgnn_model* m) { return m ? m->spec.num_layers() : 0; }

int sgnn_model_aggregator(const sgnn_model* m) {
  return m && m->spec.aggregator() == Aggregator::Max ? 1 : 0;
}

/* ---- engine --------------------------------------------------------- */

namespace {

// Edge-list files cannot name isolated trailing nodes, so the feature tensor
// defines the node universe: a loaded graph smaller than the feature table is
// padded with isolated nodes.
DynamicGraph pad_nodes(const DynamicGraph& g, uint32_t num_nodes) {
  if (g.num_nodes() >= num_nodes) return g;
  DynamicGraph padded(num_nodes);
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (NodeId v : g.neighbors(u, Direction::Out)) padded.add_edge(u, v);
  return padded;
}

sgnn_status make_engine(const sgnn_graph* g, const sgnn_model* m, const char* features_path,
                       const char* checkpoint_dir, sgnn_engine** out) {
  if (!g || !m || !features_path || !out)
    return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    Mat features = read_mat(features_path);
    auto model = std::make_shared<const Model>(m->spec, m->ws, features.cols());
    DynamicGraph graph = pad_nodes(g->g, features.rows());
    auto handle = std::make_unique<sgnn_engine>();
    if (checkpoint_dir) {
      CheckpointStore store = CheckpointStore::load(checkpoint_dir, *model, graph.num_nodes());
      handle->e = std::make_unique<Engine>(std::move(graph), model, std::move(features),
                                           std::move(store));
    } else {
      handle->e = std::make_unique<Engine>(std::move(graph), model, std::move(features));
    }
    *out = handle.release();
    return SGNN_OK;
  });
}

}  // namespace

sgnn_status sgnn_engine_create(const sgnn_graph* g, const sgnn_model* m, const char* features_path,
                             sgnn_engine** out) {
  return make_engine(g, m, features_path, nullptr, out);
}

sgnn_status sgnn_engine_open(const sgnn_graph* g, const sgnn_model* m, const char* features_path,
                           const char* checkpoint_dir, sgnn_engine** out) {
  if (!checkpoint_dir) return set_error(SGNN_ERR_INVALID_ARGUMENT, "checkpoint_dir is null");
  return make_engine(g, m, features_path, checkpoint_dir, out);
}

void sgnn_engine_destroy(sgnn_engine* e) { delete e; }

sgnn_status sgnn_engine_save_checkpoints(const sgnn_engine* e, const char* dir) {
  if (!e || !dir) return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    e->e->store().save(dir);
    return SGNN_OK;
  });
}

sgnn_status sgnn_engine_save_graph(const sgnn_engine* e, const char* path) {
  if (!e || !path) return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    save_edge_list(e->e->graph(), path);
    return SGNN_OK;
  });
}

sgnn_status sgnn_engine_apply_update(sgnn_engine* e, const char* ops, const uint32_t* src,
                                   const uint32_t* dst, size_t count) {
  if (!e || (count > 0 && (!ops || !src || !dst)))
    return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<EdgeDelta> delta;
    delta.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (ops[i] != '+' && ops[i] != '-')
        fail(Errc::invalid_argument, "op must be '+' or '-'");
      delta.push_back({ops[i] == '+' ? EdgeOp::Insert : EdgeOp::Delete, src[i], dst[i]});
    }
    e->last = e->e->process_update_round(delta);
    e->last.round_index = e->rounds++;
    return SGNN_OK;
  });
}

sgnn_status sgnn_engine_set_option(sgnn_engine* e, const char* name, int64_t value) {
  if (!e || !name) return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::string_view n(name);
    if (n == "baseline_counters")
      e->e->options().baseline_counters = value != 0;
    else if (n == "duplicate_seed_events")
      e->e->options().duplicate_seed_events = value != 0;
    else
      fail(Errc::invalid_argument, "unknown option: " + std::string(name));
    return SGNN_OK;
  });
}

sgnn_status sgnn_engine_stats_line(const sgnn_engine* e, char* buf, size_t cap, size_t* len) {
  if (!e) return set_error(SGNN_ERR_INVALID_ARGUMENT, "engine is null");
  return guarded([&] {
    std::string line = e->last.to_line();
    if (len) *len = line.size();
    if (!buf) return SGNN_OK;
    size_t n = line.size() < cap ? line.size() : (cap > 0 ? cap - 1 : 0);
    std::memcpy(buf, line.data(), n);
    if (cap > 0) buf[n] = '\0';
    if (line.size() + 1 > cap)
      return set_error(SGNN_ERR_INVALID_ARGUMENT, "stats buffer too small");
    return SGNN_OK;
  });
}

sgnn_status sgnn_engine_embedding_dim(const sgnn_engine* e, int layer, int stage, uint32_t* dim) {
  if (!e || !dim) return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *dim = e->e->store().dim(layer, to_stage(stage));
    return SGNN_OK;
  });
}

sgnn_status sgnn_engine_read_embedding(const sgnn_engine* e, int layer, int stage, uint32_t node,
                                     float* buf, size_t cap) {
  if (!e || !buf) return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const Mat& table = e->e->store().table(layer, to_stage(stage));
    if (node >= table.rows()) fail(Errc::invalid_argument, "node id out of range");
    if (cap < table.cols()) fail(Errc::invalid_argument, "buffer too small");
    auto row = table.row(node);
    std::memcpy(buf, row.data(), row.size() * sizeof(float));
    return SGNN_OK;
  });
}

sgnn_status sgnn_engine_verify(const sgnn_engine* e, uint32_t* layer, uint32_t* stage,
                             uint32_t* node, uint32_t* index) {
  if (!e) return set_error(SGNN_ERR_INVALID_ARGUMENT, "engine is null");
  return guarded([&]() -> sgnn_status {
    auto mismatch = baseline::verify_against_full(e->e->store(), e->e->graph(), e->e->features(),
                                                  e->e->model());
    if (!mismatch) return SGNN_OK;
    if (layer) *layer = static_cast<uint32_t>(mismatch->layer);
    if (stage) *stage = mismatch->stage == Stage::Message ? SGNN_STAGE_MESSAGE : SGNN_STAGE_AGGREGATED;
    if (node) *node = mismatch->node;
    if (index) *index = mismatch->index;
    return set_error(SGNN_ERR_VERIFY_MISMATCH, "checkpoints differ from full inference");
  });
}

/* ---- update-stream files -------------------------------------------- */

sgnn_status sgnn_stream_open(const char* path, sgnn_stream_reader** out) {
  if (!path || !out) return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto handle = std::make_unique<sgnn_stream_reader>();
    handle->events = load_update_stream(path);
    *out = handle.release();
    return SGNN_OK;
  });
}

int sgnn_stream_next(sgnn_stream_reader* r, char* op, uint32_t* src, uint32_t* dst) {
  if (!r || r->pos >= r->events.size()) return 0;
  const EdgeDelta& d = r->events[r->pos++];
  if (op) *op = d.op == EdgeOp::Insert ? '+' : '-';
  if (src) *src = d.src;
  if (dst) *dst = d.dst;
  return 1;
}

void sgnn_stream_destroy(sgnn_stream_reader* r) { delete r; }

/* ---- synthetic data ------------------------------------------------- */

sgnn_status sgnn_gen_synthetic(const sgnn_gen_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    synth::GenConfig c;
    c.num_nodes = cfg->num_nodes;
    c.avg_degree = cfg->avg_degree;
    c.feature_len = cfg->feature_len;
    c.stream_len = cfg->stream_len;
    c.seed = cfg->seed;
    c.insert_fraction = cfg->insert_fraction;
    synth::write_dataset(c, out_dir);
    return SGNN_OK;
  });
}

sgnn_status sgnn_gen_model(const char* kind, uint32_t feature_len, uint32_t hidden, uint32_t layers,
                         uint64_t seed, double epsilon, const char* out_dir) {
  if (!kind || !out_dir) return set_error(SGNN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    synth::ModelGenConfig c;
    c.kind = kind;
    c.feature_len = feature_len;
    c.hidden = hidden;
    c.layers = layers;
    c.seed = seed;
    c.epsilon = static_cast<float>(epsilon);
    synth::write_model(c, out_dir);
    return SGNN_OK;
  });
}

}  // extern "C"
