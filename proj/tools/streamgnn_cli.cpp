// Command-line harness around the streamgnn C API: dataset generation,
// checkpoint initialization, stream processing with per-round stats, store
// verification and stats-file reports.
//
// Exit codes: 0 success, 2 verification mismatch, 1 I/O or format errors.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "streamgnn/streamgnn.h"

namespace {

struct StatusError {
  sgnn_status status;
  std::string message;
};

void check(sgnn_status status) {
  if (status != SGNN_OK) throw StatusError{status, sgnn_last_error()};
}

struct GraphHandle {
  sgnn_graph* g = nullptr;
  ~GraphHandle() { sgnn_graph_destroy(g); }
};
struct ModelHandle {
  sgnn_model* m = nullptr;
  ~ModelHandle() { sgnn_model_destroy(m); }
};
struct EngineHandle {
  sgnn_engine* e = nullptr;
  ~EngineHandle() { sgnn_engine_destroy(e); }
};
struct StreamHandle {
  sgnn_stream_reader* r = nullptr;
  ~StreamHandle() { sgnn_stream_destroy(r); }
};

struct CommonPaths {
  std::string graph;
  std::string features;
  std::string model_desc;
  std::string weights;
  bool symmetrize = false;
};

void add_common(CLI::App* cmd, CommonPaths& paths) {
  cmd->add_option("--graph", paths.graph, "edge-list file of the base snapshot")->required();
  cmd->add_option("--features", paths.features, "feature tensor file")->required();
  cmd->add_option("--model-desc", paths.model_desc, "model description file")->required();
  cmd->add_option("--weights", paths.weights, "weight manifest file")->required();
  cmd->add_flag("--symmetrize", paths.symmetrize, "load every edge in both directions");
}

void open_graph_model(const CommonPaths& paths, GraphHandle& graph, ModelHandle& model) {
  check(sgnn_graph_load(paths.graph.c_str(), paths.symmetrize ? 1 : 0, &graph.g));
  check(sgnn_model_load(paths.model_desc.c_str(), paths.weights.c_str(), &model.m));
}

std::string stats_line(const sgnn_engine* engine) {
  size_t needed = 0;
  check(sgnn_engine_stats_line(engine, nullptr, 0, &needed));
  std::string line(needed, '\0');
  check(sgnn_engine_stats_line(engine, line.data(), line.size() + 1, &needed));
  return line;
}

int report_verify_failure(const sgnn_engine* engine) {
  uint32_t layer = 0, stage = 0, node = 0, index = 0;
  sgnn_status status = sgnn_engine_verify(engine, &layer, &stage, &node, &index);
  if (status == SGNN_OK) return 0;
  if (status == SGNN_ERR_VERIFY_MISMATCH) {
    std::cerr << "verification mismatch at layer " << layer << " stage "
              << (stage == SGNN_STAGE_MESSAGE ? "message" : "aggregated") << " node " << node
              << " index " << index << "\n";
    return 2;
  }
  throw StatusError{status, sgnn_last_error()};
}

// ---- report aggregation --------------------------------------------------

struct StatsSummary {
  uint64_t rounds = 0;
  uint64_t no_deletion = 0, deletion_no_effect = 0, covered_reset = 0, exposed_reset = 0;
  uint64_t engine_fetches = 0, affected_fetches = 0, full_fetches = 0;
  uint64_t area_nodes = 0, dirty_nodes = 0;
  bool has_baseline = false;
  std::vector<double> per_round_reduction;  // affected / engine
};

std::map<std::string, uint64_t> parse_kv(const std::string& line) {
  std::map<std::string, uint64_t> kv;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    kv[tok.substr(0, eq)] = std::stoull(tok.substr(eq + 1));
  }
  return kv;
}

StatsSummary summarize(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StatusError{SGNN_ERR_IO, "cannot open stats file: " + path};
  StatsSummary s;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto kv = parse_kv(line);
    if (!kv.count("round")) continue;
    ++s.rounds;
    s.no_deletion += kv["no_deletion"];
    s.deletion_no_effect += kv["deletion_no_effect"];
    s.covered_reset += kv["covered_reset"];
    s.exposed_reset += kv["exposed_reset"];
    uint64_t engine = kv["ckpt_fetches"] + kv["feat_fetches"];
    s.engine_fetches += engine;
    s.dirty_nodes += kv["dirty"];
    if (kv.count("affected_fetches")) {
      s.has_baseline = true;
      s.affected_fetches += kv["affected_fetches"];
      s.full_fetches += kv["full_fetches"];
      s.area_nodes += kv["area_nodes"];
      double denominator = engine > 0 ? static_cast<double>(engine) : 1.0;
      s.per_round_reduction.push_back(static_cast<double>(kv["affected_fetches"]) / denominator);
    }
  }
  return s;
}

void print_report(const std::string& path, const StatsSummary& s) {
  const uint64_t visited =
      s.no_deletion + s.deletion_no_effect + s.covered_reset + s.exposed_reset;
  auto pct = [&](uint64_t n) { return visited ? 100.0 * static_cast<double>(n) / visited : 0.0; };
  std::printf("stream %s\n", path.c_str());
  std::printf("  rounds                 %llu\n", static_cast<unsigned long long>(s.rounds));
  std::printf("  visited targets        %llu\n", static_cast<unsigned long long>(visited));
  std::printf("  no deletion            %6.2f%%\n", pct(s.no_deletion));
  std::printf("  deletion no effect     %6.2f%%\n", pct(s.deletion_no_effect));
  std::printf("  covered reset          %6.2f%%\n", pct(s.covered_reset));
  std::printf("  exposed reset          %6.2f%%\n", pct(s.exposed_reset));
  std::printf("  incremental fraction   %6.2f%%\n",
              pct(s.no_deletion + s.deletion_no_effect + s.covered_reset));
  std::printf("  engine fetches         %llu\n", static_cast<unsigned long long>(s.engine_fetches));
  if (s.has_baseline) {
    std::printf("  affected fetches       %llu\n",
                static_cast<unsigned long long>(s.affected_fetches));
    std::printf("  full fetches           %llu\n", static_cast<unsigned long long>(s.full_fetches));
    double overall =
        s.engine_fetches ? static_cast<double>(s.affected_fetches) / s.engine_fetches : 0.0;
    std::vector<double> sorted = s.per_round_reduction;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
    std::printf("  fetch reduction        %.2fx overall, %.2fx median per round\n", overall,
                median);
    if (s.area_nodes)
      std::printf("  dirty/theoretical area %6.2f%%\n",
                  100.0 * static_cast<double>(s.dirty_nodes) / s.area_nodes);
  }
}

// ---- subcommands ---------------------------------------------------------

int run_gen(const std::string& out_dir, const sgnn_gen_config& cfg,
            const std::vector<std::string>& models, uint32_t hidden, uint32_t layers,
            double epsilon) {
  check(sgnn_gen_synthetic(&cfg, out_dir.c_str()));
  for (const std::string& kind : models) {
    std::string dir = out_dir + "/model_" + kind;
    check(sgnn_gen_model(kind.c_str(), cfg.feature_len, hidden, layers, cfg.seed, epsilon,
                        dir.c_str()));
  }
  std::cout << "generated dataset in " << out_dir << "\n";
  return 0;
}

int run_init(const CommonPaths& paths, const std::string& out_dir) {
  GraphHandle graph;
  ModelHandle model;
  open_graph_model(paths, graph, model);
  EngineHandle engine;
  check(sgnn_engine_create(graph.g, model.m, paths.features.c_str(), &engine.e));
  check(sgnn_engine_save_checkpoints(engine.e, out_dir.c_str()));
  std::cout << "checkpoints written to " << out_dir << "\n";
  return 0;
}

int run_stream(const CommonPaths& paths, const std::string& checkpoint_dir,
               const std::string& stream_path, uint32_t num_updates, const std::string& verify,
               bool baseline_counters, const std::string& stats_path,
               const std::string& save_checkpoints, const std::string& save_graph) {
  GraphHandle graph;
  ModelHandle model;
  open_graph_model(paths, graph, model);
  EngineHandle engine;
  check(sgnn_engine_open(graph.g, model.m, paths.features.c_str(), checkpoint_dir.c_str(),
                        &engine.e));
  if (baseline_counters) check(sgnn_engine_set_option(engine.e, "baseline_counters", 1));

  StreamHandle stream;
  check(sgnn_stream_open(stream_path.c_str(), &stream.r));

  std::ofstream stats_file;
  std::ostream* stats_out = &std::cout;
  if (!stats_path.empty()) {
    stats_file.open(stats_path, std::ios::trunc);
    if (!stats_file) throw StatusError{SGNN_ERR_IO, "cannot open stats file: " + stats_path};
    stats_out = &stats_file;
  }

  std::vector<char> ops;
  std::vector<uint32_t> srcs, dsts;
  bool more = true;
  while (more) {
    ops.clear();
    srcs.clear();
    dsts.clear();
    while (ops.size() < num_updates) {
      char op;
      uint32_t src, dst;
      if (!sgnn_stream_next(stream.r, &op, &src, &dst)) {
        more = false;
        break;
      }
      ops.push_back(op);
      srcs.push_back(src);
      dsts.push_back(dst);
    }
    if (ops.empty()) break;
    check(sgnn_engine_apply_update(engine.e, ops.data(), srcs.data(), dsts.data(), ops.size()));
    (*stats_out) << stats_line(engine.e) << "\n";
    if (verify == "every-round") {
      int rc = report_verify_failure(engine.e);
      if (rc != 0) return rc;
    }
  }

  if (verify == "final") {
    int rc = report_verify_failure(engine.e);
    if (rc != 0) return rc;
  }
  if (!save_checkpoints.empty())
    check(sgnn_engine_save_checkpoints(engine.e, save_checkpoints.c_str()));
  if (!save_graph.empty()) check(sgnn_engine_save_graph(engine.e, save_graph.c_str()));
  return 0;
}

int run_verify(const CommonPaths& paths, const std::string& checkpoint_dir) {
  GraphHandle graph;
  ModelHandle model;
  open_graph_model(paths, graph, model);
  EngineHandle engine;
  check(sgnn_engine_open(graph.g, model.m, paths.features.c_str(), checkpoint_dir.c_str(),
                        &engine.e));
  int rc = report_verify_failure(engine.e);
  if (rc == 0) std::cout << "checkpoints match full inference\n";
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"incremental GNN inference on streaming graphs"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset (and optional models)");
  std::string gen_out;
  sgnn_gen_config gen_cfg{1000, 8.0, 16, 200, 1, 0.6};
  std::vector<std::string> gen_models;
  uint32_t gen_hidden = 16, gen_layers = 2;
  double gen_epsilon = 0.1;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--nodes", gen_cfg.num_nodes, "node count");
  gen->add_option("--avg-degree", gen_cfg.avg_degree, "average out-degree");
  gen->add_option("--feature-len", gen_cfg.feature_len, "feature vector length");
  gen->add_option("--stream-len", gen_cfg.stream_len, "number of update events");
  gen->add_option("--seed", gen_cfg.seed, "random seed");
  gen->add_option("--insert-fraction", gen_cfg.insert_fraction, "fraction of insertions");
  gen->add_option("--model", gen_models, "also generate model files (gcn|sage|gin), repeatable");
  gen->add_option("--hidden", gen_hidden, "hidden state length for generated models");
  gen->add_option("--layers", gen_layers, "layer count for generated models");
  gen->add_option("--epsilon", gen_epsilon, "gin epsilon");

  // init
  auto* init = app.add_subcommand("init", "full inference and checkpoint creation");
  CommonPaths init_paths;
  std::string init_out;
  add_common(init, init_paths);
  init->add_option("--out", init_out, "checkpoint output directory")->required();

  // stream
  auto* stream = app.add_subcommand("stream", "apply an update stream incrementally");
  CommonPaths stream_paths;
  std::string stream_ckpt, stream_file, stream_verify = "off", stream_stats;
  std::string stream_save_ckpt, stream_save_graph;
  uint32_t stream_updates = 1;
  bool stream_baseline = false;
  add_common(stream, stream_paths);
  stream->add_option("--checkpoints", stream_ckpt, "checkpoint directory from init")->required();
  stream->add_option("--stream", stream_file, "update-stream file")->required();
  stream->add_option("--num-updates", stream_updates, "edge updates per round")
      ->check(CLI::PositiveNumber);
  stream->add_option("--verify", stream_verify, "off | every-round | final")
      ->check(CLI::IsMember({"off", "every-round", "final"}));
  stream->add_flag("--baseline-counters", stream_baseline,
                   "include Full/Affected fetch counters in stats");
  stream->add_option("--stats", stream_stats, "write per-round stats to this file");
  stream->add_option("--save-checkpoints", stream_save_ckpt,
                     "write final checkpoints to this directory");
  stream->add_option("--save-graph", stream_save_graph, "write the final edge list to this file");

  // verify
  auto* verify = app.add_subcommand("verify", "compare checkpoints against full inference");
  CommonPaths verify_paths;
  std::string verify_ckpt;
  add_common(verify, verify_paths);
  verify->add_option("--checkpoints", verify_ckpt, "checkpoint directory")->required();

  // report
  auto* report = app.add_subcommand("report", "aggregate stats files");
  std::vector<std::string> report_files;
  report->add_option("files", report_files, "stats files from `stream --stats`")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return run_gen(gen_out, gen_cfg, gen_models, gen_hidden, gen_layers, gen_epsilon);
    if (init->parsed()) return run_init(init_paths, init_out);
    if (stream->parsed())
      return run_stream(stream_paths, stream_ckpt, stream_file, stream_updates, stream_verify,
                        stream_baseline, stream_stats, stream_save_ckpt, stream_save_graph);
    if (verify->parsed()) return run_verify(verify_paths, verify_ckpt);
    if (report->parsed()) {
      for (const std::string& f : report_files) print_report(f, summarize(f));
      return 0;
    }
  } catch (const StatusError& e) {
    std::cerr << "error: " << sgnn_status_name(e.status) << ": " << e.message << "\n";
    return e.status == SGNN_ERR_VERIFY_MISMATCH ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
