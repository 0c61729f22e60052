#include "core/synth.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "core/tensor_io.hpp"

namespace streamgnn::synth {

namespace {

uint64_t edge_key(NodeId src, NodeId dst) { return (static_cast<uint64_t>(src) << 32) | dst; }

}  // namespace

DynamicGraph gen_graph(const GenConfig& cfg, Rng& rng) {
  if (cfg.num_nodes < 2) fail(Errc::invalid_argument, "need at least two nodes");
  DynamicGraph g(cfg.num_nodes);
  const uint64_t target = static_cast<uint64_t>(std::llround(cfg.avg_degree * cfg.num_nodes));
  if (target > static_cast<uint64_t>(cfg.num_nodes) * (cfg.num_nodes - 1))
    fail(Errc::invalid_argument, "average degree too high for a simple graph");
  while (g.num_edges() < target) {
    NodeId src = rng.below(cfg.num_nodes);
    NodeId dst = rng.below(cfg.num_nodes);
    if (src == dst || g.has_edge(src, dst)) continue;
    g.add_edge(src, dst);
  }
  return g;
}

Mat gen_features(const GenConfig& cfg, Rng& rng) {
  Mat features(cfg.num_nodes, cfg.feature_len);
  for (float& v : features.data()) v = rng.unit();
  return features;
}

std::vector<EdgeDelta> gen_stream(const DynamicGraph& base, const GenConfig& cfg, Rng& rng) {
  std::unordered_set<uint64_t> live;
  std::vector<std::pair<NodeId, NodeId>> live_list;
  for (NodeId u = 0; u < base.num_nodes(); ++u)
    for (NodeId v : base.neighbors(u, Direction::Out)) {
      live.insert(edge_key(u, v));
      live_list.emplace_back(u, v);
    }

  std::vector<EdgeDelta> stream;
  stream.reserve(cfg.stream_len);
  for (uint32_t i = 0; i < cfg.stream_len; ++i) {
    const bool insert = live_list.empty() || rng.unit() < cfg.insert_fraction;
    if (insert) {
      for (;;) {
        NodeId src = rng.below(cfg.num_nodes);
        NodeId dst = rng.below(cfg.num_nodes);
        if (src == dst || live.count(edge_key(src, dst))) continue;
        live.insert(edge_key(src, dst));
        live_list.emplace_back(src, dst);
        stream.push_back({EdgeOp::Insert, src, dst});
        break;
      }
    } else {
      uint32_t pick = rng.below(static_cast<uint32_t>(live_list.size()));
      auto [src, dst] = live_list[pick];
      live_list[pick] = live_list.back();
      live_list.pop_back();
      live.erase(edge_key(src, dst));
      stream.push_back({EdgeOp::Delete, src, dst});
    }
  }
  return stream;
}

void write_dataset(const GenConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Rng rng(cfg.seed);
  DynamicGraph g = gen_graph(cfg, rng);
  Mat features = gen_features(cfg, rng);
  std::vector<EdgeDelta> stream = gen_stream(g, cfg, rng);

  save_edge_list(g, dir / "edges.txt");
  write_mat(dir / "features.tnsr", features);
  save_update_stream(stream, dir / "stream.txt");

  std::ofstream echo(dir / "gen.txt", std::ios::trunc);
  echo << "num_nodes " << cfg.num_nodes << '\n'
       << "avg_degree " << cfg.avg_degree << '\n'
       << "feature_len " << cfg.feature_len << '\n'
       << "stream_len " << cfg.stream_len << '\n'
       << "seed " << cfg.seed << '\n'
       << "insert_fraction " << cfg.insert_fraction << '\n';
  if (!echo) fail(Errc::io, "write failed: " + (dir / "gen.txt").string());
}

namespace {

Mat random_mat(uint32_t rows, uint32_t cols, Rng& rng) {
  Mat m(rows, cols);
  // A mild positive skew keeps ReLU from zeroing most activations, so the
  // aggregates stay non-degenerate over long streams.
  for (float& v : m.data()) v = rng.range(-0.25f, 0.55f);
  return m;
}

Vec random_bias(uint32_t len, Rng& rng) {
  Vec b(len);
  for (float& v : b) v = rng.range(0.0f, 0.3f);
  return b;
}

}  // namespace

std::pair<ModelSpec, WeightSet> make_model(const ModelGenConfig& cfg) {
  if (cfg.layers == 0) fail(Errc::invalid_argument, "model needs at least one layer");
  Rng rng(cfg.seed);
  std::ostringstream desc;
  WeightSet ws;

  for (uint32_t p = 0; p < cfg.layers; ++p) {
    const uint32_t in = p == 0 ? cfg.feature_len : cfg.hidden;
    const std::string sp = std::to_string(p);
    if (cfg.kind == "gcn") {
      desc << "min\n";
      desc << "lin W_" << sp << " bias b_" << sp << "\n";
      desc << "relu\n";
      ws.matrices.emplace("W_" + sp, random_mat(cfg.hidden, in, rng));
      ws.vectors.emplace("b_" + sp, random_bias(cfg.hidden, rng));
    } else if (cfg.kind == "sage") {
      desc << "min\n";
      desc << "lin W1_" << sp << "\n";
      desc << "user_apply sage_self\n";
      desc << "relu\n";
      ws.matrices.emplace("W1_" + sp, random_mat(cfg.hidden, in, rng));
      ws.matrices.emplace("W2_" + sp, random_mat(cfg.hidden, in, rng));
    } else if (cfg.kind == "gin") {
      desc << "max\n";
      desc << "user_apply gin_self\n";
      desc << "lin M0_" << sp << " bias c0_" << sp << "\n";
      desc << "relu\n";
      desc << "lin M1_" << sp << " bias c1_" << sp << "\n";
      desc << "relu\n";
      ws.matrices.emplace("M0_" + sp, random_mat(cfg.hidden, in, rng));
      ws.vectors.emplace("c0_" + sp, random_bias(cfg.hidden, rng));
      ws.matrices.emplace("M1_" + sp, random_mat(cfg.hidden, cfg.hidden, rng));
      ws.vectors.emplace("c1_" + sp, random_bias(cfg.hidden, rng));
      ws.epsilon[p] = cfg.epsilon;
    } else {
      fail(Errc::invalid_argument, "unknown model kind: " + cfg.kind);
    }
  }
  return {ModelSpec::parse(desc.str()), std::move(ws)};
}

void write_model(const ModelGenConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto [spec, ws] = make_model(cfg);

  std::ofstream desc(dir / "description.txt", std::ios::trunc);
  desc << spec.serialize();
  if (!desc) fail(Errc::io, "write failed: " + (dir / "description.txt").string());

  save_weights(ws, dir / "weights.txt");
}

}  // namespace streamgnn::synth
