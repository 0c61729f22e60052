#pragma once

#include <cstring>
#include <initializer_list>
#include <memory>

#include "core/engine.hpp"
#include "core/synth.hpp"

namespace test_helpers {

using namespace streamgnn;

inline Mat identity_mat(uint32_t n) {
  Mat m(n, n);
  for (uint32_t i = 0; i < n; ++i) m.row(i)[i] = 1.0f;
  return m;
}

inline Mat mat_from_rows(std::initializer_list<std::initializer_list<float>> rows) {
  uint32_t r = static_cast<uint32_t>(rows.size());
  uint32_t c = static_cast<uint32_t>(rows.begin()->size());
  Mat m(r, c);
  uint32_t i = 0;
  for (const auto& row : rows) {
    uint32_t j = 0;
    for (float v : row) m.row(i)[j++] = v;
    ++i;
  }
  return m;
}

inline DynamicGraph graph_from_edges(uint32_t n,
                                     std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  DynamicGraph g(n);
  for (auto [s, d] : edges) g.add_edge(s, d);
  return g;
}

inline Mat features_from_rows(std::initializer_list<std::initializer_list<float>> rows) {
  return mat_from_rows(rows);
}

// k-layer model whose combination is the identity: description is k
// aggregation lines and nothing else.
inline std::shared_ptr<const Model> identity_model(int layers, uint32_t dim, Aggregator agg) {
  std::string text;
  for (int i = 0; i < layers; ++i) text += agg == Aggregator::Min ? "min\n" : "max\n";
  return std::make_shared<const Model>(ModelSpec::parse(text), WeightSet{}, dim);
}

inline std::shared_ptr<const Model> make_shared_model(const synth::ModelGenConfig& cfg) {
  auto [spec, ws] = synth::make_model(cfg);
  return std::make_shared<const Model>(std::move(spec), std::move(ws), cfg.feature_len);
}

inline Mat random_features(uint32_t nodes, uint32_t len, uint64_t seed) {
  synth::Rng rng(seed);
  Mat m(nodes, len);
  for (float& v : m.data()) v = rng.unit();
  return m;
}

inline bool mats_equal(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data().data(), b.data().data(), a.data().size() * sizeof(float)) == 0;
}

inline bool stores_equal(const CheckpointStore& a, const CheckpointStore& b) {
  if (a.num_layers() != b.num_layers() || a.num_nodes() != b.num_nodes()) return false;
  for (int l = 1; l <= a.num_layers(); ++l) {
    if (!mats_equal(a.table(l, Stage::Message), b.table(l, Stage::Message))) return false;
    if (!mats_equal(a.table(l, Stage::Aggregated), b.table(l, Stage::Aggregated))) return false;
  }
  return mats_equal(a.table(a.num_layers() + 1, Stage::Message),
                    b.table(b.num_layers() + 1, Stage::Message));
}

inline bool store_matches_embeddings(const CheckpointStore& store,
                                     const baseline::EmbeddingSet& ref) {
  for (int l = 1; l <= store.num_layers(); ++l) {
    if (!mats_equal(store.table(l, Stage::Message), ref.msg[l - 1])) return false;
    if (!mats_equal(store.table(l, Stage::Aggregated), ref.agg[l - 1])) return false;
  }
  return mats_equal(store.table(store.num_layers() + 1, Stage::Message),
                    ref.msg[store.num_layers()]);
}

}  // namespace test_helpers
