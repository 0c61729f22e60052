#pragma once

#include <filesystem>
#include <unordered_map>

#include "core/graph.hpp"
#include "core/model.hpp"

namespace streamgnn {

enum class Stage : uint8_t { Message, Aggregated };

// Counted row reads, split so the harness can tell raw-feature rows (layer-1
// messages of a model with no prefix ops) from checkpoint rows.
struct FetchCounters {
  uint64_t layer1_message_rows = 0;
  uint64_t other_rows = 0;
  uint64_t total() const { return layer1_message_rows + other_rows; }
};

// Per-layer checkpoints: the message m_{l,.} and aggregated neighborhood
// a_{l,.} for layers 1..k, plus the final output as the message of layer k+1.
// Writes within a round log the pre-image once, so the previous-timestamp
// view stays readable until commit_round().
class CheckpointStore {
public:
  CheckpointStore(const Model& model, uint32_t num_nodes);

  uint32_t num_nodes() const { return num_nodes_; }
  int num_layers() const { return num_layers_; }
  uint32_t dim(int layer, Stage stage) const;

  std::span<const float> read_prev(int layer, NodeId node, Stage stage) const;
  std::span<const float> read_current(int layer, NodeId node, Stage stage) const;
  void write_current(int layer, NodeId node, Stage stage, std::span<const float> v);
  void commit_round();

  const Mat& table(int layer, Stage stage) const;
  // Nodes written this round at the given layer/stage, ascending.
  const std::vector<NodeId>& dirty_nodes(int layer, Stage stage) const;

  FetchCounters& fetches() const { return fetches_; }

  void save(const std::filesystem::path& dir) const;
  static CheckpointStore load(const std::filesystem::path& dir, const Model& model,
                              uint32_t num_nodes);

private:
  Mat& table_mut(int layer, Stage stage);
  uint64_t key(int layer, NodeId node, Stage stage) const;
  void count_read(int layer, Stage stage) const;

  uint32_t num_nodes_;
  int num_layers_;
  std::vector<Mat> msg_;  // [l-1] = m_l, l in 1..k+1
  std::vector<Mat> agg_;  // [l-1] = a_l, l in 1..k
  std::unordered_map<uint64_t, Vec> undo_;
  std::vector<std::vector<NodeId>> dirty_msg_;
  std::vector<std::vector<NodeId>> dirty_agg_;
  mutable FetchCounters fetches_;
};

// Full inference over the current graph: populates every checkpoint matrix.
CheckpointStore init_full_inference(const DynamicGraph& g, const Mat& features,
                                    const Model& model);

}  // namespace streamgnn
