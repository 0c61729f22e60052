#include "core/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "core/tensor_io.hpp"

namespace streamgnn {

CheckpointStore::CheckpointStore(const Model& model, uint32_t num_nodes)
    : num_nodes_(num_nodes), num_layers_(model.num_layers()) {
  for (int l = 1; l <= num_layers_ + 1; ++l)
    msg_.emplace_back(num_nodes_, model.message_dim(l));
  for (int l = 1; l <= num_layers_; ++l)
    agg_.emplace_back(num_nodes_, model.message_dim(l));
  dirty_msg_.resize(msg_.size());
  dirty_agg_.resize(agg_.size());
}

uint32_t CheckpointStore::dim(int layer, Stage stage) const {
  return table(layer, stage).cols();
}

const Mat& CheckpointStore::table(int layer, Stage stage) const {
  if (stage == Stage::Message) {
    if (layer < 1 || layer > num_layers_ + 1)
      fail(Errc::invalid_argument, "message layer out of range: " + std::to_string(layer));
    return msg_[layer - 1];
  }
  if (layer < 1 || layer > num_layers_)
    fail(Errc::invalid_argument, "aggregated layer out of range: " + std::to_string(layer));
  return agg_[layer - 1];
}

Mat& CheckpointStore::table_mut(int layer, Stage stage) {
  return const_cast<Mat&>(table(layer, stage));
}

uint64_t CheckpointStore::key(int layer, NodeId node, Stage stage) const {
  return (static_cast<uint64_t>(stage == Stage::Aggregated) << 63) |
         (static_cast<uint64_t>(layer) << 32) | node;
}

void CheckpointStore::count_read(int layer, Stage stage) const {
  if (layer == 1 && stage == Stage::Message)
    ++fetches_.layer1_message_rows;
  else
    ++fetches_.other_rows;
}

std::span<const float> CheckpointStore::read_prev(int layer, NodeId node, Stage stage) const {
  count_read(layer, stage);
  auto it = undo_.find(key(layer, node, stage));
  if (it != undo_.end()) return it->second;
  return table(layer, stage).row(node);
}

std::span<const float> CheckpointStore::read_current(int layer, NodeId node, Stage stage) const {
  count_read(layer, stage);
  return table(layer, stage).row(node);
}

void CheckpointStore::write_current(int layer, NodeId node, Stage stage,
                                    std::span<const float> v) {
  Mat& t = table_mut(layer, stage);
  if (v.size() != t.cols()) fail(Errc::dimension, "write_current: wrong vector length");
  auto row = t.row(node);
  auto [it, inserted] = undo_.try_emplace(key(layer, node, stage));
  if (inserted) {
    it->second.assign(row.begin(), row.end());
    auto& dirty = stage == Stage::Message ? dirty_msg_[layer - 1] : dirty_agg_[layer - 1];
    dirty.push_back(node);
  }
  std::memcpy(row.data(), v.data(), v.size() * sizeof(float));
}

void CheckpointStore::commit_round() {
  undo_.clear();
  for (auto& d : dirty_msg_) d.clear();
  for (auto& d : dirty_agg_) d.clear();
}

const std::vector<NodeId>& CheckpointStore::dirty_nodes(int layer, Stage stage) const {
  table(layer, stage);  // bounds check
  return stage == Stage::Message ? dirty_msg_[layer - 1] : dirty_agg_[layer - 1];
}

namespace {

// Reads the node's own message out of a table without touching counters;
// used only during full initialization.
class TableApplyContext : public ApplyContext {
public:
  TableApplyContext(const Mat& msgs, NodeId node) : msgs_(msgs), node_(node) {}
  std::span<const float> self_message() override { return msgs_.row(node_); }

private:
  const Mat& msgs_;
  NodeId node_;
};

}  // namespace

CheckpointStore init_full_inference(const DynamicGraph& g, const Mat& features,
                                    const Model& model) {
  if (features.rows() != g.num_nodes())
    fail(Errc::dimension, "feature rows != node count");
  if (features.cols() != model.input_dim())
    fail(Errc::dimension, "feature length != model input dimension");
  if (has_nan(features.data())) fail(Errc::nan_input, "NaN in features");

  CheckpointStore store(model, g.num_nodes());
  const Aggregator agg = model.aggregator();

  // Layer-1 messages from the input features.
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    Vec m(features.row(v).begin(), features.row(v).end());
    if (model.has_prefix_ops()) m = run_prefix(model, std::move(m));
    store.write_current(1, v, Stage::Message, m);
  }

  for (int l = 1; l <= model.num_layers(); ++l) {
    const Mat& msgs = store.table(l, Stage::Message);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      auto nbrs = g.neighbors(v, Direction::In);
      Vec alpha(msgs.cols(), 0.0f);  // empty neighborhood aggregates to zero
      if (!nbrs.empty()) {
        auto first = msgs.row(nbrs[0]);
        alpha.assign(first.begin(), first.end());
        for (size_t i = 1; i < nbrs.size(); ++i)
          ewise_reduce_into(agg, msgs.row(nbrs[i]), alpha);
      }
      store.write_current(l, v, Stage::Aggregated, alpha);

      TableApplyContext ctx(msgs, v);
      Vec next = run_combination(model, l - 1, std::move(alpha), &ctx);
      store.write_current(l + 1, v, Stage::Message, next);
    }
  }

  store.commit_round();
  store.fetches() = {};
  return store;
}

void CheckpointStore::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "checkpoints.txt", std::ios::trunc);
  if (!manifest) fail(Errc::io, "cannot open for write: " + (dir / "checkpoints.txt").string());
  manifest << "nodes " << num_nodes_ << '\n';
  manifest << "layers " << num_layers_ << '\n';
  for (int l = 1; l <= num_layers_ + 1; ++l) {
    std::string name = "msg_" + std::to_string(l) + ".tnsr";
    write_mat(dir / name, msg_[l - 1]);
    manifest << "msg " << l << ' ' << name << '\n';
  }
  for (int l = 1; l <= num_layers_; ++l) {
    std::string name = "agg_" + std::to_string(l) + ".tnsr";
    write_mat(dir / name, agg_[l - 1]);
    manifest << "agg " << l << ' ' << name << '\n';
  }
  if (!manifest) fail(Errc::io, "write failed: checkpoint manifest");
}

CheckpointStore CheckpointStore::load(const std::filesystem::path& dir, const Model& model,
                                      uint32_t num_nodes) {
  std::ifstream manifest(dir / "checkpoints.txt");
  if (!manifest) fail(Errc::io, "cannot open checkpoint manifest in " + dir.string());

  CheckpointStore store(model, num_nodes);
  uint32_t nodes = 0;
  int layers = 0;
  size_t loaded = 0;
  std::string line;
  while (std::getline(manifest, line)) {
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "nodes") {
      ls >> nodes;
    } else if (kw == "layers") {
      ls >> layers;
    } else if (kw == "msg" || kw == "agg") {
      int layer = 0;
      std::string name;
      if (!(ls >> layer >> name)) fail(Errc::format, "bad checkpoint manifest line");
      Mat m = read_mat(dir / name);
      const Mat& expect = store.table(layer, kw == "msg" ? Stage::Message : Stage::Aggregated);
      if (m.rows() != expect.rows() || m.cols() != expect.cols())
        fail(Errc::dimension, "checkpoint tensor shape mismatch: " + name);
      (kw == "msg" ? store.msg_[layer - 1] : store.agg_[layer - 1]) = std::move(m);
      ++loaded;
    } else {
      fail(Errc::format, "bad checkpoint manifest keyword: " + kw);
    }
  }
  if (nodes != num_nodes || layers != model.num_layers())
    fail(Errc::dimension, "checkpoint manifest does not match graph/model");
  if (loaded != store.msg_.size() + store.agg_.size())
    fail(Errc::format, "checkpoint manifest is missing tensors");
  return store;
}

}  // namespace streamgnn
