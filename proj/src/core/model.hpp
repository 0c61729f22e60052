#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "core/tensor.hpp"

namespace streamgnn {

struct ModelOp {
  enum class Kind : uint8_t { Aggregate, Linear, Relu, UserApply };
  Kind kind = Kind::Relu;
  std::string weight;  // Linear
  std::string bias;    // Linear, empty = no bias
  std::string hook;    // UserApply
  bool operator==(const ModelOp&) const = default;
};

// Half-open op range [begin, end) with the index of its Aggregate op. The
// first partition may carry ops in front of its Aggregate; those transform
// the input features into the first layer's message and never run during an
// update round. Every later partition starts at its Aggregate.
struct Partition {
  uint32_t begin = 0;
  uint32_t end = 0;
  uint32_t aggregate = 0;
  bool operator==(const Partition&) const = default;
};

// Parsed model description. Line grammar:
//   min | max
//   lin <weight> [bias <bias>]
//   relu
//   user_apply <hook>
// Lines starting with '#' and blank lines are ignored.
class ModelSpec {
public:
  static ModelSpec parse(std::string_view text);
  std::string serialize() const;

  const std::vector<ModelOp>& ops() const { return ops_; }
  const std::vector<Partition>& partitions() const { return partitions_; }
  Aggregator aggregator() const { return aggregator_; }
  int num_layers() const { return static_cast<int>(partitions_.size()); }
  bool has_user_ops() const;
  bool has_prefix_ops() const { return partitions_[0].aggregate > 0; }

  bool operator==(const ModelSpec&) const = default;

private:
  std::vector<ModelOp> ops_;
  std::vector<Partition> partitions_;
  Aggregator aggregator_ = Aggregator::Min;
};

struct WeightSet {
  std::map<std::string, Mat> matrices;
  std::map<std::string, Vec> vectors;
  std::map<uint32_t, float> epsilon;  // per layer, 0-based
};

// Weight manifest: one "<name> <relative path>" line per tensor plus
// "epsilon <layer> <float>" lines. Rank-2 tensors load as matrices, rank-1 as
// bias vectors.
WeightSet load_weights(const std::filesystem::path& manifest);

// Writes "<name>.tnsr" files next to the manifest.
void save_weights(const WeightSet& ws, const std::filesystem::path& manifest);

// A ModelSpec bound to weights with every stage dimension validated against
// the input feature length.
class Model {
public:
  Model(ModelSpec spec, WeightSet weights, uint32_t input_dim);

  const ModelSpec& spec() const { return spec_; }
  const WeightSet& weights() const { return weights_; }
  Aggregator aggregator() const { return spec_.aggregator(); }
  int num_layers() const { return spec_.num_layers(); }
  uint32_t input_dim() const { return input_dim_; }
  bool has_prefix_ops() const { return spec_.has_prefix_ops(); }
  bool has_user_ops() const { return spec_.has_user_ops(); }

  // Length of the message feeding layer `layer` (1..k); layer k+1 is the
  // final output embedding.
  uint32_t message_dim(int layer) const;

  const Mat& matrix(const std::string& name) const;
  const Vec& vector(const std::string& name) const;

private:
  ModelSpec spec_;
  WeightSet weights_;
  uint32_t input_dim_;
  std::vector<uint32_t> stage_dims_;  // [0] = message dim of layer 1, ... [k] = output dim
};

// Access to the node's own current message m_{l,v} while evaluating the
// combination for layer l; backed by the user-event stash or the store.
class ApplyContext {
public:
  virtual ~ApplyContext() = default;
  virtual std::span<const float> self_message() = 0;
};

// Applies the ops of `partition` that follow its Aggregate, producing the
// message for the next layer. `ctx` may be null for models without user ops.
Vec run_combination(const Model& model, int partition, Vec alpha, ApplyContext* ctx);

// Transforms an input-feature row through the ops in front of the first
// Aggregate (identity when there are none).
Vec run_prefix(const Model& model, Vec features_row);

}  // namespace streamgnn
