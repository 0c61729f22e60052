#include "core/model.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/hooks.hpp"
#include "core/tensor_io.hpp"

namespace streamgnn {

namespace {

// Operations the event model cannot express: anything that mixes information
// across the neighborhood outside the aggregation itself.
constexpr std::array<std::string_view, 9> kUnsupportedKeywords = {
    "normalize", "batchnorm",  "batch_norm", "graphnorm", "graph_norm",
    "layernorm", "layer_norm", "softmax",    "attention"};

bool is_unsupported_keyword(std::string_view kw) {
  for (auto u : kUnsupportedKeywords)
    if (kw == u) return true;
  return false;
}

}  // namespace

ModelSpec ModelSpec::parse(std::string_view text) {
  if (text.empty()) fail(Errc::format, "empty model description");

  ModelSpec spec;
  bool saw_aggregate = false;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw[0] == '#') continue;

    ModelOp op;
    std::string extra;
    if (kw == "min" || kw == "max") {
      Aggregator agg = kw == "min" ? Aggregator::Min : Aggregator::Max;
      if (saw_aggregate && agg != spec.aggregator_)
        fail(Errc::format, "mixed min and max aggregators (line " + std::to_string(lineno) + ")");
      spec.aggregator_ = agg;
      saw_aggregate = true;
      op.kind = ModelOp::Kind::Aggregate;
    } else if (kw == "relu") {
      op.kind = ModelOp::Kind::Relu;
    } else if (kw == "lin") {
      op.kind = ModelOp::Kind::Linear;
      if (!(ls >> op.weight))
        fail(Errc::format, "lin needs a weight name (line " + std::to_string(lineno) + ")");
      std::string tag;
      if (ls >> tag) {
        if (tag != "bias" || !(ls >> op.bias))
          fail(Errc::format, "bad lin arguments (line " + std::to_string(lineno) + ")");
      }
    } else if (kw == "user_apply") {
      op.kind = ModelOp::Kind::UserApply;
      if (!(ls >> op.hook))
        fail(Errc::format, "user_apply needs a hook name (line " + std::to_string(lineno) + ")");
    } else if (is_unsupported_keyword(kw)) {
      fail(Errc::unsupported_model,
           "operation '" + kw + "' is not expressible (line " + std::to_string(lineno) + ")");
    } else {
      fail(Errc::format, "unknown keyword '" + kw + "' (line " + std::to_string(lineno) + ")");
    }
    if (ls >> extra)
      fail(Errc::format, "trailing tokens (line " + std::to_string(lineno) + ")");
    spec.ops_.push_back(std::move(op));
  }

  std::vector<uint32_t> agg_indices;
  for (uint32_t i = 0; i < spec.ops_.size(); ++i)
    if (spec.ops_[i].kind == ModelOp::Kind::Aggregate) agg_indices.push_back(i);
  if (agg_indices.empty()) fail(Errc::format, "model has no aggregation line");

  // A user_apply in front of the first aggregation would need a self message
  // that does not exist yet.
  for (uint32_t i = 0; i < agg_indices[0]; ++i)
    if (spec.ops_[i].kind == ModelOp::Kind::UserApply)
      fail(Errc::format, "user_apply before the first aggregation");

  for (size_t p = 0; p < agg_indices.size(); ++p) {
    Partition part;
    part.begin = p == 0 ? 0 : agg_indices[p];
    part.end = p + 1 < agg_indices.size() ? agg_indices[p + 1]
                                          : static_cast<uint32_t>(spec.ops_.size());
    part.aggregate = agg_indices[p];
    spec.partitions_.push_back(part);
  }
  return spec;
}

std::string ModelSpec::serialize() const {
  std::ostringstream out;
  for (const ModelOp& op : ops_) {
    switch (op.kind) {
      case ModelOp::Kind::Aggregate:
        out << (aggregator_ == Aggregator::Min ? "min" : "max");
        break;
      case ModelOp::Kind::Linear:
        out << "lin " << op.weight;
        if (!op.bias.empty()) out << " bias " << op.bias;
        break;
      case ModelOp::Kind::Relu:
        out << "relu";
        break;
      case ModelOp::Kind::UserApply:
        out << "user_apply " << op.hook;
        break;
    }
    out << '\n';
  }
  return out.str();
}

bool ModelSpec::has_user_ops() const {
  for (const ModelOp& op : ops_)
    if (op.kind == ModelOp::Kind::UserApply) return true;
  return false;
}

WeightSet load_weights(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) fail(Errc::io, "cannot open weight manifest: " + manifest.string());
  const auto dir = manifest.parent_path();

  WeightSet ws;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    if (name[0] == '#') continue;
    if (name == "epsilon") {
      uint32_t layer = 0;
      float value = 0.0f;
      if (!(ls >> layer >> value))
        fail(Errc::format, "bad epsilon line " + std::to_string(lineno));
      if (!std::isfinite(value)) fail(Errc::format, "epsilon must be finite");
      ws.epsilon[layer] = value;
      continue;
    }
    std::string rel;
    if (!(ls >> rel)) fail(Errc::format, "bad manifest line " + std::to_string(lineno));
    if (ws.matrices.count(name) || ws.vectors.count(name))
      fail(Errc::format, "duplicate tensor name: " + name);
    Tensor t = read_tensor(dir / rel);
    if (t.dims.size() == 2)
      ws.matrices.emplace(name, Mat(t.dims[0], t.dims[1], std::move(t.data)));
    else if (t.dims.size() == 1)
      ws.vectors.emplace(name, std::move(t.data));
    else
      fail(Errc::format, "tensor rank must be 1 or 2: " + name);
  }
  return ws;
}

void save_weights(const WeightSet& ws, const std::filesystem::path& manifest) {
  const auto dir = manifest.parent_path();
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) fail(Errc::io, "cannot open for write: " + manifest.string());
  for (const auto& [name, m] : ws.matrices) {
    write_mat(dir / (name + ".tnsr"), m);
    out << name << ' ' << name << ".tnsr" << '\n';
  }
  for (const auto& [name, v] : ws.vectors) {
    write_vec(dir / (name + ".tnsr"), v);
    out << name << ' ' << name << ".tnsr" << '\n';
  }
  for (const auto& [layer, value] : ws.epsilon) out << "epsilon " << layer << ' ' << value << '\n';
  if (!out) fail(Errc::io, "write failed: " + manifest.string());
}

Model::Model(ModelSpec spec, WeightSet weights, uint32_t input_dim)
    : spec_(std::move(spec)), weights_(std::move(weights)), input_dim_(input_dim) {
  if (input_dim_ == 0) fail(Errc::invalid_argument, "input dimension must be positive");

  uint32_t d = input_dim_;
  const auto& ops = spec_.ops();
  for (size_t p = 0; p < spec_.partitions().size(); ++p) {
    const Partition& part = spec_.partitions()[p];
    for (uint32_t i = part.begin; i < part.end; ++i) {
      const ModelOp& op = ops[i];
      switch (op.kind) {
        case ModelOp::Kind::Aggregate:
          stage_dims_.push_back(d);  // message length of layer p+1
          break;
        case ModelOp::Kind::Linear: {
          const Mat& w = matrix(op.weight);
          if (w.cols() != d)
            fail(Errc::dimension, "weight " + op.weight + " expects input length " +
                                      std::to_string(w.cols()) + ", got " + std::to_string(d));
          if (!op.bias.empty() && vector(op.bias).size() != w.rows())
            fail(Errc::dimension, "bias " + op.bias + " length != rows of " + op.weight);
          d = w.rows();
          break;
        }
        case ModelOp::Kind::Relu:
          break;
        case ModelOp::Kind::UserApply:
          validate_builtin_hook(op.hook, static_cast<uint32_t>(p), d,
                                stage_dims_[p], weights_);
          break;
      }
    }
  }
  stage_dims_.push_back(d);  // final output length
}

uint32_t Model::message_dim(int layer) const {
  if (layer < 1 || layer > static_cast<int>(stage_dims_.size()))
    fail(Errc::invalid_argument, "layer out of range: " + std::to_string(layer));
  return stage_dims_[layer - 1];
}

const Mat& Model::matrix(const std::string& name) const {
  auto it = weights_.matrices.find(name);
  if (it == weights_.matrices.end()) fail(Errc::invalid_argument, "missing weight matrix: " + name);
  return it->second;
}

const Vec& Model::vector(const std::string& name) const {
  auto it = weights_.vectors.find(name);
  if (it == weights_.vectors.end()) fail(Errc::invalid_argument, "missing bias vector: " + name);
  return it->second;
}

Vec run_combination(const Model& model, int partition, Vec alpha, ApplyContext* ctx) {
  const auto& parts = model.spec().partitions();
  if (partition < 0 || partition >= static_cast<int>(parts.size()))
    fail(Errc::invalid_argument, "partition out of range");
  const Partition& part = parts[partition];
  if (alpha.size() != model.message_dim(partition + 1))
    fail(Errc::dimension, "combination input has wrong length");

  Vec x = std::move(alpha);
  const auto& ops = model.spec().ops();
  for (uint32_t i = part.aggregate + 1; i < part.end; ++i) {
    const ModelOp& op = ops[i];
    switch (op.kind) {
      case ModelOp::Kind::Linear:
        x = matvec_affine(model.matrix(op.weight), x,
                          op.bias.empty() ? nullptr : &model.vector(op.bias));
        break;
      case ModelOp::Kind::Relu:
        x = relu(std::move(x));
        break;
      case ModelOp::Kind::UserApply: {
        if (!ctx) fail(Errc::contract, "user_apply op requires a bound hook context");
        x = apply_builtin_hook(op.hook, static_cast<uint32_t>(partition), model.weights(),
                               ctx->self_message(), std::move(x));
        break;
      }
      case ModelOp::Kind::Aggregate:
        fail(Errc::contract, "unexpected aggregate inside combination");
    }
  }
  return x;
}

Vec run_prefix(const Model& model, Vec features_row) {
  const Partition& part0 = model.spec().partitions()[0];
  Vec x = std::move(features_row);
  const auto& ops = model.spec().ops();
  for (uint32_t i = 0; i < part0.aggregate; ++i) {
    const ModelOp& op = ops[i];
    if (op.kind == ModelOp::Kind::Linear)
      x = matvec_affine(model.matrix(op.weight), x,
                        op.bias.empty() ? nullptr : &model.vector(op.bias));
    else if (op.kind == ModelOp::Kind::Relu)
      x = relu(std::move(x));
  }
  return x;
}

}  // namespace streamgnn
