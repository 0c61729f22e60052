#include "core/hooks.hpp"

namespace streamgnn {

namespace {

std::string sage_weight_name(uint32_t partition) { return "W2_" + std::to_string(partition); }

const Mat& sage_weight(const WeightSet& ws, uint32_t partition) {
  auto it = ws.matrices.find(sage_weight_name(partition));
  if (it == ws.matrices.end())
    fail(Errc::invalid_argument, "sage_self: missing weight " + sage_weight_name(partition));
  return it->second;
}

float gin_epsilon(const WeightSet& ws, uint32_t partition) {
  auto it = ws.epsilon.find(partition);
  if (it == ws.epsilon.end())
    fail(Errc::invalid_argument,
         "gin_self: missing epsilon for layer " + std::to_string(partition));
  return it->second;
}

Vec sage_self_apply(uint32_t partition, const WeightSet& ws, std::span<const float> self_msg,
                    Vec x) {
  Vec self = matvec_affine(sage_weight(ws, partition), self_msg, nullptr);
  for (size_t i = 0; i < x.size(); ++i) x[i] = flush_zero(x[i] + self[i]);
  return x;
}

Vec gin_self_apply(uint32_t partition, const WeightSet& ws, std::span<const float> self_msg,
                   Vec x) {
  const float scale = 1.0f + gin_epsilon(ws, partition);
  for (size_t i = 0; i < x.size(); ++i) x[i] = flush_zero(x[i] + scale * self_msg[i]);
  return x;
}

}  // namespace

bool builtin_hook_exists(std::string_view name) {
  return name == "sage_self" || name == "gin_self";
}

void validate_builtin_hook(std::string_view name, uint32_t partition, uint32_t x_dim,
                           uint32_t msg_dim, const WeightSet& ws) {
  if (name == "sage_self") {
    const Mat& w2 = sage_weight(ws, partition);
    if (w2.cols() != msg_dim || w2.rows() != x_dim)
      fail(Errc::dimension, "sage_self: " + sage_weight_name(partition) + " must be " +
                                std::to_string(x_dim) + "x" + std::to_string(msg_dim));
    return;
  }
  if (name == "gin_self") {
    gin_epsilon(ws, partition);
    if (x_dim != msg_dim)
      fail(Errc::dimension, "gin_self: running value and self message must have equal length");
    return;
  }
  fail(Errc::invalid_argument, "unknown user hook: " + std::string(name));
}

Vec apply_builtin_hook(std::string_view name, uint32_t partition, const WeightSet& ws,
                       std::span<const float> self_msg, Vec x) {
  if (name == "sage_self") return sage_self_apply(partition, ws, self_msg, std::move(x));
  if (name == "gin_self") return gin_self_apply(partition, ws, self_msg, std::move(x));
  fail(Errc::invalid_argument, "unknown user hook: " + std::string(name));
}

}  // namespace streamgnn
