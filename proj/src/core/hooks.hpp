#pragma once

#include <span>
#include <string>
#include <string_view>

#include "core/model.hpp"

namespace streamgnn {

// Built-in user hooks. Both carry the node's own message from the previous
// layer into the combination:
//   sage_self: x += W2_<partition> * m_self
//   gin_self:  x += (1 + epsilon_<partition>) * m_self
bool builtin_hook_exists(std::string_view name);

void validate_builtin_hook(std::string_view name, uint32_t partition, uint32_t x_dim,
                           uint32_t msg_dim, const WeightSet& ws);

Vec apply_builtin_hook(std::string_view name, uint32_t partition, const WeightSet& ws,
                       std::span<const float> self_msg, Vec x);

}  // namespace streamgnn
