#pragma once

// Naive reference implementation used only by tests. Deliberately written
// with plain scalar loops over plain containers, independent of the engine,
// the checkpoint store and the baseline module. It mirrors the pinned
// arithmetic rules (ascending-index float accumulation, bias added last,
// negative zeros flushed, ReLU via x > 0) so agreement is expected bitwise.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

using VecF = std::vector<float>;
using Table = std::vector<VecF>;
using Edge = std::pair<uint32_t, uint32_t>;

inline float fz(float x) { return x == 0.0f ? 0.0f : x; }

inline VecF matvec(const std::vector<VecF>& w_rows, const VecF& x, const VecF* bias) {
  VecF out(w_rows.size());
  for (size_t r = 0; r < w_rows.size(); ++r) {
    float acc = 0.0f;
    for (size_t c = 0; c < x.size(); ++c) acc += w_rows[r][c] * x[c];
    if (bias) acc += (*bias)[r];
    out[r] = fz(acc);
  }
  return out;
}

inline VecF relu(VecF x) {
  for (float& v : x) v = v > 0.0f ? v : 0.0f;
  return x;
}

inline VecF reduce(bool is_min, const std::vector<VecF>& inputs, size_t dim) {
  if (inputs.empty()) return VecF(dim, 0.0f);
  VecF out = inputs[0];
  for (size_t i = 1; i < inputs.size(); ++i)
    for (size_t j = 0; j < out.size(); ++j)
      out[j] = is_min ? (inputs[i][j] < out[j] ? inputs[i][j] : out[j])
                      : (inputs[i][j] > out[j] ? inputs[i][j] : out[j]);
  return out;
}

struct Model {
  bool is_min = true;
  // combine[l](alpha, self_message) -> message of layer l+2 (or final output)
  std::vector<std::function<VecF(const VecF&, const VecF&)>> combine;
};

struct Result {
  std::vector<Table> msg;  // msg[l-1] = messages of layer l, l in 1..k+1
  std::vector<Table> agg;  // agg[l-1] = aggregated neighborhoods of layer l
};

inline Result full_inference(uint32_t num_nodes, const std::vector<Edge>& edges,
                             const Table& features, const Model& model) {
  std::vector<std::vector<uint32_t>> in_adj(num_nodes);
  for (const Edge& e : edges) in_adj[e.second].push_back(e.first);
  for (auto& nbrs : in_adj) std::sort(nbrs.begin(), nbrs.end());

  Result result;
  result.msg.push_back(features);
  const size_t layers = model.combine.size();
  for (size_t l = 0; l < layers; ++l) {
    const Table& msgs = result.msg[l];
    Table alpha(num_nodes), next(num_nodes);
    for (uint32_t v = 0; v < num_nodes; ++v) {
      std::vector<VecF> inputs;
      for (uint32_t u : in_adj[v]) inputs.push_back(msgs[u]);
      alpha[v] = reduce(model.is_min, inputs, msgs[v].size());
      next[v] = model.combine[l](alpha[v], msgs[v]);
    }
    result.agg.push_back(std::move(alpha));
    result.msg.push_back(std::move(next));
  }
  return result;
}

}  // namespace oracle
