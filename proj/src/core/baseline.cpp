#include "core/baseline.hpp"

#include <algorithm>
#include <cstring>

namespace streamgnn::baseline {

namespace {

// Self-message access over a plain matrix, with optional read counting.
class CountingApplyContext : public ApplyContext {
public:
  CountingApplyContext(const Mat& msgs, NodeId node, int layer, FetchCounters* counters)
      : msgs_(msgs), node_(node), layer_(layer), counters_(counters) {}

  std::span<const float> self_message() override {
    if (counters_) {
      if (layer_ == 1)
        ++counters_->layer1_message_rows;
      else
        ++counters_->other_rows;
    }
    return msgs_.row(node_);
  }

private:
  const Mat& msgs_;
  NodeId node_;
  int layer_;
  FetchCounters* counters_;
};

void count_message_read(int layer, FetchCounters* counters) {
  if (!counters) return;
  if (layer == 1)
    ++counters->layer1_message_rows;
  else
    ++counters->other_rows;
}

Vec aggregate_in_neighbors(const DynamicGraph& g, const Mat& msgs, NodeId v, Aggregator agg,
                           int layer, FetchCounters* counters) {
  auto nbrs = g.neighbors(v, Direction::In);
  Vec alpha(msgs.cols(), 0.0f);
  if (!nbrs.empty()) {
    count_message_read(layer, counters);
    auto first = msgs.row(nbrs[0]);
    alpha.assign(first.begin(), first.end());
    for (size_t i = 1; i < nbrs.size(); ++i) {
      count_message_read(layer, counters);
      ewise_reduce_into(agg, msgs.row(nbrs[i]), alpha);
    }
  }
  return alpha;
}

bool partition_has_user_op(const Model& model, int partition) {
  const Partition& part = model.spec().partitions()[partition];
  const auto& ops = model.spec().ops();
  for (uint32_t i = part.aggregate + 1; i < part.end; ++i)
    if (ops[i].kind == ModelOp::Kind::UserApply) return true;
  return false;
}

}  // namespace

EmbeddingSet full_inference(const DynamicGraph& g, const Mat& features, const Model& model,
                            FetchCounters* counters) {
  if (features.rows() != g.num_nodes()) fail(Errc::dimension, "feature rows != node count");
  if (features.cols() != model.input_dim())
    fail(Errc::dimension, "feature length != model input dimension");
  if (has_nan(features.data())) fail(Errc::nan_input, "NaN in features");

  const int k = model.num_layers();
  EmbeddingSet out;
  for (int l = 1; l <= k + 1; ++l) out.msg.emplace_back(g.num_nodes(), model.message_dim(l));
  for (int l = 1; l <= k; ++l) out.agg.emplace_back(g.num_nodes(), model.message_dim(l));

  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    Vec m(features.row(v).begin(), features.row(v).end());
    if (model.has_prefix_ops()) {
      if (counters) ++counters->layer1_message_rows;  // feature row materialized
      m = run_prefix(model, std::move(m));
    }
    std::memcpy(out.msg[0].row(v).data(), m.data(), m.size() * sizeof(float));
  }

  for (int l = 1; l <= k; ++l) {
    const Mat& msgs = out.msg[l - 1];
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      Vec alpha = aggregate_in_neighbors(g, msgs, v, model.aggregator(), l, counters);
      std::memcpy(out.agg[l - 1].row(v).data(), alpha.data(), alpha.size() * sizeof(float));
      CountingApplyContext ctx(msgs, v, l, counters);
      Vec next = run_combination(model, l - 1, std::move(alpha), &ctx);
      std::memcpy(out.msg[l].row(v).data(), next.data(), next.size() * sizeof(float));
    }
  }
  return out;
}

std::vector<std::vector<NodeId>> affected_area(const DynamicGraph& post_graph,
                                               std::span<const EdgeDelta> delta, int hops) {
  auto net = net_edge_delta(delta);
  std::vector<char> reached(post_graph.num_nodes(), 0);
  std::vector<NodeId> frontier;
  for (const EdgeDelta& d : net) {
    for (NodeId u : {d.src, d.dst}) {
      if (!reached[u]) {
        reached[u] = 1;
        frontier.push_back(u);
      }
    }
  }

  std::vector<std::vector<NodeId>> area(static_cast<size_t>(hops));
  std::vector<NodeId> members = frontier;
  for (int l = 0; l < hops; ++l) {
    std::vector<NodeId> next;
    for (NodeId u : frontier)
      for (NodeId v : post_graph.neighbors(u, Direction::Out))
        if (!reached[v]) {
          reached[v] = 1;
          next.push_back(v);
        }
    members.insert(members.end(), next.begin(), next.end());
    frontier = std::move(next);
    area[l] = members;
    std::sort(area[l].begin(), area[l].end());
  }
  return area;
}

std::vector<double> affected_area_ratio(const DynamicGraph& post_graph,
                                        std::span<const EdgeDelta> delta, int hops) {
  auto area = affected_area(post_graph, delta, hops);
  std::vector<double> ratio(area.size());
  for (size_t i = 0; i < area.size(); ++i)
    ratio[i] = static_cast<double>(area[i].size()) / post_graph.num_nodes();
  return ratio;
}

namespace {

// need[l] = nodes whose layer-l message must be recomputed so that every
// affected node's per-layer values come out exact: need[k+1] = area(k), and
// walking backwards each layer keeps the set and pulls in its in-neighborhood.
// area(l) is contained in every need set, so all changed intermediates get
// recomputed rather than copied stale.
std::vector<std::vector<NodeId>> backward_need_sets(const DynamicGraph& g,
                                                    const std::vector<NodeId>& final_area,
                                                    const Model& model) {
  const int k = model.num_layers();
  std::vector<std::vector<NodeId>> need(static_cast<size_t>(k) + 2);
  need[k + 1] = final_area;
  for (int l = k; l >= 1; --l) {
    std::vector<char> in_set(g.num_nodes(), 0);
    std::vector<NodeId> members;
    for (NodeId v : need[l + 1]) {
      if (!in_set[v]) {
        in_set[v] = 1;
        members.push_back(v);
      }
      for (NodeId u : g.neighbors(v, Direction::In))
        if (!in_set[u]) {
          in_set[u] = 1;
          members.push_back(u);
        }
    }
    std::sort(members.begin(), members.end());
    need[l] = std::move(members);
  }
  return need;
}

}  // namespace

EmbeddingSet affected_inference(const DynamicGraph& post_graph, std::span<const EdgeDelta> delta,
                                const Mat& features, const Model& model, const EmbeddingSet& prev,
                                FetchCounters* counters) {
  const int k = model.num_layers();
  auto area = affected_area(post_graph, delta, k);
  auto need = backward_need_sets(post_graph, area[k - 1], model);

  EmbeddingSet out = prev;

  // Layer-1 messages for every node whose message any recompute will read.
  for (NodeId v : need[1]) {
    Vec m(features.row(v).begin(), features.row(v).end());
    if (model.has_prefix_ops()) {
      if (counters) ++counters->layer1_message_rows;
      m = run_prefix(model, std::move(m));
    }
    std::memcpy(out.msg[0].row(v).data(), m.data(), m.size() * sizeof(float));
  }

  for (int l = 1; l <= k; ++l) {
    const Mat& msgs = out.msg[l - 1];
    for (NodeId v : need[l + 1]) {
      Vec alpha = aggregate_in_neighbors(post_graph, msgs, v, model.aggregator(), l, counters);
      std::memcpy(out.agg[l - 1].row(v).data(), alpha.data(), alpha.size() * sizeof(float));
      CountingApplyContext ctx(msgs, v, l, counters);
      Vec next = run_combination(model, l - 1, std::move(alpha), &ctx);
      std::memcpy(out.msg[l].row(v).data(), next.data(), next.size() * sizeof(float));
    }
  }
  return out;
}

uint64_t affected_fetch_count(const DynamicGraph& post_graph, std::span<const EdgeDelta> delta,
                              const Model& model) {
  const int k = model.num_layers();
  auto area = affected_area(post_graph, delta, k);
  auto need = backward_need_sets(post_graph, area[k - 1], model);

  uint64_t count = model.has_prefix_ops() ? need[1].size() : 0;
  for (int l = 1; l <= k; ++l) {
    const uint64_t self = partition_has_user_op(model, l - 1) ? 1 : 0;
    for (NodeId v : need[l + 1])
      count += post_graph.neighbors(v, Direction::In).size() + self;
  }
  return count;
}

uint64_t full_fetch_count(const DynamicGraph& g, const Model& model) {
  uint64_t count = model.has_prefix_ops() ? g.num_nodes() : 0;
  for (int l = 1; l <= model.num_layers(); ++l) {
    const uint64_t self = partition_has_user_op(model, l - 1) ? 1 : 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      count += g.neighbors(v, Direction::In).size() + self;
  }
  return count;
}

std::optional<VerifyMismatch> verify_against_full(const CheckpointStore& store,
                                                  const DynamicGraph& g, const Mat& features,
                                                  const Model& model) {
  EmbeddingSet ref = full_inference(g, features, model);
  const int k = model.num_layers();
  for (int l = 1; l <= k + 1; ++l) {
    for (int s = 0; s < (l <= k ? 2 : 1); ++s) {
      Stage stage = s == 0 ? Stage::Message : Stage::Aggregated;
      const Mat& got = store.table(l, stage);
      const Mat& want = stage == Stage::Message ? ref.msg[l - 1] : ref.agg[l - 1];
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        auto a = got.row(v);
        auto b = want.row(v);
        if (std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) != 0) {
          for (uint32_t i = 0; i < a.size(); ++i)
            if (std::memcmp(&a[i], &b[i], sizeof(float)) != 0)
              return VerifyMismatch{l, stage, v, i};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace streamgnn::baseline
