#pragma once

#include <optional>

#include "core/checkpoint.hpp"

namespace streamgnn::baseline {

// Per-layer embeddings produced by the reference paths: msg[l-1] = m_l for
// l in 1..k+1 (the last one is the final output), agg[l-1] = a_l for l in 1..k.
struct EmbeddingSet {
  std::vector<Mat> msg;
  std::vector<Mat> agg;
  bool operator==(const EmbeddingSet&) const = default;
};

// Whole-graph inference on the current snapshot. When counters are supplied,
// every row read to aggregate or to feed a user hook is counted.
EmbeddingSet full_inference(const DynamicGraph& g, const Mat& features, const Model& model,
                            FetchCounters* counters = nullptr);

// Per-layer theoretically affected area: area[l-1] = nodes within l hops
// forward of the endpoints of the net delta, following current out-edges,
// sorted ascending. Endpoints themselves count as hop 0.
std::vector<std::vector<NodeId>> affected_area(const DynamicGraph& post_graph,
                                               std::span<const EdgeDelta> delta, int hops);

// |area(l)| / |V| for l = 1..hops.
std::vector<double> affected_area_ratio(const DynamicGraph& post_graph,
                                        std::span<const EdgeDelta> delta, int hops);

// Recomputes the nodes of the affected area from scratch by fetching their
// full k-hop in-neighborhoods on the post-delta graph; everything else is
// copied from `prev`. Output equals full_inference on the post-delta graph.
EmbeddingSet affected_inference(const DynamicGraph& post_graph, std::span<const EdgeDelta> delta,
                                const Mat& features, const Model& model, const EmbeddingSet& prev,
                                FetchCounters* counters = nullptr);

// Row reads the reference paths would perform, computed structurally without
// running the arithmetic.
uint64_t affected_fetch_count(const DynamicGraph& post_graph, std::span<const EdgeDelta> delta,
                              const Model& model);
uint64_t full_fetch_count(const DynamicGraph& g, const Model& model);

struct VerifyMismatch {
  int layer = 0;
  Stage stage = Stage::Message;
  NodeId node = 0;
  uint32_t index = 0;
};

// Bitwise comparison of a checkpoint store against full inference on the
// given graph; nullopt when identical.
std::optional<VerifyMismatch> verify_against_full(const CheckpointStore& store,
                                                  const DynamicGraph& g, const Mat& features,
                                                  const Model& model);

}  // namespace streamgnn::baseline
