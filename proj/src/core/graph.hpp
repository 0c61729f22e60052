#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "core/error.hpp"

namespace streamgnn {

using NodeId = uint32_t;

enum class EdgeOp : uint8_t { Insert, Delete };
enum class Direction : uint8_t { Out, In };

struct EdgeDelta {
  EdgeOp op;
  NodeId src;
  NodeId dst;
  bool operator==(const EdgeDelta&) const = default;
};

// Directed dynamic graph with sorted adjacency for the current timestamp and
// a retained delta, so the previous-timestamp neighborhood stays answerable
// until the round is committed.
class DynamicGraph {
public:
  explicit DynamicGraph(uint32_t num_nodes);

  uint32_t num_nodes() const { return num_nodes_; }
  uint64_t num_edges() const { return num_edges_; }
  bool has_edge(NodeId src, NodeId dst) const;

  // Immediate edge insertion while building a base snapshot; not allowed once
  // a delta is pending.
  void add_edge(NodeId src, NodeId dst);

  void apply_delta(std::span<const EdgeDelta> delta);
  std::span<const NodeId> neighbors(NodeId u, Direction dir) const;
  std::vector<NodeId> neighbors_prev(NodeId u, Direction dir) const;
  const std::vector<EdgeDelta>& pending_delta() const { return pending_; }
  void commit();

private:
  void check_node(NodeId u) const;
  void insert_adj(NodeId src, NodeId dst);
  void erase_adj(NodeId src, NodeId dst);

  uint32_t num_nodes_;
  uint64_t num_edges_ = 0;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<EdgeDelta> pending_;
  bool prev_view_valid_ = true;
};

// Net effect of a delta sequence: one Insert/Delete per edge whose presence
// actually changed end to end, sorted by (src, dst). Insert-then-delete pairs
// cancel out.
std::vector<EdgeDelta> net_edge_delta(std::span<const EdgeDelta> delta);

// Edge-list file: one edge per line, "src dst". With symmetrize, every edge
// is loaded in both directions (duplicates ignored).
DynamicGraph load_edge_list(const std::filesystem::path& path, bool symmetrize,
                            uint32_t num_nodes_hint = 0);
void save_edge_list(const DynamicGraph& g, const std::filesystem::path& path);

// Update-stream file: one line per event, "<op:+|-> <src> <dst>".
std::vector<EdgeDelta> load_update_stream(const std::filesystem::path& path);
void save_update_stream(std::span<const EdgeDelta> stream, const std::filesystem::path& path);

}  // namespace streamgnn
