#include "core/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace streamgnn {

DynamicGraph::DynamicGraph(uint32_t num_nodes)
    : num_nodes_(num_nodes), out_(num_nodes), in_(num_nodes) {
  if (num_nodes == 0) fail(Errc::invalid_argument, "graph must have at least one node");
}

void DynamicGraph::check_node(NodeId u) const {
  if (u >= num_nodes_) fail(Errc::invalid_argument, "node id out of range: " + std::to_string(u));
}

bool DynamicGraph::has_edge(NodeId src, NodeId dst) const {
  check_node(src);
  check_node(dst);
  const auto& nbrs = out_[src];
  return std::binary_search(nbrs.begin(), nbrs.end(), dst);
}

void DynamicGraph::insert_adj(NodeId src, NodeId dst) {
  auto& o = out_[src];
  o.insert(std::lower_bound(o.begin(), o.end(), dst), dst);
  auto& i = in_[dst];
  i.insert(std::lower_bound(i.begin(), i.end(), src), src);
  ++num_edges_;
}

void DynamicGraph::erase_adj(NodeId src, NodeId dst) {
  auto& o = out_[src];
  o.erase(std::lower_bound(o.begin(), o.end(), dst));
  auto& i = in_[dst];
  i.erase(std::lower_bound(i.begin(), i.end(), src));
  --num_edges_;
}

void DynamicGraph::add_edge(NodeId src, NodeId dst) {
  if (!pending_.empty())
    fail(Errc::invalid_argument, "add_edge is only valid with no pending delta");
  if (has_edge(src, dst))
    fail(Errc::duplicate_edge,
         "duplicate edge " + std::to_string(src) + "->" + std::to_string(dst));
  insert_adj(src, dst);
}

void DynamicGraph::apply_delta(std::span<const EdgeDelta> delta) {
  // Validate the whole sequence against an overlay first, so a bad op leaves
  // the graph untouched.
  std::map<std::pair<NodeId, NodeId>, bool> overlay;
  for (const EdgeDelta& d : delta) {
    check_node(d.src);
    check_node(d.dst);
    auto key = std::make_pair(d.src, d.dst);
    auto it = overlay.find(key);
    const bool present = it != overlay.end() ? it->second : has_edge(d.src, d.dst);
    if (d.op == EdgeOp::Insert && present)
      fail(Errc::duplicate_edge,
           "insert of existing edge " + std::to_string(d.src) + "->" + std::to_string(d.dst));
    if (d.op == EdgeOp::Delete && !present)
      fail(Errc::missing_edge,
           "delete of missing edge " + std::to_string(d.src) + "->" + std::to_string(d.dst));
    overlay[key] = d.op == EdgeOp::Insert;
  }

  for (const EdgeDelta& d : delta) {
    if (d.op == EdgeOp::Insert)
      insert_adj(d.src, d.dst);
    else
      erase_adj(d.src, d.dst);
    pending_.push_back(d);
  }
  prev_view_valid_ = true;
}

std::span<const NodeId> DynamicGraph::neighbors(NodeId u, Direction dir) const {
  check_node(u);
  const auto& nbrs = dir == Direction::Out ? out_[u] : in_[u];
  return {nbrs.data(), nbrs.size()};
}

std::vector<NodeId> DynamicGraph::neighbors_prev(NodeId u, Direction dir) const {
  if (!prev_view_valid_)
    fail(Errc::stale_delta, "previous-timestamp view requested after commit");
  check_node(u);
  auto cur = neighbors(u, dir);
  std::vector<NodeId> nbrs(cur.begin(), cur.end());
  // Invert the pending delta in reverse order.
  for (auto it = pending_.rbegin(); it != pending_.rend(); ++it) {
    NodeId self = dir == Direction::Out ? it->src : it->dst;
    if (self != u) continue;
    NodeId other = dir == Direction::Out ? it->dst : it->src;
    auto pos = std::lower_bound(nbrs.begin(), nbrs.end(), other);
    if (it->op == EdgeOp::Insert) {
      if (pos != nbrs.end() && *pos == other) nbrs.erase(pos);
    } else {
      if (pos == nbrs.end() || *pos != other) nbrs.insert(pos, other);
    }
  }
  return nbrs;
}

void DynamicGraph::commit() {
  pending_.clear();
  prev_view_valid_ = false;
}

std::vector<EdgeDelta> net_edge_delta(std::span<const EdgeDelta> delta) {
  struct Presence {
    bool initial;
    bool final;
  };
  std::map<std::pair<NodeId, NodeId>, Presence> state;
  for (const EdgeDelta& d : delta) {
    auto key = std::make_pair(d.src, d.dst);
    bool present = d.op == EdgeOp::Insert;
    auto [it, inserted] = state.try_emplace(key, Presence{!present, present});
    if (!inserted) it->second.final = present;
  }
  std::vector<EdgeDelta> net;
  for (const auto& [key, p] : state) {
    if (p.initial == p.final) continue;
    net.push_back({p.final ? EdgeOp::Insert : EdgeOp::Delete, key.first, key.second});
  }
  return net;
}

namespace {

bool parse_node_id(const std::string& tok, NodeId& out) {
  if (tok.empty()) return false;
  uint64_t v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<uint64_t>(c - '0');
    if (v > UINT32_MAX) return false;
  }
  out = static_cast<NodeId>(v);
  return true;
}

}  // namespace

DynamicGraph load_edge_list(const std::filesystem::path& path, bool symmetrize,
                            uint32_t num_nodes_hint) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open edge list: " + path.string());

  std::vector<std::pair<NodeId, NodeId>> edges;
  NodeId max_id = 0;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;  // blank line
    if (a[0] == '#') continue;
    NodeId src = 0, dst = 0;
    if (!(ls >> b) || (ls >> extra) || !parse_node_id(a, src) || !parse_node_id(b, dst))
      fail(Errc::format,
           "bad edge line " + std::to_string(lineno) + " in " + path.string());
    edges.emplace_back(src, dst);
    max_id = std::max({max_id, src, dst});
  }

  uint32_t n = std::max<uint32_t>(num_nodes_hint, edges.empty() ? 1 : max_id + 1);
  DynamicGraph g(n);
  for (auto [src, dst] : edges) {
    if (symmetrize) {
      if (!g.has_edge(src, dst)) g.add_edge(src, dst);
      if (src != dst && !g.has_edge(dst, src)) g.add_edge(dst, src);
    } else {
      g.add_edge(src, dst);
    }
  }
  return g;
}

void save_edge_list(const DynamicGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Errc::io, "cannot open for write: " + path.string());
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (NodeId v : g.neighbors(u, Direction::Out)) out << u << ' ' << v << '\n';
  if (!out) fail(Errc::io, "write failed: " + path.string());
}

std::vector<EdgeDelta> load_update_stream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open update stream: " + path.string());

  std::vector<EdgeDelta> stream;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string op, a, b, extra;
    if (!(ls >> op)) continue;
    if (op[0] == '#') continue;
    NodeId src = 0, dst = 0;
    if ((op != "+" && op != "-") || !(ls >> a >> b) || (ls >> extra) ||
        !parse_node_id(a, src) || !parse_node_id(b, dst))
      fail(Errc::format,
           "bad stream line " + std::to_string(lineno) + " in " + path.string());
    stream.push_back({op == "+" ? EdgeOp::Insert : EdgeOp::Delete, src, dst});
  }
  return stream;
}

void save_update_stream(std::span<const EdgeDelta> stream, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Errc::io, "cannot open for write: " + path.string());
  for (const EdgeDelta& d : stream)
    out << (d.op == EdgeOp::Insert ? '+' : '-') << ' ' << d.src << ' ' << d.dst << '\n';
  if (!out) fail(Errc::io, "write failed: " + path.string());
}

}  // namespace streamgnn
