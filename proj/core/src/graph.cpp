#include "echonet/graph.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace echonet {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("graph: " + msg);
}

}  // namespace

AdaptiveDigraph::AdaptiveDigraph(NodeId node_count)
    : out_adj_(node_count), in_adj_(node_count) {}

AdaptiveDigraph AdaptiveDigraph::from_edges(
    NodeId node_count, std::span<const std::pair<NodeId, NodeId>> edges) {
  AdaptiveDigraph g(node_count);
  for (const auto& [src, dst] : edges) g.add_edge(src, dst);
  return g;
}

std::span<const NodeId> AdaptiveDigraph::followees(NodeId node) const {
  if (node >= node_count()) fail("node id out of range");
  return out_adj_[node];
}

std::span<const NodeId> AdaptiveDigraph::followers(NodeId node) const {
  if (node >= node_count()) fail("node id out of range");
  return in_adj_[node];
}

bool AdaptiveDigraph::has_edge(NodeId src, NodeId dst) const {
  const auto& out = out_adj_[src];
  return std::find(out.begin(), out.end(), dst) != out.end();
}

void AdaptiveDigraph::add_edge(NodeId src, NodeId dst) {
  if (src >= node_count() || dst >= node_count()) fail("node id out of range");
  if (src == dst) fail("self-loop rejected");
  if (has_edge(src, dst)) fail("duplicate edge rejected");
  out_adj_[src].push_back(dst);
  in_adj_[dst].push_back(src);
  ++edge_count_;
}

void AdaptiveDigraph::retarget_edge(NodeId follower, NodeId old_target,
                                    NodeId new_target) {
  if (follower >= node_count() || old_target >= node_count() ||
      new_target >= node_count()) {
    fail("node id out of range");
  }
  if (new_target == follower) fail("retarget to self rejected");
  auto& out = out_adj_[follower];
  const auto out_it = std::find(out.begin(), out.end(), old_target);
  if (out_it == out.end()) fail("edge to retarget does not exist");
  if (std::find(out.begin(), out.end(), new_target) != out.end()) {
    fail("retarget would duplicate an existing edge");
  }
  auto& in_old = in_adj_[old_target];
  const auto in_it = std::find(in_old.begin(), in_old.end(), follower);
  assert(in_it != in_old.end());
  retarget_slots(old_target,
                 static_cast<std::size_t>(in_it - in_old.begin()),
                 static_cast<std::size_t>(out_it - out.begin()), new_target);
}

void AdaptiveDigraph::retarget_slots(NodeId target, std::size_t in_pos,
                                     std::size_t out_pos, NodeId new_target) {
  auto& in_old = in_adj_[target];
  const NodeId follower = in_old[in_pos];
  assert(out_adj_[follower][out_pos] == target);
  assert(new_target != follower && new_target < node_count());
  assert(!has_edge(follower, new_target));

  in_old[in_pos] = in_old.back();
  in_old.pop_back();
  out_adj_[follower][out_pos] = new_target;
  in_adj_[new_target].push_back(follower);
}

std::vector<std::pair<NodeId, NodeId>> AdaptiveDigraph::sorted_edges() const {
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(edge_count_);
  for (NodeId src = 0; src < node_count(); ++src) {
    for (NodeId dst : out_adj_[src]) edges.emplace_back(src, dst);
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

bool AdaptiveDigraph::check_consistency() const {
  std::uint64_t out_total = 0;
  std::uint64_t in_total = 0;
  for (NodeId src = 0; src < node_count(); ++src) {
    std::unordered_set<NodeId> seen;
    for (NodeId dst : out_adj_[src]) {
      if (dst >= node_count() || dst == src) return false;
      if (!seen.insert(dst).second) return false;
      const auto& in = in_adj_[dst];
      if (std::find(in.begin(), in.end(), src) == in.end()) return false;
    }
    out_total += out_adj_[src].size();
  }
  for (NodeId dst = 0; dst < node_count(); ++dst) {
    for (NodeId src : in_adj_[dst]) {
      if (src >= node_count()) return false;
      const auto& out = out_adj_[src];
      if (std::find(out.begin(), out.end(), dst) == out.end()) return false;
    }
    in_total += in_adj_[dst].size();
  }
  return out_total == in_total && out_total == edge_count_;
}

}  // namespace echonet
