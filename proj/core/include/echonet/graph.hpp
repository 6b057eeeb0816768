#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace echonet {

using NodeId = std::uint32_t;

// Directed followership graph: edge j -> i means j follows i, content
// flows i -> j. Out-lists (followees) and in-lists (followers) are kept
// mutually consistent after every mutation. Rewiring retargets edges and
// never changes a node's out-degree. Node ids are dense 0..n-1.
class AdaptiveDigraph {
 public:
  explicit AdaptiveDigraph(NodeId node_count);

  static AdaptiveDigraph from_edges(
      NodeId node_count, std::span<const std::pair<NodeId, NodeId>> edges);

  NodeId node_count() const { return static_cast<NodeId>(out_adj_.size()); }
  std::uint64_t edge_count() const { return edge_count_; }

  std::span<const NodeId> followees(NodeId node) const;
  std::span<const NodeId> followers(NodeId node) const;

  std::uint32_t out_degree(NodeId node) const {
    return static_cast<std::uint32_t>(out_adj_[node].size());
  }
  std::uint32_t in_degree(NodeId node) const {
    return static_cast<std::uint32_t>(in_adj_[node].size());
  }

  // Linear scan of src's out-list; out-degrees stay small (~z).
  bool has_edge(NodeId src, NodeId dst) const;

  // Construction-time insertion. Throws on self-loop, duplicate, or
  // out-of-range ids.
  void add_edge(NodeId src, NodeId dst);

  // Replaces follower->old_target with follower->new_target, updating both
  // in-lists (swap-remove in old_target's). Throws if the old edge is
  // missing, new_target == follower, or the new edge already exists.
  void retarget_edge(NodeId follower, NodeId old_target, NodeId new_target);

  // Hot-path variant used by the event loop, which already knows where the
  // edge sits: follower = followers(target)[in_pos] and
  // followees(follower)[out_pos] == target. new_target must be valid
  // (!= follower, not already followed). Checked by assert only.
  void retarget_slots(NodeId target, std::size_t in_pos, std::size_t out_pos,
                      NodeId new_target);

  // Sorted (src, dst) pairs; byte-stable export order.
  std::vector<std::pair<NodeId, NodeId>> sorted_edges() const;

  // Full-scan verification of bidirectional consistency, no self-loops and
  // no duplicate out-edges. For tests and debugging.
  bool check_consistency() const;

 private:
  std::vector<std::vector<NodeId>> out_adj_;
  std::vector<std::vector<NodeId>> in_adj_;
  std::uint64_t edge_count_ = 0;
};

}  // namespace echonet
