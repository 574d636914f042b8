#ifndef CGBENCH_CALL_GRAPH_HPP
#define CGBENCH_CALL_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cgbench/error.hpp"

namespace cgbench {

/// A position inside a source file. Lines and columns are 1-based; the column
/// of a function is the column of its `function` keyword, which is what makes
/// positions usable as identities across tools.
struct SourcePosition {
  std::string file;
  int line = 1;
  int column = 1;

  friend bool operator==(const SourcePosition&, const SourcePosition&) = default;
};

/// Canonical identity of a call-graph node: (normalized file path, line,
/// column). Two nodes with equal keys are the same function regardless of
/// label.
struct NodeKey {
  std::string file;
  int line = 1;
  int column = 1;

  friend bool operator==(const NodeKey&, const NodeKey&) = default;
  friend bool operator<(const NodeKey& a, const NodeKey& b) {
    return std::tie(a.file, a.line, a.column) < std::tie(b.file, b.line, b.column);
  }

  std::string to_string() const {
    return file + ":" + std::to_string(line) + ":" + std::to_string(column);
  }
};

struct NodeKeyHash {
  size_t operator()(const NodeKey& k) const {
    size_t h = std::hash<std::string>{}(k.file);
    h ^= std::hash<int>{}(k.line) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<int>{}(k.column) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// Backslashes in paths are normalized to forward slashes so that graphs
/// produced on different platforms compare equal.
inline std::string normalize_path(std::string path) {
  std::replace(path.begin(), path.end(), '\\', '/');
  return path;
}

inline NodeKey node_key(const SourcePosition& pos) {
  return NodeKey{normalize_path(pos.file), pos.line, pos.column};
}

inline NodeKey node_key(std::string file, int line, int column) {
  return NodeKey{normalize_path(std::move(file)), line, column};
}

/// Key of the artificial node representing code executing at the top level of
/// a program (the "global" caller).
inline const NodeKey& toplevel_key() {
  static const NodeKey k{"toplevel", 1, 1};
  return k;
}

inline constexpr const char* kToplevelLabel = "toplevel";

struct FunctionNode {
  int id = 0;
  std::string label;  // display name; "anonymous" for unnamed functions
  SourcePosition position;

  NodeKey key() const { return node_key(position); }

  friend bool operator==(const FunctionNode&, const FunctionNode&) = default;
};

/// Directed call edge between node ids. Self loops (recursion) are valid.
struct CallEdge {
  int source = 0;
  int target = 0;

  friend bool operator==(const CallEdge&, const CallEdge&) = default;
  friend bool operator<(const CallEdge& a, const CallEdge& b) {
    return std::tie(a.source, a.target) < std::tie(b.source, b.target);
  }
};

using EdgeKeyPair = std::pair<NodeKey, NodeKey>;

struct EdgeKeyPairHash {
  size_t operator()(const EdgeKeyPair& e) const {
    size_t h = NodeKeyHash{}(e.first);
    h ^= NodeKeyHash{}(e.second) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// A call graph: deduplicated nodes keyed by position, deduplicated directed
/// edges between them. Node ids are dense, starting at 0, in insertion order.
class CallGraph {
 public:
  const std::vector<FunctionNode>& nodes() const { return nodes_; }
  const std::vector<CallEdge>& edges() const { return edges_; }

  bool empty() const { return nodes_.empty() && edges_.empty(); }

  /// Adds (or finds) a node for `key`. The label is only used when the node
  /// is first created; later calls with a different label keep the original.
  int add_node(const NodeKey& key, const std::string& label) {
    auto it = by_key_.find(key);
    if (it != by_key_.end()) return it->second;
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(FunctionNode{id, label, {key.file, key.line, key.column}});
    by_key_.emplace(key, id);
    return id;
  }

  /// Adds an edge between existing node ids; duplicates are ignored.
  /// Returns true when the edge was new.
  bool add_edge(int source, int target) {
    auto [it, inserted] = edge_set_.insert((uint64_t(uint32_t(source)) << 32) |
                                           uint32_t(target));
    if (inserted) edges_.push_back(CallEdge{source, target});
    return inserted;
  }

  const FunctionNode* find(const NodeKey& key) const {
    auto it = by_key_.find(key);
    return it == by_key_.end() ? nullptr : &nodes_[it->second];
  }

  bool has_edge(const NodeKey& from, const NodeKey& to) const {
    const FunctionNode* a = find(from);
    const FunctionNode* b = find(to);
    if (!a || !b) return false;
    return edge_set_.count((uint64_t(uint32_t(a->id)) << 32) | uint32_t(b->id)) > 0;
  }

  std::vector<EdgeKeyPair> edge_keys() const {
    std::vector<EdgeKeyPair> out;
    out.reserve(edges_.size());
    for (const CallEdge& e : edges_)
      out.emplace_back(nodes_[e.source].key(), nodes_[e.target].key());
    return out;
  }

  std::vector<NodeKey> node_keys() const {
    std::vector<NodeKey> out;
    out.reserve(nodes_.size());
    for (const FunctionNode& n : nodes_) out.push_back(n.key());
    return out;
  }

 private:
  std::vector<FunctionNode> nodes_;
  std::vector<CallEdge> edges_;
  std::unordered_map<NodeKey, int, NodeKeyHash> by_key_;
  std::unordered_set<uint64_t> edge_set_;
};

/// One observed call: the caller is either a function key or, when absent,
/// code at the global scope.
struct RawCall {
  std::optional<NodeKey> caller;  // nullopt == global scope ("toplevel")
  NodeKey callee;
};

using LabelMap = std::unordered_map<NodeKey, std::string, NodeKeyHash>;

inline constexpr const char* kAnonymousLabel = "anonymous";

inline std::string label_for(const LabelMap& labels, const NodeKey& key) {
  if (key == toplevel_key()) return kToplevelLabel;
  auto it = labels.find(key);
  if (it != labels.end() && !it->second.empty()) return it->second;
  return kAnonymousLabel;
}

/// Turns a list of raw calls into a canonical graph: global-scope callers are
/// folded into a single artificial "toplevel" node, nodes get dense ids in
/// first-appearance order, and duplicate edges collapse.
inline CallGraph canonicalize(const std::vector<RawCall>& calls,
                              const LabelMap& labels = {}) {
  CallGraph g;
  for (const RawCall& c : calls) {
    NodeKey from = c.caller ? *c.caller : toplevel_key();
    int s = g.add_node(from, label_for(labels, from));
    int t = g.add_node(c.callee, label_for(labels, c.callee));
    g.add_edge(s, t);
  }
  return g;
}

/// Structural equality on the canonical content (keys and key-level edges),
/// ignoring id numbering and labels.
inline bool same_shape(const CallGraph& a, const CallGraph& b) {
  auto na = a.node_keys(), nb = b.node_keys();
  std::sort(na.begin(), na.end());
  std::sort(nb.begin(), nb.end());
  if (na != nb) return false;
  auto ea = a.edge_keys(), eb = b.edge_keys();
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  return ea == eb;
}

}  // namespace cgbench

#endif  // CGBENCH_CALL_GRAPH_HPP
