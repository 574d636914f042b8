#ifndef CGBENCH_MERGE_HPP
#define CGBENCH_MERGE_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cgbench/call_graph.hpp"
#include "cgbench/error.hpp"
#include "cgbench/json_io.hpp"

namespace cgbench {

/// A node of the union graph. `label` is the first label any input assigned;
/// `labels` keeps every distinct label seen, in input order, as an audit
/// trail for position-but-not-name agreements. `tools` is sorted.
struct MergedNode {
  int id = 0;
  std::string label;
  SourcePosition position;
  std::vector<std::string> tools;
  std::vector<std::string> labels;

  NodeKey key() const {
    return {position.file, position.line, position.column};
  }
};

/// An edge of the union graph with the sorted set of tools reporting it and
/// an optional ground-truth verdict (absent until someone validates it).
struct MergedEdge {
  int source = 0;
  int target = 0;
  std::vector<std::string> tools;
  std::optional<bool> valid;
};

inline std::string tool_id(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Union of several tools' graphs over shared node keys. Tool ids are
/// case-normalized; the universe is the set of ids observed in the inputs.
class MergedGraph {
 public:
  const std::vector<MergedNode>& nodes() const { return nodes_; }
  const std::vector<MergedEdge>& edges() const { return edges_; }
  const std::vector<std::string>& tool_ids() const { return universe_; }

  const MergedNode* find_node(const NodeKey& key) const {
    auto it = by_key_.find(key);
    return it == by_key_.end() ? nullptr : &nodes_[it->second];
  }

  const MergedEdge* find_edge(const EdgeKeyPair& key) const {
    auto it = edge_index_.find(key);
    return it == edge_index_.end() ? nullptr : &edges_[it->second];
  }

  MergedEdge* find_edge(const EdgeKeyPair& key) {
    auto it = edge_index_.find(key);
    return it == edge_index_.end() ? nullptr : &edges_[it->second];
  }

  EdgeKeyPair edge_key(const MergedEdge& e) const {
    return {nodes_[e.source].key(), nodes_[e.target].key()};
  }

  /// Folds one more tool's graph into the union. The id is case-normalized
  /// here; re-using an id accumulates into the same tool (merge() rejects
  /// duplicates up front instead).
  void absorb(const std::string& raw_tool, const CallGraph& g) {
    std::string tool = tool_id(raw_tool);
    if (tool.empty()) throw Error(Errc::duplicate_tool_id, "empty tool id");
    if (!std::binary_search(universe_.begin(), universe_.end(), tool))
      universe_.insert(
          std::upper_bound(universe_.begin(), universe_.end(), tool), tool);
    std::vector<int> remap(g.nodes().size());
    for (const FunctionNode& n : g.nodes()) {
      int id = intern_node(n.key());
      remap[static_cast<size_t>(n.id)] = id;
      MergedNode& m = nodes_[static_cast<size_t>(id)];
      if (m.labels.empty()) m.label = n.label;
      if (std::find(m.labels.begin(), m.labels.end(), n.label) == m.labels.end())
        m.labels.push_back(n.label);
      insert_tool(m.tools, tool);
    }
    for (const CallEdge& e : g.edges()) {
      int s = remap[static_cast<size_t>(e.source)];
      int t = remap[static_cast<size_t>(e.target)];
      EdgeKeyPair key{nodes_[static_cast<size_t>(s)].key(),
                      nodes_[static_cast<size_t>(t)].key()};
      auto it = edge_index_.find(key);
      if (it == edge_index_.end()) {
        edge_index_.emplace(key, edges_.size());
        edges_.push_back({s, t, {tool}, std::nullopt});
      } else {
        insert_tool(edges_[it->second].tools, tool);
      }
    }
  }

  // Used by the deserializer, which re-creates records verbatim.
  int intern_node(const NodeKey& key) {
    auto it = by_key_.find(key);
    if (it != by_key_.end()) return static_cast<int>(it->second);
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({id, "", {key.file, key.line, key.column}, {}, {}});
    by_key_.emplace(key, static_cast<size_t>(id));
    return id;
  }

  MergedNode& node_mut(int id) { return nodes_[static_cast<size_t>(id)]; }
  MergedEdge& edge_mut(size_t index) { return edges_[index]; }

  void restore_edge(MergedEdge e) {
    EdgeKeyPair key{nodes_[static_cast<size_t>(e.source)].key(),
                    nodes_[static_cast<size_t>(e.target)].key()};
    edge_index_.emplace(key, edges_.size());
    edges_.push_back(std::move(e));
  }

  void rebuild_universe() {
    std::set<std::string> ids;
    for (const MergedNode& n : nodes_) ids.insert(n.tools.begin(), n.tools.end());
    for (const MergedEdge& e : edges_) ids.insert(e.tools.begin(), e.tools.end());
    universe_.assign(ids.begin(), ids.end());
  }

 private:
  static void insert_tool(std::vector<std::string>& tools, const std::string& t) {
    auto it = std::lower_bound(tools.begin(), tools.end(), t);
    if (it == tools.end() || *it != t) tools.insert(it, t);
  }

  std::vector<MergedNode> nodes_;
  std::vector<MergedEdge> edges_;
  std::vector<std::string> universe_;
  std::unordered_map<NodeKey, size_t, NodeKeyHash> by_key_;
  std::unordered_map<EdgeKeyPair, size_t, EdgeKeyPairHash> edge_index_;
};

/// Merges the given (tool id, graph) pairs in order. Ids are case-normalized
/// and must be distinct afterwards (DUPLICATE_TOOL_ID).
inline MergedGraph merge(
    const std::vector<std::pair<std::string, CallGraph>>& inputs) {
  std::set<std::string> seen;
  for (const auto& [raw, g] : inputs) {
    (void)g;
    std::string id = tool_id(raw);
    if (id.empty())
      throw Error(Errc::duplicate_tool_id, "empty tool id");
    if (!seen.insert(id).second)
      throw Error(Errc::duplicate_tool_id, "tool id \"" + id + "\" given twice");
  }
  MergedGraph m;
  for (const auto& [raw, g] : inputs) m.absorb(raw, g);
  return m;
}

/// Records ground-truth verdicts on existing union edges. An edge key that is
/// not in the union is UNKNOWN_EDGE.
inline void set_validity(MergedGraph& m,
                         const std::vector<std::pair<EdgeKeyPair, bool>>& verdicts) {
  for (const auto& [key, ok] : verdicts) {
    MergedEdge* e = m.find_edge(key);
    if (!e)
      throw Error(Errc::unknown_edge, "no edge " + key.first.to_string() +
                                          " -> " + key.second.to_string());
    e->valid = ok;
  }
}

// ------------------------------------------------------------------- diff

struct EdgeDiff {
  std::vector<EdgeKeyPair> common;
  std::vector<EdgeKeyPair> only_a;
  std::vector<EdgeKeyPair> only_b;
};

/// Key-level comparison of two graphs' edge sets; each bucket is sorted.
inline EdgeDiff diff(const CallGraph& a, const CallGraph& b) {
  std::vector<EdgeKeyPair> ea = a.edge_keys();
  std::vector<EdgeKeyPair> eb = b.edge_keys();
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  EdgeDiff d;
  std::set_intersection(ea.begin(), ea.end(), eb.begin(), eb.end(),
                        std::back_inserter(d.common));
  std::set_difference(ea.begin(), ea.end(), eb.begin(), eb.end(),
                      std::back_inserter(d.only_a));
  std::set_difference(eb.begin(), eb.end(), ea.begin(), ea.end(),
                      std::back_inserter(d.only_b));
  return d;
}

/// Extracts the single-tool view of a union graph: the nodes and edges that
/// tool reported, as a plain graph (node ids re-densified).
inline CallGraph project(const MergedGraph& m, const std::string& raw_tool) {
  std::string tool = tool_id(raw_tool);
  CallGraph g;
  std::vector<int> remap(m.nodes().size(), -1);
  for (const MergedNode& n : m.nodes())
    if (std::binary_search(n.tools.begin(), n.tools.end(), tool))
      remap[static_cast<size_t>(n.id)] = g.add_node(n.key(), n.label);
  for (const MergedEdge& e : m.edges())
    if (std::binary_search(e.tools.begin(), e.tools.end(), tool))
      g.add_edge(remap[static_cast<size_t>(e.source)],
                 remap[static_cast<size_t>(e.target)]);
  return g;
}

// ------------------------------------------------------------ venn regions

/// One cell of the agreement partition: the edges reported by exactly this
/// tool subset, with how many of them are validated true.
struct VennRegion {
  std::vector<std::string> combination;
  long long count = 0;
  long long true_count = 0;
};

namespace detail {

/// All non-empty subsets of `universe`, ordered by size then lexicographic.
inline std::vector<std::vector<std::string>> enumerate_combinations(
    const std::vector<std::string>& universe) {
  if (universe.size() > 16)
    throw Error(Errc::usage, "too many tools to enumerate combinations");
  std::vector<std::vector<std::string>> out;
  size_t k = universe.size();
  for (size_t size = 1; size <= k; ++size) {
    std::vector<size_t> idx(size);
    for (size_t i = 0; i < size; ++i) idx[i] = i;
    for (;;) {
      std::vector<std::string> combo;
      combo.reserve(size);
      for (size_t i : idx) combo.push_back(universe[i]);
      out.push_back(std::move(combo));
      size_t i = size;
      while (i > 0 && idx[i - 1] == k - size + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

}  // namespace detail

/// Partitions the union's edges by the exact tool subset that reported them.
/// Every subset of the universe appears, including empty cells, ordered by
/// subset size then lexicographically.
inline std::vector<VennRegion> venn_regions(const MergedGraph& m) {
  std::map<std::vector<std::string>, std::pair<long long, long long>> cells;
  for (const MergedEdge& e : m.edges()) {
    auto& cell = cells[e.tools];
    ++cell.first;
    if (e.valid && *e.valid) ++cell.second;
  }
  std::vector<VennRegion> out;
  for (std::vector<std::string>& combo :
       detail::enumerate_combinations(m.tool_ids())) {
    auto it = cells.find(combo);
    VennRegion r;
    r.count = it == cells.end() ? 0 : it->second.first;
    r.true_count = it == cells.end() ? 0 : it->second.second;
    r.combination = std::move(combo);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------- serialization

inline json to_json(const MergedGraph& m) {
  json doc;
  doc["nodes"] = json::array();
  for (const MergedNode& n : m.nodes()) {
    json jn = {{"id", n.id},
               {"label", n.label},
               {"file", normalize_path(n.position.file)},
               {"line", n.position.line},
               {"column", n.position.column},
               {"tools", n.tools},
               {"labels", n.labels}};
    doc["nodes"].push_back(std::move(jn));
  }
  std::vector<size_t> order(m.edges().size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const MergedEdge& ea = m.edges()[a];
    const MergedEdge& eb = m.edges()[b];
    return ea.source != eb.source ? ea.source < eb.source
                                  : ea.target < eb.target;
  });
  doc["edges"] = json::array();
  for (size_t i : order) {
    const MergedEdge& e = m.edges()[i];
    json je = {{"source", e.source}, {"target", e.target}, {"tools", e.tools}};
    if (e.valid) je["valid"] = *e.valid;
    doc["edges"].push_back(std::move(je));
  }
  return doc;
}

inline std::string serialize(const MergedGraph& m) {
  return to_json(m).dump(2) + "\n";
}

namespace detail {

inline std::vector<std::string> string_array(const json& j, const std::string& ctx) {
  require(j.is_array(), ctx + " must be an array");
  std::vector<std::string> out;
  for (const json& v : j) {
    require(v.is_string(), ctx + " must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace detail

/// Parses a union-graph document. Ids are renumbered densely in array order;
/// tool arrays are re-sorted and the universe recomputed from them.
inline MergedGraph merged_from_json(const json& doc) {
  using detail::require;
  require(doc.is_object(), "document must be a JSON object");
  require(doc.contains("nodes") && doc.at("nodes").is_array(),
          "document must have a \"nodes\" array");
  require(doc.contains("edges") && doc.at("edges").is_array(),
          "document must have an \"edges\" array");
  MergedGraph m;
  std::unordered_map<long long, int> id_map;
  for (const json& jn : doc.at("nodes")) {
    require(jn.is_object(), "node entries must be objects");
    long long ext = detail::get_int(jn, "id", "node");
    std::string label = detail::get_string(jn, "label", "node");
    std::string file = detail::get_string(jn, "file", "node");
    long long line = detail::get_int(jn, "line", "node");
    long long column = detail::get_int(jn, "column", "node");
    require(line >= 1 && column >= 1, "node positions are 1-based");
    require(!id_map.count(ext),
            "duplicate node id " + std::to_string(ext));
    require(jn.contains("tools"), "node is missing \"tools\"");
    NodeKey key = node_key(normalize_path(file), static_cast<int>(line),
                           static_cast<int>(column));
    if (label == kToplevelLabel)
      require(key == toplevel_key(),
              "the \"toplevel\" label is reserved for the artificial root");
    require(!m.find_node(key), "duplicate node position " + key.to_string());
    int id = m.intern_node(key);
    id_map.emplace(ext, id);
    MergedNode& n = m.node_mut(id);
    n.label = label;
    n.tools = detail::string_array(jn.at("tools"), "node \"tools\"");
    for (std::string& t : n.tools) t = tool_id(t);
    std::sort(n.tools.begin(), n.tools.end());
    n.tools.erase(std::unique(n.tools.begin(), n.tools.end()), n.tools.end());
    require(!n.tools.empty(), "node " + key.to_string() + " has no tools");
    if (jn.contains("labels"))
      n.labels = detail::string_array(jn.at("labels"), "node \"labels\"");
    if (n.labels.empty()) n.labels.push_back(label);
  }
  std::unordered_set<uint64_t> seen_edges;
  for (const json& je : doc.at("edges")) {
    require(je.is_object(), "edge entries must be objects");
    long long s = detail::get_int(je, "source", "edge");
    long long t = detail::get_int(je, "target", "edge");
    require(id_map.count(s), "edge source " + std::to_string(s) + " is unknown");
    require(id_map.count(t), "edge target " + std::to_string(t) + " is unknown");
    MergedEdge e;
    e.source = id_map.at(s);
    e.target = id_map.at(t);
    uint64_t code = (static_cast<uint64_t>(e.source) << 32) |
                    static_cast<uint32_t>(e.target);
    require(seen_edges.insert(code).second,
            "duplicate edge " + std::to_string(s) + " -> " + std::to_string(t));
    require(je.contains("tools"), "edge is missing \"tools\"");
    e.tools = detail::string_array(je.at("tools"), "edge \"tools\"");
    for (std::string& id : e.tools) id = tool_id(id);
    std::sort(e.tools.begin(), e.tools.end());
    e.tools.erase(std::unique(e.tools.begin(), e.tools.end()), e.tools.end());
    require(!e.tools.empty(), "edge has no tools");
    if (je.contains("valid")) {
      require(je.at("valid").is_boolean(), "edge \"valid\" must be a boolean");
      e.valid = je.at("valid").get<bool>();
    }
    m.restore_edge(std::move(e));
  }
  m.rebuild_universe();
  return m;
}

inline MergedGraph deserialize_merged(const std::string& text) {
  return merged_from_json(detail::parse_json(text));
}

inline MergedGraph load_merged(const std::string& path) {
  return deserialize_merged(read_file(path));
}

inline void save_merged(const std::string& path, const MergedGraph& m) {
  atomic_write_file(path, serialize(m));
}

}  // namespace cgbench

#endif  // CGBENCH_MERGE_HPP
