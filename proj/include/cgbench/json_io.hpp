#ifndef CGBENCH_JSON_IO_HPP
#define CGBENCH_JSON_IO_HPP

#include <algorithm>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgbench/call_graph.hpp"
#include "cgbench/error.hpp"
#include "cgbench/io_util.hpp"

namespace cgbench {

using json = nlohmann::ordered_json;

namespace detail {

inline json parse_json(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded())
    throw Error(Errc::malformed_document, "input is not valid JSON");
  return doc;
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(Errc::schema_violation, what);
}

inline int get_int(const json& j, const char* field, const std::string& ctx) {
  require(j.contains(field), ctx + " is missing \"" + field + "\"");
  const json& v = j.at(field);
  require(v.is_number_integer(), ctx + " field \"" + field + "\" must be an integer");
  return v.get<int>();
}

inline std::string get_string(const json& j, const char* field,
                              const std::string& ctx) {
  require(j.contains(field), ctx + " is missing \"" + field + "\"");
  const json& v = j.at(field);
  require(v.is_string(), ctx + " field \"" + field + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace detail

inline json to_json(const CallGraph& g) {
  json doc;
  doc["nodes"] = json::array();
  for (const FunctionNode& n : g.nodes()) {
    doc["nodes"].push_back({{"id", n.id},
                            {"label", n.label},
                            {"file", normalize_path(n.position.file)},
                            {"line", n.position.line},
                            {"column", n.position.column}});
  }
  std::vector<CallEdge> edges(g.edges().begin(), g.edges().end());
  std::sort(edges.begin(), edges.end(), [](const CallEdge& a, const CallEdge& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  doc["edges"] = json::array();
  for (const CallEdge& e : edges)
    doc["edges"].push_back({{"source", e.source}, {"target", e.target}});
  return doc;
}

inline std::string serialize(const CallGraph& g) { return to_json(g).dump(2) + "\n"; }

/// Parses and validates a graph document. Node ids in the document may be any
/// distinct integers; they are renumbered densely in array order. Duplicate
/// positions, duplicate edges and edges referencing unknown ids are rejected.
inline CallGraph graph_from_json(const json& doc) {
  using detail::require;
  require(doc.is_object(), "document must be a JSON object");
  require(doc.contains("nodes") && doc.at("nodes").is_array(),
          "document must have a \"nodes\" array");
  require(doc.contains("edges") && doc.at("edges").is_array(),
          "document must have an \"edges\" array");

  CallGraph g;
  std::unordered_map<long long, int> id_map;
  for (const json& jn : doc.at("nodes")) {
    require(jn.is_object(), "node entries must be objects");
    int id = detail::get_int(jn, "id", "node");
    std::string label = detail::get_string(jn, "label", "node");
    std::string file = detail::get_string(jn, "file", "node");
    int line = detail::get_int(jn, "line", "node");
    int column = detail::get_int(jn, "column", "node");
    require(line >= 1 && column >= 1,
            "node " + std::to_string(id) + " has non-positive position");
    require(!id_map.count(id), "duplicate node id " + std::to_string(id));
    NodeKey key = node_key(SourcePosition{file, line, column});
    require(g.find(key) == nullptr, "duplicate node position " + key.to_string());
    if (label == kToplevelLabel)
      require(key == toplevel_key(),
              "node labeled \"toplevel\" must sit at toplevel:1:1");
    id_map.emplace(id, g.add_node(key, label));
  }
  for (const json& je : doc.at("edges")) {
    require(je.is_object(), "edge entries must be objects");
    int source = detail::get_int(je, "source", "edge");
    int target = detail::get_int(je, "target", "edge");
    auto s = id_map.find(source), t = id_map.find(target);
    require(s != id_map.end(),
            "edge references unknown node id " + std::to_string(source));
    require(t != id_map.end(),
            "edge references unknown node id " + std::to_string(target));
    require(g.add_edge(s->second, t->second),
            "duplicate edge " + std::to_string(source) + " -> " +
                std::to_string(target));
  }
  return g;
}

inline CallGraph deserialize(const std::string& text) {
  return graph_from_json(detail::parse_json(text));
}

inline CallGraph load_graph(const std::string& path) {
  return deserialize(read_file(path));
}

inline void save_graph(const std::string& path, const CallGraph& g) {
  write_file(path, serialize(g));
}

}  // namespace cgbench

#endif  // CGBENCH_JSON_IO_HPP
