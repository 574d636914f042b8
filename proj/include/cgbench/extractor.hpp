#ifndef CGBENCH_EXTRACTOR_HPP
#define CGBENCH_EXTRACTOR_HPP

#include <string>
#include <utility>
#include <vector>

#include "cgbench/ast_import.hpp"
#include "cgbench/flow_graph.hpp"
#include "cgbench/json_io.hpp"

namespace cgbench {

/// Parses one input file: JavaScript source, or a pre-parsed AST document
/// when the path ends in ".json" (the graph-facing file name drops that
/// suffix).
inline ParsedFile parse_input(const std::string& path, const std::string& content) {
  std::string norm = normalize_path(path);
  if (norm.size() > 5 && norm.ends_with(".json")) {
    std::string source_name = norm.substr(0, norm.size() - 5);
    return ParsedFile{source_name, load_ast_document(content, source_name)};
  }
  return ParsedFile{norm, parse_program(content, norm)};
}

/// Extracts the call graph of a multi-file program. Every enumerated function
/// becomes a node (isolated ones included); the artificial toplevel node
/// appears exactly when global-scope code performs a resolved call.
inline CallGraph extract_call_graph(const std::vector<ParsedFile>& files,
                                    ExtractionMode mode) {
  ProgramIndex index(files);
  FlowGraph fg(index, files);
  Propagation p = propagate(fg, mode);

  LabelMap labels;
  for (const FunctionInfo& f : index.functions())
    if (!f.name.empty()) labels[f.key] = f.name;

  std::vector<RawCall> calls;
  for (size_t s = 0; s < p.targets.size(); ++s) {
    const CallSiteInfo& site = index.call_sites()[s];
    std::optional<NodeKey> caller;
    if (site.enclosing != -1) caller = index.functions()[site.enclosing].key;
    for (int g : p.targets[s])
      calls.push_back(RawCall{caller, index.functions()[g].key});
  }
  CallGraph graph = canonicalize(calls, labels);
  for (const FunctionInfo& f : index.functions())
    if (!graph.find(f.key)) graph.add_node(f.key, label_for(labels, f.key));
  return graph;
}

inline CallGraph extract_call_graph(
    const std::vector<std::pair<std::string, std::string>>& path_and_content,
    ExtractionMode mode) {
  std::vector<ParsedFile> files;
  files.reserve(path_and_content.size());
  for (const auto& [path, content] : path_and_content)
    files.push_back(parse_input(path, content));
  return extract_call_graph(files, mode);
}

inline CallGraph extract_source(const std::string& source,
                                const std::string& file, ExtractionMode mode) {
  return extract_call_graph({{file, source}}, mode);
}

}  // namespace cgbench

#endif  // CGBENCH_EXTRACTOR_HPP
