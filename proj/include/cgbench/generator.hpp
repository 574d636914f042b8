#ifndef CGBENCH_GENERATOR_HPP
#define CGBENCH_GENERATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cgbench/call_graph.hpp"
#include "cgbench/error.hpp"
#include "cgbench/extractor.hpp"
#include "cgbench/json_io.hpp"
#include "cgbench/metrics.hpp"

namespace cgbench {

/// SIMPLE programs use only direct `f()` calls; COMPLEX programs route a
/// share of the edges through callback parameters (`h(cb)` ... `return cb()`)
/// and mix in function-expression definitions, so those edges only appear
/// when parameters are tracked interprocedurally.
enum class ProgramCategory { simple, complex };

struct GeneratorParams {
  ProgramCategory category = ProgramCategory::simple;
  int function_count = 10;
  long long edge_count = 20;
  uint64_t seed = 0;
  int min_statements = 13;   // filler statements per body
  int max_statements = 22;
  int file_count = 1;
  double callback_fraction = 0.25;  // COMPLEX: share of edges through callbacks
  std::string name = "program";
};

/// The generated graph plus, per edge (parallel to graph.edges()), whether a
/// purely intraprocedural analysis must miss it.
struct GroundTruthManifest {
  CallGraph graph;
  std::vector<bool> requires_interprocedural;
};

struct GeneratedFile {
  std::string path;  // relative, e.g. "src/program_0.js"
  std::string source;
};

struct GeneratedProgram {
  std::vector<GeneratedFile> files;
  GroundTruthManifest manifest;
};

namespace detail {

/// Floyd's uniform k-subset over [0, universe): k draws, no rejection loop.
inline std::vector<uint64_t> sample_indices(std::mt19937_64& rng,
                                            uint64_t universe, uint64_t k) {
  std::set<uint64_t> chosen;
  for (uint64_t j = universe - k; j < universe; ++j) {
    uint64_t t = bounded_uniform(rng, j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

}  // namespace detail

/// Deterministically generates a program with a known call graph. Direct
/// calls land in every mode's graph; COMPLEX callback edges require
/// parameter tracking and are flagged in the manifest.
inline GeneratedProgram generate(const GeneratorParams& params) {
  const int n = params.function_count;
  const long long m = params.edge_count;
  if (n < 1) throw Error(Errc::infeasible_params, "need at least one function");
  const uint64_t pair_space =
      static_cast<uint64_t>(n) * static_cast<uint64_t>(n - 1);
  if (m < 0) throw Error(Errc::infeasible_params, "edge count must be >= 0");
  if (static_cast<uint64_t>(m) > pair_space)
    throw Error(Errc::infeasible_params,
                "edge count " + std::to_string(m) + " exceeds the " +
                    std::to_string(pair_space) + " possible ordered pairs of " +
                    std::to_string(n) + " functions");
  if (params.file_count < 1 || params.file_count > n)
    throw Error(Errc::infeasible_params,
                "file count must be between 1 and the function count");
  if (params.min_statements < 0 || params.min_statements > params.max_statements)
    throw Error(Errc::infeasible_params, "invalid statement range");
  if (!(params.callback_fraction >= 0.0) || !(params.callback_fraction <= 1.0))
    throw Error(Errc::infeasible_params,
                "callback fraction must be within [0, 1]");

  std::mt19937_64 rng(params.seed);

  // Edge sample, decoded from pair indices; (a, b) with b != a.
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<size_t>(m));
  for (uint64_t idx :
       detail::sample_indices(rng, pair_space, static_cast<uint64_t>(m))) {
    int a = static_cast<int>(idx / static_cast<uint64_t>(n - 1));
    int r = static_cast<int>(idx % static_cast<uint64_t>(n - 1));
    int b = r + (r >= a ? 1 : 0);
    edges.push_back({a, b});
  }
  std::sort(edges.begin(), edges.end());

  std::vector<std::vector<int>> out_targets(static_cast<size_t>(n));
  std::vector<std::vector<int>> in_callers(static_cast<size_t>(n));
  for (const auto& [a, b] : edges) {
    out_targets[static_cast<size_t>(a)].push_back(b);
    in_callers[static_cast<size_t>(b)].push_back(a);
  }

  // COMPLEX: pick callback-taking functions until roughly callback_fraction
  // of the edges flow through a callback parameter. Each such function h
  // needs one plain caller (its carrier) that hands it every target, so the
  // carrier itself must stay plain.
  std::vector<bool> helper(static_cast<size_t>(n), false);
  std::vector<bool> pinned(static_cast<size_t>(n), false);
  std::vector<int> carrier_of(static_cast<size_t>(n), -1);
  pinned[0] = true;  // the root target stays a plain function
  if (params.category == ProgramCategory::complex) {
    long long target_ip =
        std::llround(params.callback_fraction * static_cast<double>(m));
    long long ip = 0;
    for (int h = 1; h < n && ip < target_ip; ++h) {
      size_t hu = static_cast<size_t>(h);
      if (helper[hu] || pinned[hu]) continue;
      if (out_targets[hu].empty() || in_callers[hu].empty()) continue;
      int carrier = -1;
      for (int a : in_callers[hu])
        if (!helper[static_cast<size_t>(a)]) {
          carrier = a;
          break;
        }
      if (carrier < 0) continue;
      helper[hu] = true;
      pinned[static_cast<size_t>(carrier)] = true;
      carrier_of[hu] = carrier;
      ip += static_cast<long long>(out_targets[hu].size());
    }
  }

  // Naming and per-function shape decisions. Draw order is fixed so output
  // is a pure function of the parameters.
  std::vector<std::string> fname(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) fname[static_cast<size_t>(i)] = "f" + std::to_string(i);
  if (n > 1) fname[static_cast<size_t>(n - 1)] = "log";

  std::vector<int> param_count(static_cast<size_t>(n), 0);
  std::vector<bool> expr_style(static_cast<size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    size_t iu = static_cast<size_t>(i);
    if (helper[iu]) {
      param_count[iu] = 1;
      continue;
    }
    param_count[iu] = static_cast<int>(detail::bounded_uniform(rng, 4));
    if (params.category == ProgramCategory::complex && i != 0 && i != n - 1)
      expr_style[iu] = detail::bounded_uniform(rng, 4) == 0;
  }

  // Render files; function i lives in file floor(i * file_count / n).
  std::vector<GeneratedFile> files(static_cast<size_t>(params.file_count));
  for (int f = 0; f < params.file_count; ++f)
    files[static_cast<size_t>(f)].path =
        "src/" + params.name + "_" + std::to_string(f) + ".js";

  std::vector<NodeKey> fn_key(static_cast<size_t>(n));
  std::vector<int> line_no(static_cast<size_t>(params.file_count), 1);

  auto emit = [&](int file, const std::string& text) {
    files[static_cast<size_t>(file)].source += text;
    files[static_cast<size_t>(file)].source += "\n";
    ++line_no[static_cast<size_t>(file)];
  };

  auto number = [&]() { return std::to_string(detail::bounded_uniform(rng, 100)); };

  for (int i = 0; i < n; ++i) {
    size_t iu = static_cast<size_t>(i);
    int file = static_cast<int>((static_cast<long long>(i) *
                                 params.file_count) / n);
    std::string params_text;
    if (helper[iu]) {
      params_text = "cb" + std::to_string(i);
    } else {
      for (int p = 0; p < param_count[iu]; ++p) {
        if (p > 0) params_text += ", ";
        params_text += "p" + std::to_string(i) + "_" + std::to_string(p);
      }
    }
    std::string head;
    if (expr_style[iu])
      head = "var " + fname[iu] + " = function (" + params_text + ") {";
    else
      head = "function " + fname[iu] + "(" + params_text + ") {";
    int col = static_cast<int>(head.find("function")) + 1;
    fn_key[iu] = node_key(files[static_cast<size_t>(file)].path,
                          line_no[static_cast<size_t>(file)], col);
    emit(file, head);

    int fillers = params.min_statements +
                  static_cast<int>(detail::bounded_uniform(
                      rng, static_cast<uint64_t>(params.max_statements -
                                                 params.min_statements + 1)));
    if (helper[iu]) --fillers;  // the trailing return counts as a statement
    int locals = 0;
    for (int s = 0; s < fillers; ++s) {
      int kind = static_cast<int>(detail::bounded_uniform(rng, 6));
      std::string v = "x" + std::to_string(locals);
      switch (kind) {
        case 0:
          emit(file, "  var " + v + " = " + number() + ";");
          ++locals;
          break;
        case 1:
          emit(file, "  var " + v + " = (" + number() + " + " + number() +
                         ") * " + number() + ";");
          ++locals;
          break;
        case 2:
          emit(file, "  var " + v + " = { a: " + number() + ", b: " +
                         number() + " };");
          ++locals;
          if (s + 1 < fillers) {
            emit(file, "  " + v + ".a = " + v + ".b + " + number() + ";");
            ++s;  // the update line counts too
          }
          break;
        case 3:
          emit(file, "  for (var i" + std::to_string(locals) + " = 0, s" +
                         std::to_string(locals) + " = 0; i" +
                         std::to_string(locals) + " < " + number() + "; i" +
                         std::to_string(locals) + " = i" +
                         std::to_string(locals) + " + 1) { s" +
                         std::to_string(locals) + " = s" +
                         std::to_string(locals) + " + i" +
                         std::to_string(locals) + "; }");
          ++locals;
          break;
        case 4:
          if (locals == 0) {
            emit(file, "  var " + v + " = " + number() + ";");
            ++locals;
          } else {
            std::string prev =
                "x" + std::to_string(detail::bounded_uniform(
                          rng, static_cast<uint64_t>(locals)));
            emit(file, "  if (" + prev + " > " + number() + ") { " + prev +
                           " = " + prev + " - 1; } else { " + prev + " = " +
                           prev + " + 1; }");
          }
          break;
        default:
          emit(file, "  var " + v + " = [" + number() + ", " + number() +
                         ", " + number() + "];");
          ++locals;
          break;
      }
    }

    if (helper[iu]) {
      emit(file, "  return cb" + std::to_string(i) + "();");
    } else {
      for (int t : out_targets[iu]) {
        size_t tu = static_cast<size_t>(t);
        if (helper[tu] && carrier_of[tu] == i) {
          // Hand the callback-taking function each of its targets in turn.
          for (int u : out_targets[tu])
            emit(file, "  " + fname[tu] + "(" + fname[static_cast<size_t>(u)] +
                           ");");
        } else if (helper[tu]) {
          emit(file, "  " + fname[tu] + "(0);");
        } else {
          int argc = param_count[tu] == 0
                         ? 0
                         : static_cast<int>(detail::bounded_uniform(
                               rng, static_cast<uint64_t>(param_count[tu]) + 1));
          std::string args;
          for (int a = 0; a < argc; ++a) {
            if (a > 0) args += ", ";
            args += number();
          }
          emit(file, "  " + fname[tu] + "(" + args + ");");
        }
      }
    }

    emit(file, expr_style[iu] ? "};" : "}");
    emit(file, "");
  }

  emit(params.file_count - 1, fname[0] + "();");

  // Manifest: toplevel, then the functions in index order; the rooting call,
  // then the sampled edges. Callback-taking callers make their out-edges
  // interprocedural.
  GeneratedProgram out;
  out.files = std::move(files);
  CallGraph& g = out.manifest.graph;
  g.add_node(toplevel_key(), kToplevelLabel);
  for (int i = 0; i < n; ++i) {
    size_t iu = static_cast<size_t>(i);
    g.add_node(fn_key[iu], expr_style[iu] ? kAnonymousLabel : fname[iu]);
  }
  g.add_edge(0, 1);
  out.manifest.requires_interprocedural.push_back(false);
  for (const auto& [a, b] : edges) {
    g.add_edge(a + 1, b + 1);
    out.manifest.requires_interprocedural.push_back(helper[static_cast<size_t>(a)]);
  }
  return out;
}

// ------------------------------------------------------------------ presets

/// The five stock workloads: three direct-call programs of increasing size
/// and two callback-heavy ones.
inline const std::vector<std::pair<std::string, GeneratorParams>>& presets() {
  static const std::vector<std::pair<std::string, GeneratorParams>> table = {
      {"s_small",
       {ProgramCategory::simple, 1000, 49286, 0, 13, 22, 1, 0.25, "s_small"}},
      {"s_medium",
       {ProgramCategory::simple, 2600, 331267, 0, 13, 22, 1, 0.25, "s_medium"}},
      {"s_large",
       {ProgramCategory::simple, 5000, 1224251, 0, 13, 22, 1, 0.25, "s_large"}},
      {"c_medium",
       {ProgramCategory::complex, 400, 3000, 0, 13, 22, 1, 0.25, "c_medium"}},
      {"c_large",
       {ProgramCategory::complex, 1000, 50000, 0, 13, 22, 1, 0.25, "c_large"}},
  };
  return table;
}

inline const GeneratorParams* find_preset(const std::string& name) {
  for (const auto& [id, params] : presets())
    if (id == name) return &params;
  return nullptr;
}

// ------------------------------------------------------- manifest documents

inline json manifest_to_json(const GroundTruthManifest& m) {
  std::unordered_map<uint64_t, bool> flags;
  const auto& edges = m.graph.edges();
  for (size_t i = 0; i < edges.size(); ++i) {
    uint64_t code = (static_cast<uint64_t>(edges[i].source) << 32) |
                    static_cast<uint32_t>(edges[i].target);
    flags[code] = i < m.requires_interprocedural.size() &&
                  m.requires_interprocedural[i];
  }
  json doc = to_json(m.graph);
  for (json& je : doc["edges"]) {
    uint64_t code =
        (static_cast<uint64_t>(je.at("source").get<long long>()) << 32) |
        static_cast<uint32_t>(je.at("target").get<long long>());
    je["requires_interprocedural"] = flags.at(code);
  }
  return doc;
}

inline GroundTruthManifest manifest_from_json(const json& doc) {
  GroundTruthManifest m;
  m.graph = graph_from_json(doc);
  for (const json& je : doc.at("edges")) {
    bool flag = false;
    if (je.contains("requires_interprocedural")) {
      detail::require(je.at("requires_interprocedural").is_boolean(),
                      "\"requires_interprocedural\" must be a boolean");
      flag = je.at("requires_interprocedural").get<bool>();
    }
    m.requires_interprocedural.push_back(flag);
  }
  return m;
}

inline std::string serialize(const GroundTruthManifest& m) {
  return manifest_to_json(m).dump(2) + "\n";
}

inline GroundTruthManifest deserialize_manifest(const std::string& text) {
  return manifest_from_json(detail::parse_json(text));
}

/// Writes srcs plus ground-truth.json under `dir`.
inline void write_generated(const std::string& dir, const GeneratedProgram& p) {
  namespace fs = std::filesystem;
  for (const GeneratedFile& f : p.files)
    write_file((fs::path(dir) / f.path).string(), f.source);
  write_file((fs::path(dir) / "ground-truth.json").string(),
             serialize(p.manifest));
}

/// Loads a generated layout back; file paths are kept relative to `dir` so
/// they line up with the manifest keys.
inline GeneratedProgram load_generated(const std::string& dir) {
  namespace fs = std::filesystem;
  GeneratedProgram p;
  fs::path src = fs::path(dir) / "src";
  if (!fs::is_directory(src))
    throw Error(Errc::io_error, "no src/ directory under " + dir);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(src))
    if (entry.is_regular_file() && entry.path().extension() == ".js")
      names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  for (const std::string& name : names)
    p.files.push_back(
        {"src/" + name, read_file((src / name).string())});
  p.manifest =
      deserialize_manifest(read_file((fs::path(dir) / "ground-truth.json").string()));
  return p;
}

// ---------------------------------------------------------------- verifier

struct VerifyCheck {
  bool ok = false;
  std::string message;
};

struct VerifyReport {
  VerifyCheck parse;
  VerifyCheck pessimistic;  // graph == manifest minus interprocedural edges
  VerifyCheck optimistic;   // graph >= full manifest

  bool ok() const { return parse.ok && pessimistic.ok && optimistic.ok; }
};

namespace detail {

inline std::optional<std::string> shape_difference(const CallGraph& actual,
                                                   const CallGraph& expected,
                                                   bool allow_extra) {
  std::unordered_map<NodeKey, std::string, NodeKeyHash> got;
  for (const FunctionNode& node : actual.nodes()) got.emplace(node.key(), node.label);
  for (const FunctionNode& node : expected.nodes()) {
    auto it = got.find(node.key());
    if (it == got.end())
      return "missing node " + node.key().to_string() + " (" + node.label + ")";
    if (it->second != node.label)
      return "label mismatch at " + node.key().to_string() + ": got \"" +
             it->second + "\", want \"" + node.label + "\"";
  }
  if (!allow_extra && actual.nodes().size() != expected.nodes().size()) {
    std::unordered_set<NodeKey, NodeKeyHash> want;
    for (const FunctionNode& node : expected.nodes()) want.insert(node.key());
    for (const FunctionNode& node : actual.nodes())
      if (!want.count(node.key()))
        return "unexpected node " + node.key().to_string() + " (" + node.label +
               ")";
  }
  std::unordered_set<EdgeKeyPair, EdgeKeyPairHash> got_edges;
  for (const EdgeKeyPair& e : actual.edge_keys()) got_edges.insert(e);
  for (const EdgeKeyPair& e : expected.edge_keys())
    if (!got_edges.count(e))
      return "missing edge " + e.first.to_string() + " -> " +
             e.second.to_string();
  if (!allow_extra && got_edges.size() != expected.edges().size()) {
    std::unordered_set<EdgeKeyPair, EdgeKeyPairHash> want;
    for (const EdgeKeyPair& e : expected.edge_keys()) want.insert(e);
    for (const EdgeKeyPair& e : got_edges)
      if (!want.count(e))
        return "unexpected edge " + e.first.to_string() + " -> " +
               e.second.to_string();
  }
  return std::nullopt;
}

}  // namespace detail

/// Re-checks a generated program against its manifest: the sources parse,
/// the parameter-blind graph equals the manifest minus interprocedural
/// edges, and the parameter-tracking graph covers the whole manifest.
inline VerifyReport verify_generated(
    const std::vector<std::pair<std::string, std::string>>& files,
    const GroundTruthManifest& manifest) {
  VerifyReport report;
  std::vector<ParsedFile> parsed;
  try {
    for (const auto& [path, content] : files)
      parsed.push_back(parse_input(path, content));
    report.parse.ok = true;
    report.parse.message = "all files parse";
  } catch (const Error& e) {
    report.parse.message = std::string(errc_name(e.code())) + ": " + e.message();
    report.pessimistic.message = "skipped: sources do not parse";
    report.optimistic.message = "skipped: sources do not parse";
    return report;
  }

  CallGraph expected_pess;
  for (const FunctionNode& node : manifest.graph.nodes())
    expected_pess.add_node(node.key(), node.label);
  const auto& edges = manifest.graph.edges();
  for (size_t i = 0; i < edges.size(); ++i) {
    bool ip = i < manifest.requires_interprocedural.size() &&
              manifest.requires_interprocedural[i];
    if (!ip) expected_pess.add_edge(edges[i].source, edges[i].target);
  }

  CallGraph pess = extract_call_graph(parsed, ExtractionMode::pessimistic);
  if (auto diff = detail::shape_difference(pess, expected_pess, false)) {
    report.pessimistic.message = *diff;
  } else {
    report.pessimistic.ok = true;
    report.pessimistic.message = "matches the manifest's direct-call graph";
  }

  CallGraph opt = extract_call_graph(parsed, ExtractionMode::optimistic);
  if (auto diff = detail::shape_difference(opt, manifest.graph, true)) {
    report.optimistic.message = *diff;
  } else {
    report.optimistic.ok = true;
    report.optimistic.message = "covers the full manifest";
  }
  return report;
}

inline VerifyReport verify_generated(const GeneratedProgram& p) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const GeneratedFile& f : p.files) files.push_back({f.path, f.source});
  return verify_generated(files, p.manifest);
}

}  // namespace cgbench

#endif  // CGBENCH_GENERATOR_HPP
