// Command-line workbench for building, converting, merging and measuring
// JavaScript call graphs. Every subcommand is a thin wrapper around the
// library; all diagnostics go to stderr, data to stdout or -o.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgbench/bench.hpp"
#include "cgbench/call_graph.hpp"
#include "cgbench/dot.hpp"
#include "cgbench/extractor.hpp"
#include "cgbench/generator.hpp"
#include "cgbench/json_io.hpp"
#include "cgbench/merge.hpp"
#include "cgbench/metrics.hpp"

namespace fs = std::filesystem;
using namespace cgbench;

namespace {

void emit(const std::string& out_path, const std::string& data) {
  if (out_path.empty() || out_path == "-")
    std::fwrite(data.data(), 1, data.size(), stdout);
  else
    write_file(out_path, data);
}

uint64_t env_seed() {
  const char* v = std::getenv("CGBENCH_SEED");
  if (!v || !*v) return 0;
  char* end = nullptr;
  unsigned long long parsed = std::strtoull(v, &end, 10);
  return (end && *end == '\0') ? parsed : 0;
}

ExtractionMode parse_mode(const std::string& mode) {
  if (mode == "pessimistic") return ExtractionMode::pessimistic;
  if (mode == "optimistic") return ExtractionMode::optimistic;
  throw Error(Errc::usage, "unknown mode \"" + mode + "\"");
}

/// "file:line:column" -> key; the last two colon groups are the position.
NodeKey key_from_string(const std::string& text) {
  size_t c2 = text.rfind(':');
  size_t c1 = c2 == std::string::npos ? std::string::npos : text.rfind(':', c2 - 1);
  if (c1 == std::string::npos || c1 == 0)
    throw Error(Errc::usage, "expected file:line:column, got \"" + text + "\"");
  try {
    int line = std::stoi(text.substr(c1 + 1, c2 - c1 - 1));
    int column = std::stoi(text.substr(c2 + 1));
    if (line < 1 || column < 1) throw std::invalid_argument("range");
    return node_key(text.substr(0, c1), line, column);
  } catch (const std::exception&) {
    throw Error(Errc::usage, "expected file:line:column, got \"" + text + "\"");
  }
}

EdgeKeyPair edge_key_from_line(const std::string& line) {
  size_t arrow = line.find("->");
  if (arrow == std::string::npos)
    throw Error(Errc::usage, "expected \"A -> B\", got \"" + line + "\"");
  return {key_from_string(detail::trim(line.substr(0, arrow))),
          key_from_string(detail::trim(line.substr(arrow + 2)))};
}

std::vector<std::string> gather_js_inputs(const std::string& path) {
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::recursive_directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".js")
        files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw Error(Errc::io_error, "no .js inputs under " + path);
  } else {
    files.push_back(path);
  }
  return files;
}

CallGraph extract_paths(const std::vector<std::string>& paths, ExtractionMode mode) {
  std::vector<ParsedFile> parsed;
  for (const std::string& p : paths) parsed.push_back(parse_input(p, read_file(p)));
  return extract_call_graph(parsed, mode);
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.')
               ? c
               : '_';
  return out;
}

// ------------------------------------------------------------- subcommands

int cmd_extract(const std::vector<std::string>& files, const std::string& mode,
                const std::string& format, const std::string& out) {
  std::vector<std::string> expanded;
  for (const std::string& f : files) {
    std::vector<std::string> part = gather_js_inputs(f);
    expanded.insert(expanded.end(), part.begin(), part.end());
  }
  CallGraph g = extract_paths(expanded, parse_mode(mode));
  if (format == "json")
    emit(out, serialize(g));
  else if (format == "dot")
    emit(out, to_dot(g));
  else
    throw Error(Errc::usage, "unknown format \"" + format + "\"");
  return 0;
}

int cmd_convert(const std::string& input, const LabelPattern& pattern,
                const std::string& format, const std::string& out) {
  std::string text = read_file(input);
  CallGraph g;
  if (format == "dot")
    g = parse_dot(text, pattern);
  else if (format == "edgelist")
    g = parse_edge_list(text, pattern);
  else if (format == "auto")
    g = parse_graph_text(text, pattern);
  else
    throw Error(Errc::usage, "unknown format \"" + format + "\"");
  emit(out, serialize(g));
  return 0;
}

int cmd_merge(const std::vector<std::string>& tool_args, const std::string& out) {
  std::vector<std::pair<std::string, CallGraph>> inputs;
  for (const std::string& arg : tool_args) {
    size_t eq = arg.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
      throw Error(Errc::usage, "expected --tool id=path, got \"" + arg + "\"");
    inputs.push_back({arg.substr(0, eq), load_graph(arg.substr(eq + 1))});
  }
  emit(out, serialize(merge(inputs)));
  return 0;
}

int cmd_stats(const std::string& input, bool pretty, const std::string& out) {
  std::vector<CombinationStats> rows = combination_stats(load_merged(input));
  emit(out, pretty ? stats_table(rows) : stats_csv(rows));
  return 0;
}

int cmd_venn(const std::string& input, const std::string& out) {
  MergedGraph m = load_merged(input);
  long long total = static_cast<long long>(m.edges().size());
  std::string csv = "combination,count,true_count,pct\n";
  for (const VennRegion& r : venn_regions(m)) {
    std::string name;
    for (const std::string& t : r.combination) {
      if (!name.empty()) name += "+";
      name += t;
    }
    csv += name + "," + std::to_string(r.count) + "," +
           std::to_string(r.true_count) + "," +
           percent_one_decimal(r.count, total) + "\n";
  }
  emit(out, csv);
  return 0;
}

int cmd_sample(const std::string& input, const std::vector<std::string>& regions,
               long long count, uint64_t seed, const std::string& out) {
  MergedGraph m = load_merged(input);
  std::vector<std::string> combo;
  for (const std::string& r : regions) {
    size_t start = 0;
    for (;;) {
      size_t plus = r.find('+', start);
      combo.push_back(r.substr(start, plus == std::string::npos
                                          ? std::string::npos
                                          : plus - start));
      if (plus == std::string::npos) break;
      start = plus + 1;
    }
  }
  if (count < 0) {
    // Default: the statistically representative size for this region.
    std::vector<std::string> want;
    for (const std::string& t : combo) want.push_back(tool_id(t));
    std::sort(want.begin(), want.end());
    want.erase(std::unique(want.begin(), want.end()), want.end());
    long long population = 0;
    for (const MergedEdge& e : m.edges())
      if (e.tools == want) ++population;
    count = sample_size({population, 1.96, 0.05, 0.5});
  }
  std::string text;
  for (const EdgeKeyPair& e : sample_edges(m, combo, count, seed))
    text += e.first.to_string() + " -> " + e.second.to_string() + "\n";
  emit(out, text);
  return 0;
}

int cmd_generate(const GeneratorParams& params, const std::string& out_dir) {
  GeneratedProgram program = generate(params);
  write_generated(out_dir, program);
  std::fprintf(stderr, "wrote %zu file(s), %zu nodes, %zu edges under %s\n",
               program.files.size(), program.manifest.graph.nodes().size(),
               program.manifest.graph.edges().size(), out_dir.c_str());
  return 0;
}

int cmd_verify(const std::string& dir) {
  GeneratedProgram program = load_generated(dir);
  std::vector<std::pair<std::string, std::string>> files;
  for (const GeneratedFile& f : program.files) files.push_back({f.path, f.source});
  VerifyReport report = verify_generated(files, program.manifest);
  auto show = [](const char* name, const VerifyCheck& c) {
    std::printf("%-12s %s  %s\n", name, c.ok ? "ok" : "FAIL", c.message.c_str());
  };
  show("parse", report.parse);
  show("pessimistic", report.pessimistic);
  show("optimistic", report.optimistic);
  return report.ok() ? 0 : 1;
}

int cmd_bench(const std::string& extract_mode, const std::string& cmd,
              const std::vector<std::string>& inputs, int runs, int interval_ms,
              const std::string& out, const std::string& samples_dir) {
  BenchTarget target;
  if (!cmd.empty()) {
    target.id = "cmd";
    target.command = cmd;
  } else {
    ExtractionMode mode = parse_mode(extract_mode);
    target.id = "extract:" + extract_mode;
    target.fn = [mode](const std::string& input) {
      CallGraph g = extract_paths(gather_js_inputs(input), mode);
      fs::path tmp = fs::temp_directory_path() /
                     ("cgbench-bench-" + std::to_string(::getpid()) + ".json");
      write_file(tmp.string(), serialize(g));
      fs::remove(tmp);
    };
  }
  std::vector<BenchReport> reports = run_benchmark(target, inputs, runs, interval_ms);
  emit(out, bench_csv(reports));
  if (!samples_dir.empty()) {
    for (const BenchReport& report : reports)
      for (const BenchRun& run : report.runs)
        write_file((fs::path(samples_dir) /
                    (sanitize(report.target) + "_" + sanitize(report.input) +
                     "_run" + std::to_string(run.run) + ".csv"))
                       .string(),
                   samples_csv(run));
  }
  int failed = 0;
  for (const BenchReport& report : reports) failed += report.failed_runs;
  if (failed > 0) {
    std::fprintf(stderr, "TARGET_FAILED: %d run(s) exited nonzero\n", failed);
    return 1;
  }
  return 0;
}

int cmd_validate(const std::string& path, const std::string& root,
                 const std::string& keys_file, bool revisit) {
  MergedGraph m = load_merged(path);

  std::vector<size_t> queue;
  if (!keys_file.empty()) {
    std::string text = read_file(keys_file);
    size_t start = 0;
    while (start < text.size()) {
      size_t nl = text.find('\n', start);
      std::string line = detail::trim(text.substr(
          start, nl == std::string::npos ? std::string::npos : nl - start));
      if (!line.empty() && line[0] != '#') {
        EdgeKeyPair key = edge_key_from_line(line);
        const MergedEdge* e = m.find_edge(key);
        if (!e)
          throw Error(Errc::unknown_edge, "no edge " + key.first.to_string() +
                                              " -> " + key.second.to_string());
        if (revisit || !e->valid)
          queue.push_back(static_cast<size_t>(e - m.edges().data()));
      }
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
  } else {
    for (size_t i = 0; i < m.edges().size(); ++i)
      if (revisit || !m.edges()[i].valid) queue.push_back(i);
  }
  if (queue.empty()) {
    std::fprintf(stderr, "nothing to validate\n");
    return 0;
  }

  std::map<std::string, std::optional<std::vector<std::string>>> sources;
  auto source_line = [&](const NodeKey& key) -> std::string {
    if (key == toplevel_key()) return "(toplevel)";
    auto it = sources.find(key.file);
    if (it == sources.end()) {
      std::optional<std::vector<std::string>> lines;
      fs::path full = fs::path(root) / key.file;
      if (fs::is_regular_file(full)) {
        std::vector<std::string> collected;
        std::string text = read_file(full.string());
        size_t start = 0;
        while (start <= text.size()) {
          size_t nl = text.find('\n', start);
          collected.push_back(text.substr(
              start, nl == std::string::npos ? std::string::npos : nl - start));
          if (nl == std::string::npos) break;
          start = nl + 1;
        }
        lines = std::move(collected);
      }
      it = sources.emplace(key.file, std::move(lines)).first;
    }
    if (!it->second)
      return "(source unavailable: MISSING_SOURCE " + key.file + ")";
    const std::vector<std::string>& lines = *it->second;
    if (key.line < 1 || static_cast<size_t>(key.line) > lines.size())
      return "(line out of range: MISSING_SOURCE " + key.file + ")";
    std::string text = lines[static_cast<size_t>(key.line - 1)];
    if (text.size() > 160) text = text.substr(0, 157) + "...";
    return text;
  };

  bool changed = false;
  size_t shown = 0;
  for (size_t idx : queue) {
    MergedEdge& e = m.edge_mut(idx);
    const MergedNode& a = m.nodes()[static_cast<size_t>(e.source)];
    const MergedNode& b = m.nodes()[static_cast<size_t>(e.target)];
    ++shown;
    std::string tools;
    for (const std::string& t : e.tools) {
      if (!tools.empty()) tools += "+";
      tools += t;
    }
    std::printf("[%zu/%zu] %s (%s) -> %s (%s)  tools: %s\n", shown, queue.size(),
                a.key().to_string().c_str(), a.label.c_str(),
                b.key().to_string().c_str(), b.label.c_str(), tools.c_str());
    std::printf("  caller %s:%d: %s\n", a.key().file.c_str(), a.key().line,
                source_line(a.key()).c_str());
    std::printf("  callee %s:%d: %s\n", b.key().file.c_str(), b.key().line,
                source_line(b.key()).c_str());
    std::printf("  verdict [t]rue / [f]alse / [s]kip / [q]uit? ");
    std::fflush(stdout);
    std::string answer;
    if (!std::getline(std::cin, answer)) break;
    answer = detail::trim(answer);
    if (answer == "t" || answer == "true") {
      e.valid = true;
      changed = true;
    } else if (answer == "f" || answer == "false") {
      e.valid = false;
      changed = true;
    } else if (answer == "q" || answer == "quit") {
      break;
    }  // anything else skips
  }
  if (changed) {
    save_merged(path, m);
    std::fprintf(stderr, "updated %s\n", path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"call-graph workbench"};
  app.require_subcommand(1);

  // extract
  auto* extract = app.add_subcommand("extract", "build a call graph from sources");
  std::vector<std::string> extract_files;
  std::string extract_mode = "pessimistic", extract_format = "json", extract_out;
  extract->add_option("files", extract_files, "JavaScript sources or .js.json syntax-tree documents")
      ->required()
      ->expected(-1);
  extract->add_option("--mode", extract_mode, "pessimistic|optimistic");
  extract->add_option("--format", extract_format, "json|dot");
  extract->add_option("-o,--output", extract_out, "output path (default stdout)");

  // convert
  auto* convert = app.add_subcommand("convert", "import a DOT or edge-list graph");
  std::string convert_input, convert_format = "auto", convert_out;
  LabelPattern convert_pattern;
  convert->add_option("input", convert_input, "graph file")->required();
  convert->add_option("--node-pattern", convert_pattern.pattern,
                      "regex capturing (file, line, column[, label])");
  convert->add_option("--line-offset", convert_pattern.line_offset,
                      "added to captured lines");
  convert->add_option("--column-offset", convert_pattern.column_offset,
                      "added to captured columns");
  convert->add_option("--global-label", convert_pattern.global_label,
                      "label naming the toplevel node");
  convert->add_option("--format", convert_format, "auto|dot|edgelist");
  convert->add_option("-o,--output", convert_out, "output path (default stdout)");

  // merge
  auto* merge_cmd = app.add_subcommand("merge", "combine graphs from several tools");
  std::vector<std::string> merge_tools;
  std::string merge_out;
  merge_cmd->add_option("--tool", merge_tools, "id=path of a unified graph document")
      ->required();
  merge_cmd->add_option("-o,--output", merge_out, "output path (default stdout)");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "precision/recall per tool combination");
  std::string stats_input, stats_out;
  bool stats_pretty = false;
  stats_cmd->add_option("merged", stats_input, "merged graph document")->required();
  stats_cmd->add_flag("--pretty", stats_pretty, "aligned table instead of CSV");
  stats_cmd->add_option("-o,--output", stats_out, "output path (default stdout)");

  // venn
  auto* venn_cmd = app.add_subcommand("venn", "edge counts per exact tool subset");
  std::string venn_input, venn_out;
  venn_cmd->add_option("merged", venn_input, "merged graph document")->required();
  venn_cmd->add_option("-o,--output", venn_out, "output path (default stdout)");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw a random edge sample from a region");
  std::string sample_input, sample_out;
  std::vector<std::string> sample_regions;
  long long sample_count = -1;
  uint64_t sample_seed = env_seed();
  sample_cmd->add_option("merged", sample_input, "merged graph document")->required();
  sample_cmd->add_option("--region", sample_regions,
                         "tool subset, e.g. acg or acg+tajs")
      ->required();
  sample_cmd->add_option("-n,--count", sample_count,
                         "sample size (default: representative size)");
  sample_cmd->add_option("--seed", sample_seed, "RNG seed (default $CGBENCH_SEED)");
  sample_cmd->add_option("-o,--output", sample_out, "output path (default stdout)");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "emit a program with a known call graph");
  GeneratorParams gen_params;
  gen_params.seed = env_seed();
  std::string gen_preset, gen_category = "simple", gen_out;
  gen_cmd->add_option("--preset", gen_preset,
                      "s_small|s_medium|s_large|c_medium|c_large");
  gen_cmd->add_option("--category", gen_category, "simple|complex");
  gen_cmd->add_option("--functions", gen_params.function_count, "function count");
  gen_cmd->add_option("--edges", gen_params.edge_count, "call-edge count");
  gen_cmd->add_option("--seed", gen_params.seed, "RNG seed (default $CGBENCH_SEED)");
  gen_cmd->add_option("--files", gen_params.file_count, "source file count");
  gen_cmd->add_option("--min-statements", gen_params.min_statements,
                      "filler statements lower bound");
  gen_cmd->add_option("--max-statements", gen_params.max_statements,
                      "filler statements upper bound");
  gen_cmd->add_option("--callback-fraction", gen_params.callback_fraction,
                      "share of edges routed through callbacks (complex)");
  gen_cmd->add_option("--name", gen_params.name, "base name for the source files");
  gen_cmd->add_option("-o,--output", gen_out, "output directory")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "re-check a generated program");
  std::string verify_dir;
  verify_cmd->add_option("dir", verify_dir, "generated program directory")->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "measure extraction time and memory");
  std::string bench_extract = "pessimistic", bench_cmd_tpl, bench_out, bench_samples;
  std::vector<std::string> bench_inputs;
  int bench_runs = 10, bench_interval = 50;
  bench_cmd->add_option("--extract", bench_extract,
                        "in-process extraction mode (pessimistic|optimistic)");
  bench_cmd->add_option("--cmd", bench_cmd_tpl,
                        "external command; {} is replaced by the input");
  bench_cmd->add_option("--input", bench_inputs, "input file or directory")
      ->required();
  bench_cmd->add_option("--runs", bench_runs, "runs per input (default 10)");
  bench_cmd->add_option("--interval-ms", bench_interval,
                        "memory sampling interval (default 50)");
  bench_cmd->add_option("-o,--output", bench_out, "CSV path (default stdout)");
  bench_cmd->add_option("--samples-dir", bench_samples,
                        "directory for per-run memory traces");

  // validate
  auto* validate_cmd =
      app.add_subcommand("validate", "step through edges and record verdicts");
  std::string validate_input, validate_root = ".", validate_keys;
  bool validate_revisit = false;
  validate_cmd->add_option("merged", validate_input, "merged graph document")
      ->required();
  validate_cmd->add_option("--root", validate_root, "source tree root");
  validate_cmd->add_option("--keys", validate_keys,
                           "only step through the edges listed in this file");
  validate_cmd->add_flag("--revisit", validate_revisit,
                         "include already-validated edges");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*extract)
      return cmd_extract(extract_files, extract_mode, extract_format, extract_out);
    if (*convert)
      return cmd_convert(convert_input, convert_pattern, convert_format, convert_out);
    if (*merge_cmd) return cmd_merge(merge_tools, merge_out);
    if (*stats_cmd) return cmd_stats(stats_input, stats_pretty, stats_out);
    if (*venn_cmd) return cmd_venn(venn_input, venn_out);
    if (*sample_cmd)
      return cmd_sample(sample_input, sample_regions, sample_count, sample_seed,
                        sample_out);
    if (*gen_cmd) {
      if (!gen_preset.empty()) {
        const GeneratorParams* preset = find_preset(gen_preset);
        if (!preset) throw Error(Errc::usage, "unknown preset \"" + gen_preset + "\"");
        GeneratorParams merged = *preset;
        merged.seed = gen_params.seed;
        gen_params = merged;
      } else {
        if (gen_category == "complex")
          gen_params.category = ProgramCategory::complex;
        else if (gen_category != "simple")
          throw Error(Errc::usage, "unknown category \"" + gen_category + "\"");
      }
      return cmd_generate(gen_params, gen_out);
    }
    if (*verify_cmd) return cmd_verify(verify_dir);
    if (*bench_cmd) {
      if (!bench_cmd_tpl.empty() && bench_cmd->count("--extract"))
        throw Error(Errc::usage, "--cmd and --extract are mutually exclusive");
      return cmd_bench(bench_extract, bench_cmd_tpl, bench_inputs, bench_runs,
                       bench_interval, bench_out, bench_samples);
    }
    if (*validate_cmd)
      return cmd_validate(validate_input, validate_root, validate_keys,
                          validate_revisit);
  } catch (const Error& e) {
    std::fprintf(stderr, "%s: %s\n", errc_name(e.code()), e.message().c_str());
    return e.code() == Errc::usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ERROR: %s\n", e.what());
    return 1;
  }
  return 2;
}
