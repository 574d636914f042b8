#ifndef CGBENCH_DOT_HPP
#define CGBENCH_DOT_HPP

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cgbench/call_graph.hpp"
#include "cgbench/error.hpp"

namespace cgbench {

/// Recipe for turning a tool-specific node label into a graph position.
/// The regex must capture (file, line, column) in groups 1..3; an optional
/// group 4 captures a display label. Offsets compensate for tools that count
/// from zero. A node whose raw label equals `global_label` (or whose parsed
/// key lands on toplevel:1:1) becomes the artificial toplevel node.
struct LabelPattern {
  std::string pattern = R"(^(.*):([0-9]+):([0-9]+)(?::(.*))?$)";
  int line_offset = 0;
  int column_offset = 0;
  std::string global_label = kToplevelLabel;
};

namespace detail {

struct ResolvedLabel {
  NodeKey key;
  std::string label;
};

/// Compiles a LabelPattern once and resolves raw node labels against it.
class PatternMatcher {
 public:
  explicit PatternMatcher(const LabelPattern& p) : p_(p) {
    try {
      re_.assign(p.pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw Error(Errc::usage, std::string("invalid node pattern: ") + e.what());
    }
    if (re_.mark_count() < 3)
      throw Error(Errc::usage,
                  "node pattern must capture (file, line, column)");
  }

  /// True when `raw` would resolve at all; numeric range problems still
  /// surface as errors in resolve().
  bool matches(const std::string& raw) const {
    return raw == p_.global_label || std::regex_search(raw, re_);
  }

  ResolvedLabel resolve(const std::string& raw, const std::string& node_id) const {
    if (raw == p_.global_label) return {toplevel_key(), kToplevelLabel};
    std::smatch m;
    if (!std::regex_search(raw, m, re_))
      throw Error(Errc::label_mismatch,
                  "node \"" + node_id + "\": label \"" + raw +
                      "\" does not match the position pattern");
    long line = 0;
    long column = 0;
    try {
      line = std::stol(m[2].str()) + p_.line_offset;
      column = std::stol(m[3].str()) + p_.column_offset;
    } catch (const std::exception&) {
      throw Error(Errc::label_mismatch,
                  "node \"" + node_id + "\": label \"" + raw +
                      "\" has a non-numeric position");
    }
    if (line < 1 || column < 1)
      throw Error(Errc::label_mismatch,
                  "node \"" + node_id + "\": label \"" + raw +
                      "\" yields a position before 1:1");
    NodeKey key = node_key(normalize_path(m[1].str()), static_cast<int>(line),
                           static_cast<int>(column));
    if (key == toplevel_key()) return {key, kToplevelLabel};
    std::string label = (m.size() > 4 && m[4].matched) ? m[4].str() : raw;
    return {key, label};
  }

 private:
  LabelPattern p_;
  std::regex re_;
};

// ---------------------------------------------------------------- DOT lexer

enum class DotTok { id, punct, arrow, undirected, eof };

struct DotToken {
  DotTok kind;
  std::string text;
  int line;
};

class DotLexer {
 public:
  explicit DotLexer(const std::string& src) : src_(src) {}

  std::vector<DotToken> tokenize() {
    std::vector<DotToken> out;
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (c == '"') {
        out.push_back({DotTok::id, quoted(), line_});
      } else if (c == '-' && pos_ + 1 < src_.size() &&
                 (src_[pos_ + 1] == '>' || src_[pos_ + 1] == '-')) {
        bool directed = src_[pos_ + 1] == '>';
        out.push_back({directed ? DotTok::arrow : DotTok::undirected,
                       directed ? "->" : "--", line_});
        pos_ += 2;
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                 c == '.' || c == '$' || c == '/' || c == '\\' || c == '<') {
        out.push_back({DotTok::id, unquoted(), line_});
      } else if (c == '{' || c == '}' || c == '[' || c == ']' || c == '=' ||
                 c == ';' || c == ',' || c == ':') {
        out.push_back({DotTok::punct, std::string(1, c), line_});
        ++pos_;
      } else {
        throw Error(Errc::dot_syntax, "line " + std::to_string(line_) +
                                          ": unexpected character '" +
                                          std::string(1, c) + "'");
      }
    }
    out.push_back({DotTok::eof, "", line_});
    return out;
  }

 private:
  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        pos_ += 2;
        while (pos_ + 1 < src_.size() &&
               !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
          if (src_[pos_] == '\n') ++line_;
          ++pos_;
        }
        if (pos_ + 1 >= src_.size())
          throw Error(Errc::dot_syntax, "unterminated comment");
        pos_ += 2;
      } else {
        break;
      }
    }
  }

  std::string quoted() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < src_.size()) {
        char n = src_[pos_ + 1];
        if (n == '"' || n == '\\') {
          out.push_back(n);
          pos_ += 2;
          continue;
        }
        if (n == '\n') {  // line continuation
          ++line_;
          pos_ += 2;
          continue;
        }
      }
      if (c == '\n') ++line_;
      out.push_back(c);
      ++pos_;
    }
    if (pos_ >= src_.size())
      throw Error(Errc::dot_syntax,
                  "line " + std::to_string(line_) + ": unterminated string");
    ++pos_;  // closing quote
    return out;
  }

  std::string unquoted() {
    size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
          c == '$' || c == '/' || c == '\\' || c == '<' || c == '>') {
        ++pos_;
      } else if (c == '-' &&
                 !(pos_ + 1 < src_.size() &&
                   (src_[pos_ + 1] == '>' || src_[pos_ + 1] == '-'))) {
        ++pos_;
      } else {
        break;
      }
    }
    return src_.substr(start, pos_ - start);
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
};

inline std::string lower_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// --------------------------------------------------------------- DOT parser

/// Supported statements inside `[strict] digraph [name] { ... }`: node
/// statements with optional attribute lists, directed edge chains, and
/// default-attribute statements (`graph`/`node`/`edge [..]`), which are
/// skipped. Subgraphs, ports and undirected edges are reported as DOT_SYNTAX.
class DotParser {
 public:
  DotParser(const std::string& src, const LabelPattern& pattern)
      : toks_(DotLexer(src).tokenize()), matcher_(pattern) {}

  CallGraph parse() {
    if (at_keyword("strict")) ++pos_;
    if (!at_keyword("digraph")) {
      if (at_keyword("graph"))
        throw Error(Errc::dot_syntax, "undirected graphs are not supported");
      throw Error(Errc::dot_syntax, "expected \"digraph\"");
    }
    ++pos_;
    if (cur().kind == DotTok::id) ++pos_;  // optional graph name
    expect("{");
    while (!at_punct("}")) {
      if (cur().kind == DotTok::eof)
        throw Error(Errc::dot_syntax, "unexpected end of input, expected \"}\"");
      statement();
    }
    ++pos_;  // '}'
    return build();
  }

 private:
  struct PendingEdge {
    std::string from, to;
  };

  const DotToken& cur() const { return toks_[pos_]; }

  bool at_punct(const std::string& p) const {
    return cur().kind == DotTok::punct && cur().text == p;
  }

  bool at_keyword(const char* kw) const {
    return cur().kind == DotTok::id && lower_ascii(cur().text) == kw;
  }

  void expect(const std::string& p) {
    if (!at_punct(p))
      throw Error(Errc::dot_syntax, "line " + std::to_string(cur().line) +
                                        ": expected \"" + p + "\"");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::dot_syntax,
                "line " + std::to_string(cur().line) + ": " + what);
  }

  void statement() {
    if (at_punct(";")) {
      ++pos_;
      return;
    }
    if (at_keyword("subgraph") || at_punct("{"))
      fail("subgraphs are not supported");
    if (at_keyword("graph") || at_keyword("node") || at_keyword("edge")) {
      ++pos_;
      skip_attr_lists();
      return;
    }
    if (cur().kind != DotTok::id) fail("expected node or edge statement");
    std::string first = cur().text;
    ++pos_;
    if (at_punct(":")) fail("ports are not supported");
    if (cur().kind == DotTok::undirected)
      fail("undirected edges are not supported");
    if (at_punct("=")) {  // bare `name = value` graph attribute
      ++pos_;
      if (cur().kind != DotTok::id) fail("expected attribute value");
      ++pos_;
      return;
    }
    if (cur().kind == DotTok::arrow) {
      std::string prev = first;
      mention(prev);
      while (cur().kind == DotTok::arrow) {
        ++pos_;
        if (cur().kind != DotTok::id) fail("expected edge target");
        std::string next = cur().text;
        ++pos_;
        if (at_punct(":")) fail("ports are not supported");
        mention(next);
        edges_.push_back({prev, next});
        prev = next;
      }
      skip_attr_lists();  // edge attributes carry nothing we keep
      return;
    }
    // Node statement; a label attribute is kept and interpreted at build
    // time, either as the position source or as a plain display label.
    mention(first);
    std::map<std::string, std::string> attrs = collect_attr_lists();
    auto it = attrs.find("label");
    if (it != attrs.end() && !labels_.count(first)) labels_[first] = it->second;
  }

  void skip_attr_lists() {
    while (at_punct("[")) collect_one_attr_list(nullptr);
  }

  std::map<std::string, std::string> collect_attr_lists() {
    std::map<std::string, std::string> attrs;
    while (at_punct("[")) collect_one_attr_list(&attrs);
    return attrs;
  }

  void collect_one_attr_list(std::map<std::string, std::string>* out) {
    expect("[");
    while (!at_punct("]")) {
      if (cur().kind != DotTok::id) fail("expected attribute name");
      std::string name = lower_ascii(cur().text);
      ++pos_;
      expect("=");
      if (cur().kind != DotTok::id) fail("expected attribute value");
      if (out && !out->count(name)) (*out)[name] = cur().text;
      ++pos_;
      if (at_punct(",") || at_punct(";")) ++pos_;
    }
    ++pos_;  // ']'
  }

  void mention(const std::string& id) {
    if (seen_.insert(id).second) order_.push_back(id);
  }

  CallGraph build() {
    if (cur().kind != DotTok::eof) fail("trailing input after \"}\"");
    CallGraph g;
    std::map<std::string, int> ids;
    for (const std::string& id : order_) {
      auto it = labels_.find(id);
      ResolvedLabel r;
      if (it == labels_.end()) {
        r = matcher_.resolve(id, id);
      } else if (matcher_.matches(it->second)) {
        r = matcher_.resolve(it->second, id);
      } else if (matcher_.matches(id)) {
        // position in the node name, plain function name in the attribute
        r = matcher_.resolve(id, id);
        if (r.key != toplevel_key()) r.label = it->second;
      } else {
        r = matcher_.resolve(it->second, id);  // reports the mismatch
      }
      ids[id] = g.add_node(r.key, r.label);
    }
    for (const PendingEdge& e : edges_) g.add_edge(ids[e.from], ids[e.to]);
    return g;
  }

  std::vector<DotToken> toks_;
  size_t pos_ = 0;
  PatternMatcher matcher_;
  std::vector<std::string> order_;
  std::set<std::string> seen_;
  std::map<std::string, std::string> labels_;
  std::vector<PendingEdge> edges_;
};

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses the supported DOT subset into a canonical graph. Positions come
/// from whichever of the label attribute or the node id matches `pattern`
/// (attribute first); a non-matching attribute next to a matching id is kept
/// as the function name.
inline CallGraph parse_dot(const std::string& text, const LabelPattern& pattern = {}) {
  return detail::DotParser(text, pattern).parse();
}

/// Parses the plain edge-list format: one `A -> B` pair per line, where both
/// endpoints use the same label grammar as DOT nodes. A line holding a single
/// label declares an isolated node. `#` starts a comment line.
inline CallGraph parse_edge_list(const std::string& text,
                                 const LabelPattern& pattern = {}) {
  detail::PatternMatcher matcher(pattern);
  CallGraph g;
  size_t lineno = 0;
  size_t start = 0;
  while (start < text.size() || (start == 0 && !text.empty())) {
    size_t nl = text.find('\n', start);
    std::string line = text.substr(
        start, nl == std::string::npos ? std::string::npos : nl - start);
    ++lineno;
    line = detail::trim(line);
    if (!line.empty() && line[0] != '#') {
      std::string where = "line " + std::to_string(lineno);
      std::vector<std::string> parts;
      size_t p = 0;
      for (;;) {
        size_t arrow = line.find("->", p);
        if (arrow == std::string::npos) {
          parts.push_back(detail::trim(line.substr(p)));
          break;
        }
        parts.push_back(detail::trim(line.substr(p, arrow - p)));
        p = arrow + 2;
      }
      for (const std::string& part : parts)
        if (part.empty())
          throw Error(Errc::dot_syntax, where + ": empty endpoint");
      int prev = -1;
      for (const std::string& part : parts) {
        detail::ResolvedLabel r = matcher.resolve(part, where);
        int id = g.add_node(r.key, r.label);
        if (prev >= 0) g.add_edge(prev, id);
        prev = id;
      }
    }
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return g;
}

/// True when the text looks like a DOT document rather than an edge list.
inline bool looks_like_dot(const std::string& text) {
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (i + 1 < text.size() && text[i] == '/' && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (i < text.size() && text[i] == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (i + 1 < text.size() && text[i] == '/' && text[i + 1] == '*') {
      size_t end = text.find("*/", i + 2);
      if (end == std::string::npos) return false;
      i = end + 2;
    } else {
      break;
    }
  }
  std::string head = detail::lower_ascii(text.substr(i, 8));
  return head.rfind("digraph", 0) == 0 || head.rfind("strict", 0) == 0;
}

/// Parses either format, deciding by content.
inline CallGraph parse_graph_text(const std::string& text,
                                  const LabelPattern& pattern = {}) {
  return looks_like_dot(text) ? parse_dot(text, pattern)
                              : parse_edge_list(text, pattern);
}

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::vector<CallEdge> sorted_edges(const CallGraph& g) {
  std::vector<CallEdge> edges(g.edges().begin(), g.edges().end());
  std::sort(edges.begin(), edges.end(), [](const CallEdge& a, const CallEdge& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  return edges;
}

}  // namespace detail

/// Renders a graph as DOT. Node ids are `file:line:column`; labels are
/// embedded as `file:line:column:label`, which the default pattern strips
/// back apart, so parse_dot(to_dot(g)) reproduces the graph.
inline std::string to_dot(const CallGraph& g) {
  std::string out = "digraph callgraph {\n";
  for (const FunctionNode& n : g.nodes()) {
    out += "  " + detail::dot_quote(n.key().to_string());
    if (n.key() != toplevel_key())
      out += " [label=" +
             detail::dot_quote(n.key().to_string() + ":" + n.label) + "]";
    out += ";\n";
  }
  for (const CallEdge& e : detail::sorted_edges(g)) {
    out += "  " + detail::dot_quote(g.nodes()[e.source].key().to_string()) +
           " -> " + detail::dot_quote(g.nodes()[e.target].key().to_string()) +
           ";\n";
  }
  out += "}\n";
  return out;
}

/// Renders a graph as an edge list: sorted edges, then isolated nodes.
/// Labels are not preserved in this format.
inline std::string to_edge_list(const CallGraph& g) {
  std::string out;
  std::vector<bool> touched(g.nodes().size(), false);
  for (const CallEdge& e : detail::sorted_edges(g)) {
    touched[static_cast<size_t>(e.source)] = true;
    touched[static_cast<size_t>(e.target)] = true;
    out += g.nodes()[e.source].key().to_string() + " -> " +
           g.nodes()[e.target].key().to_string() + "\n";
  }
  for (const FunctionNode& n : g.nodes())
    if (!touched[static_cast<size_t>(n.id)]) out += n.key().to_string() + "\n";
  return out;
}

/// Rewrites node positions according to `patches` (old key -> new key) and
/// returns the rekeyed graph. Every old key must name an existing node
/// (UNKNOWN_KEY); two nodes may not end up on the same position
/// (KEY_COLLISION).
inline CallGraph repair_positions(
    const CallGraph& g,
    const std::vector<std::pair<NodeKey, NodeKey>>& patches) {
  std::unordered_map<NodeKey, NodeKey, NodeKeyHash> moves;
  for (const auto& [from, to] : patches) {
    if (!g.find(from))
      throw Error(Errc::unknown_key,
                  "no node at " + from.to_string() + " to repair");
    if (from == toplevel_key() && !(to == toplevel_key()))
      throw Error(Errc::key_collision, "the toplevel node cannot be moved");
    moves[from] = to;
  }
  CallGraph out;
  for (const FunctionNode& n : g.nodes()) {
    NodeKey key = n.key();
    auto it = moves.find(key);
    if (it != moves.end()) key = it->second;
    int id = out.add_node(key, n.label);
    if (id != n.id)
      throw Error(Errc::key_collision, "two nodes map to " + key.to_string());
  }
  for (const CallEdge& e : g.edges()) out.add_edge(e.source, e.target);
  return out;
}

}  // namespace cgbench

#endif  // CGBENCH_DOT_HPP
