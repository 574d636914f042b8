#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "cgbench/extractor.hpp"
#include "cgbench/json_io.hpp"

namespace cgbench {
namespace {

CallGraph pess(const std::string& src) {
  return extract_source(src, "test.js", ExtractionMode::pessimistic);
}

CallGraph opt(const std::string& src) {
  return extract_source(src, "test.js", ExtractionMode::optimistic);
}

// Key of the unique node carrying `label`; fails the test when absent or
// ambiguous.
NodeKey by_label(const CallGraph& g, const std::string& label) {
  const FunctionNode* hit = nullptr;
  for (const FunctionNode& n : g.nodes()) {
    if (n.label != label) continue;
    EXPECT_EQ(hit, nullptr) << "label '" << label << "' is ambiguous";
    hit = &n;
  }
  EXPECT_NE(hit, nullptr) << "no node labeled '" << label << "'";
  return hit ? hit->key() : NodeKey{};
}

bool subgraph_of(const CallGraph& a, const CallGraph& b) {
  for (const NodeKey& k : a.node_keys())
    if (!b.find(k)) return false;
  for (const auto& [s, t] : a.edge_keys())
    if (!b.has_edge(s, t)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// closures and immediately invoked functions
// ---------------------------------------------------------------------------

// A numeric kernel wrapped in an immediately invoked closure inside a loop:
// the toplevel calls the anonymous wrapper, and only the wrapper calls the
// kernel.
const char* kIifeInLoop =
    "function Sun() { return 1; }\n"
    "var ret = 0;\n"
    "for (var n = 3; n <= 24; n *= 2) {\n"
    "  (function () {\n"
    "    var bodies = Sun();\n"
    "  })();\n"
    "}\n";

TEST(Closures, IifeWrapperSeparatesToplevelFromKernel) {
  for (const CallGraph& g : {pess(kIifeInLoop), opt(kIifeInLoop)}) {
    NodeKey sun = by_label(g, "Sun");
    NodeKey wrapper = node_key("test.js", 4, 4);
    ASSERT_NE(g.find(wrapper), nullptr);
    EXPECT_TRUE(g.has_edge(toplevel_key(), wrapper));
    EXPECT_TRUE(g.has_edge(wrapper, sun));
    EXPECT_FALSE(g.has_edge(toplevel_key(), sun));
    EXPECT_EQ(g.nodes().size(), 3u);
    EXPECT_EQ(g.edges().size(), 2u);
  }
}

TEST(Closures, OneShotCallsPlumbArgumentsEvenPessimistically) {
  const char* src =
      "function f() {}\n"
      "(function (cb) { cb(); })(f);\n";
  CallGraph g = pess(src);
  NodeKey wrapper = node_key("test.js", 2, 2);
  EXPECT_TRUE(g.has_edge(toplevel_key(), wrapper));
  EXPECT_TRUE(g.has_edge(wrapper, by_label(g, "f")));
}

// ---------------------------------------------------------------------------
// property-based dispatch
// ---------------------------------------------------------------------------

// A method installed on a prototype, read back through an unrelated receiver:
// properties are tracked by name alone, so the inner function reaches the
// method and the method reaches the inner function.
const char* kPrototypeMethod =
    "Date.prototype.formatDate = function (input, time) {\n"
    "  function W() {\n"
    "    var prevNY = \"x\";\n"
    "    return prevNY.formatDate(\"W\");\n"
    "  }\n"
    "  return W();\n"
    "};\n";

TEST(Properties, OnePropertyVertexPerNameLinksUnrelatedReceivers) {
  for (const CallGraph& g : {pess(kPrototypeMethod), opt(kPrototypeMethod)}) {
    NodeKey method = node_key("test.js", 1, 29);
    NodeKey w = by_label(g, "W");
    ASSERT_NE(g.find(method), nullptr);
    EXPECT_TRUE(g.has_edge(w, method));  // prevNY.formatDate resolves by name
    EXPECT_TRUE(g.has_edge(method, w));
    // no call happens at the global scope, so there is no toplevel node
    EXPECT_EQ(g.find(toplevel_key()), nullptr);
    EXPECT_EQ(g.nodes().size(), 2u);
  }
}

TEST(Properties, MethodRecursionThroughItsOwnName) {
  const char* src =
      "function Tree(v) { this.v = v; }\n"
      "Tree.prototype.sum = function () {\n"
      "  if (this.left) { return this.v + this.left.sum(); }\n"
      "  return this.v;\n"
      "};\n"
      "var t = new Tree(1);\n"
      "t.sum();\n";
  for (const CallGraph& g : {pess(src), opt(src)}) {
    NodeKey sum = node_key("test.js", 2, 22);
    EXPECT_TRUE(g.has_edge(toplevel_key(), by_label(g, "Tree")));
    EXPECT_TRUE(g.has_edge(toplevel_key(), sum));
    EXPECT_TRUE(g.has_edge(sum, sum));
  }
}

TEST(Properties, SharedNameAcrossDistinctObjectsIsConflated) {
  // The intentional imprecision of name-keyed properties.
  const char* src =
      "var o = {};\n"
      "o.run = function () {};\n"
      "var p = {};\n"
      "p.run();\n";
  CallGraph g = pess(src);
  EXPECT_TRUE(g.has_edge(toplevel_key(), node_key("test.js", 2, 9)));
}

TEST(Properties, ComputedAccessContributesNothing) {
  const char* src =
      "var o = {};\n"
      "o.run = function () {};\n"
      "var h = o[\"run\"];\n"
      "h();\n";
  CallGraph g = opt(src);
  EXPECT_EQ(g.edges().size(), 0u);
}

// ---------------------------------------------------------------------------
// parameter passing across ordinary calls
// ---------------------------------------------------------------------------

// A timing harness that receives the measured function as an argument. The
// harness-to-kernel edge exists only when arguments flow into parameters,
// which ordinary (non-one-shot) calls get in the optimistic mode alone.
const char* kHigherOrder =
    "function fast3bitlookup(b) {\n"
    "  return b & 7;\n"
    "}\n"
    "function TimeFunc(func) {\n"
    "  var sum = 0;\n"
    "  for (var x = 0; x < 3; x++) {\n"
    "    for (var y = 0; y < 256; y++) { sum += func(y); }\n"
    "  }\n"
    "  return sum;\n"
    "}\n"
    "sum = TimeFunc(fast3bitlookup);\n";

TEST(Modes, ParameterFlowSeparatesTheTwoModes) {
  CallGraph p = pess(kHigherOrder);
  CallGraph o = opt(kHigherOrder);
  NodeKey timer = by_label(p, "TimeFunc");
  NodeKey kernel = by_label(p, "fast3bitlookup");

  EXPECT_TRUE(p.has_edge(toplevel_key(), timer));
  EXPECT_FALSE(p.has_edge(timer, kernel));

  EXPECT_TRUE(o.has_edge(toplevel_key(), timer));
  EXPECT_TRUE(o.has_edge(timer, kernel));
}

TEST(Modes, PessimisticIsASubgraphOfOptimistic) {
  for (const char* src : {kIifeInLoop, kPrototypeMethod, kHigherOrder}) {
    EXPECT_TRUE(subgraph_of(pess(src), opt(src)));
  }
}

// ---------------------------------------------------------------------------
// lexical scoping
// ---------------------------------------------------------------------------

// Two structurally identical packed decompressors. Each rebinds its own `e`
// parameter to an inner encoder; the two `e`s live in different scopes, so
// no edge crosses from one copy to the other.
const char* kTwoDecompressors =
    "var decompressedA = function (p, a, c, k, e, d) {\n"
    "  e = function (c) {\n"
    "    return (c < a ? \"\" : e(parseInt(c / a))) + c.toString(36);\n"
    "  };\n"
    "  return e(c);\n"
    "}(1, 2, 3, 4, 5, 6);\n"
    "var decompressedB = function (p, a, c, k, e, d) {\n"
    "  e = function (c) {\n"
    "    return (c < a ? \"\" : e(parseInt(c / a))) + c.toString(36);\n"
    "  };\n"
    "  return e(c);\n"
    "}(7, 8, 9, 10, 11, 12);\n";

TEST(Scoping, RebindingAParameterStaysInsideItsClosure) {
  NodeKey outer_a = node_key("test.js", 1, 21), inner_a = node_key("test.js", 2, 7);
  NodeKey outer_b = node_key("test.js", 7, 21), inner_b = node_key("test.js", 8, 7);
  for (const CallGraph& g : {pess(kTwoDecompressors), opt(kTwoDecompressors)}) {
    EXPECT_TRUE(g.has_edge(toplevel_key(), outer_a));
    EXPECT_TRUE(g.has_edge(toplevel_key(), outer_b));
    EXPECT_TRUE(g.has_edge(outer_a, inner_a));
    EXPECT_TRUE(g.has_edge(outer_b, inner_b));
    EXPECT_TRUE(g.has_edge(inner_a, inner_a));
    EXPECT_TRUE(g.has_edge(inner_b, inner_b));
    // scope separation: nothing crosses between the two copies
    EXPECT_FALSE(g.has_edge(outer_a, inner_b));
    EXPECT_FALSE(g.has_edge(outer_b, inner_a));
    EXPECT_FALSE(g.has_edge(inner_a, inner_b));
    EXPECT_FALSE(g.has_edge(inner_b, inner_a));
    EXPECT_EQ(g.nodes().size(), 5u);
    EXPECT_EQ(g.edges().size(), 6u);
  }
}

// ---------------------------------------------------------------------------
// recursion
// ---------------------------------------------------------------------------

TEST(Recursion, DirectSelfCall) {
  CallGraph g = pess("function r(n) { return r(n - 1); }\nr(3);\n");
  NodeKey r = by_label(g, "r");
  EXPECT_TRUE(g.has_edge(r, r));
  EXPECT_TRUE(g.has_edge(toplevel_key(), r));
}

TEST(Recursion, RecursiveMicrobenchmarkShape) {
  const char* src =
      "function ack(m, n) { return ack(m - 1, n); }\n"
      "function fib(n) { return fib(n - 1) + fib(n - 2); }\n"
      "function tak(x, y, z) { return tak(x - 1, y, z); }\n"
      "function main() {\n"
      "  ack(3, 2);\n"
      "  fib(10);\n"
      "  tak(9, 5, 2);\n"
      "}\n"
      "main();\n";
  CallGraph g = pess(src);
  EXPECT_EQ(g.nodes().size(), 5u);  // four functions plus toplevel
  int inter = 0;
  for (const auto& [s, t] : g.edge_keys())
    if (s != toplevel_key()) ++inter;
  EXPECT_EQ(inter, 6);  // three self-loops, three calls from main
  EXPECT_TRUE(g.has_edge(toplevel_key(), by_label(g, "main")));
}

// ---------------------------------------------------------------------------
// value-flow corners
// ---------------------------------------------------------------------------

TEST(ValueFlow, ConditionalCarriesBothBranches) {
  const char* src =
      "function f() {}\n"
      "function g() {}\n"
      "var h = x ? f : g;\n"
      "h();\n";
  CallGraph gr = pess(src);
  EXPECT_TRUE(gr.has_edge(toplevel_key(), by_label(gr, "f")));
  EXPECT_TRUE(gr.has_edge(toplevel_key(), by_label(gr, "g")));
}

TEST(ValueFlow, SequenceCarriesOnlyTheLastExpression) {
  const char* src =
      "function f() {}\n"
      "function g() {}\n"
      "var h = (f, g);\n"
      "h();\n";
  CallGraph gr = pess(src);
  EXPECT_FALSE(gr.has_edge(toplevel_key(), by_label(gr, "f")));
  EXPECT_TRUE(gr.has_edge(toplevel_key(), by_label(gr, "g")));
}

TEST(ValueFlow, LogicalOperatorsCarryNothing) {
  const char* src =
      "function f() {}\n"
      "function g() {}\n"
      "var h = f || g;\n"
      "h();\n";
  EXPECT_EQ(pess(src).edges().size(), 0u);
}

TEST(ValueFlow, CompoundAssignmentCarriesNothing) {
  const char* src =
      "function f() {}\n"
      "var h = 0;\n"
      "h += f;\n"
      "h();\n";
  EXPECT_EQ(opt(src).edges().size(), 0u);
}

TEST(ValueFlow, ConstructionCountsAsACall) {
  CallGraph g = pess("function C() {}\nvar c = new C();\n");
  EXPECT_TRUE(g.has_edge(toplevel_key(), by_label(g, "C")));
}

TEST(ValueFlow, IsolatedFunctionsStillBecomeNodes) {
  CallGraph g = pess("function lonely() {}\n");
  EXPECT_EQ(g.nodes().size(), 1u);
  EXPECT_EQ(g.edges().size(), 0u);
  EXPECT_NE(g.find(node_key("test.js", 1, 1)), nullptr);
}

// ---------------------------------------------------------------------------
// modules
// ---------------------------------------------------------------------------

TEST(Modules, RequireLinksTheExportedFunction) {
  std::vector<std::pair<std::string, std::string>> files = {
      {"lib.js", "module.exports = function main() { return 1; };\n"},
      {"app.js", "var m = require(\"./lib\");\nm();\n"},
  };
  CallGraph g = extract_call_graph(files, ExtractionMode::pessimistic);
  EXPECT_TRUE(g.has_edge(toplevel_key(), by_label(g, "main")));
}

TEST(Modules, ExportedPropertiesResolveByName) {
  std::vector<std::pair<std::string, std::string>> files = {
      {"lib.js", "exports.greet = function () { return 1; };\n"},
      {"app.js", "var lib = require(\"./lib\");\nlib.greet();\n"},
  };
  CallGraph g = extract_call_graph(files, ExtractionMode::pessimistic);
  EXPECT_TRUE(g.has_edge(toplevel_key(), node_key("lib.js", 1, 17)));
}

TEST(Modules, FilesShareOneToplevelNode) {
  std::vector<std::pair<std::string, std::string>> files = {
      {"a.js", "function fa() {}\nfa();\n"},
      {"b.js", "function fb() {}\nfb();\n"},
  };
  CallGraph g = extract_call_graph(files, ExtractionMode::optimistic);
  EXPECT_TRUE(g.has_edge(toplevel_key(), node_key("a.js", 1, 1)));
  EXPECT_TRUE(g.has_edge(toplevel_key(), node_key("b.js", 1, 1)));
  EXPECT_EQ(g.nodes().size(), 3u);
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

TEST(Stability, ExtractionIsDeterministic) {
  for (const char* src :
       {kIifeInLoop, kPrototypeMethod, kHigherOrder, kTwoDecompressors}) {
    EXPECT_EQ(serialize(pess(src)), serialize(pess(src)));
    EXPECT_EQ(serialize(opt(src)), serialize(opt(src)));
  }
}

TEST(Stability, ParserErrorsPassThrough) {
  EXPECT_THROW(pess("var = ;"), Error);
  try {
    pess("let x = 1;");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported_construct);
  }
}

}  // namespace
}  // namespace cgbench
