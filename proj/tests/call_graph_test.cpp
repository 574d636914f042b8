#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "cgbench/call_graph.hpp"
#include "cgbench/json_io.hpp"

namespace cgbench {
namespace {

NodeKey key(const std::string& f, int l, int c) { return node_key(f, l, c); }

// ---------------------------------------------------------------------------
// node identity
// ---------------------------------------------------------------------------

TEST(NodeKey, OrdersByFileThenLineThenColumn) {
  EXPECT_LT(key("a.js", 1, 1), key("b.js", 1, 1));
  EXPECT_LT(key("a.js", 1, 9), key("a.js", 2, 1));
  EXPECT_LT(key("a.js", 2, 1), key("a.js", 2, 2));
  EXPECT_EQ(key("a.js", 7, 3), key("a.js", 7, 3));
}

TEST(NodeKey, NormalizesBackslashes) {
  EXPECT_EQ(node_key("lib\\util.js", 4, 2), key("lib/util.js", 4, 2));
}

TEST(NodeKey, ToStringUsesColonForm) {
  EXPECT_EQ(key("a.js", 74, 1).to_string(), "a.js:74:1");
  EXPECT_EQ(toplevel_key().to_string(), "toplevel:1:1");
}

TEST(CallGraphModel, AddNodeIsIdempotentAndFirstLabelWins) {
  CallGraph g;
  int a = g.add_node(key("a.js", 1, 1), "f");
  int b = g.add_node(key("a.js", 1, 1), "g");  // same position, new label
  EXPECT_EQ(a, b);
  EXPECT_EQ(g.nodes().size(), 1u);
  EXPECT_EQ(g.nodes()[0].label, "f");
}

TEST(CallGraphModel, IdsAreDenseInFirstAppearanceOrder) {
  CallGraph g;
  EXPECT_EQ(g.add_node(toplevel_key(), kToplevelLabel), 0);
  EXPECT_EQ(g.add_node(key("a.js", 3, 1), "f"), 1);
  EXPECT_EQ(g.add_node(key("a.js", 9, 1), "g"), 2);
  EXPECT_EQ(g.add_node(key("a.js", 3, 1), "f"), 1);
}

TEST(CallGraphModel, DuplicateEdgesCollapse) {
  CallGraph g;
  int a = g.add_node(key("a.js", 1, 1), "f");
  int b = g.add_node(key("a.js", 5, 1), "g");
  EXPECT_TRUE(g.add_edge(a, b));
  EXPECT_FALSE(g.add_edge(a, b));
  EXPECT_EQ(g.edges().size(), 1u);
}

TEST(CallGraphModel, SelfLoopsAreValid) {
  CallGraph g;
  int a = g.add_node(key("a.js", 1, 1), "rec");
  EXPECT_TRUE(g.add_edge(a, a));
  EXPECT_TRUE(g.has_edge(key("a.js", 1, 1), key("a.js", 1, 1)));
}

// ---------------------------------------------------------------------------
// canonicalization
// ---------------------------------------------------------------------------

TEST(Canonicalize, FoldsGlobalCallersIntoOneToplevelNode) {
  std::vector<RawCall> calls = {
      {std::nullopt, key("a.js", 1, 1)},
      {std::nullopt, key("a.js", 8, 1)},
  };
  LabelMap labels{{key("a.js", 1, 1), "f"}, {key("a.js", 8, 1), "g"}};
  CallGraph g = canonicalize(calls, labels);

  ASSERT_EQ(g.nodes().size(), 3u);
  EXPECT_EQ(g.nodes()[0].key(), toplevel_key());
  EXPECT_EQ(g.nodes()[0].label, kToplevelLabel);
  EXPECT_EQ(g.nodes()[1].label, "f");
  EXPECT_EQ(g.nodes()[2].label, "g");
  EXPECT_EQ(g.edges().size(), 2u);
}

TEST(Canonicalize, DeduplicatesRepeatedObservations) {
  std::vector<RawCall> calls(5, RawCall{std::nullopt, key("a.js", 2, 1)});
  CallGraph g = canonicalize(calls);
  EXPECT_EQ(g.nodes().size(), 2u);
  EXPECT_EQ(g.edges().size(), 1u);
}

TEST(Canonicalize, UnnamedFunctionsGetTheAnonymousLabel) {
  CallGraph g = canonicalize({{std::nullopt, key("a.js", 4, 12)}});
  const FunctionNode* n = g.find(key("a.js", 4, 12));
  ASSERT_NE(n, nullptr);
  EXPECT_EQ(n->label, kAnonymousLabel);
}

TEST(Canonicalize, SameShapeIgnoresIdAssignment) {
  // Same edges observed in different orders give different ids but the
  // same graph.
  std::vector<RawCall> fwd = {
      {std::nullopt, key("a.js", 1, 1)},
      {key("a.js", 1, 1), key("a.js", 5, 1)},
  };
  std::vector<RawCall> rev = {fwd[1], fwd[0]};
  CallGraph a = canonicalize(fwd);
  CallGraph b = canonicalize(rev);
  EXPECT_NE(a.nodes()[0].key(), b.nodes()[0].key());
  EXPECT_TRUE(same_shape(a, b));
}

TEST(Canonicalize, SameShapeDetectsMissingEdge) {
  CallGraph a = canonicalize({{std::nullopt, key("a.js", 1, 1)}});
  CallGraph b;
  b.add_node(toplevel_key(), kToplevelLabel);
  b.add_node(key("a.js", 1, 1), kAnonymousLabel);
  EXPECT_FALSE(same_shape(a, b));
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

CallGraph sample_graph() {
  CallGraph g;
  int t = g.add_node(toplevel_key(), kToplevelLabel);
  int f = g.add_node(key("a.js", 1, 1), "f");
  int h = g.add_node(key("b.js", 10, 5), "h");
  g.add_edge(t, f);
  g.add_edge(f, h);
  g.add_edge(h, h);
  return g;
}

TEST(GraphJson, SerializeEmitsNodesByIdAndSortedEdges) {
  CallGraph g;
  int f = g.add_node(key("a.js", 1, 1), "f");
  int t = g.add_node(toplevel_key(), kToplevelLabel);
  g.add_edge(t, f);  // (1,0): insertion order is not sorted order
  g.add_edge(f, f);

  json doc = detail::parse_json(serialize(g));
  ASSERT_EQ(doc["nodes"].size(), 2u);
  EXPECT_EQ(doc["nodes"][0]["id"], 0);
  EXPECT_EQ(doc["nodes"][0]["label"], "f");
  EXPECT_EQ(doc["nodes"][1]["label"], "toplevel");
  // Edges come out ordered by (source, target): (0,0) before (1,0).
  ASSERT_EQ(doc["edges"].size(), 2u);
  EXPECT_EQ(doc["edges"][0]["source"], 0);
  EXPECT_EQ(doc["edges"][0]["target"], 0);
  EXPECT_EQ(doc["edges"][1]["source"], 1);
}

TEST(GraphJson, RoundTripPreservesShapeAndLabels) {
  CallGraph g = sample_graph();
  CallGraph back = deserialize(serialize(g));
  EXPECT_TRUE(same_shape(g, back));
  for (const FunctionNode& n : g.nodes()) {
    const FunctionNode* m = back.find(n.key());
    ASSERT_NE(m, nullptr);
    EXPECT_EQ(m->label, n.label);
  }
}

TEST(GraphJson, SerializeIsAFixedPointAfterOneRoundTrip) {
  std::string once = serialize(sample_graph());
  EXPECT_EQ(serialize(deserialize(once)), once);
}

TEST(GraphJson, DeserializeRenumbersSparseIdsDensely) {
  std::string text = R"({
    "nodes": [
      {"id": 10, "label": "toplevel", "file": "toplevel", "line": 1, "column": 1},
      {"id": 40, "label": "f", "file": "a.js", "line": 2, "column": 1}
    ],
    "edges": [{"source": 10, "target": 40}]
  })";
  CallGraph g = deserialize(text);
  ASSERT_EQ(g.nodes().size(), 2u);
  EXPECT_EQ(g.nodes()[0].id, 0);
  EXPECT_EQ(g.nodes()[1].id, 1);
  EXPECT_TRUE(g.has_edge(toplevel_key(), key("a.js", 2, 1)));
}

void expect_error(const std::string& text, Errc code) {
  try {
    deserialize(text);
    FAIL() << "expected " << errc_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(GraphJson, RejectsInvalidJson) {
  expect_error("{nodes: [", Errc::malformed_document);
  expect_error("", Errc::malformed_document);
}

TEST(GraphJson, RejectsSchemaViolations) {
  // not an object
  expect_error("[1,2]", Errc::schema_violation);
  // missing edges array
  expect_error(R"({"nodes": []})", Errc::schema_violation);
  // node without a position field
  expect_error(R"({"nodes": [{"id":0,"label":"f","file":"a.js","line":1}],
                   "edges": []})",
               Errc::schema_violation);
  // dangling edge endpoint
  expect_error(R"({"nodes": [{"id":0,"label":"f","file":"a.js","line":1,"column":1}],
                   "edges": [{"source":0,"target":3}]})",
               Errc::schema_violation);
  // two nodes at one position
  expect_error(R"({"nodes": [
                     {"id":0,"label":"f","file":"a.js","line":1,"column":1},
                     {"id":1,"label":"g","file":"a.js","line":1,"column":1}],
                   "edges": []})",
               Errc::schema_violation);
  // duplicate edge
  expect_error(R"({"nodes": [{"id":0,"label":"f","file":"a.js","line":1,"column":1}],
                   "edges": [{"source":0,"target":0},{"source":0,"target":0}]})",
               Errc::schema_violation);
  // non-positive position
  expect_error(R"({"nodes": [{"id":0,"label":"f","file":"a.js","line":0,"column":1}],
                   "edges": []})",
               Errc::schema_violation);
  // the reserved label away from the artificial node's position
  expect_error(R"({"nodes": [{"id":0,"label":"toplevel","file":"a.js","line":3,"column":1}],
                   "edges": []})",
               Errc::schema_violation);
}

TEST(GraphJson, AcceptsToplevelLabelOnlyAtItsOwnKey) {
  std::string text = R"({
    "nodes": [{"id": 0, "label": "toplevel", "file": "toplevel", "line": 1, "column": 1}],
    "edges": []
  })";
  CallGraph g = deserialize(text);
  EXPECT_EQ(g.nodes()[0].key(), toplevel_key());
}

}  // namespace
}  // namespace cgbench
