#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "cgbench/ast_import.hpp"
#include "cgbench/ast_index.hpp"
#include "cgbench/extractor.hpp"
#include "cgbench/parser.hpp"

namespace cgbench {
namespace {

ProgramIndex index_of(const std::string& src, std::vector<ParsedFile>& keep) {
  keep.clear();
  keep.push_back(ParsedFile{"test.js", parse_program(src, "test.js")});
  return ProgramIndex(keep);
}

const AstNode* only_stmt(const AstNode& program) {
  EXPECT_EQ(program.children.size(), 1u);
  return program.child(0);
}

void expect_parse_error(const std::string& src, Errc code) {
  try {
    parse_program(src, "test.js");
    FAIL() << "expected " << errc_name(code) << " for: " << src;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << src << " -> " << e.what();
  }
}

// ---------------------------------------------------------------------------
// positions
// ---------------------------------------------------------------------------

TEST(Positions, FunctionIdentityIsTheKeywordPosition) {
  std::vector<ParsedFile> files;
  ProgramIndex idx = index_of("function f() {} f();", files);
  ASSERT_EQ(idx.functions().size(), 1u);
  EXPECT_EQ(idx.functions()[0].key, node_key("test.js", 1, 1));
  EXPECT_EQ(idx.functions()[0].name, "f");
}

TEST(Positions, CallSiteIsTheCalleeExpressionStart) {
  std::vector<ParsedFile> files;
  ProgramIndex idx = index_of("function f() {} f();", files);
  ASSERT_EQ(idx.call_sites().size(), 1u);
  EXPECT_EQ(idx.call_sites()[0].key, node_key("test.js", 1, 17));
}

TEST(Positions, MemberCallStartsAtTheObject) {
  std::vector<ParsedFile> files;
  ProgramIndex idx = index_of("obj.m();", files);
  ASSERT_EQ(idx.call_sites().size(), 1u);
  EXPECT_EQ(idx.call_sites()[0].key.column, 1);
}

TEST(Positions, ParenthesizedCalleeStartsAtTheParen) {
  std::vector<ParsedFile> files;
  ProgramIndex idx = index_of("(function () {})();", files);
  ASSERT_EQ(idx.functions().size(), 1u);
  ASSERT_EQ(idx.call_sites().size(), 1u);
  EXPECT_EQ(idx.functions()[0].key, node_key("test.js", 1, 2));
  EXPECT_EQ(idx.call_sites()[0].key, node_key("test.js", 1, 1));
}

TEST(Positions, AnonymousFunctionOnALaterLine) {
  std::vector<ParsedFile> files;
  ProgramIndex idx = index_of("var x = 1;\nvar f = function () {};", files);
  ASSERT_EQ(idx.functions().size(), 1u);
  EXPECT_EQ(idx.functions()[0].key, node_key("test.js", 2, 9));
  EXPECT_EQ(idx.functions()[0].name, "");
}

// ---------------------------------------------------------------------------
// automatic semicolon insertion
// ---------------------------------------------------------------------------

TEST(Asi, NewlineSeparatesStatements) {
  AstPtr p = parse_program("var a = 1\nvar b = 2", "t.js");
  EXPECT_EQ(p->children.size(), 2u);
}

TEST(Asi, ReturnDoesNotTakeAValueAcrossANewline) {
  AstPtr p = parse_program("function f() { return\n1 }", "t.js");
  const AstNode* fn = only_stmt(*p);
  const AstNode* body = fn->child(fn->children.size() - 1);
  ASSERT_EQ(body->children.size(), 2u);
  EXPECT_EQ(body->child(0)->kind, AstKind::return_stmt);
  EXPECT_TRUE(body->child(0)->children.empty());
  EXPECT_EQ(body->child(1)->kind, AstKind::expr_stmt);
}

TEST(Asi, OpenParenContinuesTheExpression) {
  // No semicolon is inserted before '(' — this is one statement, a call.
  AstPtr p = parse_program("a = b\n(c)", "t.js");
  const AstNode* stmt = only_stmt(*p);
  ASSERT_EQ(stmt->kind, AstKind::expr_stmt);
  const AstNode* assign = stmt->child(0);
  ASSERT_EQ(assign->kind, AstKind::assign);
  EXPECT_EQ(assign->child(1)->kind, AstKind::call);
}

TEST(Asi, ClosingBraceEndsAStatementWithoutASemicolon) {
  EXPECT_NO_THROW(parse_program("function f() { return 1 }", "t.js"));
  EXPECT_NO_THROW(parse_program("var g = function () { var x = 1 }", "t.js"));
}

TEST(Asi, PostfixUpdateDoesNotCrossANewline) {
  AstPtr p = parse_program("a\n++b", "t.js");
  ASSERT_EQ(p->children.size(), 2u);
  const AstNode* second = p->child(1)->child(0);
  ASSERT_EQ(second->kind, AstKind::update);
  EXPECT_TRUE(second->flag);  // prefix form, applied to b
}

TEST(Asi, MissingSemicolonWithoutANewlineIsAnError) {
  expect_parse_error("var a = 1 var b = 2", Errc::parse_error);
}

// ---------------------------------------------------------------------------
// lexing corners
// ---------------------------------------------------------------------------

TEST(Lexing, RegexAndDivisionDisambiguate) {
  AstPtr p = parse_program("var r = /ab+c/g;", "t.js");
  const AstNode* decl = only_stmt(*p);
  ASSERT_EQ(decl->child(0)->children.size(), 1u);
  EXPECT_EQ(decl->child(0)->child(0)->kind, AstKind::regex_lit);

  AstPtr q = parse_program("var q = x / y / z;", "t.js");
  const AstNode* init = q->child(0)->child(0)->child(0);
  ASSERT_EQ(init->kind, AstKind::binary);
  EXPECT_EQ(init->text, "/");
}

TEST(Lexing, RegexAfterPunctuationAndDivisionAfterValue) {
  EXPECT_NO_THROW(parse_program("if (/a/.test(s)) { t(); }", "t.js"));
  EXPECT_NO_THROW(parse_program("var k = (n) / 2;", "t.js"));
}

TEST(Lexing, StringEscapesDecode) {
  AstPtr p = parse_program(R"(var s = "A\x42\n";)", "t.js");
  const AstNode* lit = p->child(0)->child(0)->child(0);
  ASSERT_EQ(lit->kind, AstKind::string_lit);
  EXPECT_EQ(lit->text, "AB\n");
}

TEST(Lexing, CommentsAreSkipped) {
  AstPtr p = parse_program("// line\n/* block\n spans */ var a = 1;", "t.js");
  EXPECT_EQ(p->children.size(), 1u);
}

TEST(Lexing, NumbersInTheirCommonForms) {
  EXPECT_NO_THROW(parse_program("var n = 0x1F + 1.5e3 + .25 + 7;", "t.js"));
}

// ---------------------------------------------------------------------------
// statement coverage
// ---------------------------------------------------------------------------

TEST(Statements, ControlFlowForms) {
  EXPECT_NO_THROW(parse_program(
      "for (var i = 0; i < 3; i++) { f(); }\n"
      "for (var k in o) { g(k); }\n"
      "while (a) { a--; }\n"
      "do { b(); } while (c);\n"
      "switch (x) { case 1: f(); break; default: g(); }\n"
      "try { f(); } catch (e) { g(e); } finally { h(); }\n"
      "if (a) f(); else g();\n"
      "throw new Error(\"x\");",
      "t.js"));
}

TEST(Statements, CompoundAssignmentsParseButKeepTheirOperator) {
  AstPtr p = parse_program("sum += f(y);", "t.js");
  const AstNode* assign = only_stmt(*p)->child(0);
  ASSERT_EQ(assign->kind, AstKind::assign);
  EXPECT_EQ(assign->text, "+=");
}

TEST(Statements, ConditionalAndSequenceExpressions) {
  EXPECT_NO_THROW(parse_program("var v = a ? f : g, w = (f(), g());", "t.js"));
}

// ---------------------------------------------------------------------------
// errors
// ---------------------------------------------------------------------------

TEST(ParseErrors, ReportCodeAndPosition) {
  try {
    parse_program("var a = ;", "bad.js");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parse_error);
    EXPECT_NE(std::string(e.what()).find("bad.js:1:"), std::string::npos);
  }
}

TEST(ParseErrors, CommonShapes) {
  expect_parse_error("function () {}", Errc::parse_error);   // decl needs name
  expect_parse_error("var", Errc::parse_error);
  expect_parse_error("var s = \"open", Errc::parse_error);
  expect_parse_error("f(", Errc::parse_error);
  expect_parse_error("if (a { f(); }", Errc::parse_error);
}

TEST(UnsupportedConstructs, ModernSyntaxIsRejectedExplicitly) {
  expect_parse_error("let x = 1;", Errc::unsupported_construct);
  expect_parse_error("const y = 2;", Errc::unsupported_construct);
  expect_parse_error("class A {}", Errc::unsupported_construct);
  expect_parse_error("var f = (x) => x;", Errc::unsupported_construct);
  expect_parse_error("f(...args);", Errc::unsupported_construct);
  expect_parse_error("var t = `tpl`;", Errc::unsupported_construct);
  expect_parse_error("with (o) { f(); }", Errc::unsupported_construct);
  expect_parse_error("var o = { get x() { return 1; } };",
                     Errc::unsupported_construct);
}

// ---------------------------------------------------------------------------
// pre-parsed AST documents
// ---------------------------------------------------------------------------

// The same tiny program, as the JSON produced by standard JavaScript parsers
// (1-based lines, 0-based columns).
const char* kAstDoc = R"({
  "type": "Program",
  "body": [
    {
      "type": "FunctionDeclaration",
      "id": {"type": "Identifier", "name": "f"},
      "params": [],
      "body": {"type": "BlockStatement", "body": []},
      "loc": {"start": {"line": 1, "column": 0}}
    },
    {
      "type": "ExpressionStatement",
      "expression": {
        "type": "CallExpression",
        "callee": {"type": "Identifier", "name": "f",
                   "loc": {"start": {"line": 1, "column": 16}}},
        "arguments": [],
        "loc": {"start": {"line": 1, "column": 16}}
      }
    }
  ]
})";

TEST(AstImport, MatchesTheNativeParserOnTheSameProgram) {
  CallGraph from_source =
      extract_source("function f() {} f();", "test.js",
                     ExtractionMode::pessimistic);
  CallGraph from_doc = extract_call_graph(
      {{std::string("test.js.json"), std::string(kAstDoc)}},
      ExtractionMode::pessimistic);
  EXPECT_TRUE(same_shape(from_source, from_doc));
  const FunctionNode* n = from_doc.find(node_key("test.js", 1, 1));
  ASSERT_NE(n, nullptr);
  EXPECT_EQ(n->label, "f");
}

TEST(AstImport, ColumnsShiftFromZeroBasedToOneBased) {
  AstPtr p = load_ast_document(kAstDoc, "test.js");
  ProgramIndex idx(*p, "test.js");
  ASSERT_EQ(idx.call_sites().size(), 1u);
  EXPECT_EQ(idx.call_sites()[0].key, node_key("test.js", 1, 17));
}

TEST(AstImport, FunctionsAndCallsRequireLocations) {
  const char* no_loc = R"({
    "type": "Program",
    "body": [{
      "type": "ExpressionStatement",
      "expression": {"type": "CallExpression",
                     "callee": {"type": "Identifier", "name": "f"},
                     "arguments": []}
    }]
  })";
  try {
    load_ast_document(no_loc, "t.js");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::missing_locations);
  }
}

TEST(AstImport, UnknownNodeTypesAreUnsupported) {
  const char* arrow = R"({
    "type": "Program",
    "body": [{
      "type": "ExpressionStatement",
      "expression": {"type": "ArrowFunctionExpression", "params": [],
                     "body": {"type": "BlockStatement", "body": []},
                     "loc": {"start": {"line": 1, "column": 0}}}
    }]
  })";
  try {
    load_ast_document(arrow, "t.js");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported_construct);
  }
}

TEST(AstImport, MalformedDocumentsAreFlaggedAsSuch) {
  EXPECT_THROW(load_ast_document("{", "t.js"), Error);
  try {
    load_ast_document(R"({"type": "Script"})", "t.js");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::schema_violation);
  }
}

TEST(AstImport, JsonSuffixRoutesToTheDocumentImporter) {
  ParsedFile f = parse_input("dir/test.js.json", kAstDoc);
  EXPECT_EQ(f.path, "dir/test.js");
  ASSERT_NE(f.ast, nullptr);
  EXPECT_EQ(f.ast->kind, AstKind::program);

  ParsedFile s = parse_input("dir\\test.js", "var a = 1;");
  EXPECT_EQ(s.path, "dir/test.js");
}

}  // namespace
}  // namespace cgbench
