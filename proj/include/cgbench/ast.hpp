#ifndef CGBENCH_AST_HPP
#define CGBENCH_AST_HPP

#include <memory>
#include <string>
#include <vector>

#include "cgbench/call_graph.hpp"

namespace cgbench {

/// AST for the supported ES5 subset. Nodes are intentionally uniform: a kind,
/// the position of the first token, an optional text payload (name, operator,
/// literal value) and children. Child layouts per kind are documented below.
enum class AstKind {
  program,        // children: statements
  function_decl,  // text: name; children: params..., body block
  function_expr,  // text: name or ""; children: params..., body block
  var_decl,       // children: declarators
  declarator,     // text: name; children: [init] or empty
  identifier,     // text: name
  this_expr,
  string_lit,     // text: decoded value
  number_lit,     // text: raw
  bool_lit,       // text: "true"/"false"
  null_lit,
  regex_lit,      // text: raw
  array_lit,      // children: elements
  object_lit,     // children: properties
  property,       // text: key; children: [value]
  member_dot,     // text: property name; children: [object]
  member_index,   // children: [object, key]
  call,           // children: callee, args...
  new_expr,       // children: callee, args...
  assign,         // text: op; children: [lhs, rhs]
  conditional,    // children: [test, consequent, alternate]
  binary,         // text: op; children: [lhs, rhs] (incl. &&, ||, in, instanceof)
  unary,          // text: op; children: [operand]
  update,         // text: ++/--; flag: prefix; children: [operand]
  sequence,       // children: expressions
  paren,          // children: [inner]
  block,          // children: statements
  expr_stmt,      // children: [expression]
  empty_stmt,
  if_stmt,        // children: [test, then, else?]            (else may be null)
  for_stmt,       // children: [init?, test?, update?, body]  (slots may be null)
  for_in,         // children: [target, object, body]
  while_stmt,     // children: [test, body]
  do_while,       // children: [body, test]
  switch_stmt,    // children: discriminant, cases...
  switch_case,    // children: [test?, statements...]         (test null = default)
  break_stmt,
  continue_stmt,
  return_stmt,    // children: [value] or empty
  try_stmt,       // children: [block, catch?, finally?]      (slots may be null)
  catch_clause,   // text: param name; children: [body block]
  throw_stmt,     // children: [expression]
  debugger_stmt,
};

struct AstNode;
using AstPtr = std::unique_ptr<AstNode>;

struct AstNode {
  AstKind kind;
  SourcePosition pos;
  std::string text;
  bool flag = false;  // update: prefix form
  std::vector<AstPtr> children;

  AstNode(AstKind k, SourcePosition p) : kind(k), pos(std::move(p)) {}

  const AstNode* child(size_t i) const {
    return i < children.size() ? children[i].get() : nullptr;
  }
};

inline AstPtr make_node(AstKind k, SourcePosition p) {
  return std::make_unique<AstNode>(k, std::move(p));
}

inline bool is_function(const AstNode& n) {
  return n.kind == AstKind::function_decl || n.kind == AstKind::function_expr;
}

/// Function params are all children except the final body block.
inline size_t param_count(const AstNode& fn) {
  return fn.children.empty() ? 0 : fn.children.size() - 1;
}
inline const AstNode* function_body(const AstNode& fn) {
  return fn.children.empty() ? nullptr : fn.children.back().get();
}

/// Strips grouping parentheses: V((e)) behaves as V(e) everywhere.
inline const AstNode* unwrap_paren(const AstNode* e) {
  while (e && e->kind == AstKind::paren) e = e->child(0);
  return e;
}

}  // namespace cgbench

#endif  // CGBENCH_AST_HPP
