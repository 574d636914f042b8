#ifndef CGBENCH_AST_IMPORT_HPP
#define CGBENCH_AST_IMPORT_HPP

#include <string>

#include <nlohmann/json.hpp>

#include "cgbench/ast.hpp"
#include "cgbench/error.hpp"
#include "cgbench/json_io.hpp"

namespace cgbench {

/// Imports a pre-parsed AST document (the de-facto standard JSON AST shape
/// used by JavaScript parsers: `type` tags, `loc` with 1-based lines and
/// 0-based columns). Columns are shifted to our 1-based convention.
class AstImporter {
 public:
  explicit AstImporter(std::string file) : file_(std::move(file)) {}

  AstPtr program(const json& doc) {
    if (!doc.is_object() || type_of(doc) != "Program")
      throw Error(Errc::schema_violation, "AST document root must be a Program");
    return node(doc, SourcePosition{file_, 1, 1});
  }

 private:
  static std::string type_of(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
      return "";
    return j.at("type").get<std::string>();
  }

  [[noreturn]] void unsupported(const std::string& type) const {
    throw Error(Errc::unsupported_construct,
                "AST node type '" + type + "' is outside the supported subset");
  }

  SourcePosition position(const json& j, const SourcePosition& parent,
                          bool required) const {
    if (j.contains("loc") && j.at("loc").is_object()) {
      const json& loc = j.at("loc");
      if (loc.contains("start") && loc.at("start").is_object()) {
        const json& s = loc.at("start");
        if (s.contains("line") && s.at("line").is_number_integer() &&
            s.contains("column") && s.at("column").is_number_integer())
          return SourcePosition{file_, s.at("line").get<int>(),
                                s.at("column").get<int>() + 1};
      }
    }
    if (required)
      throw Error(Errc::missing_locations,
                  "AST node of type '" + type_of(j) +
                      "' has no source location");
    return parent;
  }

  AstPtr child_node(const json& j, const char* field, const SourcePosition& at) {
    if (!j.contains(field) || j.at(field).is_null()) return nullptr;
    return node(j.at(field), at);
  }

  void append_list(AstNode& out, const json& j, const char* field,
                   const SourcePosition& at) {
    if (!j.contains(field) || !j.at(field).is_array()) return;
    for (const json& e : j.at(field)) {
      if (e.is_null())
        throw Error(Errc::unsupported_construct, "array holes are not supported");
      out.children.push_back(node(e, at));
    }
  }

  std::string name_of(const json& j, const char* field) const {
    if (!j.contains(field) || type_of(j.at(field)) != "Identifier" ||
        !j.at(field).contains("name"))
      return "";
    return j.at(field).at("name").get<std::string>();
  }

  AstPtr function_node(const json& j, AstKind kind, const SourcePosition& pos) {
    auto n = make_node(kind, pos);
    n->text = name_of(j, "id");
    if (kind == AstKind::function_decl && n->text.empty())
      throw Error(Errc::schema_violation, "function declaration without a name");
    if (j.contains("params"))
      for (const json& p : j.at("params")) {
        if (type_of(p) != "Identifier")
          unsupported(type_of(p).empty() ? "destructuring parameter" : type_of(p));
        auto id = make_node(AstKind::identifier, position(p, pos, false));
        id->text = p.at("name").get<std::string>();
        n->children.push_back(std::move(id));
      }
    if (type_of(j.at("body")) != "BlockStatement")
      unsupported("expression-bodied function");
    n->children.push_back(node(j.at("body"), pos));
    return n;
  }

  AstPtr literal(const json& j, const SourcePosition& pos) {
    if (j.contains("regex") && j.at("regex").is_object()) {
      auto n = make_node(AstKind::regex_lit, pos);
      n->text = j.contains("raw") && j.at("raw").is_string()
                    ? j.at("raw").get<std::string>()
                    : "/(?:)/";
      return n;
    }
    const json& v = j.contains("value") ? j.at("value") : json(nullptr);
    if (v.is_string()) {
      auto n = make_node(AstKind::string_lit, pos);
      n->text = v.get<std::string>();
      return n;
    }
    if (v.is_number()) {
      auto n = make_node(AstKind::number_lit, pos);
      n->text = j.contains("raw") && j.at("raw").is_string()
                    ? j.at("raw").get<std::string>()
                    : v.dump();
      return n;
    }
    if (v.is_boolean()) {
      auto n = make_node(AstKind::bool_lit, pos);
      n->text = v.get<bool>() ? "true" : "false";
      return n;
    }
    return make_node(AstKind::null_lit, pos);
  }

  AstPtr node(const json& j, const SourcePosition& parent) {
    std::string type = type_of(j);
    if (type.empty())
      throw Error(Errc::schema_violation, "AST node without a \"type\" tag");

    bool identity = type == "FunctionDeclaration" ||
                    type == "FunctionExpression" || type == "CallExpression" ||
                    type == "NewExpression";
    SourcePosition pos = position(j, parent, identity);

    if (type == "Program") {
      auto n = make_node(AstKind::program, pos);
      append_list(*n, j, "body", pos);
      return n;
    }
    if (type == "FunctionDeclaration")
      return function_node(j, AstKind::function_decl, pos);
    if (type == "FunctionExpression")
      return function_node(j, AstKind::function_expr, pos);
    if (type == "VariableDeclaration") {
      if (j.contains("kind") && j.at("kind").is_string() &&
          j.at("kind").get<std::string>() != "var")
        unsupported("'" + j.at("kind").get<std::string>() + "' declaration");
      auto n = make_node(AstKind::var_decl, pos);
      append_list(*n, j, "declarations", pos);
      return n;
    }
    if (type == "VariableDeclarator") {
      if (type_of(j.at("id")) != "Identifier") unsupported("destructuring");
      auto n = make_node(AstKind::declarator, pos);
      n->text = name_of(j, "id");
      if (j.contains("init") && !j.at("init").is_null())
        n->children.push_back(node(j.at("init"), pos));
      return n;
    }
    if (type == "Identifier") {
      auto n = make_node(AstKind::identifier, pos);
      n->text = j.at("name").get<std::string>();
      return n;
    }
    if (type == "ThisExpression") return make_node(AstKind::this_expr, pos);
    if (type == "Literal") return literal(j, pos);
    if (type == "ArrayExpression") {
      auto n = make_node(AstKind::array_lit, pos);
      append_list(*n, j, "elements", pos);
      return n;
    }
    if (type == "ObjectExpression") {
      auto n = make_node(AstKind::object_lit, pos);
      append_list(*n, j, "properties", pos);
      return n;
    }
    if (type == "Property") {
      if (j.contains("kind") && j.at("kind").is_string() &&
          j.at("kind").get<std::string>() != "init")
        unsupported("accessor property");
      if (j.contains("computed") && j.at("computed").is_boolean() &&
          j.at("computed").get<bool>())
        unsupported("computed property key");
      auto n = make_node(AstKind::property, pos);
      const json& key = j.at("key");
      if (type_of(key) == "Identifier")
        n->text = key.at("name").get<std::string>();
      else if (type_of(key) == "Literal" && key.contains("value") &&
               key.at("value").is_string())
        n->text = key.at("value").get<std::string>();
      else if (type_of(key) == "Literal" && key.contains("raw"))
        n->text = key.at("raw").get<std::string>();
      else
        unsupported("property key of type " + type_of(key));
      n->children.push_back(node(j.at("value"), pos));
      return n;
    }
    if (type == "MemberExpression") {
      bool computed = j.contains("computed") && j.at("computed").is_boolean() &&
                      j.at("computed").get<bool>();
      if (computed) {
        auto n = make_node(AstKind::member_index, pos);
        n->children.push_back(node(j.at("object"), pos));
        n->children.push_back(node(j.at("property"), pos));
        return n;
      }
      auto n = make_node(AstKind::member_dot, pos);
      if (type_of(j.at("property")) != "Identifier")
        unsupported("non-identifier member name");
      n->text = name_of(j, "property");
      n->children.push_back(node(j.at("object"), pos));
      return n;
    }
    if (type == "CallExpression" || type == "NewExpression") {
      auto n = make_node(
          type == "CallExpression" ? AstKind::call : AstKind::new_expr, pos);
      n->children.push_back(node(j.at("callee"), pos));
      append_list(*n, j, "arguments", pos);
      return n;
    }
    if (type == "AssignmentExpression") {
      auto n = make_node(AstKind::assign, pos);
      n->text = j.at("operator").get<std::string>();
      n->children.push_back(node(j.at("left"), pos));
      n->children.push_back(node(j.at("right"), pos));
      return n;
    }
    if (type == "ConditionalExpression") {
      auto n = make_node(AstKind::conditional, pos);
      n->children.push_back(node(j.at("test"), pos));
      n->children.push_back(node(j.at("consequent"), pos));
      n->children.push_back(node(j.at("alternate"), pos));
      return n;
    }
    if (type == "BinaryExpression" || type == "LogicalExpression") {
      auto n = make_node(AstKind::binary, pos);
      n->text = j.at("operator").get<std::string>();
      n->children.push_back(node(j.at("left"), pos));
      n->children.push_back(node(j.at("right"), pos));
      return n;
    }
    if (type == "UnaryExpression") {
      auto n = make_node(AstKind::unary, pos);
      n->text = j.at("operator").get<std::string>();
      n->children.push_back(node(j.at("argument"), pos));
      return n;
    }
    if (type == "UpdateExpression") {
      auto n = make_node(AstKind::update, pos);
      n->text = j.at("operator").get<std::string>();
      n->flag = j.contains("prefix") && j.at("prefix").is_boolean() &&
                j.at("prefix").get<bool>();
      n->children.push_back(node(j.at("argument"), pos));
      return n;
    }
    if (type == "SequenceExpression") {
      auto n = make_node(AstKind::sequence, pos);
      append_list(*n, j, "expressions", pos);
      return n;
    }
    if (type == "BlockStatement") {
      auto n = make_node(AstKind::block, pos);
      append_list(*n, j, "body", pos);
      return n;
    }
    if (type == "ExpressionStatement") {
      auto n = make_node(AstKind::expr_stmt, pos);
      n->children.push_back(node(j.at("expression"), pos));
      return n;
    }
    if (type == "EmptyStatement") return make_node(AstKind::empty_stmt, pos);
    if (type == "IfStatement") {
      auto n = make_node(AstKind::if_stmt, pos);
      n->children.push_back(node(j.at("test"), pos));
      n->children.push_back(node(j.at("consequent"), pos));
      n->children.push_back(child_node(j, "alternate", pos));
      return n;
    }
    if (type == "ForStatement") {
      auto n = make_node(AstKind::for_stmt, pos);
      n->children.push_back(child_node(j, "init", pos));
      n->children.push_back(child_node(j, "test", pos));
      n->children.push_back(child_node(j, "update", pos));
      n->children.push_back(node(j.at("body"), pos));
      return n;
    }
    if (type == "ForInStatement") {
      auto n = make_node(AstKind::for_in, pos);
      n->children.push_back(node(j.at("left"), pos));
      n->children.push_back(node(j.at("right"), pos));
      n->children.push_back(node(j.at("body"), pos));
      return n;
    }
    if (type == "WhileStatement") {
      auto n = make_node(AstKind::while_stmt, pos);
      n->children.push_back(node(j.at("test"), pos));
      n->children.push_back(node(j.at("body"), pos));
      return n;
    }
    if (type == "DoWhileStatement") {
      auto n = make_node(AstKind::do_while, pos);
      n->children.push_back(node(j.at("body"), pos));
      n->children.push_back(node(j.at("test"), pos));
      return n;
    }
    if (type == "SwitchStatement") {
      auto n = make_node(AstKind::switch_stmt, pos);
      n->children.push_back(node(j.at("discriminant"), pos));
      append_list(*n, j, "cases", pos);
      return n;
    }
    if (type == "SwitchCase") {
      auto n = make_node(AstKind::switch_case, pos);
      n->children.push_back(child_node(j, "test", pos));
      append_list(*n, j, "consequent", pos);
      return n;
    }
    if (type == "BreakStatement" || type == "ContinueStatement") {
      if (j.contains("label") && !j.at("label").is_null())
        unsupported("labeled break/continue");
      return make_node(type == "BreakStatement" ? AstKind::break_stmt
                                                : AstKind::continue_stmt,
                       pos);
    }
    if (type == "ReturnStatement") {
      auto n = make_node(AstKind::return_stmt, pos);
      if (auto v = child_node(j, "argument", pos)) n->children.push_back(std::move(v));
      return n;
    }
    if (type == "TryStatement") {
      auto n = make_node(AstKind::try_stmt, pos);
      n->children.push_back(node(j.at("block"), pos));
      n->children.push_back(child_node(j, "handler", pos));
      n->children.push_back(child_node(j, "finalizer", pos));
      return n;
    }
    if (type == "CatchClause") {
      if (type_of(j.at("param")) != "Identifier") unsupported("destructuring");
      auto n = make_node(AstKind::catch_clause, pos);
      n->text = name_of(j, "param");
      n->children.push_back(node(j.at("body"), pos));
      return n;
    }
    if (type == "ThrowStatement") {
      auto n = make_node(AstKind::throw_stmt, pos);
      n->children.push_back(node(j.at("argument"), pos));
      return n;
    }
    if (type == "DebuggerStatement") return make_node(AstKind::debugger_stmt, pos);
    unsupported(type);
  }

  std::string file_;
};

/// Loads an AST JSON document text as a program rooted at `file`.
inline AstPtr load_ast_document(const std::string& text, const std::string& file) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded())
    throw Error(Errc::malformed_document, "AST document is not valid JSON");
  return AstImporter(file).program(doc);
}

}  // namespace cgbench

#endif  // CGBENCH_AST_IMPORT_HPP
