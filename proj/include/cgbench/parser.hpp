#ifndef CGBENCH_PARSER_HPP
#define CGBENCH_PARSER_HPP

#include <string>
#include <utility>
#include <vector>

#include "cgbench/ast.hpp"
#include "cgbench/lexer.hpp"

namespace cgbench {

/// Recursive-descent parser for the ES5 subset. Semicolon inference is
/// deliberately narrow: a statement may end at `;`, before `}`, at EOF, and
/// `return`/`break`/`continue` are cut short by a line break. Everything else
/// must be explicitly terminated.
class Parser {
 public:
  Parser(std::string source, std::string file)
      : file_(file), toks_(Lexer(std::move(source), std::move(file)).tokenize()) {}

  AstPtr program() {
    auto prog = make_node(AstKind::program, pos_of(cur()));
    while (!at_eof()) prog->children.push_back(statement());
    return prog;
  }

 private:
  // ---- token plumbing -----------------------------------------------------

  const Token& cur() const { return toks_[idx_]; }
  const Token& ahead(size_t n = 1) const {
    size_t i = idx_ + n;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_eof() const { return cur().kind == TokKind::eof; }
  bool at_punct(const char* s) const {
    return cur().kind == TokKind::punct && cur().text == s;
  }
  bool at_kw(const char* s) const {
    return cur().kind == TokKind::keyword && cur().text == s;
  }
  Token take() { return toks_[idx_++]; }
  bool eat_punct(const char* s) {
    if (!at_punct(s)) return false;
    ++idx_;
    return true;
  }
  bool eat_kw(const char* s) {
    if (!at_kw(s)) return false;
    ++idx_;
    return true;
  }
  void expect_punct(const char* s) {
    if (!eat_punct(s)) fail(std::string("expected '") + s + "'");
  }

  SourcePosition pos_of(const Token& t) const {
    return SourcePosition{file_, t.line, t.column};
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = cur();
    std::string shown = t.kind == TokKind::eof ? "end of input" : "'" + t.text + "'";
    throw Error(Errc::parse_error, file_, t.line, t.column,
                msg + " but found " + shown);
  }

  [[noreturn]] void unsupported(const std::string& what) const {
    const Token& t = cur();
    throw Error(Errc::unsupported_construct, file_, t.line, t.column,
                what + " is outside the supported language subset");
  }

  std::string identifier_name() {
    if (cur().kind != TokKind::identifier) fail("expected identifier");
    return take().text;
  }

  /// ';' | before '}' | EOF | a line break before the offending token.
  /// Restricted productions handle line breaks themselves before calling
  /// this.
  void end_statement() {
    if (eat_punct(";")) return;
    if (at_punct("}") || at_eof()) return;
    if (cur().nl_before) return;
    fail("expected ';'");
  }

  void reject_es6_keywords() {
    static const char* bad[] = {"class", "const", "let", "import",
                                "export", "super", "yield"};
    for (const char* k : bad)
      if (at_kw(k)) unsupported(std::string("'") + k + "'");
  }

  // ---- statements ---------------------------------------------------------

  AstPtr statement() {
    reject_es6_keywords();
    if (at_kw("with")) unsupported("'with'");
    if (at_punct("{")) return block();
    if (at_punct(";")) {
      auto n = make_node(AstKind::empty_stmt, pos_of(cur()));
      ++idx_;
      return n;
    }
    if (at_kw("var")) {
      auto n = var_declaration();
      end_statement();
      return n;
    }
    if (at_kw("function")) return function_node(/*require_name=*/true);
    if (at_kw("if")) return if_statement();
    if (at_kw("for")) return for_statement();
    if (at_kw("while")) return while_statement();
    if (at_kw("do")) return do_while_statement();
    if (at_kw("switch")) return switch_statement();
    if (at_kw("return")) return return_statement();
    if (at_kw("break") || at_kw("continue")) {
      auto n = make_node(at_kw("break") ? AstKind::break_stmt
                                        : AstKind::continue_stmt,
                         pos_of(cur()));
      ++idx_;
      if (cur().kind == TokKind::identifier && !cur().nl_before)
        unsupported("labeled break/continue");
      end_statement();
      return n;
    }
    if (at_kw("try")) return try_statement();
    if (at_kw("throw")) return throw_statement();
    if (at_kw("debugger")) {
      auto n = make_node(AstKind::debugger_stmt, pos_of(cur()));
      ++idx_;
      end_statement();
      return n;
    }
    auto n = make_node(AstKind::expr_stmt, pos_of(cur()));
    n->children.push_back(expression(false));
    end_statement();
    return n;
  }

  AstPtr block() {
    auto n = make_node(AstKind::block, pos_of(cur()));
    expect_punct("{");
    while (!at_punct("}")) {
      if (at_eof()) fail("expected '}'");
      n->children.push_back(statement());
    }
    expect_punct("}");
    return n;
  }

  AstPtr var_declaration(bool no_in = false) {
    auto n = make_node(AstKind::var_decl, pos_of(cur()));
    take();  // 'var'
    do {
      auto d = make_node(AstKind::declarator, pos_of(cur()));
      d->text = identifier_name();
      if (eat_punct("="))
        d->children.push_back(assignment(no_in));
      n->children.push_back(std::move(d));
    } while (eat_punct(","));
    return n;
  }

  AstPtr if_statement() {
    auto n = make_node(AstKind::if_stmt, pos_of(cur()));
    take();
    expect_punct("(");
    n->children.push_back(expression(false));
    expect_punct(")");
    n->children.push_back(statement());
    if (eat_kw("else"))
      n->children.push_back(statement());
    else
      n->children.push_back(nullptr);
    return n;
  }

  AstPtr for_statement() {
    auto n = make_node(AstKind::for_stmt, pos_of(cur()));
    take();
    expect_punct("(");
    AstPtr init;
    if (!at_punct(";")) {
      if (at_kw("var")) {
        init = var_declaration(/*no_in=*/true);
        if (at_kw("in")) {
          if (init->children.size() != 1 || !init->children[0]->children.empty())
            fail("invalid for-in target");
          take();  // 'in'
          auto fi = make_node(AstKind::for_in, n->pos);
          fi->children.push_back(std::move(init));
          fi->children.push_back(expression(false));
          expect_punct(")");
          fi->children.push_back(statement());
          return fi;
        }
      } else {
        init = expression(true);
        if (at_kw("in")) {
          take();
          auto fi = make_node(AstKind::for_in, n->pos);
          fi->children.push_back(std::move(init));
          fi->children.push_back(expression(false));
          expect_punct(")");
          fi->children.push_back(statement());
          return fi;
        }
      }
    }
    expect_punct(";");
    n->children.push_back(std::move(init));
    n->children.push_back(at_punct(";") ? nullptr : expression(false));
    expect_punct(";");
    n->children.push_back(at_punct(")") ? nullptr : expression(false));
    expect_punct(")");
    n->children.push_back(statement());
    return n;
  }

  AstPtr while_statement() {
    auto n = make_node(AstKind::while_stmt, pos_of(cur()));
    take();
    expect_punct("(");
    n->children.push_back(expression(false));
    expect_punct(")");
    n->children.push_back(statement());
    return n;
  }

  AstPtr do_while_statement() {
    auto n = make_node(AstKind::do_while, pos_of(cur()));
    take();
    n->children.push_back(statement());
    if (!eat_kw("while")) fail("expected 'while'");
    expect_punct("(");
    n->children.push_back(expression(false));
    expect_punct(")");
    eat_punct(";");
    return n;
  }

  AstPtr switch_statement() {
    auto n = make_node(AstKind::switch_stmt, pos_of(cur()));
    take();
    expect_punct("(");
    n->children.push_back(expression(false));
    expect_punct(")");
    expect_punct("{");
    bool saw_default = false;
    while (!at_punct("}")) {
      if (at_eof()) fail("expected '}'");
      auto c = make_node(AstKind::switch_case, pos_of(cur()));
      if (eat_kw("case")) {
        c->children.push_back(expression(false));
      } else if (at_kw("default")) {
        if (saw_default) fail("duplicate default clause");
        saw_default = true;
        take();
        c->children.push_back(nullptr);
      } else {
        fail("expected 'case' or 'default'");
      }
      expect_punct(":");
      while (!at_punct("}") && !at_kw("case") && !at_kw("default")) {
        if (at_eof()) fail("expected '}'");
        c->children.push_back(statement());
      }
      n->children.push_back(std::move(c));
    }
    expect_punct("}");
    return n;
  }

  AstPtr return_statement() {
    auto n = make_node(AstKind::return_stmt, pos_of(cur()));
    take();
    if (!at_punct(";") && !at_punct("}") && !at_eof() && !cur().nl_before)
      n->children.push_back(expression(false));
    end_statement();
    return n;
  }

  AstPtr try_statement() {
    auto n = make_node(AstKind::try_stmt, pos_of(cur()));
    take();
    n->children.push_back(block());
    if (at_kw("catch")) {
      auto c = make_node(AstKind::catch_clause, pos_of(cur()));
      take();
      expect_punct("(");
      c->text = identifier_name();
      expect_punct(")");
      c->children.push_back(block());
      n->children.push_back(std::move(c));
    } else {
      n->children.push_back(nullptr);
    }
    if (eat_kw("finally"))
      n->children.push_back(block());
    else
      n->children.push_back(nullptr);
    if (!n->children[1] && !n->children[2])
      fail("expected 'catch' or 'finally'");
    return n;
  }

  AstPtr throw_statement() {
    auto n = make_node(AstKind::throw_stmt, pos_of(cur()));
    take();
    if (cur().nl_before) fail("line break after 'throw'");
    n->children.push_back(expression(false));
    end_statement();
    return n;
  }

  // ---- functions ----------------------------------------------------------

  /// Parses `function [name](params) { body }`. The node position is that of
  /// the `function` keyword — the identity used by call-graph nodes.
  AstPtr function_node(bool require_name) {
    auto n = make_node(require_name ? AstKind::function_decl
                                    : AstKind::function_expr,
                       pos_of(cur()));
    take();  // 'function'
    if (cur().kind == TokKind::identifier)
      n->text = take().text;
    else if (require_name)
      fail("expected function name");
    expect_punct("(");
    if (!at_punct(")")) {
      do {
        auto p = make_node(AstKind::identifier, pos_of(cur()));
        p->text = identifier_name();
        n->children.push_back(std::move(p));
      } while (eat_punct(","));
    }
    expect_punct(")");
    n->children.push_back(block());
    return n;
  }

  // ---- expressions ----------------------------------------------------------

  AstPtr expression(bool no_in) {
    auto e = assignment(no_in);
    if (!at_punct(",")) return e;
    auto seq = make_node(AstKind::sequence, e->pos);
    seq->children.push_back(std::move(e));
    while (eat_punct(","))
      seq->children.push_back(assignment(no_in));
    return seq;
  }

  bool is_assign_op() const {
    if (cur().kind != TokKind::punct) return false;
    const std::string& t = cur().text;
    return t == "=" || t == "+=" || t == "-=" || t == "*=" || t == "/=" ||
           t == "%=" || t == "<<=" || t == ">>=" || t == ">>>=" || t == "&=" ||
           t == "|=" || t == "^=";
  }

  static bool valid_assign_target(const AstNode* e) {
    e = unwrap_paren(e);
    return e && (e->kind == AstKind::identifier ||
                 e->kind == AstKind::member_dot ||
                 e->kind == AstKind::member_index);
  }

  AstPtr assignment(bool no_in) {
    auto lhs = conditional(no_in);
    if (!is_assign_op()) return lhs;
    if (!valid_assign_target(lhs.get())) fail("invalid assignment target");
    auto n = make_node(AstKind::assign, lhs->pos);
    n->text = take().text;
    n->children.push_back(std::move(lhs));
    n->children.push_back(assignment(no_in));
    return n;
  }

  AstPtr conditional(bool no_in) {
    auto test = binary(0, no_in);
    if (!eat_punct("?")) return test;
    auto n = make_node(AstKind::conditional, test->pos);
    n->children.push_back(std::move(test));
    n->children.push_back(assignment(false));
    expect_punct(":");
    n->children.push_back(assignment(no_in));
    return n;
  }

  int binary_prec(bool no_in) const {
    const Token& t = cur();
    if (t.kind == TokKind::keyword) {
      if (t.text == "instanceof") return 7;
      if (t.text == "in") return no_in ? 0 : 7;
      return 0;
    }
    if (t.kind != TokKind::punct) return 0;
    const std::string& s = t.text;
    if (s == "||") return 1;
    if (s == "&&") return 2;
    if (s == "|") return 3;
    if (s == "^") return 4;
    if (s == "&") return 5;
    if (s == "==" || s == "!=" || s == "===" || s == "!==") return 6;
    if (s == "<" || s == ">" || s == "<=" || s == ">=") return 7;
    if (s == "<<" || s == ">>" || s == ">>>") return 8;
    if (s == "+" || s == "-") return 9;
    if (s == "*" || s == "/" || s == "%") return 10;
    return 0;
  }

  AstPtr binary(int min_prec, bool no_in) {
    auto lhs = unary(no_in);
    for (;;) {
      int prec = binary_prec(no_in);
      if (prec == 0 || prec <= min_prec) return lhs;
      auto n = make_node(AstKind::binary, lhs->pos);
      n->text = take().text;
      n->children.push_back(std::move(lhs));
      n->children.push_back(binary(prec, no_in));
      lhs = std::move(n);
    }
  }

  AstPtr unary(bool no_in) {
    if (at_kw("delete") || at_kw("void") || at_kw("typeof") || at_punct("!") ||
        at_punct("~") || at_punct("+") || at_punct("-")) {
      auto n = make_node(AstKind::unary, pos_of(cur()));
      n->text = take().text;
      n->children.push_back(unary(no_in));
      return n;
    }
    if (at_punct("++") || at_punct("--")) {
      auto n = make_node(AstKind::update, pos_of(cur()));
      n->text = take().text;
      n->flag = true;  // prefix
      n->children.push_back(unary(no_in));
      return n;
    }
    auto e = left_hand_side();
    if ((at_punct("++") || at_punct("--")) && !cur().nl_before) {
      auto n = make_node(AstKind::update, e->pos);
      n->text = take().text;
      n->flag = false;
      n->children.push_back(std::move(e));
      return n;
    }
    return e;
  }

  std::vector<AstPtr> arguments() {
    std::vector<AstPtr> args;
    expect_punct("(");
    if (!at_punct(")")) {
      do {
        if (at_punct("...")) unsupported("spread argument");
        args.push_back(assignment(false));
      } while (eat_punct(","));
    }
    expect_punct(")");
    return args;
  }

  /// Member suffixes only (no call), as used by `new` expressions.
  AstPtr member_suffixes(AstPtr base) {
    for (;;) {
      if (eat_punct(".")) {
        if (cur().kind != TokKind::identifier && cur().kind != TokKind::keyword)
          fail("expected property name");
        auto n = make_node(AstKind::member_dot, base->pos);
        n->text = take().text;
        n->children.push_back(std::move(base));
        base = std::move(n);
      } else if (at_punct("[")) {
        take();
        auto n = make_node(AstKind::member_index, base->pos);
        n->children.push_back(std::move(base));
        n->children.push_back(expression(false));
        expect_punct("]");
        base = std::move(n);
      } else {
        return base;
      }
    }
  }

  AstPtr new_expression() {
    auto n = make_node(AstKind::new_expr, pos_of(cur()));
    take();  // 'new'
    AstPtr callee = at_kw("new") ? new_expression()
                                 : member_suffixes(primary());
    n->children.push_back(std::move(callee));
    if (at_punct("(")) {
      for (auto& a : arguments()) n->children.push_back(std::move(a));
    }
    return n;
  }

  AstPtr left_hand_side() {
    AstPtr base = at_kw("new") ? new_expression() : primary();
    for (;;) {
      if (at_punct(".") || at_punct("[")) {
        base = member_suffixes(std::move(base));
      } else if (at_punct("(")) {
        auto n = make_node(AstKind::call, base->pos);
        n->children.push_back(std::move(base));
        for (auto& a : arguments()) n->children.push_back(std::move(a));
        base = std::move(n);
      } else {
        return base;
      }
    }
  }

  AstPtr object_literal() {
    auto n = make_node(AstKind::object_lit, pos_of(cur()));
    expect_punct("{");
    while (!at_punct("}")) {
      if (at_eof()) fail("expected '}'");
      if (cur().kind == TokKind::identifier &&
          (cur().text == "get" || cur().text == "set") &&
          (ahead().kind == TokKind::identifier ||
           ahead().kind == TokKind::keyword ||
           ahead().kind == TokKind::string || ahead().kind == TokKind::number))
        unsupported("accessor property");
      auto p = make_node(AstKind::property, pos_of(cur()));
      const Token& key = cur();
      if (key.kind == TokKind::identifier || key.kind == TokKind::keyword ||
          key.kind == TokKind::string || key.kind == TokKind::number)
        p->text = take().text;
      else
        fail("expected property name");
      expect_punct(":");
      p->children.push_back(assignment(false));
      n->children.push_back(std::move(p));
      if (!eat_punct(",")) break;
    }
    expect_punct("}");
    return n;
  }

  AstPtr array_literal() {
    auto n = make_node(AstKind::array_lit, pos_of(cur()));
    expect_punct("[");
    while (!at_punct("]")) {
      if (at_eof()) fail("expected ']'");
      if (at_punct(",")) fail("array holes are not supported");
      n->children.push_back(assignment(false));
      if (!eat_punct(",")) break;
    }
    expect_punct("]");
    return n;
  }

  AstPtr primary() {
    reject_es6_keywords();
    const Token& t = cur();
    switch (t.kind) {
      case TokKind::identifier: {
        auto n = make_node(AstKind::identifier, pos_of(t));
        n->text = take().text;
        if (at_punct("=>")) unsupported("arrow function");
        return n;
      }
      case TokKind::number: {
        auto n = make_node(AstKind::number_lit, pos_of(t));
        n->text = take().text;
        return n;
      }
      case TokKind::string: {
        auto n = make_node(AstKind::string_lit, pos_of(t));
        n->text = take().text;
        return n;
      }
      case TokKind::regex: {
        auto n = make_node(AstKind::regex_lit, pos_of(t));
        n->text = take().text;
        return n;
      }
      case TokKind::keyword:
        if (t.text == "function") return function_node(/*require_name=*/false);
        if (t.text == "this") {
          auto n = make_node(AstKind::this_expr, pos_of(t));
          take();
          return n;
        }
        if (t.text == "true" || t.text == "false") {
          auto n = make_node(AstKind::bool_lit, pos_of(t));
          n->text = take().text;
          return n;
        }
        if (t.text == "null") {
          auto n = make_node(AstKind::null_lit, pos_of(t));
          take();
          return n;
        }
        fail("unexpected keyword");
      case TokKind::punct:
        if (t.text == "(") {
          auto n = make_node(AstKind::paren, pos_of(t));
          take();
          n->children.push_back(expression(false));
          expect_punct(")");
          if (at_punct("=>")) unsupported("arrow function");
          return n;
        }
        if (t.text == "[") return array_literal();
        if (t.text == "{") return object_literal();
        if (t.text == "=>") unsupported("arrow function");
        if (t.text == "...") unsupported("spread syntax");
        fail("unexpected token");
      case TokKind::eof:
        fail("unexpected end of input");
    }
    fail("unexpected token");
  }

  std::string file_;
  std::vector<Token> toks_;
  size_t idx_ = 0;
};

inline AstPtr parse_program(const std::string& source, const std::string& file) {
  return Parser(source, file).program();
}

/// A parsed source file; `path` is the graph-facing (normalized) name.
struct ParsedFile {
  std::string path;
  AstPtr ast;
};

}  // namespace cgbench

#endif  // CGBENCH_PARSER_HPP
