#ifndef CGBENCH_AST_INDEX_HPP
#define CGBENCH_AST_INDEX_HPP

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cgbench/ast.hpp"
#include "cgbench/parser.hpp"

namespace cgbench {

/// A lexical scope: the global scope (id 0), one scope per function body, and
/// one per catch clause. `var` declarations always land in the enclosing
/// function's scope, not in catch scopes.
struct Scope {
  int parent = -1;
  std::unordered_set<std::string> decls;
};

struct FunctionInfo {
  const AstNode* node = nullptr;
  NodeKey key;
  std::string name;  // "" when anonymous
  std::vector<std::string> params;
  int enclosing = -1;  // index of the enclosing function, -1 = toplevel
  int scope = 0;       // scope id of the function body
  std::string file;
};

struct CallSiteInfo {
  const AstNode* node = nullptr;  // call or new_expr
  NodeKey key;
  bool is_new = false;
  int enclosing = -1;  // index of the enclosing function, -1 = toplevel
  int scope = 0;       // scope the call expression appears in
  std::string file;
};

/// Functions, call sites and scopes of a program (one or more files sharing
/// one global scope), enumerated in source order per file.
class ProgramIndex {
 public:
  explicit ProgramIndex(const std::vector<ParsedFile>& files) {
    scopes_.push_back(Scope{});  // global
    for (const ParsedFile& f : files) add_file(*f.ast, f.path);
  }

  ProgramIndex(const AstNode& program, const std::string& path) {
    scopes_.push_back(Scope{});
    add_file(program, path);
  }

  const std::vector<FunctionInfo>& functions() const { return functions_; }
  const std::vector<CallSiteInfo>& call_sites() const { return call_sites_; }
  const std::vector<Scope>& scopes() const { return scopes_; }

  /// Innermost scope declaring `name`, starting the search at `scope`.
  /// Returns 0 for names that resolve to (or fall through to) the global
  /// scope — those behave as properties of the global object.
  int resolve(int scope, const std::string& name) const {
    for (int s = scope; s != -1; s = scopes_[s].parent)
      if (scopes_[s].decls.count(name)) return s;
    return 0;
  }

  int function_index(const AstNode* fn) const {
    auto it = fn_index_.find(fn);
    return it == fn_index_.end() ? -1 : it->second;
  }

  int call_site_index(const AstNode* call) const {
    auto it = site_index_.find(call);
    return it == site_index_.end() ? -1 : it->second;
  }

  int catch_scope(const AstNode* clause) const {
    auto it = catch_scope_.find(clause);
    return it == catch_scope_.end() ? -1 : it->second;
  }

 private:
  struct Ctx {
    int fn;         // enclosing function index, -1 = toplevel
    int scope;      // lexical scope
    int var_scope;  // where `var` and function declarations land
    std::string file;
  };

  void add_file(const AstNode& program, const std::string& path) {
    Ctx ctx{-1, 0, 0, normalize_path(path)};
    for (const AstPtr& stmt : program.children) walk(stmt.get(), ctx);
  }

  void declare(int scope, const std::string& name) {
    if (!name.empty()) scopes_[scope].decls.insert(name);
  }

  void walk_function(const AstNode* n, const Ctx& ctx) {
    int idx = static_cast<int>(functions_.size());
    FunctionInfo info;
    info.node = n;
    info.key = node_key(SourcePosition{ctx.file, n->pos.line, n->pos.column});
    info.name = n->text;
    info.enclosing = ctx.fn;
    info.file = ctx.file;
    int scope = static_cast<int>(scopes_.size());
    scopes_.push_back(Scope{ctx.scope, {}});
    info.scope = scope;
    for (size_t i = 0; i + 1 < n->children.size(); ++i) {
      info.params.push_back(n->children[i]->text);
      declare(scope, n->children[i]->text);
    }
    if (n->kind == AstKind::function_expr) declare(scope, n->text);
    functions_.push_back(std::move(info));
    fn_index_.emplace(n, idx);
    Ctx inner{idx, scope, scope, ctx.file};
    if (const AstNode* body = function_body(*n))
      for (const AstPtr& stmt : body->children) walk(stmt.get(), inner);
  }

  void walk(const AstNode* n, const Ctx& ctx) {
    if (!n) return;
    switch (n->kind) {
      case AstKind::function_decl:
        declare(ctx.var_scope, n->text);
        walk_function(n, ctx);
        return;
      case AstKind::function_expr:
        walk_function(n, ctx);
        return;
      case AstKind::declarator:
        declare(ctx.var_scope, n->text);
        break;
      case AstKind::call:
      case AstKind::new_expr: {
        CallSiteInfo site;
        site.node = n;
        site.key = node_key(SourcePosition{ctx.file, n->pos.line, n->pos.column});
        site.is_new = n->kind == AstKind::new_expr;
        site.enclosing = ctx.fn;
        site.scope = ctx.scope;
        site.file = ctx.file;
        site_index_.emplace(n, static_cast<int>(call_sites_.size()));
        call_sites_.push_back(site);
        break;
      }
      case AstKind::catch_clause: {
        int scope = static_cast<int>(scopes_.size());
        scopes_.push_back(Scope{ctx.scope, {}});
        declare(scope, n->text);
        catch_scope_.emplace(n, scope);
        Ctx inner{ctx.fn, scope, ctx.var_scope, ctx.file};
        walk(n->child(0), inner);
        return;
      }
      default:
        break;
    }
    for (const AstPtr& c : n->children) walk(c.get(), ctx);
  }

  std::vector<FunctionInfo> functions_;
  std::vector<CallSiteInfo> call_sites_;
  std::vector<Scope> scopes_;
  std::unordered_map<const AstNode*, int> fn_index_;
  std::unordered_map<const AstNode*, int> site_index_;
  std::unordered_map<const AstNode*, int> catch_scope_;
};

inline std::vector<FunctionInfo> enumerate_functions(const AstNode& program,
                                                     const std::string& path) {
  return ProgramIndex(program, path).functions();
}

inline std::vector<CallSiteInfo> enumerate_call_sites(const AstNode& program,
                                                      const std::string& path) {
  return ProgramIndex(program, path).call_sites();
}

}  // namespace cgbench

#endif  // CGBENCH_AST_INDEX_HPP
