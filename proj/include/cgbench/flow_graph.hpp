#ifndef CGBENCH_FLOW_GRAPH_HPP
#define CGBENCH_FLOW_GRAPH_HPP

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cgbench/ast_index.hpp"

namespace cgbench {

/// Kinds of analysis vertices. The construction is field-based: one PROP
/// vertex per property name across the whole program, regardless of the
/// object it is accessed on.
enum class VertexKind { fun, var, prop, param, ret, arg, res, modexp };

/// Assignment-flow graph over analysis vertices. Edges mean "functions
/// reaching the source also reach the destination".
class FlowGraph {
 public:
  FlowGraph(const ProgramIndex& index, const std::vector<ParsedFile>& files)
      : index_(index) {
    build(files);
  }

  const ProgramIndex& index() const { return index_; }

  int vertex_count() const { return static_cast<int>(kinds_.size()); }
  VertexKind kind(int v) const { return kinds_[v]; }
  const std::string& vertex_name(int v) const { return names_[v]; }
  const std::vector<std::vector<int>>& adjacency() const { return out_; }

  /// Vertex lookup by display name, e.g. "PROP(formatDate)" or
  /// "FUN(a.js:1:1)". Returns -1 when absent.
  int find_vertex(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? -1 : it->second;
  }

  bool has_flow(int u, int v) const {
    return u >= 0 && v >= 0 &&
           std::find(out_[u].begin(), out_[u].end(), v) != out_[u].end();
  }

  int fun_vertex(int fn) const { return fun_v_[fn]; }
  const std::vector<int>& param_vertices(int fn) const { return param_v_[fn]; }
  int ret_vertex(int fn) const { return ret_v_[fn]; }

  /// Function index a FUN vertex stands for, -1 for other vertex kinds.
  int vertex_function(int v) const { return vertex_fun_[v]; }

  struct SiteVertices {
    std::vector<int> callees;  // vertices the callee expression may denote
    std::vector<int> args;     // ARG vertices, one per actual argument
    int res = -1;              // RES vertex of this call
    int one_shot = -1;         // callee function index for IIFE sites
  };
  const std::vector<SiteVertices>& sites() const { return site_v_; }

 private:
  struct Ctx {
    int fn;
    int scope;
    std::string file;
  };

  int intern(VertexKind k, const std::string& name) {
    auto it = by_name_.find(name);
    if (it != by_name_.end()) return it->second;
    int v = static_cast<int>(kinds_.size());
    kinds_.push_back(k);
    names_.push_back(name);
    out_.emplace_back();
    vertex_fun_.push_back(-1);
    by_name_.emplace(names_.back(), v);
    return v;
  }

  void add_flow(int u, int v) {
    if (u < 0 || v < 0) return;
    if (!has_flow(u, v)) out_[u].push_back(v);
  }

  int prop_vertex(const std::string& name) {
    return intern(VertexKind::prop, "PROP(" + name + ")");
  }
  int var_vertex(int scope, const std::string& name) {
    return intern(VertexKind::var,
                  "VAR(" + std::to_string(scope) + "," + name + ")");
  }
  int modexp_vertex(const std::string& file) {
    return intern(VertexKind::modexp, "MODEXP(" + file + ")");
  }

  /// Vertex an identifier denotes: a VAR in the scope declaring it, or a
  /// property of the global object. A CommonJS `exports` that resolves to the
  /// global scope denotes the current module's export object.
  int identifier_vertex(const Ctx& ctx, const std::string& name) {
    int s = index_.resolve(ctx.scope, name);
    if (s == 0) {
      if (name == "exports") return modexp_vertex(ctx.file);
      return prop_vertex(name);
    }
    return var_vertex(s, name);
  }

  bool is_module_exports(const Ctx& ctx, const AstNode* e) const {
    if (!e || e->kind != AstKind::member_dot || e->text != "exports")
      return false;
    const AstNode* obj = unwrap_paren(e->child(0));
    return obj && obj->kind == AstKind::identifier && obj->text == "module" &&
           index_.resolve(ctx.scope, "module") == 0;
  }

  std::optional<std::string> resolve_module(const std::string& from,
                                            const std::string& spec) const {
    namespace fs = std::filesystem;
    fs::path base = fs::path(from).parent_path();
    fs::path raw = (spec.starts_with("./") || spec.starts_with("../"))
                       ? base / spec
                       : fs::path(spec);
    std::string stem = normalize_path(raw.lexically_normal().generic_string());
    for (const std::string& cand :
         {stem, stem + ".js", stem + "/index.js"})
      if (known_files_.count(cand)) return cand;
    return std::nullopt;
  }

  /// Is this call `require("...")` with a resolvable module argument?
  std::optional<std::string> require_target(const Ctx& ctx, const AstNode* call) {
    const AstNode* callee = unwrap_paren(call->child(0));
    if (!callee || callee->kind != AstKind::identifier ||
        callee->text != "require" ||
        index_.resolve(ctx.scope, "require") != 0)
      return std::nullopt;
    if (call->children.size() != 2) return std::nullopt;
    const AstNode* arg = unwrap_paren(call->child(1));
    if (!arg || arg->kind != AstKind::string_lit) return std::nullopt;
    return resolve_module(ctx.file, arg->text);
  }

  /// Vertices whose function sets flow into `e` when `e` is evaluated.
  std::vector<int> value_vertices(const Ctx& ctx, const AstNode* e) {
    std::vector<int> out;
    collect_values(ctx, e, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void collect_values(const Ctx& ctx, const AstNode* e, std::vector<int>& out) {
    if (!e) return;
    switch (e->kind) {
      case AstKind::identifier:
        out.push_back(identifier_vertex(ctx, e->text));
        return;
      case AstKind::member_dot:
        out.push_back(is_module_exports(ctx, e) ? modexp_vertex(ctx.file)
                                                : prop_vertex(e->text));
        return;
      case AstKind::function_decl:
      case AstKind::function_expr:
        out.push_back(fun_v_[index_.function_index(e)]);
        return;
      case AstKind::paren:
        collect_values(ctx, e->child(0), out);
        return;
      case AstKind::assign:
        if (e->text == "=") collect_values(ctx, e->child(1), out);
        return;
      case AstKind::conditional:
        collect_values(ctx, e->child(1), out);
        collect_values(ctx, e->child(2), out);
        return;
      case AstKind::sequence:
        if (!e->children.empty())
          collect_values(ctx, e->children.back().get(), out);
        return;
      case AstKind::call:
        if (auto target = require_target(ctx, e)) {
          out.push_back(modexp_vertex(*target));
          return;
        }
        [[fallthrough]];
      case AstKind::new_expr:
        out.push_back(site_v_[index_.call_site_index(e)].res);
        return;
      default:
        return;
    }
  }

  /// Vertices written by an assignment to `e` (empty for unsupported targets
  /// such as computed members).
  std::vector<int> target_vertices(const Ctx& ctx, const AstNode* e) {
    e = unwrap_paren(e);
    if (!e) return {};
    if (e->kind == AstKind::identifier)
      return {identifier_vertex(ctx, e->text)};
    if (e->kind == AstKind::member_dot) {
      if (is_module_exports(ctx, e)) return {modexp_vertex(ctx.file)};
      return {prop_vertex(e->text)};
    }
    return {};
  }

  void register_function(int idx) {
    const FunctionInfo& f = index_.functions()[idx];
    int fv = intern(VertexKind::fun, "FUN(" + f.key.to_string() + ")");
    vertex_fun_[fv] = idx;
    fun_v_[idx] = fv;
    ret_v_[idx] = intern(VertexKind::ret, "RET(" + f.key.to_string() + ")");
    for (size_t i = 0; i < f.params.size(); ++i) {
      int pv = intern(VertexKind::param, "PARAM(" + f.key.to_string() + "," +
                                             std::to_string(i) + ")");
      param_v_[idx].push_back(pv);
      // a formal parameter is readable through its name inside the body
      add_flow(pv, var_vertex(f.scope, f.params[i]));
    }
  }

  void walk(const AstNode* n, Ctx ctx) {
    if (!n) return;
    switch (n->kind) {
      case AstKind::function_decl:
      case AstKind::function_expr: {
        int idx = index_.function_index(n);
        const FunctionInfo& f = index_.functions()[idx];
        if (n->kind == AstKind::function_decl) {
          add_flow(fun_v_[idx], identifier_vertex(ctx, n->text));
        } else if (!n->text.empty()) {
          add_flow(fun_v_[idx], var_vertex(f.scope, n->text));
        }
        Ctx inner{idx, f.scope, ctx.file};
        if (const AstNode* body = function_body(*n))
          for (const AstPtr& s : body->children) walk(s.get(), inner);
        return;
      }
      case AstKind::declarator:
        if (const AstNode* init = n->child(0)) {
          int dest = identifier_vertex(ctx, n->text);
          for (int v : value_vertices(ctx, init)) add_flow(v, dest);
        }
        break;
      case AstKind::assign:
        if (n->text == "=") {
          auto dests = target_vertices(ctx, n->child(0));
          for (int v : value_vertices(ctx, n->child(1)))
            for (int d : dests) add_flow(v, d);
        }
        break;
      case AstKind::property:
        for (int v : value_vertices(ctx, n->child(0)))
          add_flow(v, prop_vertex(n->text));
        break;
      case AstKind::return_stmt:
        if (ctx.fn != -1 && n->child(0))
          for (int v : value_vertices(ctx, n->child(0)))
            add_flow(v, ret_v_[ctx.fn]);
        break;
      case AstKind::call:
      case AstKind::new_expr: {
        int s = index_.call_site_index(n);
        SiteVertices& sv = site_v_[s];
        if (n->kind == AstKind::call && require_target(ctx, n)) {
          // pure module reference; creates no call resolution work
          sv.callees.clear();
        } else {
          sv.callees = value_vertices(ctx, n->child(0));
          const AstNode* callee = unwrap_paren(n->child(0));
          if (callee && callee->kind == AstKind::function_expr)
            sv.one_shot = index_.function_index(callee);
          for (size_t i = 1; i < n->children.size(); ++i) {
            int av = intern(VertexKind::arg, "ARG(" + std::to_string(s) + "," +
                                                 std::to_string(i - 1) + ")");
            sv.args.push_back(av);
            for (int v : value_vertices(ctx, n->children[i].get()))
              add_flow(v, av);
          }
        }
        break;
      }
      case AstKind::catch_clause: {
        Ctx inner{ctx.fn, index_.catch_scope(n), ctx.file};
        walk(n->child(0), inner);
        return;
      }
      default:
        break;
    }
    for (const AstPtr& c : n->children) walk(c.get(), ctx);
  }

  void build(const std::vector<ParsedFile>& files) {
    for (const ParsedFile& f : files)
      known_files_.insert(normalize_path(f.path));
    size_t nf = index_.functions().size();
    fun_v_.assign(nf, -1);
    ret_v_.assign(nf, -1);
    param_v_.assign(nf, {});
    for (size_t i = 0; i < nf; ++i) register_function(static_cast<int>(i));
    site_v_.resize(index_.call_sites().size());
    for (size_t s = 0; s < site_v_.size(); ++s) {
      const CallSiteInfo& info = index_.call_sites()[s];
      site_v_[s].res = intern(VertexKind::res, "RES(" + std::to_string(s) + ")");
      (void)info;
    }
    for (const ParsedFile& f : files) {
      Ctx ctx{-1, 0, normalize_path(f.path)};
      for (const AstPtr& s : f.ast->children) walk(s.get(), ctx);
    }
  }

  const ProgramIndex& index_;
  std::vector<VertexKind> kinds_;
  std::vector<std::string> names_;
  std::vector<std::vector<int>> out_;
  std::vector<int> vertex_fun_;
  std::unordered_map<std::string, int> by_name_;
  std::unordered_set<std::string> known_files_;
  std::vector<int> fun_v_;
  std::vector<int> ret_v_;
  std::vector<std::vector<int>> param_v_;
  std::vector<SiteVertices> site_v_;
};

enum class ExtractionMode { pessimistic, optimistic };

/// Result of the fixpoint: per-vertex reachable function sets and per-site
/// resolved targets (both sorted by function index).
struct Propagation {
  std::vector<std::vector<int>> reach;
  std::vector<std::vector<int>> targets;
};

namespace detail {

inline bool sorted_insert(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) return false;
  v.insert(it, x);
  return true;
}

}  // namespace detail

/// Propagates function sets through the flow graph. In pessimistic mode only
/// one-shot (IIFE) calls get interprocedural edges; in optimistic mode every
/// resolved call target is connected argument-to-parameter and
/// return-to-result, iterating until no site gains a target.
inline Propagation propagate(const FlowGraph& fg, ExtractionMode mode) {
  const ProgramIndex& index = fg.index();
  std::vector<std::vector<int>> adj = fg.adjacency();
  Propagation p;
  p.reach.resize(fg.vertex_count());
  p.targets.resize(fg.sites().size());

  std::vector<std::pair<int, int>> work;  // (vertex, function)
  auto push = [&](int v, int f) {
    if (v >= 0 && detail::sorted_insert(p.reach[v], f)) work.emplace_back(v, f);
  };
  auto settle = [&] {
    while (!work.empty()) {
      auto [v, f] = work.back();
      work.pop_back();
      for (int u : adj[v]) push(u, f);
    }
  };
  auto connect = [&](int u, int v) {
    if (u < 0 || v < 0) return;
    adj[u].push_back(v);
    for (int f : p.reach[u]) push(v, f);
  };
  auto plumb = [&](size_t s, int g) {
    const FlowGraph::SiteVertices& sv = fg.sites()[s];
    const auto& params = fg.param_vertices(g);
    size_t n = std::min(sv.args.size(), params.size());
    for (size_t i = 0; i < n; ++i) connect(sv.args[i], params[i]);
    connect(fg.ret_vertex(g), sv.res);
  };

  for (size_t f = 0; f < index.functions().size(); ++f)
    push(fg.fun_vertex(static_cast<int>(f)), static_cast<int>(f));

  if (mode == ExtractionMode::pessimistic) {
    for (size_t s = 0; s < fg.sites().size(); ++s)
      if (fg.sites()[s].one_shot != -1) plumb(s, fg.sites()[s].one_shot);
    settle();
    for (size_t s = 0; s < fg.sites().size(); ++s)
      for (int cv : fg.sites()[s].callees)
        for (int g : p.reach[cv]) detail::sorted_insert(p.targets[s], g);
    return p;
  }

  bool grew = true;
  while (grew) {
    settle();
    grew = false;
    for (size_t s = 0; s < fg.sites().size(); ++s) {
      for (int cv : fg.sites()[s].callees)
        for (int g : p.reach[cv])
          if (detail::sorted_insert(p.targets[s], g)) {
            plumb(s, g);
            grew = true;
          }
    }
  }
  return p;
}

}  // namespace cgbench

#endif  // CGBENCH_FLOW_GRAPH_HPP
