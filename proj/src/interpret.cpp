#include <set>
#include <stdexcept>

#include "liftcount/expr.hpp"
#include "liftcount/patterns.hpp"

namespace liftcount {

namespace {

std::string fn_name(size_t i) {
  static const char* base[] = {"f", "g", "h"};
  return i < 3 ? base[i] : "f" + std::to_string(i);
}

std::string param_name(size_t i) {
  static const char* base[] = {"m", "n", "o"};
  return i < 3 ? base[i] : "x" + std::to_string(i);
}

std::string sum_var(int depth) {
  static const char* base[] = {"l", "k", "j"};
  return depth < 3 ? base[depth] : "l" + std::to_string(depth);
}

struct Interp {
  const Session& sn;
  const Fcg& g;
  std::vector<std::vector<DomainId>> deps;
  std::map<int, size_t> fn_of;  // node id -> definition index
  std::vector<FunctionDef> defs;
  std::set<std::string> guards;           // of the definition being built
  const std::set<std::string>* in_scope;  // its parameter names

  using Env = std::map<DomainId, ExprPtr>;

  // Size expression of a domain: explicit binding, or derived through the
  // minus-one parent chain. Partition domains are always bound explicitly.
  ExprPtr dom_expr(const Env& env, DomainId d) const {
    if (auto it = env.find(d); it != env.end()) return it->second;
    const DomainInfo& info = sn.domain(d);
    if (info.kind == DomainKind::MinusOne)
      return sub(dom_expr(env, info.parent), num(1));
    throw std::logic_error("no size expression for domain " + info.name);
  }

  // [the clause has no groundings], specialized to the falling-factorial
  // pattern (k same-domain variables, pairwise distinct, distinct from e
  // known members) when the constraints have exactly that shape.
  ExprPtr bot_expr(const Clause& c, const Env& env) const {
    int k = c.num_vars();
    if (k == 0) return num(0);  // the empty grounding satisfies it
    bool uniform = true;
    DomainId d = c.var_domains[0];
    for (DomainId x : c.var_domains)
      if (x != d) uniform = false;
    if (uniform) {
      std::set<std::pair<int, int>> pairs;
      std::vector<std::set<ConstId>> per_var(k);
      bool clean = true;
      for (const Constraint& cs : c.constraints) {
        if (cs.other.is_var())
          pairs.insert({cs.var, cs.other.var_index()});
        else
          per_var[cs.var].insert(cs.other.const_id());
      }
      if (static_cast<int>(pairs.size()) != k * (k - 1) / 2) clean = false;
      std::set<ConstId> members;
      for (int u = 0; u < k && clean; ++u)
        for (ConstId cid : per_var[u]) {
          switch (sn.member(cid, d)) {
            case Session::Membership::Yes: members.insert(cid); break;
            case Session::Membership::No: break;  // vacuous constraint
            case Session::Membership::Unknown: clean = false; break;
          }
        }
      for (int u = 0; u < k && clean; ++u)
        for (ConstId cid : members)
          if (!per_var[u].count(cid)) clean = false;
      if (clean) {
        ExprPtr room = dom_expr(env, d);
        if (!members.empty())
          room = sub(std::move(room), num(static_cast<long>(members.size())));
        return lt(std::move(room), num(k));
      }
    }
    return eq(count_leaf(c, env), num(0));
  }

  ExprPtr unit_expr(const FcgNode& n, const Env& env) const {
    const Literal& l = n.clause.literals.at(0);
    const PredInfo& pi = sn.pred(l.pred);
    Rational w = n.unit_positive ? pi.weight_true : pi.weight_false;
    ExprPtr c = count_leaf(literal_pattern(sn, n.clause, 0), env);
    std::vector<bool> in_lit(n.clause.num_vars(), false);
    for (const Term& t : l.args)
      if (t.is_var()) in_lit[t.var_index()] = true;
    std::vector<ExprPtr> forced;  // spectator domains must be nonempty
    for (int u = 0; u < n.clause.num_vars(); ++u)
      if (!in_lit[u])
        forced.push_back(lt(num(0), dom_expr(env, n.clause.var_domains[u])));
    ExprPtr w_pow = pow_expr(num(w), c);
    if (forced.empty()) return w_pow;
    ExprPtr f = mul(std::move(forced));
    ExprPtr free_pow = pow_expr(num(pi.weight_true + pi.weight_false), c);
    return add({mul({f, std::move(w_pow)}),
                mul({sub(num(1), f), std::move(free_pow)})});
  }

  ExprPtr walk(int v, const Env& env, int depth, bool at_root) {
    const FcgNode& n = g.nodes[v];
    if (!at_root) {
      if (auto it = fn_of.find(v); it != fn_of.end()) {
        std::vector<ExprPtr> args;
        for (DomainId d : deps[v]) args.push_back(dom_expr(env, d));
        return call(defs[it->second].name, std::move(args));
      }
    }
    switch (n.kind) {
      case FcgNode::Star:
        throw std::logic_error("placeholder in a complete graph");
      case FcgNode::Top:
        return num(1);
      case FcgNode::Bot:
        return bot_expr(n.clause, env);
      case FcgNode::Unit:
        return unit_expr(n, env);
      case FcgNode::Smooth: {
        const PredInfo& pi = sn.pred(n.clause.literals.at(0).pred);
        return pow_expr(num(pi.weight_true + pi.weight_false),
                        count_leaf(n.clause, env));
      }
      case FcgNode::Ground:
        return oracle_leaf(n.formula, env);
      case FcgNode::And:
        return mul({walk(n.children[0], env, depth, false),
                    walk(n.children[1], env, depth, false)});
      case FcgNode::Or:
        return add({walk(n.children[0], env, depth, false),
                    walk(n.children[1], env, depth, false)});
      case FcgNode::Ie:
        return sub(add({walk(n.children[0], env, depth, false),
                        walk(n.children[1], env, depth, false)}),
                   walk(n.children[2], env, depth, false));
      case FcgNode::SetAnd:
        return pow_expr(walk(n.children[0], env, depth, false),
                        dom_expr(env, n.dom));
      case FcgNode::SetOr: {
        ExprPtr size = dom_expr(env, n.dom);
        std::string var = sum_var(depth);
        Env inner = env;
        inner[n.dom_top] = param(var);
        inner[n.dom_bot] = sub(size, param(var));
        const PredInfo& pi = sn.pred(n.counted_pred);
        ExprPtr body =
            mul({binom(size, param(var)),
                 pow_expr(num(pi.weight_true), param(var)),
                 pow_expr(num(pi.weight_false), sub(size, param(var))),
                 walk(n.children[0], inner, depth + 1, false)});
        return sum_expr(var, std::move(size), std::move(body));
      }
      case FcgNode::Gdr:
      case FcgNode::Cr: {
        ExprPtr size = dom_expr(env, n.dom);
        Env inner = env;
        if (n.kind == FcgNode::Cr)
          inner[n.dom_new] = sub(size, num(1));
        // The child pins an element of n.dom, so size zero is a base case.
        // When the size is one of the function's own parameters, the base
        // case moves to the call boundary (guard_params); otherwise it stays
        // inline as a pair of guarded branches.
        if (size->kind == Expr::Param && in_scope->count(size->name)) {
          guards.insert(size->name);
          return walk(n.children[0], inner, depth, false);
        }
        return add({mul({lt(size, num(1)), oracle_leaf(n.formula, env)}),
                    mul({lt(num(0), size),
                         walk(n.children[0], inner, depth, false)})});
      }
      case FcgNode::Ref: {
        int target = n.children.at(0);
        Env callee;
        for (const auto& [from, to] : n.rho)
          callee[from] = dom_expr(env, to);
        std::vector<ExprPtr> args;
        for (DomainId d : deps[target])
          args.push_back(dom_expr(callee, d));
        return call(defs.at(fn_of.at(target)).name, std::move(args));
      }
    }
    throw std::logic_error("unhandled node kind");
  }
};

}  // namespace

std::vector<FunctionDef> interpret(const Session& sn, const Fcg& g) {
  if (!g.complete())
    throw std::logic_error("interpret requires a complete graph");
  Interp in{sn, g, node_domains(g)};

  // The entry point plus every Ref target becomes a named function.
  std::vector<int> fn_nodes{g.source};
  std::set<int> targets;
  for (const FcgNode& n : g.nodes)
    if (n.kind == FcgNode::Ref) targets.insert(n.children.at(0));
  for (int t : targets)
    if (t != g.source) fn_nodes.push_back(t);

  for (size_t i = 0; i < fn_nodes.size(); ++i) {
    int v = fn_nodes[i];
    FunctionDef d;
    d.name = fn_name(i);
    d.origin = v;
    d.formula = g.nodes[v].formula;
    d.doms = in.deps[v];
    for (size_t j = 0; j < d.doms.size(); ++j)
      d.params.push_back(param_name(j));
    in.fn_of[v] = i;
    in.defs.push_back(std::move(d));
  }

  for (size_t i = 0; i < fn_nodes.size(); ++i) {
    FunctionDef& d = in.defs[i];
    Interp::Env env;
    for (size_t j = 0; j < d.doms.size(); ++j)
      env[d.doms[j]] = param(d.params[j]);
    std::set<std::string> names(d.params.begin(), d.params.end());
    in.guards.clear();
    in.in_scope = &names;
    ExprPtr body = in.walk(fn_nodes[i], env, 0, true);
    d.body = std::move(body);
    for (size_t j = 0; j < d.params.size(); ++j)
      if (in.guards.count(d.params[j]))
        d.guard_params.push_back(static_cast<int>(j));
  }
  return in.defs;
}

}  // namespace liftcount
