#include <algorithm>
#include <map>
#include <stdexcept>

#include "liftcount/frontend.hpp"

namespace liftcount {

namespace {

// A disjunct after NNF: an ordinary literal or an (in)equality.
struct Disjunct {
  bool is_eq = false;
  bool positive = true;
  PredId pred = -1;
  std::vector<std::string> args;  // term names (atoms) or {lhs, rhs} (eq)
  int line = 0, col = 0;
};

using Clause2 = std::vector<Disjunct>;  // disjunction
using Cnf = std::vector<Clause2>;       // conjunction of disjunctions

struct Normalizer {
  const ProblemFile& pf;
  Problem pr;
  std::map<std::string, DomainId> doms;
  std::map<std::string, PredId> preds;
  std::map<std::string, ConstId> consts;
  int skolem_counter = 0;

  explicit Normalizer(const ProblemFile& pf_) : pf(pf_) {}

  [[noreturn]] void fail(const std::string& msg, int line, int col) {
    throw ParseError(msg, line, col);
  }

  Problem run() {
    for (const std::string& d : pf.domains) {
      if (doms.count(d)) fail("duplicate domain '" + d + "'", 0, 0);
      doms[d] = pr.sn.add_domain({d});
    }
    for (const PredDecl& d : pf.preds) {
      if (preds.count(d.name))
        fail("duplicate predicate '" + d.name + "'", d.line, 0);
      PredInfo info{d.name, {}, d.weight_true, d.weight_false, false};
      for (const std::string& dn : d.domains) {
        auto it = doms.find(dn);
        if (it == doms.end())
          fail("undeclared domain '" + dn + "'", d.line, 0);
        info.signature.push_back(it->second);
      }
      PredId id = pr.sn.add_predicate(std::move(info));
      preds[d.name] = id;
      pr.declared.push_back(id);
    }
    for (const Sentence& s : pf.sentences) sentence(s);
    pr.f.normalize();
    return std::move(pr);
  }

  // ---- NNF + CNF over the AST ----

  Cnf to_cnf(const Ast& a, bool positive) {
    switch (a.kind) {
      case Ast::Atom:
      case Ast::Eq: {
        Disjunct d;
        d.is_eq = a.kind == Ast::Eq;
        d.positive = positive;
        d.args = a.args;
        d.line = a.line;
        d.col = a.col;
        if (!d.is_eq) {
          auto it = preds.find(a.pred);
          if (it == preds.end())
            fail("undeclared predicate '" + a.pred + "'", a.line, a.col);
          d.pred = it->second;
          if (pr.sn.pred(d.pred).signature.size() != a.args.size())
            fail("arity mismatch for '" + a.pred + "'", a.line, a.col);
        }
        return {{d}};
      }
      case Ast::Not:
        return to_cnf(*a.kids[0], !positive);
      case Ast::And:
      case Ast::Or: {
        bool conjunctive = (a.kind == Ast::And) == positive;
        Cnf l = to_cnf(*a.kids[0], positive);
        Cnf r = to_cnf(*a.kids[1], positive);
        if (conjunctive) {
          for (Clause2& c : r) l.push_back(std::move(c));
          return l;
        }
        Cnf out;
        for (const Clause2& cl : l)
          for (const Clause2& cr : r) {
            Clause2 c = cl;
            c.insert(c.end(), cr.begin(), cr.end());
            out.push_back(std::move(c));
          }
        return out;
      }
      case Ast::Implies: {
        if (!positive) {  // ~(A -> B) = A & ~B
          Cnf out = to_cnf(*a.kids[0], true);
          for (Clause2& c : to_cnf(*a.kids[1], false))
            out.push_back(std::move(c));
          return out;
        }
        Cnf l = to_cnf(*a.kids[0], false);  // A -> B = ~A | B
        Cnf r = to_cnf(*a.kids[1], true);
        Cnf out;
        for (const Clause2& cl : l)
          for (const Clause2& cr : r) {
            Clause2 c = cl;
            c.insert(c.end(), cr.begin(), cr.end());
            out.push_back(std::move(c));
          }
        return out;
      }
      case Ast::Iff: {
        // A <-> B == (A -> B) & (B -> A); negation flips one side.
        const Ast& l = *a.kids[0];
        const Ast& r = *a.kids[1];
        auto implication = [&](const Ast& x, const Ast& y, bool posy) {
          Cnf cx = to_cnf(x, false);
          Cnf cy = to_cnf(y, posy);
          Cnf out;
          for (const Clause2& cl : cx)
            for (const Clause2& cr : cy) {
              Clause2 c = cl;
              c.insert(c.end(), cr.begin(), cr.end());
              out.push_back(std::move(c));
            }
          return out;
        };
        Cnf out = implication(l, r, positive);
        for (Clause2& c : implication(r, l, positive))
          out.push_back(std::move(c));
        return out;
      }
    }
    fail("internal: unknown AST node", a.line, a.col);
  }

  // ---- term and constant resolution ----

  ConstId resolve_constant(const std::string& name, DomainId expected,
                           int line, int col) {
    auto it = consts.find(name);
    if (it != consts.end()) {
      if (pr.sn.member(it->second, expected) == Session::Membership::No)
        fail("constant '" + name + "' used at domain '" +
                 pr.sn.domain(expected).name + "' but declared in '" +
                 pr.sn.domain(pr.sn.constant(it->second).domain).name + "'",
             line, col);
      return it->second;
    }
    ConstId id = pr.sn.add_constant({name, expected});
    consts[name] = id;
    return id;
  }

  // ---- sentence normalization ----

  void sentence(const Sentence& s) {
    // Variable environment in prefix order.
    std::vector<std::string> var_names;
    std::vector<DomainId> var_doms;
    std::map<std::string, int> env;
    int n_universal = 0;
    std::string exist_var;
    for (size_t i = 0; i < s.prefix.size(); ++i) {
      const Quantifier& q = s.prefix[i];
      auto dit = doms.find(q.domain);
      if (dit == doms.end())
        fail("undeclared domain '" + q.domain + "'", q.line, q.col);
      for (const std::string& v : q.vars) {
        if (env.count(v)) fail("duplicate variable '" + v + "'", q.line, q.col);
        env[v] = static_cast<int>(var_names.size());
        var_names.push_back(v);
        var_doms.push_back(dit->second);
      }
      if (q.universal) {
        if (!exist_var.empty())
          fail("universal quantifier under an existential is unsupported",
               q.line, q.col);
        n_universal += static_cast<int>(q.vars.size());
      } else {
        if (!exist_var.empty() || q.vars.size() != 1)
          fail("only a single trailing existential variable is supported",
               q.line, q.col);
        exist_var = q.vars[0];
      }
    }

    Cnf cnf = to_cnf(*s.body, true);
    if (cnf.size() > 64)
      fail("sentence expands to more than 64 clauses", 0, 0);

    if (exist_var.empty()) {
      for (const Clause2& c : cnf) emit_clause(c, var_names, var_doms, env);
      return;
    }

    // forall Xs exists Y: D. Requires D to be one disjunction.
    if (cnf.size() != 1)
      fail("existential body must be a single disjunction", 0, 0);
    // Skolem predicate over all universal variables.
    PredInfo sk;
    sk.name = "_sk" + std::to_string(skolem_counter++);
    for (int v = 0; v < n_universal; ++v) sk.signature.push_back(var_doms[v]);
    sk.weight_true = 1;
    sk.weight_false = -1;
    sk.skolem = true;
    PredId skid = pr.sn.add_predicate(std::move(sk));
    pr.declared.push_back(skid);
    Disjunct sk_lit;
    sk_lit.pred = skid;
    for (int v = 0; v < n_universal; ++v) sk_lit.args.push_back(var_names[v]);
    for (const Disjunct& d : cnf[0]) {
      Disjunct neg = d;
      neg.positive = !neg.positive;
      emit_clause({sk_lit, neg}, var_names, var_doms, env);
    }
  }

  // Build an IR clause from a disjunct list. Universally quantified
  // variables that end up unused are kept: they still gate the clause on
  // their domain being nonempty.
  void emit_clause(Clause2 disjuncts, const std::vector<std::string>& var_names,
                   const std::vector<DomainId>& var_doms,
                   std::map<std::string, int> env) {
    // Name-level substitution map applied lazily (negative equalities).
    std::map<std::string, std::string> alias;
    auto resolve_name = [&](std::string n) {
      while (alias.count(n)) n = alias[n];
      return n;
    };

    // Phase 1: eliminate negative equalities by unification.
    for (bool changed = true; changed;) {
      changed = false;
      for (size_t i = 0; i < disjuncts.size(); ++i) {
        Disjunct& d = disjuncts[i];
        if (!d.is_eq || d.positive) continue;
        std::string a = resolve_name(d.args[0]);
        std::string b = resolve_name(d.args[1]);
        disjuncts.erase(disjuncts.begin() + i);
        changed = true;
        if (a == b) break;  // ~(t = t): disjunct false, just drop it
        bool va = is_variable_name(a), vb = is_variable_name(b);
        if (!va && !vb) return;  // distinct constants: disjunct true
        if (va && !env.count(a)) fail("unbound variable '" + a + "'", 0, 0);
        if (vb && !env.count(b)) fail("unbound variable '" + b + "'", 0, 0);
        if (va)
          alias[a] = b;  // prefer replacing a variable (by var or const)
        else
          alias[b] = a;
        break;
      }
    }

    // Phase 2: split the remainder into literals and constraints.
    struct RawConstraint {
      std::string a, b;
      int line, col;
    };
    std::vector<RawConstraint> raw_cons;
    std::vector<std::pair<Disjunct, std::vector<std::string>>> lits;
    for (Disjunct& d : disjuncts) {
      for (std::string& a : d.args) a = resolve_name(a);
      if (!d.is_eq) {
        lits.push_back({d, d.args});
        continue;
      }
      // Positive equality t1 = t2: precondition t1 != t2 on the rest.
      if (d.args[0] == d.args[1]) return;  // tautology: t = t
      raw_cons.push_back({d.args[0], d.args[1], d.line, d.col});
    }

    // Collect the clause variables: every universal prefix variable plus
    // any other variable that survives in literals or constraints.
    std::map<std::string, int> use;
    std::vector<std::string> order;
    auto touch = [&](const std::string& n) {
      if (!is_variable_name(n)) return;
      if (!env.count(n)) fail("unbound variable '" + n + "'", 0, 0);
      if (use.count(n)) return;
      use[n] = static_cast<int>(order.size());
      order.push_back(n);
    };
    for (size_t v = 0; v < var_names.size(); ++v)
      if (!alias.count(var_names[v])) touch(var_names[v]);
    for (auto& [d, args] : lits)
      for (const std::string& a : args) touch(a);
    for (const RawConstraint& rc : raw_cons) {
      touch(rc.a);
      touch(rc.b);
    }
    // Drop prefix variables that are unused only if they were aliased away
    // (aliasing preserves semantics; unused originals must stay).
    // order currently holds prefix vars first, then stragglers (aliased
    // targets are prefix vars themselves, so there are none).

    Clause c;
    std::map<std::string, int> idx;
    for (const std::string& n : order) {
      auto it = env.find(n);
      idx[n] = c.num_vars();
      c.var_domains.push_back(var_doms[it->second]);
    }
    auto term_of = [&](const std::string& n, DomainId expected, int line,
                       int col) -> Term {
      if (is_variable_name(n)) {
        int v = idx.at(n);
        if (expected >= 0 && c.var_domains[v] != expected)
          fail("variable '" + n + "' used at domain '" +
                   pr.sn.domain(expected).name + "'",
               line, col);
        return Term::var(v);
      }
      return Term::constant(resolve_constant(n, expected, line, col));
    };
    for (auto& [d, args] : lits) {
      Literal l{d.pred, d.positive, {}};
      const auto& sig = pr.sn.pred(d.pred).signature;
      for (size_t i = 0; i < args.size(); ++i)
        l.args.push_back(term_of(args[i], sig[i], d.line, d.col));
      c.literals.push_back(std::move(l));
    }
    for (const RawConstraint& rc : raw_cons) {
      bool va = is_variable_name(rc.a), vb = is_variable_name(rc.b);
      if (!va && !vb) {
        // Distinct constants: the precondition always holds; no constraint.
        continue;
      }
      std::string a = rc.a, b = rc.b;
      if (!va) std::swap(a, b);
      DomainId ad = c.var_domains[idx.at(a)];
      Term tb = term_of(b, ad, rc.line, rc.col);
      Constraint e{idx.at(a), tb};
      if (tb.is_var() && tb.var_index() < e.var) {
        e.var = tb.var_index();
        e.other = Term::var(idx.at(a));
      }
      c.constraints.push_back(e);
    }
    if (c.tautological() || c.vacuous()) return;
    c.canonicalize();
    pr.f.clauses.push_back(std::move(c));
  }
};

}  // namespace

Problem normalize(const ProblemFile& pf) { return Normalizer(pf).run(); }

}  // namespace liftcount
