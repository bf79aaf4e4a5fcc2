#include "liftcount/rules.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "liftcount/patterns.hpp"

namespace liftcount {

namespace {

Formula make_formula(std::vector<Clause> cs) {
  Formula f;
  f.clauses = std::move(cs);
  f.normalize();
  return f;
}

FcgNode proto(FcgNode::Kind k, const Formula& f) {
  FcgNode n;
  n.kind = k;
  n.formula = f;
  return n;
}

std::unique_ptr<ChipNode> smooth_node(const Formula& f, Clause pattern) {
  FcgNode n = proto(FcgNode::Smooth, f);
  n.clause = std::move(pattern);
  return make_chip_node(std::move(n));
}

std::unique_ptr<ChipNode> unit_node(const Formula& f, Clause c) {
  FcgNode n = proto(FcgNode::Unit, f);
  n.unit_positive = c.literals.at(0).positive;
  n.clause = std::move(c);
  return make_chip_node(std::move(n));
}

std::unique_ptr<ChipNode> bot_node(const Formula& f, Clause c) {
  FcgNode n = proto(FcgNode::Bot, f);
  n.clause = std::move(c);
  return make_chip_node(std::move(n));
}

/// Fold children into a right-nested And chain; empty folds to Top.
ChipChild conj_chain(const Formula& f, std::vector<ChipChild> kids) {
  if (kids.empty())
    return chip_node(make_chip_node(proto(FcgNode::Top, {})));
  ChipChild acc = std::move(kids.back());
  kids.pop_back();
  while (!kids.empty()) {
    acc = chip_node(make_chip_node(
        proto(FcgNode::And, f), chip_kids(std::move(kids.back()), std::move(acc))));
    kids.pop_back();
  }
  return acc;
}

/// Same, but guaranteeing the result is a node (usable as a chip root).
std::unique_ptr<ChipNode> conj_root(const Formula& f,
                                    std::vector<ChipChild> kids) {
  ChipChild c = conj_chain(f, std::move(kids));
  if (c.kind == ChipChild::Node) return std::move(c.node);
  return make_chip_node(proto(FcgNode::And, f),
                        chip_kids(std::move(c),
                                  chip_node(make_chip_node(proto(FcgNode::Top, {})))));
}

/// Smoothing leaves for the parent-universe patterns the child no longer
/// mentions. `covered` must be pairwise disjoint.
std::vector<ChipChild> smooth_leaves(const Session& sn, const Formula& f,
                                     const std::vector<Clause>& parent_universe,
                                     const std::vector<Clause>& covered) {
  std::vector<ChipChild> out;
  for (Clause& p : universe_difference(sn, parent_universe, covered))
    out.push_back(chip_node(smooth_node(f, std::move(p))));
  return out;
}

/// Child wrapped with whatever smoothing it needs relative to the parent.
ChipChild smoothed_pending(const Session& sn, const Formula& parent,
                           const std::vector<Clause>& parent_universe,
                           Formula child) {
  std::vector<Clause> covered = atom_patterns(sn, child);
  std::vector<ChipChild> kids;
  if (!child.empty()) kids.push_back(chip_pending(std::move(child)));
  for (ChipChild& s : smooth_leaves(sn, parent, parent_universe, covered))
    kids.push_back(std::move(s));
  return conj_chain(parent, std::move(kids));
}

/// Install new variable domains, dropping constraints that the new typing
/// makes trivially true (distinct domains never share elements).
Clause retype_clause(const Session& sn, Clause c,
                     std::vector<DomainId> doms) {
  c.var_domains = std::move(doms);
  std::vector<Constraint> keep;
  for (const Constraint& e : c.constraints) {
    if (e.var >= 0 && e.other.is_var() &&
        domain_relation(sn, c.var_domains[e.var],
                        c.var_domains[e.other.var_index()]) ==
            DomainRelation::Disjoint)
      continue;
    if (e.var >= 0 && e.other.is_const() &&
        sn.member(e.other.const_id(), c.var_domains[e.var]) ==
            Session::Membership::No)
      continue;
    keep.push_back(e);
  }
  c.constraints = std::move(keep);
  c.canonicalize();
  return c;
}

bool has_constraint_on(const Clause& c, int v, Term t) {
  Constraint e{v, t};
  if (t.is_var() && t.var_index() < v) e = {t.var_index(), Term::var(v)};
  return std::find(c.constraints.begin(), c.constraints.end(), e) !=
         c.constraints.end();
}

/// Variables of c that do not occur in any literal.
std::vector<int> aux_vars(const Clause& c) {
  std::vector<bool> seen(c.num_vars(), false);
  for (const Literal& l : c.literals)
    for (const Term& t : l.args)
      if (t.is_var()) seen[t.var_index()] = true;
  std::vector<int> out;
  for (int v = 0; v < c.num_vars(); ++v)
    if (!seen[v]) out.push_back(v);
  return out;
}

bool var_constrained(const Clause& c, int v) {
  for (const Constraint& e : c.constraints)
    if (e.var == v || (e.other.is_var() && e.other.var_index() == v))
      return true;
  return false;
}

/// Is c a usable unit leaf: one literal, and any variables outside it are
/// unconstrained (they only gate whether the clause has groundings at all)?
bool unit_leaf_ok(const Clause& c) {
  if (c.literals.size() != 1) return false;
  for (int v : aux_vars(c))
    if (var_constrained(c, v)) return false;
  return true;
}

}  // namespace

std::optional<Formula> drop_vacuous(const Formula& f) {
  std::vector<Clause> keep;
  for (const Clause& c : f.clauses)
    if (!c.vacuous()) keep.push_back(c);
  if (keep.size() == f.clauses.size()) return std::nullopt;
  return make_formula(std::move(keep));
}

std::optional<Formula> shatter(Session& sn, const Formula& f) {
  Formula cur = f;
  bool changed = false;
  for (int iter = 0;; ++iter) {
    if (iter > 10000) throw std::runtime_error("shattering did not converge");
    // All literal-occurrence patterns of the current formula.
    std::vector<Clause> pats;
    std::vector<std::pair<int, int>> occ;  // (clause, literal)
    for (int ci = 0; ci < cur.size(); ++ci)
      for (size_t li = 0; li < cur.clauses[ci].literals.size(); ++li) {
        pats.push_back(literal_pattern(sn, cur.clauses[ci], li));
        occ.emplace_back(ci, static_cast<int>(li));
      }
    bool found = false;
    for (size_t i = 0; i < occ.size() && !found; ++i)
      for (size_t j = 0; j < occ.size() && !found; ++j) {
        if (i == j) continue;
        auto [ci, li] = occ[i];
        if (cur.clauses[ci].literals[li].pred != pats[j].literals[0].pred)
          continue;
        auto s = shatter_split(sn, cur.clauses[ci], li, pats[j]);
        if (!s) continue;
        std::vector<Clause> next;
        for (int k = 0; k < cur.size(); ++k) {
          if (k != ci) {
            next.push_back(cur.clauses[k]);
            continue;
          }
          for (Clause& piece : split_clause(sn, cur.clauses[k], *s))
            next.push_back(std::move(piece));
        }
        cur = make_formula(std::move(next));
        changed = true;
        found = true;
      }
    if (!found) break;
  }
  if (!changed) return std::nullopt;
  return cur;
}

std::vector<Chip> sink_rules(Session& sn, const Formula& f) {
  std::vector<Chip> out;
  if (f.empty()) {
    out.push_back({make_chip_node(proto(FcgNode::Top, f)), "top"});
    return out;
  }

  // Empty-literal clauses peel off as falsity leaves.
  std::vector<Clause> bots, rest;
  for (const Clause& c : f.clauses)
    (c.literals.empty() ? bots : rest).push_back(c);
  if (!bots.empty()) {
    std::vector<ChipChild> kids;
    for (Clause& c : bots)
      kids.push_back(chip_node(bot_node(f, std::move(c))));
    Formula r = make_formula(std::move(rest));
    if (!r.empty()) kids.push_back(chip_pending(std::move(r)));
    out.push_back({conj_root(f, std::move(kids)), "bot"});
    return out;
  }

  // Tautological clauses are always satisfied; smooth their atoms away.
  std::vector<Clause> tauts;
  rest.clear();
  for (const Clause& c : f.clauses)
    (c.tautological() ? tauts : rest).push_back(c);
  if (!tauts.empty()) {
    try {
      Formula r = make_formula(std::move(rest));
      std::vector<ChipChild> kids;
      ChipChild body =
          smoothed_pending(sn, f, atom_patterns(sn, f), std::move(r));
      kids.push_back(std::move(body));
      out.push_back({conj_root(f, std::move(kids)), "tautology"});
      return out;
    } catch (const std::runtime_error&) {
      // Ambiguous patterns: leave it to other rules.
    }
  }

  if (f.size() == 1 && unit_leaf_ok(f.clauses[0])) {
    out.push_back({unit_node(f, f.clauses[0]), "unit"});
    return out;
  }
  return out;
}

std::vector<Chip> independence(Session& sn, const Formula& f) {
  int n = f.size();
  if (n < 2) return {};
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    return parent[v] == v ? v : parent[v] = find(parent[v]);
  };
  // Clauses are dependent when they can touch a common ground atom, i.e.
  // some pair of same-predicate literal patterns is not provably disjoint.
  std::vector<std::vector<std::pair<PredId, Clause>>> pats(n);
  for (int i = 0; i < n; ++i)
    for (size_t li = 0; li < f.clauses[i].literals.size(); ++li)
      pats[i].emplace_back(f.clauses[i].literals[li].pred,
                           literal_pattern(sn, f.clauses[i], li));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (find(i) == find(j)) continue;
      for (const auto& [pi, qi] : pats[i]) {
        bool linked = false;
        for (const auto& [pj, qj] : pats[j])
          if (pi == pj &&
              pattern_relation(sn, qi, qj) != PatternRelation::Disjoint) {
            linked = true;
            break;
          }
        if (linked) {
          parent[find(i)] = find(j);
          break;
        }
      }
    }
  std::map<int, std::vector<Clause>> groups;  // root -> clauses, ordered
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(f.clauses[i]);
  if (groups.size() < 2) return {};
  std::vector<ChipChild> kids;
  for (auto& [root, cs] : groups)
    kids.push_back(chip_pending(make_formula(std::move(cs))));
  std::vector<Chip> out;
  out.push_back({conj_root(f, std::move(kids)), "independence"});
  return out;
}

std::vector<Chip> unit_propagation(Session& sn, const Formula& f) {
  if (f.size() < 2) return {};
  for (int ui = 0; ui < f.size(); ++ui) {
    const Clause& u = f.clauses[ui];
    if (u.literals.size() != 1 || !aux_vars(u).empty()) continue;
    const Literal& ul = u.literals[0];
    Clause pu = literal_pattern(sn, u, 0);
    bool ok = true;
    std::vector<Clause> rest;
    for (int ci = 0; ci < f.size() && ok; ++ci) {
      if (ci == ui) continue;
      const Clause& c = f.clauses[ci];
      bool subsumed = false;
      std::vector<size_t> falsified;
      for (size_t li = 0; li < c.literals.size() && ok; ++li) {
        const Literal& l = c.literals[li];
        if (l.pred != ul.pred) continue;
        switch (pattern_relation(sn, literal_pattern(sn, c, li), pu)) {
          case PatternRelation::Subset:
            if (l.positive == ul.positive)
              subsumed = true;
            else
              falsified.push_back(li);
            break;
          case PatternRelation::Disjoint:
            break;
          default:
            ok = false;  // needs shattering first, or ambiguous
        }
      }
      if (!ok) break;
      if (subsumed) continue;
      if (falsified.empty()) {
        rest.push_back(c);
        continue;
      }
      Clause nc = c;
      for (auto it = falsified.rbegin(); it != falsified.rend(); ++it)
        nc.literals.erase(nc.literals.begin() + *it);
      nc.canonicalize();  // variables are kept, even if now unused
      rest.push_back(std::move(nc));
    }
    if (!ok) continue;
    try {
      Formula r = make_formula(std::move(rest));
      std::vector<Clause> covered = atom_patterns(sn, r);
      covered.push_back(pu);
      std::vector<ChipChild> kids;
      kids.push_back(chip_node(unit_node(f, u)));
      if (!r.empty()) kids.push_back(chip_pending(std::move(r)));
      for (ChipChild& s :
           smooth_leaves(sn, f, atom_patterns(sn, f), covered))
        kids.push_back(std::move(s));
      std::vector<Chip> out;
      out.push_back({conj_root(f, std::move(kids)), "unit_propagation"});
      return out;
    } catch (const std::runtime_error&) {
      continue;
    }
  }
  return {};
}

std::vector<Chip> shannon(Session& sn, const Formula& f) {
  std::vector<Chip> out;
  std::vector<Literal> seen;
  for (const Clause& c : f.clauses) {
    for (const Literal& l : c.literals) {
      bool ground = std::all_of(l.args.begin(), l.args.end(),
                                [](const Term& t) { return t.is_const(); });
      if (!ground) continue;
      Literal atom{l.pred, true, l.args};
      if (std::find(seen.begin(), seen.end(), atom) != seen.end()) continue;
      seen.push_back(atom);

      Clause ground_pat;
      ground_pat.literals = {atom};
      // Every other occurrence of the predicate must miss this atom cleanly.
      bool ok = true;
      for (const Clause& d : f.clauses)
        for (size_t li = 0; li < d.literals.size() && ok; ++li) {
          const Literal& m = d.literals[li];
          if (m.pred != atom.pred || m.args == atom.args) continue;
          if (pattern_relation(sn, literal_pattern(sn, d, li), ground_pat) !=
              PatternRelation::Disjoint)
            ok = false;
        }
      if (!ok) continue;

      auto condition = [&](bool value) {
        std::vector<Clause> rest;
        for (const Clause& d : f.clauses) {
          bool satisfied = false;
          Clause nd = d;
          nd.literals.clear();
          for (const Literal& m : d.literals) {
            if (m.pred == atom.pred && m.args == atom.args) {
              if (m.positive == value)
                satisfied = true;
              // else the literal is false: drop it
            } else {
              nd.literals.push_back(m);
            }
          }
          if (satisfied) continue;
          nd.canonicalize();
          rest.push_back(std::move(nd));
        }
        return make_formula(std::move(rest));
      };

      try {
        std::vector<Clause> parent_u = atom_patterns(sn, f);
        auto branch = [&](bool value) {
          Formula cond = condition(value);
          Clause uc;
          uc.literals = {{atom.pred, value, atom.args}};
          std::vector<Clause> covered = atom_patterns(sn, cond);
          covered.push_back(ground_pat);
          std::vector<ChipChild> kids;
          kids.push_back(chip_node(unit_node(f, std::move(uc))));
          if (!cond.empty()) kids.push_back(chip_pending(std::move(cond)));
          for (ChipChild& s : smooth_leaves(sn, f, parent_u, covered))
            kids.push_back(std::move(s));
          return chip_node(conj_root(f, std::move(kids)));
        };
        out.push_back({make_chip_node(proto(FcgNode::Or, f),
                                      chip_kids(branch(true), branch(false))),
                       "shannon"});
      } catch (const std::runtime_error&) {
        continue;
      }
    }
  }
  return out;
}

std::vector<Chip> independent_partial_grounding(Session& sn,
                                                const Formula& f) {
  std::vector<Chip> out;
  if (f.empty()) return out;
  std::set<DomainId> doms = f.domains();
  for (DomainId dom : doms) {
    // Named elements of the domain would break exchangeability.
    bool clean = true;
    for (ConstId c : f.constants())
      if (sn.member(c, dom) != Session::Membership::No) clean = false;
    if (!clean) continue;

    // Candidate root variables: occur in every literal of their clause.
    std::vector<std::vector<int>> cands(f.size());
    bool possible = true;
    for (int ci = 0; ci < f.size(); ++ci) {
      const Clause& c = f.clauses[ci];
      if (c.literals.empty()) {
        possible = false;
        break;
      }
      for (int v = 0; v < c.num_vars(); ++v) {
        if (c.var_domains[v] != dom) continue;
        bool everywhere = true;
        for (const Literal& l : c.literals)
          if (std::find(l.args.begin(), l.args.end(), Term::var(v)) ==
              l.args.end())
            everywhere = false;
        if (everywhere) cands[ci].push_back(v);
      }
      if (cands[ci].empty()) possible = false;
    }
    if (!possible) continue;

    // Pick one root per clause such that, per predicate, root variables sit
    // at a consistent set of positions held by nothing else.
    std::vector<int> pick(f.size(), -1);
    std::function<bool(int)> assign = [&](int ci) -> bool {
      if (ci == f.size()) {
        std::map<PredId, std::set<size_t>> rootpos;
        for (int i = 0; i < f.size(); ++i)
          for (const Literal& l : f.clauses[i].literals)
            for (size_t ai = 0; ai < l.args.size(); ++ai)
              if (l.args[ai] == Term::var(pick[i])) rootpos[l.pred].insert(ai);
        for (int i = 0; i < f.size(); ++i)
          for (const Literal& l : f.clauses[i].literals)
            for (size_t ai : rootpos[l.pred])
              if (l.args[ai] != Term::var(pick[i])) return false;
        return true;
      }
      for (int v : cands[ci]) {
        pick[ci] = v;
        if (assign(ci + 1)) return true;
      }
      return false;
    };
    if (!assign(0)) continue;

    ConstId x = sn.fresh_constant(dom);
    std::vector<Clause> child;
    for (int ci = 0; ci < f.size(); ++ci)
      child.push_back(
          substitute(sn, f.clauses[ci], Term::constant(x), {pick[ci]}));
    FcgNode n = proto(FcgNode::SetAnd, f);
    n.dom = dom;
    out.push_back({make_chip_node(std::move(n),
                                  chip_kids(chip_pending(
                                      make_formula(std::move(child))))),
                   "ipg"});
  }
  return out;
}

std::vector<Chip> atom_counting(Session& sn, const Formula& f) {
  std::vector<Chip> out;
  std::vector<Clause> tried;
  for (const Clause& cq : f.clauses) {
    for (size_t lq = 0; lq < cq.literals.size(); ++lq) {
      const Literal& litq = cq.literals[lq];
      std::set<int> vars;
      for (const Term& t : litq.args)
        if (t.is_var()) vars.insert(t.var_index());
      if (vars.size() != 1) continue;  // effectively unary occurrences only
      Clause q = literal_pattern(sn, cq, lq);
      if (!q.constraints.empty()) continue;
      if (std::find(tried.begin(), tried.end(), q) != tried.end()) continue;
      tried.push_back(q);
      DomainId dom = q.var_domains[0];
      PredId pred = litq.pred;

      // The variables a clause would have split: those in counted literals,
      // closed under same-domain constraints.
      auto counted_vars = [&](const Clause& c) {
        std::set<int> sset;
        for (size_t li = 0; li < c.literals.size(); ++li)
          if (c.literals[li].pred == pred && literal_pattern(sn, c, li) == q)
            for (const Term& t : c.literals[li].args)
              if (t.is_var()) sset.insert(t.var_index());
        for (bool grew = true; grew;) {
          grew = false;
          for (const Constraint& e : c.constraints) {
            if (e.var < 0 || !e.other.is_var()) continue;
            int u = e.var, v = e.other.var_index();
            if (c.var_domains[u] != dom || c.var_domains[v] != dom) continue;
            if (sset.count(u) != sset.count(v)) {
              sset.insert(u);
              sset.insert(v);
              grew = true;
            }
          }
        }
        return sset;
      };

      // Named members of the counted domain are tolerable as long as the
      // split cannot tell them apart from unnamed members: no constraint on
      // a split variable may mention them, and they may not sit at an
      // argument position that any same-predicate literal fills with a
      // dom-typed variable (the split would then need the constant's side
      // of the partition).
      bool ok = true;
      std::set<ConstId> named;
      for (ConstId c : f.constants())
        if (sn.member(c, dom) != Session::Membership::No) named.insert(c);
      if (!named.empty()) {
        std::map<PredId, std::set<size_t>> dompos;
        for (const Clause& c : f.clauses)
          for (const Literal& l : c.literals)
            for (size_t ai = 0; ai < l.args.size(); ++ai)
              if (l.args[ai].is_var() &&
                  c.var_domains[l.args[ai].var_index()] == dom)
                dompos[l.pred].insert(ai);
        for (const Clause& c : f.clauses) {
          std::set<int> sset = counted_vars(c);
          for (const Constraint& e : c.constraints)
            if (e.other.is_const() && named.count(e.other.const_id()) &&
                sset.count(e.var))
              ok = false;
          for (const Literal& l : c.literals)
            for (size_t ai = 0; ai < l.args.size(); ++ai)
              if (l.args[ai].is_const() && named.count(l.args[ai].const_id()) &&
                  dompos[l.pred].count(ai))
                ok = false;
        }
      }
      // Any other occurrence of the predicate must equal the counted shape
      // exactly or miss it entirely.
      for (const Clause& c : f.clauses)
        for (size_t li = 0; li < c.literals.size() && ok; ++li) {
          if (c.literals[li].pred != pred) continue;
          Clause p = literal_pattern(sn, c, li);
          if (p == q) continue;
          if (pattern_relation(sn, p, q) != PatternRelation::Disjoint)
            ok = false;
        }
      if (!ok) continue;

      try {
        std::vector<Clause> parent_u = atom_patterns(sn, f);
        auto [dtop, dbot] = sn.fresh_partition(dom);

        // Split only the variables that occur in counted literals; other
        // occurrences of the domain keep their typing, and shattering
        // refines them against the new parts on demand.
        auto split_all = [&](const std::vector<Clause>& cs) {
          std::vector<Clause> res;
          for (const Clause& c : cs) {
            std::set<int> sset = counted_vars(c);
            std::vector<int> dvars(sset.begin(), sset.end());
            for (unsigned mask = 0; mask < (1u << dvars.size()); ++mask) {
              std::vector<DomainId> doms = c.var_domains;
              for (size_t k = 0; k < dvars.size(); ++k)
                doms[dvars[k]] = (mask >> k & 1) ? dtop : dbot;
              Clause nc = c;
              bool satisfied = false;
              nc.literals.clear();
              for (size_t li = 0; li < c.literals.size(); ++li) {
                const Literal& l = c.literals[li];
                if (l.pred == pred && literal_pattern(sn, c, li) == q) {
                  int v = -1;
                  for (const Term& t : l.args)
                    if (t.is_var()) v = t.var_index();
                  bool in_top = doms[v] == dtop;
                  if (l.positive == in_top) {
                    satisfied = true;  // literal true on this branch
                  }
                  continue;  // true or false, the literal resolves away
                }
                nc.literals.push_back(l);
              }
              if (satisfied) continue;
              res.push_back(retype_clause(sn, std::move(nc), std::move(doms)));
            }
          }
          return res;
        };

        Formula child = make_formula(split_all(f.clauses));
        if (auto dv = drop_vacuous(child)) child = *dv;

        // Expected universe: the counted pattern splits over the
        // partition; everything else is untouched.
        Clause qtop = retype_clause(sn, q, {dtop});
        Clause qbot = retype_clause(sn, q, {dbot});
        std::vector<Clause> expected;
        for (Clause& p : parent_u) {
          if (p == q) {
            expected.push_back(qtop);
            expected.push_back(qbot);
          } else {
            expected.push_back(std::move(p));
          }
        }
        std::vector<Clause> covered = atom_patterns(sn, child);
        covered.push_back(qtop);
        covered.push_back(qbot);

        std::vector<ChipChild> kids;
        if (!child.empty()) kids.push_back(chip_pending(std::move(child)));
        for (Clause& m : universe_difference(sn, expected, covered))
          kids.push_back(chip_node(smooth_node(f, std::move(m))));

        FcgNode n = proto(FcgNode::SetOr, f);
        n.dom = dom;
        n.dom_top = dtop;
        n.dom_bot = dbot;
        n.counted_pred = pred;
        out.push_back(
            {make_chip_node(std::move(n),
                            chip_kids(conj_chain(f, std::move(kids)))),
             "atom_counting"});
      } catch (const std::runtime_error&) {
        continue;
      }
    }
  }
  return out;
}

std::vector<Chip> inclusion_exclusion(Session& sn, const Formula& f) {
  std::vector<Chip> out;
  for (int ci = 0; ci < f.size(); ++ci) {
    const Clause& c = f.clauses[ci];
    int nl = static_cast<int>(c.literals.size());
    if (nl < 2) continue;
    // Union-find over variables and literal tags.
    int total = c.num_vars() + nl;
    std::vector<int> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
      return parent[v] == v ? v : parent[v] = find(parent[v]);
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    for (int li = 0; li < nl; ++li)
      for (const Term& t : c.literals[li].args)
        if (t.is_var()) unite(c.num_vars() + li, t.var_index());
    for (const Constraint& e : c.constraints)
      if (e.var >= 0 && e.other.is_var()) unite(e.var, e.other.var_index());

    int root_a = find(c.num_vars());
    std::vector<int> in_a;  // literal indices in the first component
    bool split_found = false;
    for (int li = 0; li < nl; ++li) {
      if (find(c.num_vars() + li) == root_a)
        in_a.push_back(li);
      else
        split_found = true;
    }
    if (!split_found) continue;

    // Neutral variables (connected to no literal) gate both sides.
    std::vector<int> lit_roots;
    for (int li = 0; li < nl; ++li) lit_roots.push_back(find(c.num_vars() + li));
    auto is_neutral = [&](int v) {
      return std::find(lit_roots.begin(), lit_roots.end(), find(v)) ==
             lit_roots.end();
    };
    auto side_clause = [&](bool a_side) {
      std::vector<int> vars;
      for (int v = 0; v < c.num_vars(); ++v) {
        bool in_side =
            (find(v) == root_a) == a_side || is_neutral(v);
        if (in_side) vars.push_back(v);
      }
      std::vector<int> remap(c.num_vars(), -1);
      Clause outc;
      for (int v : vars) {
        remap[v] = outc.num_vars();
        outc.var_domains.push_back(c.var_domains[v]);
      }
      for (int li = 0; li < nl; ++li) {
        if ((std::find(in_a.begin(), in_a.end(), li) != in_a.end()) != a_side)
          continue;
        Literal l = c.literals[li];
        for (Term& t : l.args)
          if (t.is_var()) t = Term::var(remap[t.var_index()]);
        outc.literals.push_back(std::move(l));
      }
      for (const Constraint& e : c.constraints) {
        if (e.var < 0) {
          outc.constraints.push_back(e);
          continue;
        }
        if (remap[e.var] < 0) continue;
        if (e.other.is_var() && remap[e.other.var_index()] < 0) continue;
        Constraint ne{remap[e.var],
                      e.other.is_const()
                          ? e.other
                          : Term::var(remap[e.other.var_index()])};
        if (ne.other.is_var() && ne.other.var_index() < ne.var)
          std::swap(ne.var, ne.other.code);
        outc.constraints.push_back(ne);
      }
      outc.canonicalize();
      return outc;
    };

    Clause ca = side_clause(true), cb = side_clause(false);
    std::vector<Clause> others;
    for (int k = 0; k < f.size(); ++k)
      if (k != ci) others.push_back(f.clauses[k]);
    auto with = [&](std::vector<Clause> extra) {
      std::vector<Clause> cs = others;
      for (Clause& e : extra) cs.push_back(std::move(e));
      return make_formula(std::move(cs));
    };
    try {
      std::vector<Clause> parent_u = atom_patterns(sn, f);
      ChipChild ka = smoothed_pending(sn, f, parent_u, with({ca}));
      ChipChild kb = smoothed_pending(sn, f, parent_u, with({cb}));
      ChipChild kab = smoothed_pending(sn, f, parent_u, with({ca, cb}));
      out.push_back({make_chip_node(proto(FcgNode::Ie, f),
                                    chip_kids(std::move(ka), std::move(kb),
                                              std::move(kab))),
                     "ie"});
    } catch (const std::runtime_error&) {
      continue;
    }
  }
  return out;
}

std::vector<Chip> gdr(Session& sn, const Formula& f) {
  std::vector<Chip> out;
  for (DomainId dom : f.domains()) {
    bool has_var = false;
    for (const Clause& c : f.clauses)
      for (DomainId d : c.var_domains)
        if (d == dom) has_var = true;
    if (!has_var) continue;
    bool clean = true;
    for (ConstId c : f.constants())
      if (sn.member(c, dom) != Session::Membership::No) clean = false;
    if (!clean) continue;

    ConstId x = sn.fresh_constant(dom);
    Term tx = Term::constant(x);
    std::vector<Clause> child;
    for (const Clause& c : f.clauses) {
      std::vector<int> V;
      for (int v = 0; v < c.num_vars(); ++v)
        if (c.var_domains[v] == dom) V.push_back(v);
      for (unsigned mask = 0; mask < (1u << V.size()); ++mask) {
        std::set<int> W;
        for (size_t k = 0; k < V.size(); ++k)
          if (mask >> k & 1) W.insert(V[k]);
        // W must be mutually unconstrained and free of constant constraints.
        bool admissible = true;
        for (int u : W) {
          for (int v : W)
            if (u < v && has_constraint_on(c, u, Term::var(v)))
              admissible = false;
          for (const Constraint& e : c.constraints)
            if (e.var == u && e.other.is_const()) admissible = false;
        }
        if (!admissible) continue;
        Clause work = c;
        for (int v : V)
          if (!W.count(v)) work.constraints.push_back({v, tx});
        Clause nc = W.empty() ? work : substitute(sn, work, tx, W);
        nc.canonicalize();
        if (!nc.vacuous()) child.push_back(std::move(nc));
      }
    }
    FcgNode n = proto(FcgNode::Gdr, f);
    n.dom = dom;
    out.push_back({make_chip_node(std::move(n),
                                  chip_kids(chip_pending(
                                      make_formula(std::move(child))))),
                   "gdr"});
  }
  return out;
}

std::vector<Chip> constraint_removal(Session& sn, const Formula& f) {
  std::vector<Chip> out;
  for (ConstId x : f.constants()) {
    DomainId dom = sn.constant(x).domain;
    Term tx = Term::constant(x);
    bool ok = true;
    for (const Clause& c : f.clauses) {
      for (const Literal& l : c.literals)
        for (const Term& t : l.args)
          if (t == tx) ok = false;
      for (const Constraint& e : c.constraints)
        if (e.other == tx && c.var_domains[e.var] != dom) ok = false;
      for (int v = 0; v < c.num_vars() && ok; ++v)
        if (c.var_domains[v] == dom && !has_constraint_on(c, v, tx))
          ok = false;
    }
    if (!ok) continue;
    bool has_var = false;
    for (const Clause& c : f.clauses)
      for (DomainId d : c.var_domains)
        if (d == dom) has_var = true;
    if (!has_var) continue;

    DomainId shrunk = sn.fresh_minus_one_domain(dom, x);
    std::vector<Clause> child;
    for (const Clause& c : f.clauses) {
      Clause nc = c;
      nc.constraints.clear();
      for (const Constraint& e : c.constraints)
        if (!(e.var >= 0 && e.other == tx && c.var_domains[e.var] == dom))
          nc.constraints.push_back(e);
      std::vector<DomainId> doms = c.var_domains;
      for (DomainId& d : doms)
        if (d == dom) d = shrunk;
      child.push_back(retype_clause(sn, std::move(nc), std::move(doms)));
    }
    FcgNode n = proto(FcgNode::Cr, f);
    n.dom = dom;
    n.dom_new = shrunk;
    out.push_back({make_chip_node(std::move(n),
                                  chip_kids(chip_pending(
                                      make_formula(std::move(child))))),
                   "cr"});
  }
  return out;
}

std::vector<DomainMapping> generate_maps(const Session& sn, const Clause& c,
                                         const Clause& d,
                                         const DomainMapping& rho) {
  (void)sn;
  std::vector<DomainMapping> out;
  int k = c.num_vars();
  if (k != d.num_vars() || c.literals.size() != d.literals.size() ||
      c.constraints.size() != d.constraints.size())
    return out;
  std::vector<int> beta(k);
  std::iota(beta.begin(), beta.end(), 0);
  do {
    auto map_term = [&](Term t) {
      return t.is_const() ? t : Term::var(beta[t.var_index()]);
    };
    std::vector<Literal> lits = c.literals;
    for (Literal& l : lits)
      for (Term& t : l.args) t = map_term(t);
    std::sort(lits.begin(), lits.end());
    if (lits != d.literals) continue;
    std::vector<Constraint> cons;
    bool bad = false;
    for (const Constraint& e : c.constraints) {
      if (e.var < 0) {
        cons.push_back(e);
        continue;
      }
      Constraint ne{beta[e.var], map_term(e.other)};
      if (ne.other.is_var() && ne.other.var_index() < ne.var)
        std::swap(ne.var, ne.other.code);
      cons.push_back(ne);
    }
    std::sort(cons.begin(), cons.end());
    if (bad || cons != d.constraints) continue;
    DomainMapping gamma = rho;
    bool consistent = true;
    for (int v = 0; v < k && consistent; ++v) {
      auto [it, fresh] = gamma.emplace(c.var_domains[v], d.var_domains[beta[v]]);
      if (!fresh && it->second != d.var_domains[beta[v]]) consistent = false;
    }
    if (!consistent) continue;
    if (std::find(out.begin(), out.end(), gamma) == out.end())
      out.push_back(std::move(gamma));
  } while (std::next_permutation(beta.begin(), beta.end()));
  return out;
}

std::optional<DomainMapping> identify_recursion(const Session& sn,
                                                const Formula& phi,
                                                const Formula& psi,
                                                DomainMapping rho) {
  if (phi.size() != psi.size()) return std::nullopt;
  if (psi.empty()) return rho;
  Clause c = psi.clauses.back();
  Formula psi_rest = psi;
  psi_rest.clauses.pop_back();
  uint64_t ch = clause_hash(sn, c);
  for (int di = 0; di < phi.size(); ++di) {
    const Clause& d = phi.clauses[di];
    if (clause_hash(sn, d) != ch) continue;
    for (const DomainMapping& gamma : generate_maps(sn, c, d, rho)) {
      Formula phi_rest = phi;
      phi_rest.clauses.erase(phi_rest.clauses.begin() + di);
      if (auto r = identify_recursion(sn, phi_rest, psi_rest, gamma)) return r;
    }
  }
  return std::nullopt;
}

std::vector<Chip> try_cache(const Session& sn, const Formula& f,
                            const Cache& cache) {
  auto it = cache.buckets.find(formula_hash(sn, f));
  if (it == cache.buckets.end()) return {};
  for (const auto& [psi, node] : it->second) {
    if (auto rho = identify_recursion(sn, f, psi)) {
      FcgNode n = proto(FcgNode::Ref, f);
      n.rho = *rho;
      std::vector<Chip> out;
      out.push_back({make_chip_node(std::move(n), chip_kids(chip_existing(node))),
                     "ref"});
      return out;
    }
  }
  return {};
}

std::vector<Chip> ground_fallback(const Session& sn, const Formula& f) {
  (void)sn;
  std::vector<Chip> out;
  out.push_back({make_chip_node(proto(FcgNode::Ground, f)), "ground"});
  return out;
}

}  // namespace liftcount
