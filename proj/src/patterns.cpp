#include "liftcount/patterns.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "liftcount/grounding.hpp"

namespace liftcount {

namespace {

// Rename variable u to v and compact the variable numbering.
Clause merge_vars(const Clause& c, int u, int v) {
  std::vector<int> remap(c.num_vars(), -1);
  int next = 0;
  for (int i = 0; i < c.num_vars(); ++i)
    if (i != u) remap[i] = next++;
  remap[u] = remap[v];
  Clause out;
  for (int i = 0; i < c.num_vars(); ++i)
    if (i != u) out.var_domains.push_back(c.var_domains[i]);
  auto map_term = [&](Term t) {
    return t.is_const() ? t : Term::var(remap[t.var_index()]);
  };
  for (const Literal& l : c.literals) {
    Literal nl{l.pred, l.positive, {}};
    for (const Term& t : l.args) nl.args.push_back(map_term(t));
    out.literals.push_back(std::move(nl));
  }
  for (const Constraint& e : c.constraints) {
    Constraint ne{remap[e.var], map_term(e.other)};
    if (ne.other.is_var() && ne.other.var_index() < ne.var)
      std::swap(ne.var, *&ne.other.code);  // both are plain var indices
    out.constraints.push_back(ne);
  }
  out.canonicalize();
  return out;
}

bool has_constraint(const Clause& c, int v, Term t) {
  Constraint e{v, t};
  if (t.is_var() && t.var_index() < v) e = {t.var_index(), Term::var(v)};
  return std::find(c.constraints.begin(), c.constraints.end(), e) !=
         c.constraints.end();
}

struct Split {
  int var = -1;  // variable of a to specialize
  Term target{0};
  DomainId refine = -1;  // when set: retype var to this subdomain instead
};

struct Relation {
  PatternRelation kind;
  Split split;
};

Relation relate(const Session& sn, const Clause& a, const Clause& b) {
  if (a.vacuous()) return {PatternRelation::Subset, {}};
  if (b.vacuous()) return {PatternRelation::Disjoint, {}};
  const Literal& la = a.literals.at(0);
  const Literal& lb = b.literals.at(0);
  if (la.pred != lb.pred) return {PatternRelation::Disjoint, {}};

  bool ambiguous = false;
  std::vector<Split> splits;
  std::map<int, Term> h;  // var of b -> term of a at the same positions

  auto need_equal = [&](Term s, Term t) -> bool {
    // The overlap requires s = t in a; returns false for definite
    // disjointness, records a split or ambiguity otherwise.
    if (s.is_const() && t.is_const()) return s == t;
    if (t.is_const()) std::swap(s, t);
    if (s.is_const()) {
      int v = t.var_index();
      switch (sn.member(s.const_id(), a.var_domains[v])) {
        case Session::Membership::No:
          return false;
        case Session::Membership::Unknown:
          ambiguous = true;
          return true;
        case Session::Membership::Yes:
          break;
      }
      if (has_constraint(a, v, s)) return false;
      splits.push_back({v, s});
      return true;
    }
    int u = s.var_index(), v = t.var_index();
    if (u == v) return true;
    DomainId du = a.var_domains[u], dv = a.var_domains[v];
    switch (domain_relation(sn, du, dv)) {
      case DomainRelation::Disjoint:
        return false;
      case DomainRelation::Unknown:
        ambiguous = true;
        return true;
      case DomainRelation::Super:
        splits.push_back({u, {}, domain_step(sn, du, dv)});
        return true;
      case DomainRelation::Sub:
        splits.push_back({v, {}, domain_step(sn, dv, du)});
        return true;
      case DomainRelation::Equal:
        break;
    }
    if (has_constraint(a, u, Term::var(v))) return false;
    splits.push_back({std::max(u, v), Term::var(std::min(u, v))});
    return true;
  };

  for (size_t i = 0; i < la.args.size(); ++i) {
    Term ta = la.args[i], tb = lb.args[i];
    if (tb.is_const()) {
      if (!need_equal(ta, tb)) return {PatternRelation::Disjoint, {}};
      continue;
    }
    // Position i must match whatever b's variable already stands for,
    // and b's variable domain must admit a's term.
    if (ta.is_const()) {
      switch (sn.member(ta.const_id(), b.var_domains[tb.var_index()])) {
        case Session::Membership::No:
          return {PatternRelation::Disjoint, {}};
        case Session::Membership::Unknown:
          ambiguous = true;
          break;
        case Session::Membership::Yes:
          break;
      }
    } else {
      DomainId da = a.var_domains[ta.var_index()];
      DomainId db = b.var_domains[tb.var_index()];
      switch (domain_relation(sn, da, db)) {
        case DomainRelation::Disjoint:
          return {PatternRelation::Disjoint, {}};
        case DomainRelation::Unknown:
          ambiguous = true;
          break;
        case DomainRelation::Super:
          // a is wider here; the piece of a inside b's domain overlaps.
          splits.push_back({ta.var_index(), {}, domain_step(sn, da, db)});
          break;
        case DomainRelation::Sub:
        case DomainRelation::Equal:
          break;
      }
    }
    auto it = h.find(tb.var_index());
    if (it == h.end()) {
      h.emplace(tb.var_index(), ta);
    } else if (!need_equal(ta, it->second)) {
      return {PatternRelation::Disjoint, {}};
    }
  }

  // Every constraint of b must hold on the overlap.
  for (const Constraint& e : b.constraints) {
    Term s = h.at(e.var);
    Term t = e.other.is_const() ? e.other : h.at(e.other.var_index());
    // b requires s != t.
    if (s.is_const() && t.is_const()) {
      if (s == t) return {PatternRelation::Disjoint, {}};
      continue;
    }
    if (t.is_const()) std::swap(s, t);
    if (s.is_const()) {
      int v = t.var_index();
      switch (sn.member(s.const_id(), a.var_domains[v])) {
        case Session::Membership::No:
          continue;  // can never be equal, constraint holds for free
        case Session::Membership::Unknown:
          ambiguous = true;
          continue;
        case Session::Membership::Yes:
          break;
      }
      if (!has_constraint(a, v, s)) splits.push_back({v, s});
      continue;
    }
    int u = s.var_index(), v = t.var_index();
    if (u == v) return {PatternRelation::Disjoint, {}};
    DomainId du = a.var_domains[u], dv = a.var_domains[v];
    switch (domain_relation(sn, du, dv)) {
      case DomainRelation::Disjoint:
        continue;  // never equal, constraint holds for free
      case DomainRelation::Unknown:
        ambiguous = true;
        continue;
      case DomainRelation::Super:
        splits.push_back({u, {}, domain_step(sn, du, dv)});
        continue;
      case DomainRelation::Sub:
        splits.push_back({v, {}, domain_step(sn, dv, du)});
        continue;
      case DomainRelation::Equal:
        break;
    }
    if (!has_constraint(a, std::min(u, v), Term::var(std::max(u, v))))
      splits.push_back({std::max(u, v), Term::var(std::min(u, v))});
  }

  if (ambiguous) return {PatternRelation::Ambiguous, {}};
  if (!splits.empty()) return {PatternRelation::Overlap, splits.front()};
  return {PatternRelation::Subset, {}};
}

// Drop constraints that hold for free after a retyping: inequality against
// a constant that cannot live in the variable's domain, or between
// variables of provably disjoint domains.
void prune_constraints(const Session& sn, Clause& c) {
  std::vector<Constraint> keep;
  for (const Constraint& e : c.constraints) {
    if (e.var >= 0 && e.other.is_const() &&
        sn.member(e.other.const_id(), c.var_domains[e.var]) ==
            Session::Membership::No)
      continue;
    if (e.var >= 0 && e.other.is_var() &&
        domain_relation(sn, c.var_domains[e.var],
                        c.var_domains[e.other.var_index()]) ==
            DomainRelation::Disjoint)
      continue;
    keep.push_back(e);
  }
  c.constraints = std::move(keep);
}

// The two pieces of c under refining variable v one step into `step`: the
// retyped clause, and the complement (partner half of a partition, or the
// excluded constant of a minus-one domain).
std::vector<Clause> refine_pieces(const Session& sn, const Clause& c, int v,
                                  DomainId step) {
  std::vector<Clause> out;
  const DomainInfo& info = sn.domain(step);
  Clause in = c;
  in.var_domains[v] = step;
  prune_constraints(sn, in);
  in.canonicalize();
  if (!in.vacuous()) out.push_back(std::move(in));
  if (info.kind == DomainKind::MinusOne) {
    Clause eq = substitute(sn, c, Term::constant(info.excluded), {v});
    if (!eq.vacuous()) out.push_back(std::move(eq));
  } else {
    Clause other = c;
    other.var_domains[v] = info.partner;
    prune_constraints(sn, other);
    other.canonicalize();
    if (!other.vacuous()) out.push_back(std::move(other));
  }
  return out;
}

std::vector<Clause> apply_split(const Session& sn, const Clause& a,
                                const Split& s) {
  if (s.refine >= 0) return refine_pieces(sn, a, s.var, s.refine);
  std::vector<Clause> out;
  Clause eq = s.target.is_const()
                  ? substitute(sn, a, s.target, {s.var})
                  : merge_vars(a, s.var, s.target.var_index());
  if (!eq.vacuous()) out.push_back(std::move(eq));
  Clause neq = a;
  if (s.target.is_var() && s.target.var_index() < s.var)
    neq.constraints.push_back({s.target.var_index(), Term::var(s.var)});
  else
    neq.constraints.push_back({s.var, s.target});
  neq.canonicalize();
  if (!neq.vacuous()) out.push_back(std::move(neq));
  return out;
}

}  // namespace

PatternRelation pattern_relation(const Session& sn, const Clause& a,
                                 const Clause& b) {
  return relate(sn, a, b).kind;
}

std::vector<Clause> pattern_difference(const Session& sn, const Clause& a,
                                       const std::vector<Clause>& bs) {
  std::vector<Clause> pieces{a};
  pieces[0].canonicalize();
  if (pieces[0].vacuous()) return {};
  for (const Clause& b : bs) {
    std::vector<Clause> next;
    std::vector<Clause> work = std::move(pieces);
    while (!work.empty()) {
      Clause p = std::move(work.back());
      work.pop_back();
      Relation r = relate(sn, p, b);
      switch (r.kind) {
        case PatternRelation::Subset:
          break;
        case PatternRelation::Disjoint:
          next.push_back(std::move(p));
          break;
        case PatternRelation::Overlap:
          for (Clause& q : apply_split(sn, p, r.split))
            work.push_back(std::move(q));
          break;
        case PatternRelation::Ambiguous:
          throw std::runtime_error("ambiguous pattern relation");
      }
    }
    pieces = std::move(next);
  }
  return pieces;
}

std::vector<Clause> disjointify(const Session& sn, std::vector<Clause> ps) {
  std::vector<Clause> out;
  for (Clause& p : ps) {
    p.canonicalize();
    for (Clause& q : pattern_difference(sn, p, out)) out.push_back(std::move(q));
  }
  return out;
}

namespace {

// As literal_pattern, but also reports which clause variable each pattern
// variable came from (pattern splits need mapping back).
Clause literal_pattern_mapped(const Clause& c, size_t lit,
                              std::vector<int>& clause_var_of) {
  const Literal& l = c.literals.at(lit);
  std::set<int> used;
  for (const Term& t : l.args)
    if (t.is_var()) used.insert(t.var_index());
  std::vector<int> remap(c.num_vars(), -1);
  Clause out;
  clause_var_of.clear();
  for (int v : used) {
    remap[v] = out.num_vars();
    clause_var_of.push_back(v);
    out.var_domains.push_back(c.var_domains[v]);
  }
  Literal nl{l.pred, true, {}};
  for (const Term& t : l.args)
    nl.args.push_back(t.is_const() ? t : Term::var(remap[t.var_index()]));
  out.literals.push_back(std::move(nl));
  for (const Constraint& e : c.constraints) {
    if (e.var < 0 || !used.count(e.var)) continue;
    if (e.other.is_var() && !used.count(e.other.var_index())) continue;
    Constraint ne{remap[e.var],
                  e.other.is_const() ? e.other
                                     : Term::var(remap[e.other.var_index()])};
    if (ne.other.is_var() && ne.other.var_index() < ne.var)
      std::swap(ne.var, ne.other.code);
    out.constraints.push_back(ne);
  }
  // Deliberately not canonicalized: the variable map must stay valid.
  std::sort(out.literals.begin(), out.literals.end());
  std::sort(out.constraints.begin(), out.constraints.end());
  return out;
}

}  // namespace

Clause merge_clause_vars(const Clause& c, int u, int v) {
  return merge_vars(c, u, v);
}

std::optional<ShatterSplit> shatter_split(const Session& sn, const Clause& c,
                                          size_t lit, const Clause& b) {
  std::vector<int> back;
  Clause p = literal_pattern_mapped(c, lit, back);
  Relation r = relate(sn, p, b);
  if (r.kind != PatternRelation::Overlap) return std::nullopt;
  ShatterSplit s;
  s.var = back.at(r.split.var);
  s.refine = r.split.refine;
  if (s.refine < 0)
    s.target = r.split.target.is_const()
                   ? r.split.target
                   : Term::var(back.at(r.split.target.var_index()));
  return s;
}

std::vector<Clause> split_clause(const Session& sn, const Clause& c,
                                 const ShatterSplit& s) {
  if (s.refine >= 0) return refine_pieces(sn, c, s.var, s.refine);
  std::vector<Clause> out;
  Clause eq = s.target.is_const()
                  ? substitute(sn, c, s.target, {s.var})
                  : merge_vars(c, std::max(s.var, s.target.var_index()),
                               std::min(s.var, s.target.var_index()));
  if (!eq.vacuous()) out.push_back(std::move(eq));
  Clause neq = c;
  if (s.target.is_var() && s.target.var_index() < s.var)
    neq.constraints.push_back({s.target.var_index(), Term::var(s.var)});
  else
    neq.constraints.push_back({s.var, s.target});
  neq.canonicalize();
  if (!neq.vacuous()) out.push_back(std::move(neq));
  return out;
}

Clause literal_pattern(const Session& sn, const Clause& c, size_t lit) {
  (void)sn;
  const Literal& l = c.literals.at(lit);
  std::set<int> used;
  for (const Term& t : l.args)
    if (t.is_var()) used.insert(t.var_index());
  std::vector<int> remap(c.num_vars(), -1);
  Clause out;
  for (int v : used) {
    remap[v] = out.num_vars();
    out.var_domains.push_back(c.var_domains[v]);
  }
  Literal nl{l.pred, true, {}};
  for (const Term& t : l.args)
    nl.args.push_back(t.is_const() ? t : Term::var(remap[t.var_index()]));
  out.literals.push_back(std::move(nl));
  for (const Constraint& e : c.constraints) {
    if (e.var < 0 || !used.count(e.var)) continue;
    if (e.other.is_var() && !used.count(e.other.var_index())) continue;
    Constraint ne{remap[e.var],
                  e.other.is_const() ? e.other
                                     : Term::var(remap[e.other.var_index()])};
    if (ne.other.is_var() && ne.other.var_index() < ne.var)
      std::swap(ne.var, ne.other.code);
    out.constraints.push_back(ne);
  }
  out.canonicalize();
  return out;
}

Clause predicate_pattern(const Session& sn, PredId p) {
  Clause out;
  Literal l{p, true, {}};
  for (DomainId d : sn.pred(p).signature) {
    l.args.push_back(Term::var(out.num_vars()));
    out.var_domains.push_back(d);
  }
  out.literals.push_back(std::move(l));
  return out;
}

std::vector<Clause> atom_patterns(const Session& sn, const Formula& f) {
  std::vector<Clause> ps;
  for (const Clause& c : f.clauses) {
    if (c.vacuous()) continue;
    for (size_t i = 0; i < c.literals.size(); ++i) {
      Clause p = literal_pattern(sn, c, i);
      if (std::find(ps.begin(), ps.end(), p) == ps.end())
        ps.push_back(std::move(p));
    }
  }
  return disjointify(sn, std::move(ps));
}

std::vector<Clause> universe_difference(const Session& sn,
                                        const std::vector<Clause>& big,
                                        const std::vector<Clause>& small) {
  std::vector<Clause> out;
  for (const Clause& p : big)
    for (Clause& q : pattern_difference(sn, p, small))
      out.push_back(std::move(q));
  return out;
}

long pattern_count(const Session& sn, const Clause& p,
                   const DomainSizeAssignment& sizes) {
  return grounding_count(sn, p, sizes);
}

}  // namespace liftcount
