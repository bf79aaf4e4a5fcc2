#include <set>

#include "doctest.h"
#include "liftcount/grounding.hpp"
#include "liftcount/patterns.hpp"

using namespace liftcount;

namespace {

// Reference semantics: expand a pattern to the set of ground atom tuples.
std::set<std::vector<long>> atoms_of(const Session& sn, const Clause& p,
                                     const ElementUniverse& u) {
  std::set<std::vector<long>> out;
  if (p.vacuous()) return out;
  const Literal& l = p.literals.at(0);
  for_each_grounding(sn, p, u, [&](const std::vector<long>& a) {
    std::vector<long> tuple;
    for (const Term& t : l.args)
      tuple.push_back(t.is_const() ? u.const_elem(t.const_id())
                                   : a[t.var_index()]);
    out.insert(std::move(tuple));
  });
  return out;
}

std::set<std::vector<long>> atoms_of(const Session& sn,
                                     const std::vector<Clause>& ps,
                                     const ElementUniverse& u) {
  std::set<std::vector<long>> out;
  for (const Clause& p : ps)
    for (auto& t : atoms_of(sn, p, u)) out.insert(t);
  return out;
}

struct Fixture {
  Session sn;
  DomainId gamma, delta;
  PredId p;
  Fixture() {
    gamma = sn.add_domain({"Gamma"});
    delta = sn.add_domain({"Delta"});
    p = sn.add_predicate({"p", {gamma, delta}});
  }
  ElementUniverse universe(long g, long d, const std::set<ConstId>& refs = {}) {
    return build_universe(sn, {gamma, delta}, {{gamma, g}, {delta, d}}, refs);
  }
};

Clause pat(PredId p, std::vector<Term> args, std::vector<DomainId> doms,
           std::vector<Constraint> cons = {}) {
  Clause c;
  c.literals = {{p, true, std::move(args)}};
  c.constraints = std::move(cons);
  c.var_domains = std::move(doms);
  return c;
}

}  // namespace

TEST_CASE("full pattern vs constant-specialized pattern") {
  Fixture fx;
  ConstId x = fx.sn.fresh_constant(fx.gamma);
  Clause full = pat(fx.p, {Term::var(0), Term::var(1)}, {fx.gamma, fx.delta});
  Clause at_x = pat(fx.p, {Term::constant(x), Term::var(0)}, {fx.delta});
  Clause not_x = pat(fx.p, {Term::var(0), Term::var(1)}, {fx.gamma, fx.delta},
                     {{0, Term::constant(x)}});

  CHECK(pattern_subset(fx.sn, at_x, full));
  CHECK(pattern_subset(fx.sn, not_x, full));
  CHECK(!pattern_subset(fx.sn, full, at_x));
  CHECK(pattern_disjoint(fx.sn, at_x, not_x));
  CHECK(pattern_relation(fx.sn, full, at_x) == PatternRelation::Overlap);
}

TEST_CASE("difference matches ground set difference") {
  Fixture fx;
  ConstId x = fx.sn.fresh_constant(fx.gamma);
  Clause full = pat(fx.p, {Term::var(0), Term::var(1)}, {fx.gamma, fx.delta});
  Clause at_x = pat(fx.p, {Term::constant(x), Term::var(0)}, {fx.delta});

  std::vector<Clause> diff = pattern_difference(fx.sn, full, {at_x});
  ElementUniverse u = fx.universe(3, 2, {x});
  auto want = atoms_of(fx.sn, full, u);
  for (auto& t : atoms_of(fx.sn, at_x, u)) want.erase(t);
  CHECK(atoms_of(fx.sn, diff, u) == want);
}

TEST_CASE("difference with repeated-variable pattern") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId q = sn.add_predicate({"q", {d, d}});
  Clause full = pat(q, {Term::var(0), Term::var(1)}, {d, d});
  Clause diag = pat(q, {Term::var(0), Term::var(0)}, {d});

  std::vector<Clause> diff = pattern_difference(sn, full, {diag});
  ElementUniverse u = build_universe(sn, {d}, {{d, 3}});
  auto want = atoms_of(sn, full, u);
  for (auto& t : atoms_of(sn, diag, u)) want.erase(t);
  CHECK(atoms_of(sn, diff, u) == want);
  // The remainder is exactly the off-diagonal pattern.
  REQUIRE(diff.size() == 1);
  CHECK(pattern_count(sn, diff[0], {{d, 3}}) == 6);
}

TEST_CASE("disjointify preserves the union and removes overlap") {
  Fixture fx;
  ConstId x = fx.sn.fresh_constant(fx.gamma);
  Clause full = pat(fx.p, {Term::var(0), Term::var(1)}, {fx.gamma, fx.delta});
  Clause at_x = pat(fx.p, {Term::constant(x), Term::var(0)}, {fx.delta});

  std::vector<Clause> dj = disjointify(fx.sn, {at_x, full});
  ElementUniverse u = fx.universe(2, 3, {x});
  CHECK(atoms_of(fx.sn, dj, u) == atoms_of(fx.sn, {at_x, full}, u));
  long total = 0;
  for (const Clause& q : dj)
    total += pattern_count(fx.sn, q, {{fx.gamma, 2}, {fx.delta, 3}});
  CHECK(total == 6);  // counts add because pieces are disjoint
  for (size_t i = 0; i < dj.size(); ++i)
    for (size_t j = i + 1; j < dj.size(); ++j)
      CHECK(pattern_disjoint(fx.sn, dj[i], dj[j]));
}

TEST_CASE("atom universe of the partial injection constraints") {
  Fixture fx;
  Clause c1;
  c1.literals = {{fx.p, false, {Term::var(0), Term::var(1)}},
                 {fx.p, false, {Term::var(0), Term::var(2)}}};
  c1.constraints = {{1, Term::var(2)}};
  c1.var_domains = {fx.gamma, fx.delta, fx.delta};
  Formula f;
  f.clauses = {c1};
  std::vector<Clause> u = atom_patterns(fx.sn, f);
  // Both literal occurrences project to the unconstrained p(X,Y) pattern.
  REQUIRE(u.size() == 1);
  CHECK(pattern_count(fx.sn, u[0], {{fx.gamma, 2}, {fx.delta, 3}}) == 6);
}

TEST_CASE("constraints project onto literal variables only") {
  Fixture fx;
  // X != x guards a clause whose literal mentions X: the pattern keeps it.
  ConstId x = fx.sn.fresh_constant(fx.gamma);
  Clause c;
  c.literals = {{fx.p, false, {Term::var(0), Term::var(1)}}};
  c.constraints = {{0, Term::constant(x)}};
  c.var_domains = {fx.gamma, fx.delta};
  Clause q = literal_pattern(fx.sn, c, 0);
  CHECK(pattern_count(fx.sn, q, {{fx.gamma, 3}, {fx.delta, 2}}) == 4);
}

TEST_CASE("different domains make patterns disjoint") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  auto [top, bot] = sn.fresh_partition(d);
  PredId q = sn.add_predicate({"q", {d}});
  Clause a = pat(q, {Term::var(0)}, {top});
  Clause b = pat(q, {Term::var(0)}, {bot});
  CHECK(pattern_disjoint(sn, a, b));
}

TEST_CASE("partition-domain constant membership is ambiguous") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  auto [top, bot] = sn.fresh_partition(d);
  (void)bot;
  ConstId x = sn.fresh_constant(d);
  PredId q = sn.add_predicate({"q", {d}});
  Clause a = pat(q, {Term::constant(x)}, {});
  Clause b = pat(q, {Term::var(0)}, {top});
  CHECK(pattern_relation(sn, a, b) == PatternRelation::Ambiguous);
}

TEST_CASE("predicate pattern covers the declared signature") {
  Fixture fx;
  Clause q = predicate_pattern(fx.sn, fx.p);
  CHECK(pattern_count(fx.sn, q, {{fx.gamma, 2}, {fx.delta, 3}}) == 6);
}

TEST_CASE("randomized difference agrees with ground enumeration") {
  // Deterministic pseudo-random corpus of unary/binary patterns.
  Session sn;
  DomainId d = sn.add_domain({"D"});
  ConstId x = sn.fresh_constant(d);
  ConstId y = sn.fresh_constant(d);
  PredId q = sn.add_predicate({"q", {d, d}});
  std::vector<Term> terms{Term::var(0), Term::var(1), Term::constant(x),
                          Term::constant(y)};
  std::vector<Clause> corpus;
  for (Term t0 : terms)
    for (Term t1 : terms) {
      Clause c;
      int nv = 0;
      for (Term t : {t0, t1})
        if (t.is_var()) nv = std::max(nv, t.var_index() + 1);
      if (t0 == Term::var(1) && t1 != Term::var(0)) continue;  // gap in vars
      if (t1 == Term::var(1) && t0 != Term::var(0)) continue;
      c.literals = {{q, true, {t0, t1}}};
      c.var_domains.assign(nv, d);
      c.canonicalize();
      corpus.push_back(c);
      if (nv == 2) {
        Clause cc = c;
        cc.constraints = {{0, Term::var(1)}};
        cc.canonicalize();
        corpus.push_back(cc);
      }
    }
  ElementUniverse u = build_universe(sn, {d}, {{d, 3}}, {x, y});
  for (const Clause& a : corpus)
    for (const Clause& b : corpus) {
      auto sa = atoms_of(sn, a, u);
      auto sb = atoms_of(sn, b, u);
      auto rel = pattern_relation(sn, a, b);
      if (rel == PatternRelation::Subset)
        for (auto& t : sa) CHECK(sb.count(t));
      if (rel == PatternRelation::Disjoint)
        for (auto& t : sa) CHECK(!sb.count(t));
      auto want = sa;
      for (auto& t : sb) want.erase(t);
      CHECK(atoms_of(sn, pattern_difference(sn, a, {b}), u) == want);
    }
}
