#include <random>

#include "doctest.h"
#include "liftcount/grounding.hpp"
#include "liftcount/oracle.hpp"
#include "liftcount/patterns.hpp"
#include "liftcount/rules.hpp"

using namespace liftcount;

namespace {

Clause mk(std::vector<DomainId> doms, std::vector<Literal> lits,
          std::vector<Constraint> cons = {}) {
  Clause c;
  c.var_domains = std::move(doms);
  c.literals = std::move(lits);
  c.constraints = std::move(cons);
  c.canonicalize();
  return c;
}

Formula mkf(std::vector<Clause> cs) {
  Formula f;
  f.clauses = std::move(cs);
  f.normalize();
  return f;
}

Rational rpow(const Rational& b, long e) {
  Rational r = 1;
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

Rational binom(long n, long k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return Rational(r);
}

// Independent reference evaluator for a chip: pending children are scored
// by the oracle, so a rule is correct iff its local combination is.
Rational chip_value(const Session& sn, const ChipNode& n,
                    const DomainSizeAssignment& sizes);

Rational child_value(const Session& sn, const ChipChild& k,
                     const DomainSizeAssignment& sizes) {
  switch (k.kind) {
    case ChipChild::Pending:
      return oracle_count_pattern(sn, k.pending, sizes);
    case ChipChild::Node:
      return chip_value(sn, *k.node, sizes);
    default:
      throw std::runtime_error("existing node in chip evaluator");
  }
}

Rational chip_value(const Session& sn, const ChipNode& n,
                    const DomainSizeAssignment& sizes) {
  const FcgNode& p = n.proto;
  switch (p.kind) {
    case FcgNode::Top:
      return 1;
    case FcgNode::Bot:
      return grounding_count(sn, p.clause, sizes) == 0 ? 1 : 0;
    case FcgNode::Smooth: {
      const PredInfo& pi = sn.pred(p.clause.literals.at(0).pred);
      long c = pattern_count(sn, p.clause, sizes);
      return rpow(pi.weight_true + pi.weight_false, c);
    }
    case FcgNode::Unit: {
      const Literal& l = p.clause.literals.at(0);
      const PredInfo& pi = sn.pred(l.pred);
      long c = pattern_count(sn, literal_pattern(sn, p.clause, 0), sizes);
      std::vector<bool> in_lit(p.clause.num_vars(), false);
      for (const Term& t : l.args)
        if (t.is_var()) in_lit[t.var_index()] = true;
      bool forced = true;
      for (int v = 0; v < p.clause.num_vars(); ++v)
        if (!in_lit[v] && domain_size(sn, p.clause.var_domains[v], sizes) == 0)
          forced = false;
      if (!forced) return rpow(pi.weight_true + pi.weight_false, c);
      return rpow(l.positive ? pi.weight_true : pi.weight_false, c);
    }
    case FcgNode::Ground:
      return oracle_count_pattern(sn, p.formula, sizes);
    case FcgNode::And: {
      Rational r = 1;
      for (const ChipChild& k : n.kids) r *= child_value(sn, k, sizes);
      return r;
    }
    case FcgNode::Or: {
      Rational r = 0;
      for (const ChipChild& k : n.kids) r += child_value(sn, k, sizes);
      return r;
    }
    case FcgNode::Ie:
      return child_value(sn, n.kids.at(0), sizes) +
             child_value(sn, n.kids.at(1), sizes) -
             child_value(sn, n.kids.at(2), sizes);
    case FcgNode::SetAnd:
      return rpow(child_value(sn, n.kids.at(0), sizes),
                  domain_size(sn, p.dom, sizes));
    case FcgNode::SetOr: {
      long m = domain_size(sn, p.dom, sizes);
      const PredInfo& pi = sn.pred(p.counted_pred);
      Rational r = 0;
      for (long l = 0; l <= m; ++l) {
        DomainSizeAssignment s = sizes;
        s[p.dom_top] = l;
        s[p.dom_bot] = m - l;
        r += binom(m, l) * rpow(pi.weight_true, l) *
             rpow(pi.weight_false, m - l) * child_value(sn, n.kids.at(0), s);
      }
      return r;
    }
    case FcgNode::Gdr:
    case FcgNode::Cr:
      return child_value(sn, n.kids.at(0), sizes);
    default:
      throw std::runtime_error("unexpected chip node kind");
  }
}

const Formula* find_pending(const ChipNode& n) {
  for (const ChipChild& k : n.kids) {
    if (k.kind == ChipChild::Pending) return &k.pending;
    if (k.kind == ChipChild::Node)
      if (const Formula* f = find_pending(*k.node)) return f;
  }
  return nullptr;
}

// The running example: injectivity in both coordinates.
struct PartialInjection {
  Session sn;
  DomainId gamma, delta;
  PredId p;
  Formula f;

  PartialInjection() {
    gamma = sn.add_domain({"Gamma"});
    delta = sn.add_domain({"Delta"});
    p = sn.add_predicate({"p", {gamma, delta}});
    Clause row = mk({gamma, delta, delta},
                    {{p, false, {Term::var(0), Term::var(1)}},
                     {p, false, {Term::var(0), Term::var(2)}}},
                    {{1, Term::var(2)}});
    Clause col = mk({gamma, gamma, delta},
                    {{p, false, {Term::var(0), Term::var(2)}},
                     {p, false, {Term::var(1), Term::var(2)}}},
                    {{0, Term::var(1)}});
    f = mkf({row, col});
  }
};

void check_chip(const Session& sn, const Formula& f, const Chip& chip,
                const DomainSizeAssignment& sizes) {
  // Rules that pin a fresh element need the domain inhabited.
  if ((chip.root->proto.kind == FcgNode::Gdr ||
       chip.root->proto.kind == FcgNode::SetAnd ||
       chip.root->proto.kind == FcgNode::Cr) &&
      domain_size(sn, chip.root->proto.dom, sizes) < 1)
    return;
  Rational expect = oracle_count_pattern(sn, f, sizes);
  Rational got = chip_value(sn, *chip.root, sizes);
  INFO("rule " << chip.rule << " on\n" << to_string(sn, f));
  CHECK(got == expect);
}

// Small random clause-set generator over a fixed vocabulary.
struct Gen {
  std::mt19937 rng;
  Session sn;
  std::vector<DomainId> doms;
  std::vector<PredId> preds;
  std::vector<ConstId> consts;

  explicit Gen(unsigned seed, bool with_consts, bool mixed_weights)
      : rng(seed) {
    doms = {sn.add_domain({"A"}), sn.add_domain({"B"})};
    auto w = [&](PredInfo pi) {
      if (mixed_weights) {
        int pickt = std::uniform_int_distribution<int>(0, 2)(rng);
        int pickf = std::uniform_int_distribution<int>(0, 2)(rng);
        pi.weight_true = std::vector<Rational>{1, 2, Rational(1, 2)}[pickt];
        pi.weight_false = std::vector<Rational>{1, 3, -1}[pickf];
      }
      return pi;
    };
    preds.push_back(sn.add_predicate(w({"p", {doms[0]}})));
    preds.push_back(sn.add_predicate(w({"q", {doms[0], doms[1]}})));
    preds.push_back(sn.add_predicate(w({"r", {doms[1]}})));
    if (with_consts) consts.push_back(sn.fresh_constant(doms[0]));
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Clause clause() {
    Clause c;
    int nlits = 1 + pick(3);
    for (int i = 0; i < nlits; ++i) {
      PredId pr = preds[pick(static_cast<int>(preds.size()))];
      Literal l{pr, pick(2) == 0, {}};
      for (DomainId d : sn.pred(pr).signature) {
        // Reuse a variable of the right domain, make one, or use a constant.
        std::vector<int> fit;
        for (int v = 0; v < c.num_vars(); ++v)
          if (c.var_domains[v] == d) fit.push_back(v);
        int choice = pick(4);
        if (choice == 0 && !consts.empty() &&
            sn.constant(consts[0]).domain == d) {
          l.args.push_back(Term::constant(consts[0]));
        } else if (!fit.empty() && (choice <= 2 || c.num_vars() >= 3)) {
          l.args.push_back(Term::var(fit[pick(static_cast<int>(fit.size()))]));
        } else {
          l.args.push_back(Term::var(c.num_vars()));
          c.var_domains.push_back(d);
        }
      }
      c.literals.push_back(std::move(l));
    }
    // Random same-domain constraints.
    for (int u = 0; u < c.num_vars(); ++u)
      for (int v = u + 1; v < c.num_vars(); ++v)
        if (c.var_domains[u] == c.var_domains[v] && pick(4) == 0)
          c.constraints.push_back({u, Term::var(v)});
    if (!consts.empty())
      for (int v = 0; v < c.num_vars(); ++v)
        if (sn.constant(consts[0]).domain == c.var_domains[v] && pick(5) == 0)
          c.constraints.push_back({v, Term::constant(consts[0])});
    c.canonicalize();
    return c;
  }

  Formula formula() {
    std::vector<Clause> cs;
    int n = 1 + pick(3);
    for (int i = 0; i < n; ++i) cs.push_back(clause());
    Formula f = mkf(std::move(cs));
    if (auto d = drop_vacuous(f)) f = *d;
    return f;
  }

  DomainSizeAssignment sizes(long lo) {
    DomainSizeAssignment s;
    for (DomainId d : doms)
      s[d] = lo + pick(static_cast<int>(3 - lo));
    if (!consts.empty() && s[doms[0]] < 1) s[doms[0]] = 1;
    return s;
  }
};

}  // namespace

TEST_CASE("sink: empty formula compiles to top") {
  Session sn;
  auto chips = sink_rules(sn, {});
  REQUIRE(chips.size() == 1);
  CHECK(chips[0].root->proto.kind == FcgNode::Top);
  CHECK(chip_value(sn, *chips[0].root, {}) == 1);
}

TEST_CASE("sink: falsity leaves peel off with the right guard") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  Clause empty = mk({d, d}, {}, {{0, Term::var(1)}});
  Clause unit = mk({d}, {{p, true, {Term::var(0)}}});
  Formula f = mkf({empty, unit});
  auto chips = sink_rules(sn, f);
  REQUIRE(chips.size() == 1);
  CHECK(chips[0].rule == "bot");
  for (long n : {0L, 1L, 2L, 3L}) check_chip(sn, f, chips[0], {{d, n}});
}

TEST_CASE("sink: tautological clause drops with smoothing") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  PredId q = sn.add_predicate({"q", {d}});
  Clause taut = mk({d}, {{p, true, {Term::var(0)}}, {p, false, {Term::var(0)}}});
  Clause rest = mk({d}, {{q, true, {Term::var(0)}}});
  Formula f = mkf({taut, rest});
  auto chips = sink_rules(sn, f);
  REQUIRE(chips.size() == 1);
  CHECK(chips[0].rule == "tautology");
  // p's atoms are unconstrained: count must carry the 2^n factor.
  for (long n : {0L, 1L, 2L, 3L}) check_chip(sn, f, chips[0], {{d, n}});
}

TEST_CASE("sink: unit leaf with an unconstrained spectator variable") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  DomainId e = sn.add_domain({"E"});
  PredId p = sn.add_predicate({"p", {d}});
  Formula f = mkf({mk({d, e}, {{p, true, {Term::var(0)}}})});
  auto chips = sink_rules(sn, f);
  REQUIRE(chips.size() == 1);
  CHECK(chips[0].root->proto.kind == FcgNode::Unit);
  // With E empty the clause has no groundings: all 2^n models count.
  for (long n : {0L, 2L})
    for (long m : {0L, 1L, 2L})
      check_chip(sn, f, chips[0], {{d, n}, {e, m}});
  CHECK(chip_value(sn, *chips[0].root, {{d, 2}, {e, 0}}) == 4);
  CHECK(chip_value(sn, *chips[0].root, {{d, 2}, {e, 1}}) == 1);
}

TEST_CASE("sink: constrained spectator variables are refused") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  ConstId c = sn.fresh_constant(d);
  Formula f = mkf(
      {mk({d, d}, {{p, true, {Term::var(0)}}}, {{1, Term::constant(c)}})});
  CHECK(sink_rules(sn, f).empty());
}

TEST_CASE("independence splits predicate-disjoint clause groups") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  PredId q = sn.add_predicate({"q", {d}});
  PredId r = sn.add_predicate({"r", {d}});
  Formula f = mkf({mk({d}, {{p, true, {Term::var(0)}}, {q, false, {Term::var(0)}}}),
                   mk({d}, {{q, true, {Term::var(0)}}}),
                   mk({d}, {{r, true, {Term::var(0)}}})});
  auto chips = independence(sn, f);
  REQUIRE(chips.size() == 1);
  for (long n : {0L, 1L, 2L, 3L}) check_chip(sn, f, chips[0], {{d, n}});

  Formula joined = mkf({mk({d}, {{p, true, {Term::var(0)}}, {r, true, {Term::var(0)}}}),
                        mk({d}, {{r, false, {Term::var(0)}}})});
  CHECK(independence(sn, joined).empty());
}

TEST_CASE("unit propagation subsumes, falsifies, and smooths") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  PredId q = sn.add_predicate({"q", {d}});
  PredId r = sn.add_predicate({"r", {d}});
  Formula f = mkf({mk({d}, {{p, true, {Term::var(0)}}}),
                   mk({d}, {{p, false, {Term::var(0)}}, {q, true, {Term::var(0)}}}),
                   mk({d}, {{p, true, {Term::var(0)}}, {r, true, {Term::var(0)}}})});
  auto chips = unit_propagation(sn, f);
  REQUIRE(chips.size() == 1);
  const Formula* rest = find_pending(*chips[0].root);
  REQUIRE(rest);
  CHECK(*rest == mkf({mk({d}, {{q, true, {Term::var(0)}}})}));
  for (long n : {0L, 1L, 2L, 3L}) check_chip(sn, f, chips[0], {{d, n}});
}

TEST_CASE("unit propagation against a constrained unit") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  ConstId x = sn.fresh_constant(d);
  // p holds off x; the second clause is only pinned at x.
  Formula f = mkf({mk({d}, {{p, true, {Term::var(0)}}}, {{0, Term::constant(x)}}),
                   mk({}, {{p, false, {Term::constant(x)}}})});
  auto chips = unit_propagation(sn, f);
  REQUIRE(!chips.empty());
  for (long n : {1L, 2L, 3L}) check_chip(sn, f, chips[0], {{d, n}});
}

TEST_CASE("shannon branches on a ground atom") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  PredId q = sn.add_predicate({"q", {d}});
  ConstId c = sn.fresh_constant(d);
  Formula f = mkf(
      {mk({d}, {{p, true, {Term::constant(c)}}, {q, true, {Term::var(0)}}}),
       mk({d}, {{p, false, {Term::constant(c)}}, {q, false, {Term::var(0)}}},
          {{0, Term::constant(c)}})});
  // Not shattered: q(X) and q at c overlap? q occurrences are fine; p's
  // occurrences are the same ground atom, so the rule applies.
  auto chips = shannon(sn, f);
  REQUIRE(!chips.empty());
  CHECK(chips[0].root->proto.kind == FcgNode::Or);
  for (long n : {1L, 2L, 3L}) check_chip(sn, f, chips[0], {{d, n}});
}

TEST_CASE("independent partial grounding over a root variable") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  PredId q = sn.add_predicate({"q", {d}});
  Formula f = mkf({mk({d}, {{p, true, {Term::var(0)}}, {q, true, {Term::var(0)}}})});
  auto chips = independent_partial_grounding(sn, f);
  REQUIRE(chips.size() == 1);
  CHECK(chips[0].root->proto.kind == FcgNode::SetAnd);
  for (long n : {1L, 2L, 3L}) check_chip(sn, f, chips[0], {{d, n}});

  // A predicate whose key position is held by different variables in
  // different clauses cannot be grounded independently.
  Session sn2;
  DomainId e = sn2.add_domain({"E"});
  PredId s = sn2.add_predicate({"s", {e, e}});
  Formula g = mkf({mk({e, e}, {{s, true, {Term::var(0), Term::var(1)}},
                               {s, false, {Term::var(1), Term::var(0)}}})});
  CHECK(independent_partial_grounding(sn2, g).empty());
}

TEST_CASE("atom counting on a unary predicate") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  PredId q = sn.add_predicate({"q", {d, d}});
  Formula f = mkf({mk({d, d}, {{p, false, {Term::var(0)}},
                               {q, true, {Term::var(0), Term::var(1)}}})});
  auto chips = atom_counting(sn, f);
  REQUIRE(!chips.empty());
  CHECK(chips[0].root->proto.kind == FcgNode::SetOr);
  CHECK(chips[0].root->proto.counted_pred == p);
  for (long n : {0L, 1L, 2L, 3L}) check_chip(sn, f, chips[0], {{d, n}});
}

TEST_CASE("inclusion-exclusion splits a variable-disjoint clause") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  DomainId e = sn.add_domain({"E"});
  PredId a = sn.add_predicate({"a", {d}});
  PredId b = sn.add_predicate({"b", {e}});
  Formula f = mkf({mk({d, e}, {{a, true, {Term::var(0)}},
                               {b, true, {Term::var(1)}}})});
  auto chips = inclusion_exclusion(sn, f);
  REQUIRE(chips.size() == 1);
  CHECK(chips[0].root->proto.kind == FcgNode::Ie);
  for (long n : {0L, 1L, 2L})
    for (long m : {0L, 1L, 2L})
      check_chip(sn, f, chips[0], {{d, n}, {e, m}});
}

TEST_CASE("domain recursion expands to the five expected clauses") {
  PartialInjection pi;
  auto chips = gdr(pi.sn, pi.f);
  REQUIRE(chips.size() == 2);  // one per domain
  const Chip& cg = chips[0].root->proto.dom == pi.gamma ? chips[0] : chips[1];
  REQUIRE(cg.root->proto.dom == pi.gamma);
  const Formula* child = find_pending(*cg.root);
  REQUIRE(child);
  std::set<ConstId> cs = child->constants();
  REQUIRE(cs.size() == 1);
  Term x = Term::constant(*cs.begin());
  DomainId g = pi.gamma, dl = pi.delta;
  PredId p = pi.p;
  Formula expect = mkf({
      mk({dl, dl}, {{p, false, {x, Term::var(0)}}, {p, false, {x, Term::var(1)}}},
         {{0, Term::var(1)}}),
      mk({g, dl, dl},
         {{p, false, {Term::var(0), Term::var(1)}},
          {p, false, {Term::var(0), Term::var(2)}}},
         {{1, Term::var(2)}, {0, x}}),
      mk({g, g, dl},
         {{p, false, {Term::var(0), Term::var(2)}},
          {p, false, {Term::var(1), Term::var(2)}}},
         {{0, Term::var(1)}, {0, x}, {1, x}}),
      mk({g, dl}, {{p, false, {x, Term::var(1)}},
                   {p, false, {Term::var(0), Term::var(1)}}},
         {{0, x}}),
  });
  CHECK(child->size() == 4);  // two of the five coincide after renaming
  CHECK(*child == expect);
  for (long m : {1L, 2L})
    for (long n : {0L, 1L, 2L})
      check_chip(pi.sn, pi.f, cg, {{pi.gamma, m}, {pi.delta, n}});
}

TEST_CASE("constraint removal renames the remainder") {
  Session sn;
  DomainId g = sn.add_domain({"G"});
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {g, d}});
  ConstId x = sn.fresh_constant(g);
  Formula f = mkf({mk({g, g, d},
                      {{p, false, {Term::var(0), Term::var(2)}},
                       {p, false, {Term::var(1), Term::var(2)}}},
                      {{0, Term::var(1)},
                       {0, Term::constant(x)},
                       {1, Term::constant(x)}})});
  auto chips = constraint_removal(sn, f);
  REQUIRE(chips.size() == 1);
  DomainId shrunk = chips[0].root->proto.dom_new;
  CHECK(sn.domain(shrunk).kind == DomainKind::MinusOne);
  CHECK(sn.domain(shrunk).parent == g);
  const Formula* child = find_pending(*chips[0].root);
  REQUIRE(child);
  CHECK(*child == mkf({mk({shrunk, shrunk, d},
                          {{p, false, {Term::var(0), Term::var(2)}},
                           {p, false, {Term::var(1), Term::var(2)}}},
                          {{0, Term::var(1)}})}));
  for (long m : {1L, 2L, 3L})
    for (long n : {0L, 1L, 2L})
      check_chip(sn, f, chips[0], {{g, m}, {d, n}});

  // x still inside a literal blocks the rule.
  Formula bad = mkf({f.clauses[0],
                     mk({d}, {{p, true, {Term::constant(x), Term::var(0)}}})});
  CHECK(constraint_removal(sn, bad).empty());
}

TEST_CASE("shattering separates a pinned and a free occurrence") {
  Session sn;
  DomainId g = sn.add_domain({"G"});
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {g, d}});
  ConstId x = sn.fresh_constant(g);
  Formula f = mkf({mk({d}, {{p, true, {Term::constant(x), Term::var(0)}}}),
                   mk({g, d}, {{p, false, {Term::var(0), Term::var(1)}}})});
  auto sh = shatter(sn, f);
  REQUIRE(sh);
  Formula expect = mkf({f.clauses[0],
                        mk({d}, {{p, false, {Term::constant(x), Term::var(0)}}}),
                        mk({g, d}, {{p, false, {Term::var(0), Term::var(1)}}},
                           {{0, Term::constant(x)}})});
  CHECK(*sh == expect);
  for (long m : {1L, 2L})
    for (long n : {0L, 2L})
      CHECK(oracle_count_pattern(sn, f, {{g, m}, {d, n}}) ==
            oracle_count_pattern(sn, *sh, {{g, m}, {d, n}}));
  CHECK(!shatter(sn, *sh));
}

TEST_CASE("recursion identification finds the domain renaming") {
  PartialInjection pi;
  DomainId g2 = pi.sn.add_domain({"G2"});
  DomainId d2 = pi.sn.add_domain({"D2"});
  Formula renamed = pi.f;
  for (Clause& c : renamed.clauses)
    for (DomainId& d : c.var_domains) d = (d == pi.gamma) ? g2 : d2;
  renamed.normalize();
  auto rho = identify_recursion(pi.sn, renamed, pi.f);
  REQUIRE(rho);
  CHECK(*rho == DomainMapping{{pi.gamma, g2}, {pi.delta, d2}});

  // Polarity flip: no renaming exists.
  Formula flipped = renamed;
  for (Literal& l : flipped.clauses[0].literals) l.positive = true;
  flipped.normalize();
  CHECK(!identify_recursion(pi.sn, flipped, pi.f));
}

TEST_CASE("recursion identification is blocked by constant mismatch") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  ConstId a = sn.fresh_constant(d);
  ConstId b = sn.fresh_constant(d);
  Formula fa = mkf({mk({d}, {{p, true, {Term::var(0)}}}, {{0, Term::constant(a)}})});
  Formula fb = mkf({mk({d}, {{p, true, {Term::var(0)}}}, {{0, Term::constant(b)}})});
  CHECK(!identify_recursion(sn, fa, fb));
  CHECK(identify_recursion(sn, fa, fa));
}

TEST_CASE("partial injection pipeline closes the loop") {
  PartialInjection pi;
  Session& sn = pi.sn;
  Cache cache;
  cache.insert(sn, pi.f, 0);

  auto pick_dom = [](std::vector<Chip>& cs, DomainId d) -> Chip& {
    for (Chip& c : cs)
      if (c.root->proto.dom == d) return c;
    REQUIRE(false);
    return cs.front();
  };

  auto g1 = gdr(sn, pi.f);
  Chip& c1 = pick_dom(g1, pi.gamma);
  Formula f1 = *find_pending(*c1.root);

  auto g2 = atom_counting(sn, f1);
  REQUIRE(g2.size() == 1);
  CHECK(g2[0].root->proto.dom == pi.delta);
  Formula f2 = *find_pending(*g2[0].root);
  for (long m : {1L, 2L})
    for (long n : {0L, 1L, 2L})
      check_chip(sn, f1, g2[0], {{pi.gamma, m}, {pi.delta, n}});

  auto g3 = sink_rules(sn, f2);
  REQUIRE(g3.size() == 1);
  CHECK(g3[0].rule == "bot");
  Formula f3 = *find_pending(*g3[0].root);

  // The split is lazy, so the recursion clauses still range over the whole
  // counted domain until shattering refines them against the parts.
  auto sh = shatter(sn, f3);
  REQUIRE(sh);
  Formula f3s = *sh;

  auto g4 = unit_propagation(sn, f3s);
  REQUIRE(g4.size() == 1);
  Formula f4 = *find_pending(*g4[0].root);

  auto g5 = constraint_removal(sn, f4);
  REQUIRE(g5.size() == 1);
  CHECK(g5[0].root->proto.dom == pi.gamma);
  Formula f5 = *find_pending(*g5[0].root);

  auto g6 = try_cache(sn, f5, cache);
  REQUIRE(g6.size() == 1);
  CHECK(g6[0].root->proto.kind == FcgNode::Ref);
  CHECK(g6[0].root->kids.at(0).kind == ChipChild::Existing);
  CHECK(g6[0].root->kids.at(0).existing == 0);
  DomainMapping rho = g6[0].root->proto.rho;
  REQUIRE(rho.size() == 2);
  CHECK(sn.domain(rho[pi.gamma]).kind == DomainKind::MinusOne);
  CHECK(sn.domain(rho[pi.delta]).kind == DomainKind::PartBottom);

  // Theorem check for the reference step itself.
  for (long m : {1L, 2L, 3L})
    for (long n : {0L, 1L, 2L}) {
      DomainSizeAssignment outer{{pi.gamma, m}, {pi.delta, n}};
      DomainSizeAssignment inner{{pi.gamma, m + 1},
                                 {rho[pi.delta], n}};
      CHECK(oracle_count_pattern(sn, f5, inner) ==
            oracle_count_pattern(sn, pi.f, outer));
    }
}

TEST_CASE("gdr preserves counts on random formulas") {
  int checked = 0;
  for (unsigned seed = 0; seed < 40; ++seed) {
    Gen gen(seed, false, seed % 2 == 0);
    Formula f = gen.formula();
    auto chips = gdr(gen.sn, f);
    DomainSizeAssignment sizes = gen.sizes(1);
    for (const Chip& c : chips) {
      check_chip(gen.sn, f, c, sizes);
      ++checked;
    }
  }
  CHECK(checked > 30);
}

TEST_CASE("constraint removal preserves counts on random formulas") {
  int checked = 0;
  for (unsigned seed = 100; seed < 140; ++seed) {
    Gen gen(seed, false, seed % 2 == 0);
    Formula f = gen.formula();
    // Pin a fresh element away from every variable of one domain.
    DomainId dom = gen.doms[seed % 2];
    bool has = false;
    for (const Clause& c : f.clauses)
      for (DomainId d : c.var_domains) has |= d == dom;
    if (!has) continue;
    ConstId x = gen.sn.fresh_constant(dom);
    for (Clause& c : f.clauses) {
      for (int v = 0; v < c.num_vars(); ++v)
        if (c.var_domains[v] == dom)
          c.constraints.push_back({v, Term::constant(x)});
      c.canonicalize();
    }
    f.normalize();
    auto chips = constraint_removal(gen.sn, f);
    REQUIRE(!chips.empty());
    DomainSizeAssignment sizes = gen.sizes(1);
    for (const Chip& c : chips) {
      check_chip(gen.sn, f, c, sizes);
      ++checked;
    }
  }
  CHECK(checked > 25);
}

TEST_CASE("recursion references preserve counts on random formulas") {
  int found = 0;
  for (unsigned seed = 200; seed < 240; ++seed) {
    Gen gen(seed, false, seed % 2 == 0);
    Formula f = gen.formula();
    Session& sn = gen.sn;
    std::map<DomainId, DomainId> fresh;
    for (DomainId d : f.domains())
      fresh[d] = sn.add_domain({"R" + std::to_string(d)});
    Formula renamed = f;
    for (Clause& c : renamed.clauses)
      for (DomainId& d : c.var_domains) d = fresh[d];
    renamed.normalize();
    auto rho = identify_recursion(sn, renamed, f);
    REQUIRE(rho);
    ++found;
    DomainSizeAssignment outer;
    for (auto [old_d, new_d] : fresh)
      outer[new_d] = 1 + static_cast<long>(seed % 3);
    DomainSizeAssignment inner;
    for (auto [old_d, new_d] : *rho) inner[old_d] = outer.at(new_d);
    // Domains the renamed copy no longer mentions can be anything.
    for (DomainId d : gen.doms) {
      if (!inner.count(d)) inner[d] = 2;
    }
    CHECK(oracle_count_pattern(sn, renamed, outer) ==
          oracle_count_pattern(sn, f, inner));
  }
  CHECK(found == 40);
}

TEST_CASE("every rule preserves counts on random formulas") {
  int checked = 0;
  for (unsigned seed = 300; seed < 420; ++seed) {
    Gen gen(seed, seed % 3 == 0, seed % 2 == 1);
    Formula f = gen.formula();
    Session& sn = gen.sn;
    if (auto sh = shatter(sn, f)) {
      DomainSizeAssignment sizes = gen.sizes(gen.consts.empty() ? 0 : 1);
      CHECK(oracle_count_pattern(sn, f, sizes) ==
            oracle_count_pattern(sn, *sh, sizes));
      f = *sh;
    }
    DomainSizeAssignment sizes = gen.sizes(gen.consts.empty() ? 0 : 1);
    std::vector<std::vector<Chip>> all;
    all.push_back(sink_rules(sn, f));
    all.push_back(independence(sn, f));
    all.push_back(unit_propagation(sn, f));
    all.push_back(shannon(sn, f));
    all.push_back(independent_partial_grounding(sn, f));
    all.push_back(atom_counting(sn, f));
    all.push_back(inclusion_exclusion(sn, f));
    all.push_back(gdr(sn, f));
    all.push_back(constraint_removal(sn, f));
    all.push_back(ground_fallback(sn, f));
    for (auto& chips : all)
      for (const Chip& c : chips) {
        check_chip(sn, f, c, sizes);
        ++checked;
      }
  }
  CHECK(checked > 400);
}
