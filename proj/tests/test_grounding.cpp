#include "doctest.h"
#include "liftcount/grounding.hpp"

using namespace liftcount;

TEST_CASE("constrained pair over a size-1 domain has no groundings") {
  Session sn;
  DomainId delta = sn.add_domain({"Delta"});
  auto [top, bot] = sn.fresh_partition(delta);
  (void)bot;
  Clause c;
  c.constraints = {{0, Term::var(1)}};
  c.var_domains = {top, top};
  DomainSizeAssignment sizes{{top, 1}};
  CHECK(grounding_count(sn, c, sizes) == 0);
  sizes[top] = 2;
  CHECK(grounding_count(sn, c, sizes) == 2);
}

TEST_CASE("ground clause has exactly one grounding") {
  Session sn;
  Clause c;
  CHECK(grounding_count(sn, c, {}) == 1);
}

TEST_CASE("mixed-domain clause with one constraint") {
  Session sn;
  DomainId gamma = sn.add_domain({"Gamma"});
  DomainId delta = sn.add_domain({"Delta"});
  Clause c;
  c.constraints = {{1, Term::var(2)}};
  c.var_domains = {gamma, delta, delta};
  DomainSizeAssignment sizes{{gamma, 3}, {delta, 4}};
  CHECK(grounding_count(sn, c, sizes) == 3 * 4 * 3);
}

TEST_CASE("same-domain pair with X != Y counts l(l-1)") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  Clause c;
  c.constraints = {{0, Term::var(1)}};
  c.var_domains = {d, d};
  for (long l = 0; l <= 4; ++l)
    CHECK(grounding_count(sn, c, {{d, l}}) == l * (l - 1 > 0 ? l - 1 : 0));
}

TEST_CASE("variable-constant constraints exclude one element") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  ConstId x = sn.fresh_constant(d);
  Clause c;
  c.constraints = {{0, Term::constant(x)}};
  c.var_domains = {d};
  CHECK(grounding_count(sn, c, {{d, 3}}) == 2);
}

TEST_CASE("minus-one domain derives its size from the parent") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  ConstId x = sn.fresh_constant(d);
  DomainId dp = sn.fresh_minus_one_domain(d, x);
  DomainSizeAssignment sizes{{d, 5}};
  CHECK(domain_size(sn, dp, sizes) == 4);
  Clause c;
  c.var_domains = {dp};
  CHECK(grounding_count(sn, c, sizes) == 4);
}

TEST_CASE("minus-one elements never include the excluded constant") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  ConstId x = sn.fresh_constant(d);
  DomainId dp = sn.fresh_minus_one_domain(d, x);
  ElementUniverse u = build_universe(sn, {d, dp}, {{d, 3}});
  CHECK(u.elems[d].size() == 3);
  CHECK(u.elems[dp].size() == 2);
  for (long e : u.elems[dp]) CHECK(e != u.const_elem(x));
}

TEST_CASE("unsized root domain is an error") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  Clause c;
  c.var_domains = {d};
  CHECK_THROWS(grounding_count(sn, c, {}));
}

TEST_CASE("vacuous clause has zero groundings") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  Clause c;
  c.constraints = {{0, Term::var(0)}};
  c.var_domains = {d};
  CHECK(grounding_count(sn, c, {{d, 3}}) == 0);
}

TEST_CASE("predicate grounding counts multiply signature sizes") {
  Session sn;
  DomainId gamma = sn.add_domain({"Gamma"});
  DomainId delta = sn.add_domain({"Delta"});
  PredId p = sn.add_predicate({"p", {gamma, delta}});
  PredId q = sn.add_predicate({"q", {delta, delta}});
  PredId r = sn.add_predicate({"r", {}});
  DomainSizeAssignment sizes{{gamma, 2}, {delta, 3}};
  CHECK(predicate_grounding_count(sn, p, sizes) == 6);
  CHECK(predicate_grounding_count(sn, q, sizes) == 9);
  CHECK(predicate_grounding_count(sn, r, sizes) == 1);
}

TEST_CASE("substitution commutes with grounding enumeration") {
  // The ground instances of substitute(c, x, {X}) are exactly the ground
  // instances of c whose X-slot is x.
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d, d}});
  ConstId x = sn.fresh_constant(d);
  Clause c;
  c.literals = {{p, true, {Term::var(0), Term::var(1)}}};
  c.constraints = {{0, Term::var(1)}};
  c.var_domains = {d, d};
  DomainSizeAssignment sizes{{d, 3}};
  ElementUniverse u = build_universe(sn, {d}, sizes, {x});

  std::set<long> kept;
  for_each_grounding(sn, c, u, [&](const std::vector<long>& a) {
    if (a[0] == u.const_elem(x)) kept.insert(a[1]);
  });

  Clause sub = substitute(sn, c, Term::constant(x), {0});
  std::set<long> direct;
  for_each_grounding(sn, sub, u, [&](const std::vector<long>& a) {
    direct.insert(a[0]);
  });
  CHECK(kept == direct);
}
