#include "doctest.h"
#include "liftcount/formula.hpp"

using namespace liftcount;

namespace {

struct Fixture {
  Session sn;
  DomainId gamma, delta;
  PredId p;

  Fixture() {
    gamma = sn.add_domain({"Gamma"});
    delta = sn.add_domain({"Delta"});
    p = sn.add_predicate({"p", {gamma, delta}});
  }

  // Y != Z => ~p(X,Y) | ~p(X,Z), X in Gamma, Y,Z in Delta
  Clause c1() const {
    Clause c;
    c.literals = {{p, false, {Term::var(0), Term::var(1)}},
                  {p, false, {Term::var(0), Term::var(2)}}};
    c.constraints = {{1, Term::var(2)}};
    c.var_domains = {gamma, delta, delta};
    return c;
  }

  // X != Z => ~p(X,Y) | ~p(Z,Y), X,Z in Gamma, Y in Delta
  Clause c2() const {
    Clause c;
    c.literals = {{p, false, {Term::var(0), Term::var(1)}},
                  {p, false, {Term::var(2), Term::var(1)}}};
    c.constraints = {{0, Term::var(2)}};
    c.var_domains = {gamma, delta, gamma};
    return c;
  }
};

}  // namespace

TEST_CASE("substitute a constant for one variable") {
  Fixture fx;
  ConstId x = fx.sn.fresh_constant(fx.gamma);
  Clause got = substitute(fx.sn, fx.c1(), Term::constant(x), {0});
  REQUIRE(got.num_vars() == 2);
  CHECK(got.var_domains == std::vector<DomainId>{fx.delta, fx.delta});
  REQUIRE(got.literals.size() == 2);
  CHECK(got.literals[0].args[0] == Term::constant(x));
  CHECK(got.literals[1].args[0] == Term::constant(x));
  CHECK(got.literals[0].args[1] == Term::var(0));
  CHECK(got.literals[1].args[1] == Term::var(1));
  REQUIRE(got.constraints.size() == 1);
  CHECK(got.constraints[0] == Constraint{0, Term::var(1)});
}

TEST_CASE("empty substitution is the identity") {
  Fixture fx;
  ConstId x = fx.sn.fresh_constant(fx.gamma);
  Clause c = fx.c1();
  CHECK(substitute(fx.sn, c, Term::constant(x), {}) == c);
}

TEST_CASE("substituting all variables yields a ground clause") {
  Fixture fx;
  ConstId g = fx.sn.fresh_constant(fx.gamma);
  Clause c;
  c.literals = {{fx.p, true, {Term::var(0), Term::var(1)}}};
  c.var_domains = {fx.gamma, fx.delta};
  ConstId d = fx.sn.fresh_constant(fx.delta);
  Clause half = substitute(fx.sn, c, Term::constant(g), {0});
  Clause ground = substitute(fx.sn, half, Term::constant(d), {0});
  CHECK(ground.num_vars() == 0);
  CHECK(ground.literals[0].args ==
        std::vector<Term>{Term::constant(g), Term::constant(d)});
}

TEST_CASE("substitute rejects a constant of the wrong domain") {
  Fixture fx;
  ConstId d = fx.sn.fresh_constant(fx.delta);
  CHECK_THROWS(substitute(fx.sn, fx.c1(), Term::constant(d), {0}));
}

TEST_CASE("canonicalization makes renamings structurally equal") {
  Fixture fx;
  Clause a = fx.c1();
  // Same clause with Y and Z swapped (vars 1 and 2).
  Clause b;
  b.literals = {{fx.p, false, {Term::var(0), Term::var(2)}},
                {fx.p, false, {Term::var(0), Term::var(1)}}};
  b.constraints = {{1, Term::var(2)}};
  b.var_domains = {fx.gamma, fx.delta, fx.delta};
  a.canonicalize();
  b.canonicalize();
  CHECK(a == b);
}

TEST_CASE("clause hashes are renaming invariant") {
  Fixture fx;
  Clause a = fx.c1();
  Clause b;
  b.literals = {{fx.p, false, {Term::var(0), Term::var(2)}},
                {fx.p, false, {Term::var(0), Term::var(1)}}};
  b.constraints = {{1, Term::var(2)}};
  b.var_domains = {fx.gamma, fx.delta, fx.delta};
  CHECK(clause_hash(fx.sn, a) == clause_hash(fx.sn, b));
}

TEST_CASE("clauses sharing all six hash components collide") {
  // c1 and c2: no constants, predicate set {p}, 0 positive, 2 negative
  // literals, one constraint, three variables. Domains are excluded from
  // the hash, so these must collide.
  Fixture fx;
  CHECK(clause_hash(fx.sn, fx.c1()) == clause_hash(fx.sn, fx.c2()));
}

TEST_CASE("hash ignores domains") {
  Fixture fx;
  Clause a = fx.c1();
  Clause b = fx.c1();
  DomainId gp = fx.sn.fresh_minus_one_domain(fx.gamma, fx.sn.fresh_constant(fx.gamma));
  b.var_domains[0] = gp;
  CHECK(clause_hash(fx.sn, a) == clause_hash(fx.sn, b));
}

TEST_CASE("polarity flip changes the hash") {
  Fixture fx;
  Clause a = fx.c1();
  Clause b = fx.c1();
  b.literals[0].positive = true;
  CHECK(clause_hash(fx.sn, a) != clause_hash(fx.sn, b));
}

TEST_CASE("formula hash is order invariant with identity 0") {
  Fixture fx;
  Formula f1, f2, empty;
  f1.clauses = {fx.c1(), fx.c2()};
  f2.clauses = {fx.c2(), fx.c1()};
  CHECK(formula_hash(fx.sn, f1) == formula_hash(fx.sn, f2));
  CHECK(formula_hash(fx.sn, empty) == 0);
}

TEST_CASE("normalize dedupes clauses equal up to renaming") {
  Fixture fx;
  Clause b;
  b.literals = {{fx.p, false, {Term::var(0), Term::var(2)}},
                {fx.p, false, {Term::var(0), Term::var(1)}}};
  b.constraints = {{1, Term::var(2)}};
  b.var_domains = {fx.gamma, fx.delta, fx.delta};
  Formula f;
  f.clauses = {fx.c1(), b};
  f.normalize();
  CHECK(f.size() == 1);
}

TEST_CASE("vacuous and tautological detection") {
  Fixture fx;
  Clause c;
  c.literals = {{fx.p, true, {Term::var(0), Term::var(1)}},
                {fx.p, false, {Term::var(0), Term::var(1)}}};
  c.var_domains = {fx.gamma, fx.delta};
  CHECK(c.tautological());
  CHECK(!c.vacuous());

  Clause v;
  v.literals = {{fx.p, true, {Term::var(0), Term::var(1)}}};
  v.constraints = {{0, Term::var(0)}};
  v.var_domains = {fx.gamma, fx.delta};
  CHECK(v.vacuous());
}

TEST_CASE("pretty printer renders paper notation") {
  Fixture fx;
  std::string s = to_string(fx.sn, fx.c1());
  CHECK(s.find("p(") != std::string::npos);
  CHECK(s.find("Gamma") != std::string::npos);
  CHECK(s.find("≠") != std::string::npos);
}
