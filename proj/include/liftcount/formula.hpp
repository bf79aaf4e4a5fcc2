#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "liftcount/symbols.hpp"

namespace liftcount {

/// A term is either a clause-local variable (canonical index) or a constant.
struct Term {
  int32_t code;  // var i -> i, constant c -> -(c + 1)

  static Term var(int i) { return Term{i}; }
  static Term constant(ConstId c) { return Term{-(c + 1)}; }
  bool is_var() const { return code >= 0; }
  bool is_const() const { return code < 0; }
  int var_index() const { return code; }
  ConstId const_id() const { return -code - 1; }
  bool operator==(const Term&) const = default;
  auto operator<=>(const Term&) const = default;
};

struct Literal {
  PredId pred;
  bool positive;
  std::vector<Term> args;
  bool operator==(const Literal&) const = default;
  auto operator<=>(const Literal&) const = default;
};

/// Inequality constraint: var != other. Var-var constraints are stored with
/// var < other.var_index().
struct Constraint {
  int var;
  Term other;
  bool operator==(const Constraint&) const = default;
  auto operator<=>(const Constraint&) const = default;
};

/// A clause in the paper sense: literals, inequality constraints, and a
/// total variable-to-domain map. Variables are canonical indices; after
/// canonicalize(), equality up to renaming is plain structural equality.
struct Clause {
  std::vector<Literal> literals;
  std::vector<Constraint> constraints;
  std::vector<DomainId> var_domains;  // indexed by variable

  int num_vars() const { return static_cast<int>(var_domains.size()); }

  /// True if some constraint can never hold (same term on both sides),
  /// making the clause vacuously satisfied.
  bool vacuous() const;

  /// True if the literal set contains a complementary pair.
  bool tautological() const;

  void canonicalize();
  std::vector<int64_t> encode() const;

  bool operator==(const Clause& o) const { return encode() == o.encode(); }
  bool operator<(const Clause& o) const { return encode() < o.encode(); }
};

/// A set of canonical clauses, kept sorted and deduplicated.
struct Formula {
  std::vector<Clause> clauses;

  void normalize();  // canonicalize clauses, sort, dedupe
  bool empty() const { return clauses.empty(); }
  int size() const { return static_cast<int>(clauses.size()); }
  bool operator==(const Formula&) const = default;

  std::set<PredId> preds() const;
  std::set<DomainId> domains() const;  // from domain maps only
  std::set<ConstId> constants() const;
};

/// Replace every variable in V by term x (removing those variables from the
/// domain map). Throws on domain mismatch when x is a constant.
Clause substitute(const Session& sn, const Clause& c, Term x,
                  const std::set<int>& V);

/// Structural hash of §-style components: constants, predicates, literal
/// polarities, constraint count, variable count. Domains deliberately
/// excluded so formulas differing only in domains collide.
uint64_t clause_hash(const Session& sn, const Clause& c);
uint64_t formula_hash(const Session& sn, const Formula& f);

std::string to_string(const Session& sn, const Term& t, const Clause& c);
std::string to_string(const Session& sn, const Clause& c);
std::string to_string(const Session& sn, const Formula& f);

}  // namespace liftcount
