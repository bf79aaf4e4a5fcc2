#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "liftcount/fcg.hpp"
#include "liftcount/formula.hpp"

namespace liftcount {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable algebraic expression over domain-size parameters. Add/Mul are
/// n-ary; Sub/Pow/Binom/Lt/Eq binary; Sum binds `name` over 0..kids[0] with
/// body kids[1]; Call names a function definition. Count/Oracle are the
/// symbolic leaves whose value needs the logic layer: the grounding count of
/// a clause and the brute-force count of a formula, each under an explicit
/// domain-size environment (domains not in the environment resolve through
/// their parents).
struct Expr {
  enum Kind {
    Const, Param, Add, Sub, Mul, Pow, Sum, Binom, Lt, Eq,
    Count, Oracle, Call
  };
  Kind kind = Const;
  Rational value;             // Const
  std::string name;           // Param, Sum (bound var), Call (function)
  std::vector<ExprPtr> kids;  // operands / Call args / Sum {upper, body}
  Clause clause;              // Count
  Formula formula;            // Oracle
  std::map<DomainId, ExprPtr> env;  // Count/Oracle domain sizes
};

ExprPtr num(const Rational& v);
ExprPtr num(long v);
ExprPtr param(const std::string& name);
ExprPtr add(std::vector<ExprPtr> kids);   // empty -> 0, singleton unwrapped
ExprPtr mul(std::vector<ExprPtr> kids);   // empty -> 1, singleton unwrapped
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr pow_expr(ExprPtr base, ExprPtr exp);
ExprPtr sum_expr(const std::string& var, ExprPtr upper, ExprPtr body);
ExprPtr binom(ExprPtr n, ExprPtr k);
ExprPtr lt(ExprPtr a, ExprPtr b);
ExprPtr eq(ExprPtr a, ExprPtr b);
ExprPtr count_leaf(Clause c, std::map<DomainId, ExprPtr> env);
ExprPtr oracle_leaf(Formula f, std::map<DomainId, ExprPtr> env);
ExprPtr call(const std::string& fn, std::vector<ExprPtr> args);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// Replace every free occurrence of parameter `name` (a Sum binding the same
/// name shadows it), including inside leaf environments.
ExprPtr substitute_param(const ExprPtr& e, const std::string& name,
                         const ExprPtr& with);

/// One function of the emitted program. `doms` lists the domains behind the
/// parameters, in the fixed total domain order; `formula` is the origin
/// node's formula (the base-case oracle evaluates it); `guard_params` are
/// the parameter indices recursed on by a domain-recursion node in the body
/// -- a call where any of them is zero is a base case.
struct FunctionDef {
  std::string name;
  std::vector<std::string> params;
  std::vector<DomainId> doms;
  ExprPtr body;
  int origin = -1;
  Formula formula;
  std::vector<int> guard_params;
};

/// Convert a complete graph into function definitions, entry point first.
/// Functions are the source plus every Ref target; all other nodes inline.
std::vector<FunctionDef> interpret(const Session& sn, const Fcg& g);

/// Conservative algebraic rewriting: constant folding, unit laws, binomial
/// special cases, and the truncation of sums against [var < K] factors.
/// Preserves the value at every non-negative parameter assignment.
ExprPtr simplify(const ExprPtr& e);
std::vector<FunctionDef> simplify(std::vector<FunctionDef> defs);

std::string to_string(const Session& sn, const ExprPtr& e);
std::string to_string(const Session& sn, const FunctionDef& def);
std::string to_string(const Session& sn, const std::vector<FunctionDef>& defs);

/// Throws std::logic_error if any parameter occurrence is unbound (not a
/// function parameter or an enclosing sum's variable).
void scope_check(const std::vector<FunctionDef>& defs);

}  // namespace liftcount
