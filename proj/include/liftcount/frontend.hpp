#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "liftcount/formula.hpp"

namespace liftcount {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) +
                           ": " + msg),
        line(line_),
        col(col_) {}
};

struct Ast;
using AstPtr = std::unique_ptr<Ast>;

struct Ast {
  enum Kind { Atom, Eq, Not, And, Or, Implies, Iff } kind;
  // Atom: pred + args (uppercase-initial = variable, else constant).
  // Eq: args = {lhs, rhs}; `negated` distinguishes != (stored unnegated
  // under Not like any other subformula would be).
  std::string pred;
  std::vector<std::string> args;
  std::vector<AstPtr> kids;
  int line = 0, col = 0;
};

struct Quantifier {
  bool universal;
  std::vector<std::string> vars;
  std::string domain;
  int line = 0, col = 0;
};

struct Sentence {
  std::vector<Quantifier> prefix;
  AstPtr body;
};

struct PredDecl {
  std::string name;
  std::vector<std::string> domains;
  Rational weight_true = 1;
  Rational weight_false = 1;
  int line = 0;
};

struct ProblemFile {
  std::vector<std::string> domains;
  std::vector<PredDecl> preds;
  std::vector<Sentence> sentences;
};

ProblemFile parse(const std::string& text);

inline bool is_variable_name(const std::string& s) {
  return !s.empty() && s[0] >= 'A' && s[0] <= 'Z';
}

/// A normalized problem: symbol tables, the clausal formula, and the
/// declared predicates whose full atom universes the final count ranges
/// over (user predicates plus any Skolem predicates).
struct Problem {
  Session sn;
  Formula f;
  std::vector<PredId> declared;
};

/// Clausal normalization: connective expansion, CNF, equality elimination,
/// Skolemization of the one supported existential shape.
Problem normalize(const ProblemFile& pf);

}  // namespace liftcount
