#pragma once

#include <vector>

#include "liftcount/formula.hpp"

namespace liftcount {

struct OracleOptions {
  int max_atoms = 24;  // enumeration is 2^atoms; refuse beyond this
};

/// Brute-force weighted model count of f over an explicit atom universe
/// given as a list of disjoint patterns: enumerates every subset of the
/// ground atoms, checks every grounding of every clause, and sums the
/// per-predicate weight products of satisfying subsets. Exact arithmetic.
Rational oracle_count(const Session& sn, const Formula& f,
                      const DomainSizeAssignment& sizes,
                      const std::vector<Clause>& universe,
                      const OracleOptions& opts = {});

/// Same, with the universe spanning the full signature of the given
/// predicates (the model-theoretic count of a declared problem).
Rational oracle_count_full(const Session& sn, const Formula& f,
                           const DomainSizeAssignment& sizes,
                           const std::vector<PredId>& preds,
                           const OracleOptions& opts = {});

/// Same, with the universe derived from the formula's own atom patterns
/// (the semantics attached to interior compilation nodes; used for base
/// cases).
Rational oracle_count_pattern(const Session& sn, const Formula& f,
                              const DomainSizeAssignment& sizes,
                              const OracleOptions& opts = {});

}  // namespace liftcount
