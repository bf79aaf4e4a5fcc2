#pragma once

#include <optional>
#include <vector>

#include "liftcount/formula.hpp"

namespace liftcount {

/// An atom pattern is a clause with exactly one positive literal and no
/// other literals: it denotes the set of ground atoms obtained by grounding
/// the literal subject to the constraints. Patterns drive smoothing (which
/// ground atoms a subgraph "mentions") and the subset tests behind unit
/// propagation.
///
/// Domains are compared through the domain tree: a derived domain is a
/// subset of its parent, partition halves are disjoint, and unrelated
/// derived domains (two independent splits of one parent) compare as
/// Ambiguous. A domain may co-occur with its own descendants in one
/// formula; shattering refines overlapping occurrences apart.

/// How the atom sets of two patterns relate, as far as can be decided.
enum class PatternRelation {
  Subset,    ///< a ⊆ b for every size assignment
  Disjoint,  ///< a ∩ b = ∅ for every size assignment
  Overlap,   ///< neither; a can be split into comparable pieces
  Ambiguous  ///< membership of a constant in a partition domain is unknown
};

PatternRelation pattern_relation(const Session& sn, const Clause& a,
                                 const Clause& b);

inline bool pattern_subset(const Session& sn, const Clause& a,
                           const Clause& b) {
  return pattern_relation(sn, a, b) == PatternRelation::Subset;
}
inline bool pattern_disjoint(const Session& sn, const Clause& a,
                             const Clause& b) {
  return pattern_relation(sn, a, b) == PatternRelation::Disjoint;
}

/// Atoms of a not covered by any pattern in bs, as a disjoint pattern set.
/// Throws on an Ambiguous relation.
std::vector<Clause> pattern_difference(const Session& sn, const Clause& a,
                                       const std::vector<Clause>& bs);

/// Rewrite a pattern list into an equivalent pairwise-disjoint one
/// (deterministic given input order).
std::vector<Clause> disjointify(const Session& sn, std::vector<Clause> ps);

/// The atom universe of a formula: one pattern per literal occurrence with
/// the clause constraints projected onto the literal's variables, made
/// disjoint. This is the set of ground atoms the formula's count ranges
/// over; rules compare parent and child universes to insert smoothing.
std::vector<Clause> atom_patterns(const Session& sn, const Formula& f);

/// Single pattern for one literal occurrence (projected constraints).
Clause literal_pattern(const Session& sn, const Clause& c, size_t lit);

/// The full pattern p(X1, ..., Xk) over the predicate's signature.
Clause predicate_pattern(const Session& sn, PredId p);

/// Patterns in `big` not covered by `small` (both assumed disjoint sets).
std::vector<Clause> universe_difference(const Session& sn,
                                        const std::vector<Clause>& big,
                                        const std::vector<Clause>& small);

/// Number of ground atoms a pattern denotes at concrete sizes.
long pattern_count(const Session& sn, const Clause& p,
                   const DomainSizeAssignment& sizes);

/// Rename clause variable u to v and compact the numbering (canonicalizes).
Clause merge_clause_vars(const Clause& c, int u, int v);

/// A clause refinement in the clause's own variables: specialize var to
/// target (a constant or another variable) or constrain it away, or — when
/// refine is set — retype var one step down the domain tree and keep the
/// complementary piece.
struct ShatterSplit {
  int var;
  Term target{0};
  DomainId refine = -1;
};

/// If the pattern of literal `lit` of c overlaps `b` without being a subset
/// of it or disjoint from it, a discriminating split; nullopt otherwise
/// (including the ambiguous case, which cannot be split syntactically).
std::optional<ShatterSplit> shatter_split(const Session& sn, const Clause& c,
                                          size_t lit, const Clause& b);

/// The (up to two) refinements of c under the split; vacuous pieces dropped.
std::vector<Clause> split_clause(const Session& sn, const Clause& c,
                                 const ShatterSplit& s);

}  // namespace liftcount
