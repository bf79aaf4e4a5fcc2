#pragma once

#include <map>
#include <optional>
#include <vector>

#include "liftcount/fcg.hpp"
#include "liftcount/formula.hpp"

namespace liftcount {

/// Cache of (possibly incompletely compiled) formulas by structural hash.
/// Entries are kept in insertion order per bucket; the first recursion
/// match wins.
struct Cache {
  std::map<uint64_t, std::vector<std::pair<Formula, int>>> buckets;

  void insert(const Session& sn, Formula f, int node) {
    buckets[formula_hash(sn, f)].emplace_back(std::move(f), node);
  }
};

using DomainMapping = std::map<DomainId, DomainId>;

/// Every rule maps a formula to the chips it can produce (empty when the
/// rule does not apply). Rules that introduce symbols (constants, domains)
/// mutate the session; symbol creation is append-only, so chips from
/// abandoned search branches just leave unused symbols behind.
///
/// The value contract: each node's count is the weighted model count of its
/// formula over the formula's own atom-pattern universe. Rules whose
/// branches mention fewer atoms than the parent insert Smooth leaves for
/// the missing patterns.

std::vector<Chip> sink_rules(Session& sn, const Formula& f);
std::vector<Chip> independence(Session& sn, const Formula& f);
std::vector<Chip> unit_propagation(Session& sn, const Formula& f);
std::vector<Chip> shannon(Session& sn, const Formula& f);
std::vector<Chip> independent_partial_grounding(Session& sn, const Formula& f);
std::vector<Chip> atom_counting(Session& sn, const Formula& f);
std::vector<Chip> inclusion_exclusion(Session& sn, const Formula& f);
std::vector<Chip> gdr(Session& sn, const Formula& f);
std::vector<Chip> constraint_removal(Session& sn, const Formula& f);
std::vector<Chip> try_cache(const Session& sn, const Formula& f,
                            const Cache& cache);
std::vector<Chip> ground_fallback(const Session& sn, const Formula& f);

/// Shattering is a formula rewrite, not a graph node: splits clauses until
/// any two atoms of the same predicate are equal or disjoint. Returns the
/// rewritten formula if anything changed.
std::optional<Formula> shatter(Session& sn, const Formula& f);

/// Drop vacuous clauses (their constraints can never hold, so they are
/// always satisfied and contribute no atoms). Returns the result if
/// anything changed.
std::optional<Formula> drop_vacuous(const Formula& f);

/// Recursion detection: a total map rho over Doms(psi) such that psi with
/// domains renamed by rho equals phi, or nullopt.
std::optional<DomainMapping> identify_recursion(const Session& sn,
                                                const Formula& phi,
                                                const Formula& psi,
                                                DomainMapping rho = {});

/// All clause-level domain maps gamma : Doms(c) -> Doms(d) witnessed by a
/// variable bijection making c syntactically equal to d, consistent with
/// rho; earliest-first, deduplicated.
std::vector<DomainMapping> generate_maps(const Session& sn, const Clause& c,
                                         const Clause& d,
                                         const DomainMapping& rho);

}  // namespace liftcount
