#pragma once

#include <functional>
#include <map>
#include <set>
#include <vector>

#include "liftcount/formula.hpp"
#include "liftcount/symbols.hpp"

namespace liftcount {

/// Concrete element sets for a collection of domains. Named constants occupy
/// fixed element ids (their ConstId); anonymous elements get fresh ids.
struct ElementUniverse {
  std::map<DomainId, std::vector<long>> elems;
  long const_elem(ConstId c) const { return c; }
};

/// Resolve element sets for `needed` domains. Sizes must be given for every
/// domain that cannot be derived from a sized ancestor via parent links.
/// Only `referenced` constants are pinned to elements (plus any constant a
/// derived domain excludes); the session may hold constants from other
/// formulas that must not eat into small domains.
ElementUniverse build_universe(const Session& sn,
                               const std::set<DomainId>& needed,
                               const DomainSizeAssignment& sizes,
                               const std::set<ConstId>& referenced = {});

/// Size of a domain under sizes (derived sizes computed from the parent).
long domain_size(const Session& sn, DomainId d,
                 const DomainSizeAssignment& sizes);

/// Number of assignments of the clause's variables to domain elements that
/// satisfy all inequality constraints.
long grounding_count(const Session& sn, const Clause& c,
                     const DomainSizeAssignment& sizes);

/// Product of sizes over the predicate's signature domains.
long predicate_grounding_count(const Session& sn, PredId p,
                               const DomainSizeAssignment& sizes);

/// Enumerate all constraint-satisfying variable assignments of a clause over
/// the given universe. The callback receives elements indexed by variable.
void for_each_grounding(const Session& sn, const Clause& c,
                        const ElementUniverse& u,
                        const std::function<void(const std::vector<long>&)>& f);

}  // namespace liftcount
