#pragma once

#include "liftcount/expr.hpp"
#include "liftcount/oracle.hpp"

namespace liftcount {

struct EvalStats {
  long entries = 0;  // final memo size
  long hits = 0;
  long misses = 0;
};

struct EvalOptions {
  OracleOptions oracle;  // cap for base-case and ground-leaf enumeration
  bool memo = true;
};

/// Run the entry function (defs.front()) at the given root-domain sizes.
/// Calls memoize per (function, argument tuple); a call where any guarded
/// parameter is zero is answered by the grounding oracle on the function's
/// origin formula. Exact arithmetic throughout.
Rational evaluate(const Session& sn, const std::vector<FunctionDef>& defs,
                  const DomainSizeAssignment& sizes,
                  EvalStats* stats = nullptr, const EvalOptions& opts = {});

}  // namespace liftcount
