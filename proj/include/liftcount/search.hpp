#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liftcount/fcg.hpp"
#include "liftcount/rules.hpp"

namespace liftcount {

struct SearchConfig {
  enum Mode { Greedy, Hybrid };
  Mode mode = Hybrid;
  int max_depth = 6;      // non-greedy expansions along one derivation path
  int max_solutions = 5;  // hybrid stops after this many complete graphs
  int max_steps = 10000;  // rule applications (greedy) / states (hybrid)
  bool allow_ground_fallback = false;  // greedy-mode last resort (non-lifted)
  std::vector<std::string> order;      // empty means default_rule_order()
  // One call per rule application: depth, rule name, formula hash.
  std::function<void(int, const std::string&, uint64_t)> trace;
};

std::vector<std::string> default_rule_order();

struct CompilationError : std::runtime_error {
  Formula stuck;
  CompilationError(const std::string& msg, Formula f)
      : std::runtime_error(msg), stuck(std::move(f)) {}
};

/// Apply the first applicable rule (in configured order) to each pending
/// formula in turn; throws CompilationError when nothing applies.
Fcg compile_greedy(Session& sn, const Formula& f, const SearchConfig& cfg = {});

/// Breadth-first over non-greedy chips, saturating with greedy rules in
/// between. Returns up to max_solutions complete graphs in discovery order;
/// an empty list means the search exhausted its limits (not a hard error).
std::vector<Fcg> compile_hybrid(Session& sn, const Formula& f,
                                const SearchConfig& cfg = {});

}  // namespace liftcount
