#include "liftcount/search.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace liftcount {

namespace {

// Confluent simplifications: applying them never destroys solutions, so the
// hybrid search runs them eagerly and only branches on the rest.
const std::set<std::string> kGreedy = {"sink", "shatter", "independence",
                                       "unit_propagation"};

std::vector<Chip> run_rule(const std::string& name, Session& sn,
                           const Formula& f, const Cache& cache,
                           bool allow_ground) {
  if (name == "sink") return sink_rules(sn, f);
  if (name == "independence") return independence(sn, f);
  if (name == "unit_propagation") return unit_propagation(sn, f);
  if (name == "shannon") return shannon(sn, f);
  if (name == "ipg") return independent_partial_grounding(sn, f);
  if (name == "atom_counting") return atom_counting(sn, f);
  if (name == "ie") return inclusion_exclusion(sn, f);
  if (name == "gdr") return gdr(sn, f);
  if (name == "cr") return constraint_removal(sn, f);
  if (name == "ref") return try_cache(sn, f, cache);
  if (name == "ground")
    return allow_ground ? ground_fallback(sn, f) : std::vector<Chip>{};
  throw std::invalid_argument("unknown compilation rule: " + name);
}

bool subtree_complete(const Fcg& g, int root) {
  std::set<int> seen;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (!seen.insert(v).second) continue;
    if (g.nodes[v].kind == FcgNode::Star) return false;
    for (int u : g.nodes[v].children) stack.push_back(u);
  }
  return true;
}

// Number of minus-one links on the derivation path from `to` up to `from`,
// or -1 when `to` is not derived from `from`. Partition links are size
// non-increasing; minus-one links shrink strictly.
int shrink_steps(const Session& sn, DomainId from, DomainId to) {
  int minus = 0;
  for (DomainId a = to; a >= 0; a = sn.domain(a).parent) {
    if (a == from) return minus;
    if (sn.domain(a).kind == DomainKind::MinusOne) ++minus;
  }
  return -1;
}

// A reference into a still-open subgraph is a recursive call; it is only
// admissible when every domain maps to one derived from it (sizes cannot
// grow) and at least one strictly shrinks, so evaluation bottoms out.
// References to finished subgraphs are plain sharing and always fine.
bool ref_admissible(const Session& sn, const Fcg& g, const Chip& chip) {
  const ChipNode& r = *chip.root;
  if (r.proto.kind != FcgNode::Ref) return true;
  if (subtree_complete(g, r.kids.at(0).existing)) return true;
  int total = 0;
  for (const auto& [from, to] : r.proto.rho) {
    int s = shrink_steps(sn, from, to);
    if (s < 0) return false;
    total += s;
  }
  return total > 0;
}

void filter_refs(const Session& sn, const Fcg& g, std::vector<Chip>& chips) {
  chips.erase(std::remove_if(chips.begin(), chips.end(),
                             [&](const Chip& c) {
                               return !ref_admissible(sn, g, c);
                             }),
              chips.end());
}

struct State {
  Fcg g;
  Cache cache;
  std::map<int, int> ndepth;  // node id -> distance from the source
  std::map<int, int> branchd;  // node id -> non-greedy expansions above it
};

int slot_depth(const State& st, int slot) {
  auto it = st.ndepth.find(slot);
  return it == st.ndepth.end() ? 0 : it->second;
}

// Rewrites that shrink the front pending in place: vacuous-clause removal
// always, shattering on demand (it sits at a fixed position in the rule
// order, so callers invoke it by name).
void drop_vacuous_front(Session& sn, State& st, const SearchConfig& cfg) {
  int slot = st.g.slots.front();
  if (auto r = drop_vacuous(st.g.nodes[slot].formula)) {
    st.g.nodes[slot].formula = *r;
    if (cfg.trace)
      cfg.trace(slot_depth(st, slot), "drop_vacuous", formula_hash(sn, *r));
  }
}

bool shatter_front(Session& sn, State& st, const SearchConfig& cfg) {
  int slot = st.g.slots.front();
  auto r = shatter(sn, st.g.nodes[slot].formula);
  if (!r) return false;
  if (auto dv = drop_vacuous(*r)) r = *dv;
  st.g.nodes[slot].formula = *r;
  if (cfg.trace)
    cfg.trace(slot_depth(st, slot), "shatter", formula_hash(sn, *r));
  return true;
}

// Attach a chip to the front slot, registering the slot's formula in the
// cache first (references created later may then close back onto it).
void apply_chip(Session& sn, State& st, Chip chip, const SearchConfig& cfg) {
  int slot = st.g.slots.front();
  int d = slot_depth(st, slot);
  st.cache.insert(sn, st.g.nodes[slot].formula, slot);
  if (cfg.trace)
    cfg.trace(d, chip.rule, formula_hash(sn, st.g.nodes[slot].formula));
  size_t before = st.g.nodes.size();
  int bd = st.branchd.count(slot) ? st.branchd[slot] : 0;
  attach(st.g, std::move(chip));
  for (int id : st.g.slots)
    if (id >= static_cast<int>(before)) {
      st.ndepth[id] = d + 1;
      st.branchd[id] = bd;
    }
}

}  // namespace

std::vector<std::string> default_rule_order() {
  return {"sink", "shatter", "independence", "unit_propagation",
          "shannon", "ipg", "atom_counting", "ie",
          "gdr", "cr", "ref", "ground"};
}

Fcg compile_greedy(Session& sn, const Formula& f, const SearchConfig& cfg) {
  std::vector<std::string> order =
      cfg.order.empty() ? default_rule_order() : cfg.order;
  Formula norm = f;
  norm.normalize();
  State st{Fcg::initial(std::move(norm))};
  st.ndepth[st.g.source] = 0;
  int steps = 0;
  while (!st.g.complete()) {
    if (++steps > cfg.max_steps) {
      // Greedy chains of expansion rules need not terminate; past the step
      // budget, either give up or close every open formula with a grounding
      // leaf (sound, but no longer lifted).
      if (!cfg.allow_ground_fallback)
        throw CompilationError("compilation exceeded the step limit",
                               st.g.nodes[st.g.slots.front()].formula);
      while (!st.g.complete()) {
        std::vector<Chip> chips =
            ground_fallback(sn, st.g.nodes[st.g.slots.front()].formula);
        apply_chip(sn, st, std::move(chips.front()), cfg);
      }
      break;
    }
    int slot = st.g.slots.front();
    drop_vacuous_front(sn, st, cfg);
    bool applied = false;
    for (size_t i = 0; i < order.size(); ++i) {
      if (order[i] == "shatter") {
        if (shatter_front(sn, st, cfg)) i = static_cast<size_t>(-1);
        continue;
      }
      std::vector<Chip> chips = run_rule(order[i], sn,
                                         st.g.nodes[slot].formula, st.cache,
                                         cfg.allow_ground_fallback);
      filter_refs(sn, st.g, chips);
      if (chips.empty()) continue;
      apply_chip(sn, st, std::move(chips.front()), cfg);
      applied = true;
      break;
    }
    if (!applied)
      throw CompilationError(
          "no compilation rule applies to " +
              to_string(sn, st.g.nodes[slot].formula),
          st.g.nodes[slot].formula);
  }
  return st.g;
}

std::vector<Fcg> compile_hybrid(Session& sn, const Formula& f,
                                const SearchConfig& cfg) {
  std::vector<std::string> order =
      cfg.order.empty() ? default_rule_order() : cfg.order;
  Formula norm = f;
  norm.normalize();
  std::vector<Fcg> solutions;
  std::deque<State> queue;
  {
    State init{Fcg::initial(std::move(norm))};
    init.ndepth[init.g.source] = 0;
    queue.push_back(std::move(init));
  }
  std::set<uint64_t> seen;

  int steps = 0;
  while (!queue.empty() &&
         static_cast<int>(solutions.size()) < cfg.max_solutions &&
         steps++ < cfg.max_steps) {
    State st = std::move(queue.front());
    queue.pop_front();

    // Saturate with the greedy subset of the rule order.
    bool stuck = false;
    while (!st.g.complete() && !stuck) {
      int slot = st.g.slots.front();
      drop_vacuous_front(sn, st, cfg);
      bool applied = false;
      for (size_t i = 0; i < order.size(); ++i) {
        if (!kGreedy.count(order[i])) continue;
        if (order[i] == "shatter") {
          if (shatter_front(sn, st, cfg)) i = static_cast<size_t>(-1);
          continue;
        }
        std::vector<Chip> chips =
            run_rule(order[i], sn, st.g.nodes[slot].formula, st.cache, false);
        if (chips.empty()) continue;
        apply_chip(sn, st, std::move(chips.front()), cfg);
        applied = true;
        break;
      }
      if (!applied) stuck = true;
    }
    if (st.g.complete()) {
      solutions.push_back(st.g);
      continue;
    }
    // max_depth bounds the non-greedy expansions along one derivation
    // path, not per whole graph: sibling subtrees each get the full
    // budget. A state whose front slot is out of budget can never close.
    int slot = st.g.slots.front();
    int bd = st.branchd.count(slot) ? st.branchd[slot] : 0;
    if (bd >= cfg.max_depth) continue;

    // Branch on every chip of every non-greedy rule, in order.
    st.cache.insert(sn, st.g.nodes[slot].formula, slot);
    for (const std::string& name : order) {
      if (kGreedy.count(name) || name == "ground") continue;
      std::vector<Chip> chips =
          run_rule(name, sn, st.g.nodes[slot].formula, st.cache, false);
      filter_refs(sn, st.g, chips);
      for (Chip& chip : chips) {
        State child = st;
        int d = slot_depth(child, slot);
        if (cfg.trace)
          cfg.trace(d, chip.rule,
                    formula_hash(sn, child.g.nodes[slot].formula));
        size_t before = child.g.nodes.size();
        attach(child.g, std::move(chip));
        for (int id : child.g.slots)
          if (id >= static_cast<int>(before)) {
            child.ndepth[id] = d + 1;
            child.branchd[id] = bd + 1;
          }
        if (!seen.insert(fingerprint(sn, child.g)).second) continue;
        queue.push_back(std::move(child));
      }
    }
  }
  return solutions;
}

}  // namespace liftcount
