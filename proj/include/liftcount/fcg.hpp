#pragma once

#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "liftcount/formula.hpp"

namespace liftcount {

/// Node of a first-order computational graph. Out-degree is fixed by kind:
/// Ref/SetAnd/SetOr/Gdr/Cr 1; And/Or 2; Ie 3; leaves 0.
struct FcgNode {
  enum Kind {
    Star,    // placeholder awaiting compilation
    Top,     // empty formula, value 1
    Bot,     // single empty-literal clause; value [no groundings]
    Unit,    // single-literal pattern; value w^count or wbar^count
    Smooth,  // pattern absent below; value (w + wbar)^count
    Ground,  // unexpanded formula, valued by the oracle (non-lifted)
    And,     // decomposable conjunction
    Or,      // deterministic disjunction (Shannon branches)
    SetAnd,  // independent partial grounding over `dom`
    SetOr,   // atom counting: sum over subsets of `dom`
    Gdr,     // generalised domain recursion over `dom`
    Cr,      // constraint removal, `dom` shrinks to `dom_new`
    Ie,      // inclusion-exclusion, children (A, B, A and B)
    Ref      // edge to an earlier node under domain renaming `rho`
  };
  Kind kind = Star;
  Formula formula;            // what this node was compiled from
  std::vector<int> children;  // ordered node ids; a Ref child may be an ancestor

  Clause clause;              // Bot/Unit/Smooth pattern
  bool unit_positive = true;  // Unit polarity
  DomainId dom = -1;          // SetAnd/SetOr/Gdr/Cr
  DomainId dom_top = -1;      // SetOr partition
  DomainId dom_bot = -1;
  DomainId dom_new = -1;      // Cr
  PredId counted_pred = -1;   // SetOr
  std::map<DomainId, DomainId> rho;  // Ref: Doms(target formula) -> caller
};

/// Chip: a fragment of new nodes whose leaves are pending formulas (future
/// placeholders) or references to existing graph nodes.
struct ChipNode;
struct ChipChild {
  enum Kind { Node, Pending, Existing } kind;
  std::unique_ptr<ChipNode> node;  // Node
  Formula pending;                 // Pending
  int existing = -1;               // Existing (graph node id)
};
struct ChipNode {
  FcgNode proto;  // children field ignored; structure comes from kids
  std::vector<ChipChild> kids;
};
struct Chip {
  std::unique_ptr<ChipNode> root;
  std::string rule;  // which rule produced it (traces, determinism tests)
};

ChipChild chip_pending(Formula f);
ChipChild chip_existing(int node);
ChipChild chip_node(std::unique_ptr<ChipNode> n);
std::unique_ptr<ChipNode> make_chip_node(FcgNode proto,
                                         std::vector<ChipChild> kids = {});
int chip_pending_count(const Chip& c);

// ChipChild is move-only, so brace-init lists cannot build kid vectors.
template <class... Cs>
std::vector<ChipChild> chip_kids(Cs&&... cs) {
  std::vector<ChipChild> v;
  v.reserve(sizeof...(cs));
  (v.push_back(std::move(cs)), ...);
  return v;
}

/// A (possibly incomplete) FCG. `slots` lists the Star node ids in fill
/// order: the front is the next formula to compile (depth-first, so a
/// chip's own pendings are compiled before older ones).
struct Fcg {
  std::vector<FcgNode> nodes;
  int source = 0;
  std::deque<int> slots;

  bool complete() const { return slots.empty(); }
  static Fcg initial(Formula f);
};

/// Replace the first Star with the chip; new pendings become Stars queued
/// at the front left-to-right. Returns the id the chip root took (the old
/// Star's id, so parent edges stay intact).
int attach(Fcg& g, Chip chip);

/// The domain-parameter fixpoint: for each node the ordered list of domains
/// whose sizes the node's value depends on (creation order = fixed total
/// domain order). Requires a complete graph.
std::vector<std::vector<DomainId>> node_domains(const Fcg& g);

std::string to_dot(const Session& sn, const Fcg& g);

/// Stable fingerprint of the partial graph shape (search deduplication).
uint64_t fingerprint(const Session& sn, const Fcg& g);

}  // namespace liftcount
