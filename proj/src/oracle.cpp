#include "liftcount/oracle.hpp"

#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>

#include "liftcount/grounding.hpp"
#include "liftcount/patterns.hpp"

namespace liftcount {

namespace {

using Atom = std::pair<PredId, std::vector<long>>;

std::vector<long> atom_tuple(const Literal& l, const std::vector<long>& assign,
                             const ElementUniverse& u) {
  std::vector<long> tuple;
  tuple.reserve(l.args.size());
  for (const Term& t : l.args)
    tuple.push_back(t.is_const() ? u.const_elem(t.const_id())
                                 : assign[t.var_index()]);
  return tuple;
}

}  // namespace

Rational oracle_count(const Session& sn, const Formula& f,
                      const DomainSizeAssignment& sizes,
                      const std::vector<Clause>& universe,
                      const OracleOptions& opts) {
  std::set<DomainId> needed;
  std::set<ConstId> refs = f.constants();
  for (const Clause& c : f.clauses)
    for (DomainId d : c.var_domains) needed.insert(d);
  for (const Clause& p : universe) {
    for (DomainId d : p.var_domains) needed.insert(d);
    for (ConstId c : Formula{{p}}.constants()) refs.insert(c);
  }
  ElementUniverse u = build_universe(sn, needed, sizes, refs);

  // Index the ground atoms. Universe patterns are disjoint, but distinct
  // patterns may still be expanded from overlapping callers; dedupe.
  std::map<Atom, int> index;
  std::vector<PredId> atom_pred;
  for (const Clause& p : universe) {
    if (p.vacuous()) continue;
    const Literal& l = p.literals.at(0);
    for_each_grounding(sn, p, u, [&](const std::vector<long>& a) {
      Atom at{l.pred, atom_tuple(l, a, u)};
      if (index.emplace(std::move(at), atom_pred.size()).second)
        atom_pred.push_back(l.pred);
    });
  }
  int n = static_cast<int>(atom_pred.size());
  if (n > opts.max_atoms)
    throw std::runtime_error("oracle: " + std::to_string(n) +
                             " ground atoms exceed the enumeration bound; "
                             "use smaller domain sizes");

  // One (pos, neg) mask pair per ground clause instance.
  std::vector<std::pair<uint64_t, uint64_t>> masks;
  for (const Clause& c : f.clauses) {
    if (c.vacuous()) continue;
    for_each_grounding(sn, c, u, [&](const std::vector<long>& a) {
      uint64_t pos = 0, neg = 0;
      for (const Literal& l : c.literals) {
        auto it = index.find({l.pred, atom_tuple(l, a, u)});
        if (it == index.end())
          throw std::logic_error("oracle: clause atom outside the universe");
        (l.positive ? pos : neg) |= 1ull << it->second;
      }
      masks.emplace_back(pos, neg);
    });
  }

  // Per-predicate atom masks and weight power tables.
  std::map<PredId, uint64_t> pred_mask;
  for (int i = 0; i < n; ++i) pred_mask[atom_pred[i]] |= 1ull << i;
  struct Powers {
    uint64_t mask;
    std::vector<Rational> wt, wf;  // w^k, wbar^k
  };
  std::vector<Powers> powers;
  for (auto& [p, mask] : pred_mask) {
    int k = std::popcount(mask);
    Powers pw{mask, {1}, {1}};
    for (int i = 1; i <= k; ++i) {
      pw.wt.push_back(pw.wt.back() * sn.pred(p).weight_true);
      pw.wf.push_back(pw.wf.back() * sn.pred(p).weight_false);
    }
    powers.push_back(std::move(pw));
  }

  Rational total = 0;
  for (uint64_t s = 0; s < (1ull << n); ++s) {
    bool sat = true;
    for (auto& [pos, neg] : masks)
      if (!((s & pos) || (neg & ~s))) {
        sat = false;
        break;
      }
    if (!sat) continue;
    Rational w = 1;
    for (const Powers& pw : powers) {
      int t = std::popcount(s & pw.mask);
      w *= pw.wt[t] * pw.wf[std::popcount(pw.mask) - t];
    }
    total += w;
  }
  return total;
}

Rational oracle_count_full(const Session& sn, const Formula& f,
                           const DomainSizeAssignment& sizes,
                           const std::vector<PredId>& preds,
                           const OracleOptions& opts) {
  std::vector<Clause> universe;
  for (PredId p : preds) universe.push_back(predicate_pattern(sn, p));
  return oracle_count(sn, f, sizes, universe, opts);
}

Rational oracle_count_pattern(const Session& sn, const Formula& f,
                              const DomainSizeAssignment& sizes,
                              const OracleOptions& opts) {
  return oracle_count(sn, f, sizes, atom_patterns(sn, f), opts);
}

}  // namespace liftcount
