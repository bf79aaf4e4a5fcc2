#include "liftcount/grounding.hpp"

#include <algorithm>
#include <stdexcept>

namespace liftcount {

namespace {

void resolve(const Session& sn, DomainId d, const DomainSizeAssignment& sizes,
             const std::set<ConstId>& referenced, ElementUniverse& u,
             long& next_anon) {
  if (u.elems.count(d)) return;
  const DomainInfo& info = sn.domain(d);
  if (auto it = sizes.find(d); it != sizes.end()) {
    long n = it->second;
    if (n < 0) throw std::invalid_argument("negative domain size");
    std::vector<long> mine;  // definite members among the named constants
    bool undecided = false;
    for (ConstId c : referenced) {
      switch (sn.member(c, d)) {
        case Session::Membership::Yes:
          mine.push_back(u.const_elem(c));
          break;
        case Session::Membership::Unknown:
          undecided = true;
          break;
        case Session::Membership::No:
          break;
      }
    }
    // A sized partition half is carved out of its parent's pool when the
    // parent is resolvable, so that the subset relation survives into the
    // grounding (a formula may mention both). Partners take their free
    // elements from opposite ends and stay disjoint.
    if ((info.kind == DomainKind::PartTop ||
         info.kind == DomainKind::PartBottom) &&
        !undecided) {
      bool have_parent = true;
      try {
        resolve(sn, info.parent, sizes, referenced, u, next_anon);
      } catch (const std::invalid_argument&) {
        have_parent = false;
      }
      if (have_parent) {
        const std::vector<long>& pool = u.elems[info.parent];
        std::set<long> decided;  // elements of constants with a known side
        for (ConstId c : referenced)
          if (sn.member(c, d) != Session::Membership::Unknown &&
              sn.member(c, info.parent) == Session::Membership::Yes)
            decided.insert(u.const_elem(c));
        std::vector<long> free;
        for (long e : pool)
          if (!decided.count(e)) free.push_back(e);
        long need = n - static_cast<long>(mine.size());
        if (need >= 0 && need <= static_cast<long>(free.size())) {
          std::vector<long> es = std::move(mine);
          if (info.kind == DomainKind::PartTop)
            es.insert(es.end(), free.begin(), free.begin() + need);
          else
            es.insert(es.end(), free.end() - need, free.end());
          u.elems[d] = std::move(es);
          return;
        }
      }
    }
    std::vector<long> es = std::move(mine);
    if (static_cast<long>(es.size()) > n)
      throw std::invalid_argument("domain " + info.name +
                                  " smaller than its named constants");
    while (static_cast<long>(es.size()) < n) es.push_back(next_anon++);
    u.elems[d] = std::move(es);
    return;
  }
  switch (info.kind) {
    case DomainKind::MinusOne: {
      resolve(sn, info.parent, sizes, referenced, u, next_anon);
      std::vector<long> es = u.elems[info.parent];
      long ex = u.const_elem(info.excluded);
      es.erase(std::remove(es.begin(), es.end(), ex), es.end());
      if (es.size() + 1 != u.elems[info.parent].size())
        throw std::invalid_argument("excluded constant not in parent domain");
      u.elems[d] = std::move(es);
      return;
    }
    case DomainKind::Root:
      throw std::invalid_argument("no size given for root domain " + info.name);
    case DomainKind::PartTop:
    case DomainKind::PartBottom:
      throw std::invalid_argument("no size given for partition domain " +
                                  info.name);
  }
}

}  // namespace

ElementUniverse build_universe(const Session& sn,
                               const std::set<DomainId>& needed,
                               const DomainSizeAssignment& sizes,
                               const std::set<ConstId>& referenced) {
  // Constants excluded by a derived domain in play must exist in its parent.
  std::set<ConstId> refs = referenced;
  for (DomainId d : needed)
    for (DomainId a = d; a >= 0; a = sn.domain(a).parent)
      if (sn.domain(a).kind == DomainKind::MinusOne)
        refs.insert(sn.domain(a).excluded);
  ElementUniverse u;
  long next_anon = sn.num_consts();
  for (DomainId d : needed) resolve(sn, d, sizes, refs, u, next_anon);
  return u;
}

long domain_size(const Session& sn, DomainId d,
                 const DomainSizeAssignment& sizes) {
  if (auto it = sizes.find(d); it != sizes.end()) return it->second;
  const DomainInfo& info = sn.domain(d);
  if (info.kind == DomainKind::MinusOne)
    return domain_size(sn, info.parent, sizes) - 1;
  throw std::invalid_argument("size of domain " + info.name + " unknown");
}

void for_each_grounding(
    const Session& sn, const Clause& c, const ElementUniverse& u,
    const std::function<void(const std::vector<long>&)>& f) {
  if (c.vacuous()) return;
  int k = c.num_vars();
  std::vector<long> assign(k, -1);
  std::function<void(int)> rec = [&](int v) {
    if (v == k) {
      f(assign);
      return;
    }
    for (long e : u.elems.at(c.var_domains[v])) {
      assign[v] = e;
      bool ok = true;
      for (const Constraint& con : c.constraints) {
        long a, b;
        if (con.var <= v && con.var >= 0)
          a = assign[con.var];
        else
          continue;
        if (con.other.is_const())
          b = u.const_elem(con.other.const_id());
        else if (con.other.var_index() <= v)
          b = assign[con.other.var_index()];
        else
          continue;
        if (a == b) {
          ok = false;
          break;
        }
      }
      if (ok) rec(v + 1);
    }
    assign[v] = -1;
  };
  rec(0);
}

long grounding_count(const Session& sn, const Clause& c,
                     const DomainSizeAssignment& sizes) {
  if (c.vacuous()) return 0;
  std::set<DomainId> needed(c.var_domains.begin(), c.var_domains.end());
  std::set<ConstId> refs;
  for (const Literal& l : c.literals)
    for (const Term& t : l.args)
      if (t.is_const()) refs.insert(t.const_id());
  for (const Constraint& e : c.constraints)
    if (e.other.is_const()) refs.insert(e.other.const_id());
  ElementUniverse u = build_universe(sn, needed, sizes, refs);
  long count = 0;
  for_each_grounding(sn, c, u, [&](const std::vector<long>&) { ++count; });
  return count;
}

long predicate_grounding_count(const Session& sn, PredId p,
                               const DomainSizeAssignment& sizes) {
  long g = 1;
  for (DomainId d : sn.pred(p).signature) g *= domain_size(sn, d, sizes);
  return g;
}

}  // namespace liftcount
