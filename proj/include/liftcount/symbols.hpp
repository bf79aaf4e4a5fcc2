#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace liftcount {

using Rational = mpq_class;
using Integer = mpz_class;

using DomainId = int;
using PredId = int;
using ConstId = int;

/// How a domain came into existence. Non-root domains are interpreted as
/// subsets of their parent.
enum class DomainKind {
  Root,       ///< declared in the input file
  MinusOne,   ///< parent minus one named constant (constraint removal)
  PartTop,    ///< subset of parent where the counted predicate holds
  PartBottom  ///< complement of the PartTop partner within the parent
};

struct DomainInfo {
  std::string name;
  DomainKind kind = DomainKind::Root;
  DomainId parent = -1;
  ConstId excluded = -1;  // MinusOne only
  DomainId partner = -1;  // PartTop/PartBottom only
};

struct PredInfo {
  std::string name;
  std::vector<DomainId> signature;
  Rational weight_true = 1;
  Rational weight_false = 1;
  bool skolem = false;
};

struct ConstInfo {
  std::string name;
  DomainId domain = -1;
};

/// Append-only symbol tables for one compilation session. Ids are indices
/// and double as creation order, which is the fixed total domain ordering
/// used everywhere (declaration order first, then introduction order).
class Session {
 public:
  DomainId add_domain(DomainInfo info) {
    domains_.push_back(std::move(info));
    return static_cast<DomainId>(domains_.size()) - 1;
  }
  PredId add_predicate(PredInfo info) {
    preds_.push_back(std::move(info));
    return static_cast<PredId>(preds_.size()) - 1;
  }
  ConstId add_constant(ConstInfo info) {
    consts_.push_back(std::move(info));
    return static_cast<ConstId>(consts_.size()) - 1;
  }

  DomainId fresh_minus_one_domain(DomainId parent, ConstId excluded) {
    DomainInfo d;
    d.name = domains_[parent].name + "'";
    d.kind = DomainKind::MinusOne;
    d.parent = parent;
    d.excluded = excluded;
    return add_domain(std::move(d));
  }

  std::pair<DomainId, DomainId> fresh_partition(DomainId parent) {
    DomainInfo top, bot;
    top.name = domains_[parent].name + "^T";
    top.kind = DomainKind::PartTop;
    top.parent = parent;
    bot.name = domains_[parent].name + "^B";
    bot.kind = DomainKind::PartBottom;
    bot.parent = parent;
    DomainId t = add_domain(std::move(top));
    DomainId b = add_domain(std::move(bot));
    domains_[t].partner = b;
    domains_[b].partner = t;
    return {t, b};
  }

  ConstId fresh_constant(DomainId domain) {
    ConstInfo c;
    c.name = "c" + std::to_string(consts_.size());
    c.domain = domain;
    return add_constant(std::move(c));
  }

  const DomainInfo& domain(DomainId id) const { return domains_.at(id); }
  const PredInfo& pred(PredId id) const { return preds_.at(id); }
  const ConstInfo& constant(ConstId id) const { return consts_.at(id); }
  PredInfo& pred_mut(PredId id) { return preds_.at(id); }

  int num_domains() const { return static_cast<int>(domains_.size()); }
  int num_preds() const { return static_cast<int>(preds_.size()); }
  int num_consts() const { return static_cast<int>(consts_.size()); }

  DomainId root_of(DomainId id) const {
    while (domains_.at(id).parent >= 0) id = domains_.at(id).parent;
    return id;
  }

  std::optional<DomainId> find_domain(const std::string& name) const {
    for (int i = 0; i < num_domains(); ++i)
      if (domains_[i].name == name) return i;
    return std::nullopt;
  }
  std::optional<PredId> find_pred(const std::string& name) const {
    for (int i = 0; i < num_preds(); ++i)
      if (preds_[i].name == name) return i;
    return std::nullopt;
  }
  std::optional<ConstId> find_constant(const std::string& name) const {
    for (int i = 0; i < num_consts(); ++i)
      if (consts_[i].name == name) return i;
    return std::nullopt;
  }

  /// Is constant c a member of domain d? Partition domains make this
  /// undecidable statically, hence the tri-state.
  enum class Membership { Yes, No, Unknown };
  Membership member(ConstId c, DomainId d) const;

  std::vector<DomainId> root_domains() const {
    std::vector<DomainId> out;
    for (int i = 0; i < num_domains(); ++i)
      if (domains_[i].kind == DomainKind::Root) out.push_back(i);
    return out;
  }

 private:
  std::vector<DomainInfo> domains_;
  std::vector<PredInfo> preds_;
  std::vector<ConstInfo> consts_;
};

inline Session::Membership Session::member(ConstId c, DomainId d) const {
  DomainId cd = consts_.at(c).domain;
  if (cd == d) return Membership::Yes;
  const DomainInfo& info = domains_.at(d);
  switch (info.kind) {
    case DomainKind::Root:
      // Constants of a descendant domain are members of every ancestor.
      for (DomainId a = cd; a >= 0; a = domains_.at(a).parent)
        if (a == d) return Membership::Yes;
      return Membership::No;
    case DomainKind::MinusOne: {
      if (c == info.excluded) return Membership::No;
      Membership m = member(c, info.parent);
      return m == Membership::Yes ? Membership::Yes : m;
    }
    case DomainKind::PartTop:
    case DomainKind::PartBottom:
      if (member(c, info.parent) == Membership::No) return Membership::No;
      // A constant living inside one half of the split (or a subset of it)
      // is decided; only parent-level constants stay unknown.
      for (DomainId a = cd; a >= 0; a = domains_.at(a).parent) {
        if (a == d) return Membership::Yes;
        if (a == info.partner) return Membership::No;
      }
      return Membership::Unknown;
  }
  return Membership::Unknown;
}

/// How two domains relate as element sets. Distinct partitions of the same
/// parent (and a partition half versus a minus-one sibling) cannot be
/// compared statically.
enum class DomainRelation { Equal, Sub, Super, Disjoint, Unknown };

inline DomainRelation domain_relation(const Session& sn, DomainId a,
                                      DomainId b) {
  if (a == b) return DomainRelation::Equal;
  for (DomainId x = sn.domain(a).parent; x >= 0; x = sn.domain(x).parent)
    if (x == b) return DomainRelation::Sub;
  for (DomainId y = sn.domain(b).parent; y >= 0; y = sn.domain(y).parent)
    if (y == a) return DomainRelation::Super;
  // Disjoint when an ancestor-or-self of one partners an ancestor-or-self
  // of the other (the two sit in complementary halves of some split).
  for (DomainId x = a; x >= 0; x = sn.domain(x).parent)
    for (DomainId y = b; y >= 0; y = sn.domain(y).parent)
      if (sn.domain(x).partner == y) return DomainRelation::Disjoint;
  return DomainRelation::Unknown;
}

/// For sub strictly below sup in the domain tree: the child of sup on the
/// path down to sub (one refinement step).
inline DomainId domain_step(const Session& sn, DomainId sup, DomainId sub) {
  DomainId prev = sub;
  for (DomainId x = sn.domain(sub).parent; x >= 0; x = sn.domain(x).parent) {
    if (x == sup) return prev;
    prev = x;
  }
  throw std::logic_error("domain_step: domains are not nested");
}

/// Concrete domain sizes for the root domains of a problem (derived-domain
/// sizes are always computed, never stored).
using DomainSizeAssignment = std::map<DomainId, long>;

}  // namespace liftcount
