#include "liftcount/fcg.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace liftcount {

ChipChild chip_pending(Formula f) {
  ChipChild c;
  c.kind = ChipChild::Pending;
  c.pending = std::move(f);
  return c;
}

ChipChild chip_existing(int node) {
  ChipChild c;
  c.kind = ChipChild::Existing;
  c.existing = node;
  return c;
}

ChipChild chip_node(std::unique_ptr<ChipNode> n) {
  ChipChild c;
  c.kind = ChipChild::Node;
  c.node = std::move(n);
  return c;
}

std::unique_ptr<ChipNode> make_chip_node(FcgNode proto,
                                         std::vector<ChipChild> kids) {
  auto n = std::make_unique<ChipNode>();
  n->proto = std::move(proto);
  n->kids = std::move(kids);
  return n;
}

namespace {

int count_pendings(const ChipNode& n) {
  int c = 0;
  for (const ChipChild& k : n.kids) {
    if (k.kind == ChipChild::Pending) ++c;
    if (k.kind == ChipChild::Node) c += count_pendings(*k.node);
  }
  return c;
}

}  // namespace

int chip_pending_count(const Chip& c) { return count_pendings(*c.root); }

Fcg Fcg::initial(Formula f) {
  Fcg g;
  FcgNode star;
  star.kind = FcgNode::Star;
  star.formula = std::move(f);
  g.nodes.push_back(std::move(star));
  g.source = 0;
  g.slots.push_back(0);
  return g;
}

namespace {

// Materialize the chip tree; returns the id assigned to `n`. New Star ids
// are appended to `new_stars` in left-to-right order.
int materialize(Fcg& g, ChipNode& n, int reuse_id,
                std::vector<int>& new_stars) {
  int id;
  if (reuse_id >= 0) {
    id = reuse_id;
    FcgNode proto = std::move(n.proto);
    g.nodes[id] = std::move(proto);
  } else {
    id = static_cast<int>(g.nodes.size());
    g.nodes.push_back(std::move(n.proto));
  }
  std::vector<int> kids;
  for (ChipChild& k : n.kids) {
    switch (k.kind) {
      case ChipChild::Node:
        kids.push_back(materialize(g, *k.node, -1, new_stars));
        break;
      case ChipChild::Pending: {
        int sid = static_cast<int>(g.nodes.size());
        FcgNode star;
        star.kind = FcgNode::Star;
        star.formula = std::move(k.pending);
        g.nodes.push_back(std::move(star));
        new_stars.push_back(sid);
        kids.push_back(sid);
        break;
      }
      case ChipChild::Existing:
        kids.push_back(k.existing);
        break;
    }
  }
  g.nodes[id].children = std::move(kids);
  return id;
}

}  // namespace

int attach(Fcg& g, Chip chip) {
  if (g.slots.empty()) throw std::logic_error("attach: no placeholder");
  int slot = g.slots.front();
  g.slots.pop_front();
  std::vector<int> new_stars;
  int root = materialize(g, *chip.root, slot, new_stars);
  for (auto it = new_stars.rbegin(); it != new_stars.rend(); ++it)
    g.slots.push_front(*it);
  return root;
}

std::vector<std::vector<DomainId>> node_domains(const Fcg& g) {
  int n = static_cast<int>(g.nodes.size());
  std::vector<std::set<DomainId>> d(n);
  std::vector<std::set<DomainId>> intro(n), use(n);
  for (int v = 0; v < n; ++v) {
    const FcgNode& node = g.nodes[v];
    switch (node.kind) {
      case FcgNode::Star:
      case FcgNode::Ground:
        for (DomainId x : node.formula.domains()) use[v].insert(x);
        break;
      case FcgNode::Top:
        break;
      case FcgNode::Bot:
      case FcgNode::Unit:
      case FcgNode::Smooth:
        for (DomainId x : node.clause.var_domains) use[v].insert(x);
        break;
      case FcgNode::And:
      case FcgNode::Or:
      case FcgNode::Ie:
        break;
      case FcgNode::SetAnd:
      case FcgNode::Gdr:
        use[v].insert(node.dom);
        break;
      case FcgNode::SetOr:
        use[v].insert(node.dom);
        intro[v].insert(node.dom_top);
        intro[v].insert(node.dom_bot);
        break;
      case FcgNode::Cr:
        use[v].insert(node.dom);
        intro[v].insert(node.dom_new);
        break;
      case FcgNode::Ref:
        break;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < n; ++v) {
      const FcgNode& node = g.nodes[v];
      std::set<DomainId> next;
      if (node.kind == FcgNode::Ref) {
        for (DomainId x : d[node.children.at(0)]) {
          auto it = node.rho.find(x);
          next.insert(it == node.rho.end() ? x : it->second);
        }
      } else {
        for (int u : node.children)
          for (DomainId x : d[u]) next.insert(x);
        for (DomainId x : intro[v]) next.erase(x);
        for (DomainId x : use[v]) next.insert(x);
      }
      if (next != d[v]) {
        d[v] = std::move(next);
        changed = true;
      }
    }
  }
  std::vector<std::vector<DomainId>> out(n);
  for (int v = 0; v < n; ++v) out[v].assign(d[v].begin(), d[v].end());
  return out;
}

namespace {

std::string node_label(const Session& sn, const FcgNode& v) {
  auto dn = [&](DomainId d) { return sn.domain(d).name; };
  switch (v.kind) {
    case FcgNode::Star:
      return "*";
    case FcgNode::Top:
      return "T";
    case FcgNode::Bot:
      return "F " + to_string(sn, v.clause);
    case FcgNode::Unit:
      return std::string(v.unit_positive ? "unit " : "unit ~") +
             to_string(sn, v.clause);
    case FcgNode::Smooth:
      return "smooth " + to_string(sn, v.clause);
    case FcgNode::Ground:
      return "ground";
    case FcgNode::And:
      return "and";
    case FcgNode::Or:
      return "or";
    case FcgNode::SetAnd:
      return "set-and " + dn(v.dom);
    case FcgNode::SetOr:
      return "set-or " + dn(v.dom) + " = " + dn(v.dom_top) + " + " +
             dn(v.dom_bot);
    case FcgNode::Gdr:
      return "gdr " + dn(v.dom);
    case FcgNode::Cr: {
      return "cr " + dn(v.dom) + " -> " + dn(v.dom_new);
    }
    case FcgNode::Ie:
      return "ie";
    case FcgNode::Ref: {
      std::string s = "ref";
      const char* sep = " ";
      for (auto& [a, b] : v.rho) {
        s += sep + dn(a) + ":" + dn(b);
        sep = ", ";
      }
      return s;
    }
  }
  return "?";
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const Session& sn, const Fcg& g) {
  std::ostringstream os;
  os << "digraph fcg {\n";
  for (size_t v = 0; v < g.nodes.size(); ++v)
    os << "  n" << v << " [label=\"" << escape(node_label(sn, g.nodes[v]))
       << "\"];\n";
  for (size_t v = 0; v < g.nodes.size(); ++v)
    for (int u : g.nodes[v].children) {
      os << "  n" << v << " -> n" << u;
      if (static_cast<size_t>(u) <= v) os << " [style=dashed]";  // back edge
      os << ";\n";
    }
  os << "}\n";
  return os.str();
}

uint64_t fingerprint(const Session& sn, const Fcg& g) {
  auto mix = [](uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  };
  uint64_t h = mix(g.nodes.size());
  for (const FcgNode& v : g.nodes) {
    h = mix(h ^ static_cast<uint64_t>(v.kind));
    h = mix(h ^ static_cast<uint64_t>(v.dom + 1));
    h = mix(h ^ static_cast<uint64_t>(v.dom_new + 1));
    for (int u : v.children) h = mix(h ^ static_cast<uint64_t>(u));
    if (v.kind == FcgNode::Star || v.kind == FcgNode::Ground)
      h = mix(h ^ formula_hash(sn, v.formula));
    if (v.kind == FcgNode::Bot || v.kind == FcgNode::Unit ||
        v.kind == FcgNode::Smooth)
      h = mix(h ^ clause_hash(sn, v.clause));
  }
  return h;
}

}  // namespace liftcount
