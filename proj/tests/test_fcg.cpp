#include "doctest.h"
#include "liftcount/fcg.hpp"

using namespace liftcount;

namespace {

FcgNode proto(FcgNode::Kind k) {
  FcgNode n;
  n.kind = k;
  return n;
}

Formula one_clause(PredId p, DomainId d) {
  Clause c;
  c.literals = {{p, true, {Term::var(0)}}};
  c.var_domains = {d};
  Formula f;
  f.clauses = {c};
  return f;
}

}  // namespace

TEST_CASE("attach replaces the star in place") {
  Fcg g = Fcg::initial({});
  CHECK(!g.complete());
  Chip top{make_chip_node(proto(FcgNode::Top)), "sink"};
  int id = attach(g, std::move(top));
  CHECK(id == 0);
  CHECK(g.complete());
  CHECK(g.nodes.size() == 1);
  CHECK(g.nodes[0].kind == FcgNode::Top);
}

TEST_CASE("attach queues new pendings depth-first, left to right") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  PredId q = sn.add_predicate({"q", {d}});

  Fcg g = Fcg::initial({});
  Chip split{make_chip_node(proto(FcgNode::And),
                            chip_kids(chip_pending(one_clause(p, d)),
                                      chip_pending(one_clause(q, d)))),
             "independence"};
  attach(g, std::move(split));
  REQUIRE(g.slots.size() == 2);
  // Left pending is next, and both stars are children of the And.
  int left = g.slots.front();
  CHECK(g.nodes[0].children == std::vector<int>{left, g.slots.back()});
  CHECK(g.nodes[left].formula == one_clause(p, d));

  // Expanding the left star with another two-pending chip puts its own
  // pendings before the right sibling (depth-first order).
  Chip inner{make_chip_node(proto(FcgNode::Or),
                            chip_kids(chip_pending(one_clause(p, d)),
                                      chip_pending(one_clause(q, d)))),
             "shannon"};
  int right = g.slots.back();
  attach(g, std::move(inner));
  REQUIRE(g.slots.size() == 3);
  CHECK(g.slots.back() == right);
}

TEST_CASE("domain fixpoint on a cyclic recursive graph") {
  // Shape of the partial-injection solution: Gdr -> SetOr -> Cr ->
  // And(Bot, Ref -> Gdr).
  Session sn;
  DomainId gamma = sn.add_domain({"Gamma"});
  DomainId delta = sn.add_domain({"Delta"});
  auto [dtop, dbot] = sn.fresh_partition(delta);
  ConstId x = sn.fresh_constant(gamma);
  DomainId gammap = sn.fresh_minus_one_domain(gamma, x);

  Fcg g;
  g.nodes.resize(6);
  g.source = 0;
  g.nodes[0].kind = FcgNode::Gdr;
  g.nodes[0].dom = gamma;
  g.nodes[0].children = {1};
  g.nodes[1].kind = FcgNode::SetOr;
  g.nodes[1].dom = delta;
  g.nodes[1].dom_top = dtop;
  g.nodes[1].dom_bot = dbot;
  g.nodes[1].children = {2};
  g.nodes[2].kind = FcgNode::Cr;
  g.nodes[2].dom = gamma;
  g.nodes[2].dom_new = gammap;
  g.nodes[2].children = {3};
  g.nodes[3].kind = FcgNode::And;
  g.nodes[3].children = {4, 5};
  g.nodes[4].kind = FcgNode::Bot;
  g.nodes[4].clause.constraints = {{0, Term::var(1)}};
  g.nodes[4].clause.var_domains = {dtop, dtop};
  g.nodes[5].kind = FcgNode::Ref;
  g.nodes[5].children = {0};
  g.nodes[5].rho = {{gamma, gammap}, {delta, dbot}};

  auto d = node_domains(g);
  CHECK(d[0] == std::vector<DomainId>{gamma, delta});
  CHECK(d[1] == std::vector<DomainId>{gamma, delta});
  CHECK(d[2] == std::vector<DomainId>{gamma, dtop, dbot});
  // Creation order: the partition pair precedes Gamma'.
  CHECK(d[3] == std::vector<DomainId>{dtop, dbot, gammap});
  CHECK(d[5] == std::vector<DomainId>{dbot, gammap});
  CHECK(d[4] == std::vector<DomainId>{dtop});
}

TEST_CASE("set-and contributes its grounded domain") {
  Session sn;
  DomainId delta = sn.add_domain({"Delta"});
  ConstId x = sn.fresh_constant(delta);
  PredId p = sn.add_predicate({"p", {delta}});
  Fcg g;
  g.nodes.resize(2);
  g.nodes[0].kind = FcgNode::SetAnd;
  g.nodes[0].dom = delta;
  g.nodes[0].children = {1};
  g.nodes[1].kind = FcgNode::Unit;
  g.nodes[1].clause.literals = {{p, true, {Term::constant(x)}}};
  auto d = node_domains(g);
  CHECK(d[1].empty());
  CHECK(d[0] == std::vector<DomainId>{delta});
}

TEST_CASE("dot export is deterministic and shows the back edge") {
  Session sn;
  DomainId gamma = sn.add_domain({"Gamma"});
  Fcg g;
  g.nodes.resize(2);
  g.nodes[0].kind = FcgNode::Gdr;
  g.nodes[0].dom = gamma;
  g.nodes[0].children = {1};
  g.nodes[1].kind = FcgNode::Ref;
  g.nodes[1].children = {0};
  g.nodes[1].rho = {{gamma, gamma}};
  std::string a = to_dot(sn, g);
  std::string b = to_dot(sn, g);
  CHECK(a == b);
  CHECK(a.find("style=dashed") != std::string::npos);
  CHECK(a.find("gdr Gamma") != std::string::npos);
}

TEST_CASE("fingerprints separate different partial graphs") {
  Session sn;
  DomainId d = sn.add_domain({"D"});
  PredId p = sn.add_predicate({"p", {d}});
  Fcg a = Fcg::initial(one_clause(p, d));
  Fcg b = Fcg::initial({});
  CHECK(fingerprint(sn, a) != fingerprint(sn, b));
  Fcg a2 = Fcg::initial(one_clause(p, d));
  CHECK(fingerprint(sn, a) == fingerprint(sn, a2));
}
