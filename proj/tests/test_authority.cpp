#include <doctest.h>

#include <set>

#include "ectaks/authority.hpp"
#include "ectaks/io.hpp"
#include "ectaks/session.hpp"
#include "support.hpp"

using namespace ectaks;

namespace {

using V2 = std::array<u64, 2>;

V2 arr(const FieldVector& v) { return {v[0], v[1]}; }

// Independent replay of the provisioning invariants.
void check_network(const CaState& s) {
  const u64 p = s.curve.p;
  const oracle::Curve ref = support::naive(s.curve);
  const oracle::Pt g = support::naive(s.curve.g);
  for (NodeId i = 1; i <= s.topology.n; ++i) {
    REQUIRE(s.provisioned(i));
    const Lcd& li = s.lcd(i);
    CHECK_FALSE(li.secret.k.is_zero());
    CHECK_FALSE(li.secret.t.is_zero());
    std::set<NodeId> peers;
    for (const auto& [j, v] : li.pub) peers.insert(j);
    const auto nbrs = s.topology.neighbors(i);
    CHECK(peers == std::set<NodeId>(nbrs.begin(), nbrs.end()));
  }
  for (const auto& [i, j] : s.topology.arrows) {
    const V2 m = arr(s.ca_secrets.at({i, j}));
    const u64 lhs = oracle::dot2(arr(s.lcd(i).secret.k), m, p);
    const u64 rhs = oracle::dot2(arr(s.lcd(j).secret.k), arr(s.lcd(i).secret.t), p);
    CHECK(lhs == rhs);
    CHECK(lhs != 0);
    const PointVector& pub = s.lcd(i).pub.at(j);
    CHECK(support::naive(pub[0]) == ref.mul(m[0], g));
    CHECK(support::naive(pub[1]) == ref.mul(m[1], g));
  }
  CHECK(audit(s).empty());
}

Ant random_ant(Rng& rng, NodeId n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 1; i <= n; ++i) {
    for (NodeId j = i + 1; j <= n; ++j) {
      if (rng.uniform(10) < 4) edges.emplace_back(i, j);
    }
  }
  return Ant::from_edges(n, edges);
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidParameter;
}

}  // namespace

TEST_SUITE("authority") {

TEST_CASE("worked example on the three-node topology") {
  const CurveParams c = support::curve("toy_p1009");
  Rng rng(2024);
  const CaState s = provision(Ant::from_edges(3, {{1, 2}, {1, 3}, {2, 3}}), c, rng, {std::vector<NodeId>{1}});
  for (NodeId i = 1; i <= 3; ++i) CHECK(s.lcd(i).pub.size() == 2);
  const u64 p = c.p;
  auto k = [&](NodeId i) { return arr(s.lcd(i).secret.k); };
  auto t = [&](NodeId i) { return arr(s.lcd(i).secret.t); };
  auto m = [&](NodeId i, NodeId j) { return arr(s.ca_secrets.at({i, j})); };
  CHECK(oracle::dot2(k(1), m(1, 2), p) == oracle::dot2(k(2), t(1), p));
  CHECK(oracle::dot2(k(2), m(2, 1), p) == oracle::dot2(k(1), t(2), p));
  CHECK(oracle::dot2(k(2), m(2, 3), p) == oracle::dot2(k(3), t(2), p));
  CHECK(oracle::dot2(k(3), m(3, 2), p) == oracle::dot2(k(2), t(3), p));
  check_network(s);
}

TEST_CASE("random networks satisfy every invariant") {
  const CurveParams c = support::curve("toy_p1009");
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const Ant g = random_ant(rng, 1 + static_cast<NodeId>(rng.uniform(12)));
    check_network(provision(g, c, rng));
  }
}

TEST_CASE("provisioning is deterministic under a seed") {
  const CurveParams c = support::curve("toy_p1009");
  const Ant g = Ant::from_edges(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 1}});
  Rng a(9), b(9);
  CHECK(provision(g, c, a) == provision(g, c, b));
}

TEST_CASE("p must exceed the network size") {
  const CurveParams c = support::curve("toy_p3");
  Rng rng(1);
  CHECK(code_of([&] { provision(Ant::from_edges(3, {{1, 2}}), c, rng); }) == ErrorCode::ParameterMismatch);
  CHECK_NOTHROW(provision(Ant::from_edges(2, {{1, 2}}), c, rng));
}

TEST_CASE("step preconditions") {
  const CurveParams c = support::curve("toy_p11");
  Rng rng(3);
  CaState s = empty_state(Ant::from_edges(3, {{1, 2}, {2, 3}}), c);
  CHECK(code_of([&] { assign_fresh_edge(s, 1, 2, rng); }) == ErrorCode::PrerequisiteMissing);
  init_root(s, 1, rng);
  CHECK(code_of([&] { init_root(s, 1, rng); }) == ErrorCode::AlreadyProvisioned);
  CHECK(code_of([&] { assign_fresh_edge(s, 1, 3, rng); }) == ErrorCode::PrerequisiteMissing);
  assign_fresh_edge(s, 1, 2, rng);
  CHECK(code_of([&] { assign_fresh_edge(s, 1, 2, rng); }) == ErrorCode::AlreadyProvisioned);
  CHECK(code_of([&] { (void)s.lcd(3); }) == ErrorCode::UnknownNode);
}

TEST_CASE("an existing-case edge that would force a zero key is refused without side effects") {
  const CurveParams c = support::curve("toy_p11");
  Rng rng(4);
  CaState s = empty_state(Ant::from_edges(2, {{1, 2}}), c);
  // k_2 . t_1 = 1*1 + 10*1 = 0 mod 11.
  s.lcds[1] = Lcd{1, {FieldVector(11, {1, 2}), FieldVector(11, {1, 1})}, {}};
  s.lcds[2] = Lcd{2, {FieldVector(11, {1, 10}), FieldVector(11, {3, 4})}, {}};
  const CaState before = s;
  CHECK(code_of([&] { assign_existing_edge(s, 1, 2, rng); }) == ErrorCode::ZeroSessionKey);
  CHECK(s == before);
}

TEST_CASE("clusters share one product and reject conflicting members") {
  const CurveParams c = support::curve("toy_p1009");
  Rng rng(5);
  CaState s = provision(Ant::from_edges(1, {}), c, rng);
  form_cluster(s, 1, {2, 3, 4}, rng);
  const Cluster* cl = s.cluster_of(1);
  REQUIRE(cl != nullptr);
  for (NodeId j : {2, 3, 4}) CHECK(dot(s.lcd(1).secret.k, s.ca_secrets.at({1, j})).value() == cl->gamma);
  check_network(s);

  // Linked neighbors with different products cannot join one cluster.
  CaState t = provision(Ant::from_edges(3, {{1, 2}, {1, 3}}), c, rng);
  const u64 g2 = dot(t.lcd(1).secret.k, t.ca_secrets.at({1, 2})).value();
  const u64 g3 = dot(t.lcd(1).secret.k, t.ca_secrets.at({1, 3})).value();
  if (g2 != g3) {
    const CaState before = t;
    CHECK(code_of([&] { form_cluster(t, 1, {2, 3}, rng); }) == ErrorCode::ClusterConflict);
    CHECK(t == before);
  }
}

TEST_CASE("extending a cluster leaves existing LCDs untouched") {
  const CurveParams c = support::curve("toy_p1009");
  Rng rng(6);
  CaState s = provision(Ant::from_edges(1, {}), c, rng);
  form_cluster(s, 1, {2, 3, 4, 5, 6}, rng);
  const CaState before = s;
  form_cluster(s, 1, {7}, rng);
  for (NodeId j = 2; j <= 6; ++j) CHECK(s.lcd(j) == before.lcd(j));
  CHECK(s.cluster_of(1)->gamma == before.cluster_of(1)->gamma);
  CHECK(s.cluster_of(1)->members.size() == 6);
  check_network(s);
}

TEST_CASE("replacement reissues the same LCD") {
  const CurveParams c = support::curve("toy_p1009");
  Rng rng(7);
  CaState s = provision(Ant::from_edges(4, {{1, 2}, {2, 3}, {3, 4}}), c, rng);
  const CaState before = s;
  CHECK(replace_node(s, 2) == before.lcd(2));
  CHECK(s.replacements[2] == 1);
  CHECK(s.lcds == before.lcds);
  replace_node(s, 2);
  CHECK(s.replacements[2] == 2);
}

TEST_CASE("admission extends the network") {
  const CurveParams c = support::curve("toy_p1009");
  Rng rng(8);
  CaState s = provision(Ant::from_edges(4, {{1, 2}, {2, 3}, {3, 4}}), c, rng);
  CHECK(code_of([&] { admit_node(s, 3, {1}, rng); }) == ErrorCode::IdCollision);
  CHECK(code_of([&] { admit_node(s, 7, {1}, rng); }) == ErrorCode::IdOutOfRange);
  const CaState before = s;
  admit_node(s, 5, {1, 3}, rng);
  CHECK(s.topology.n == 5);
  CHECK(s.lcd(2) == before.lcd(2));
  CHECK(s.lcd(4) == before.lcd(4));
  CHECK(s.lcd(1).secret == before.lcd(1).secret);
  CHECK(s.lcd(1).pub.size() == before.lcd(1).pub.size() + 1);
  check_network(s);
  admit_node(s, 6, {}, rng);
  check_network(s);
}

TEST_CASE("sampling helpers") {
  Rng rng(9);
  const FieldVector k(11, {3, 0});
  for (int i = 0; i < 200; ++i) {
    const FieldVector x = sample_nonzero_product(k, rng);
    CHECK(oracle::dot2(arr(k), arr(x), 11) != 0);
    const FreshEdgeDraw d = sample_fresh_edge(k, FieldVector(11, {2, 5}), rng, FieldElement(4, 11));
    CHECK(oracle::dot2(arr(k), arr(d.m_ij), 11) == 4);
    CHECK(oracle::dot2(arr(d.k_j), {2, 5}, 11) == 4);
    CHECK(oracle::dot2(arr(d.k_j), arr(d.m_ji), 11) == oracle::dot2(arr(k), arr(d.t_j), 11));
  }
}


TEST_CASE("independent roots rarely collide") {
  const CurveParams c = support::curve("toy_p1009");
  std::set<std::array<u64, 4>> seen;
  int collisions = 0;
  for (u64 trial = 0; trial < 1000; ++trial) {
    Rng rng(trial, 3);
    CaState s = empty_state(Ant::from_edges(2, {}), c);
    init_root(s, 1, rng);
    init_root(s, 2, rng);
    for (NodeId i : {1, 2}) {
      const SecretComponent& sc = s.lcd(i).secret;
      CHECK_FALSE(sc.k.is_zero());
      CHECK_FALSE(sc.t.is_zero());
      collisions += !seen.insert({sc.k[0], sc.k[1], sc.t[0], sc.t[1]}).second;
    }
  }
  // 2000 draws from (p^2 - 1)^2 values: expected collisions about 2e-6.
  CHECK(collisions == 0);
}

TEST_CASE("single fresh edge at p = 3 always satisfies both equations") {
  const CurveParams c = support::curve("toy_p3");
  std::set<std::array<u64, 12>> support_seen;
  for (u64 seed = 0; seed < 4000; ++seed) {
    Rng rng(seed, 5);
    CaState s = empty_state(Ant::from_edges(2, {{1, 2}}), c);
    init_root(s, 1, rng);
    assign_fresh_edge(s, 1, 2, rng);
    const SecretComponent &a = s.lcd(1).secret, &b = s.lcd(2).secret;
    const V2 m12 = arr(s.ca_secrets.at({1, 2})), m21 = arr(s.ca_secrets.at({2, 1}));
    const u64 g12 = oracle::dot2(arr(a.k), m12, 3), g21 = oracle::dot2(arr(b.k), m21, 3);
    REQUIRE(g12 == oracle::dot2(arr(b.k), arr(a.t), 3));
    REQUIRE(g21 == oracle::dot2(arr(a.k), arr(b.t), 3));
    REQUIRE(g12 != 0);
    REQUIRE(g21 != 0);
    REQUIRE_FALSE(b.k.is_zero());
    REQUIRE_FALSE(b.t.is_zero());
    support_seen.insert({a.k[0], a.k[1], a.t[0], a.t[1], b.k[0], b.k[1], b.t[0], b.t[1], m12[0], m12[1], m21[0], m21[1]});
  }
  CHECK(support_seen.size() > 100);
}

TEST_CASE("existing-case arrows cannot be assigned twice") {
  const CurveParams c = support::curve("toy_p1009");
  Rng rng(11);
  CaState s = empty_state(Ant::from_edges(3, {{1, 2}, {1, 3}, {2, 3}}), c);
  init_root(s, 1, rng);
  assign_fresh_edge(s, 1, 2, rng);
  assign_fresh_edge(s, 1, 3, rng);
  assign_existing_edge(s, 2, 3, rng);
  CHECK(code_of([&] { assign_existing_edge(s, 2, 3, rng); }) == ErrorCode::AlreadyProvisioned);
  check_network(s);
}

TEST_CASE("isolated nodes get secrets and no public keys") {
  const CurveParams c = support::curve("toy_p11");
  Rng rng(12);
  const CaState s = provision(Ant::from_edges(4, {}), c, rng);
  for (NodeId i = 1; i <= 4; ++i) {
    CHECK(s.lcd(i).pub.empty());
    CHECK_FALSE(s.lcd(i).secret.k.is_zero());
  }
  CHECK(s.ca_secrets.empty());
  CHECK(export_public_directory(s).size() == 4);
}

TEST_CASE("exports carry public points only") {
  const CurveParams c = support::curve("toy_p1009");
  Rng rng(13);
  const CaState s = provision(Ant::from_edges(5, {{1, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}}), c, rng);
  std::size_t arrows = 0;
  for (const auto& [i, pub] : export_public_directory(s)) {
    CHECK(pub == s.lcd(i).pub);
    arrows += pub.size();
  }
  CHECK(arrows == s.topology.arrows.size());
  for (NodeId i = 1; i <= 5; ++i) {
    const Lcd e = export_lcd(s, i);
    CHECK(e == s.lcd(i));
    const io::Json j = io::node_file_json(c, e);
    CHECK(io::node_file_from_json(io::Json::parse(io::dump(j))).lcd == e);
    std::vector<std::string> keys;
    for (const auto& [key, value] : j.items()) keys.push_back(key);
    CHECK(keys == std::vector<std::string>{"sensitive", "curve", "node", "k", "t", "public"});
  }
}

TEST_CASE("admitted nodes and replacements still agree with their neighbors") {
  const CurveParams c = support::curve("toy_p1009");
  Rng rng(14);
  CaState s = provision(Ant::from_edges(3, {{1, 2}, {2, 3}}), c, rng);
  admit_node(s, 4, {1, 3}, rng);
  CHECK(s.lcd(4).pub.size() == 2);
  replace_node(s, 2);
  for (const auto& [i, j] : s.topology.arrows) {
    const Initiation init = initiate(c, s.lcd(i), j, rng);
    CHECK(respond(c, s.lcd(j), init.share) == init.ectak);
  }
}

TEST_CASE("a one-member cluster is an ordinary edge") {
  const CurveParams c = support::curve("toy_p1009");
  Rng rng(15);
  CaState s = provision(Ant::from_edges(1, {}), c, rng);
  form_cluster(s, 1, {2}, rng);
  check_network(s);
  const WireMessage msg = multipoint_seal(c, s.lcd(1), {2}, as_bytes("solo"), rng);
  CHECK(open(c, s.lcd(2), msg).size() == 4);
  const WireMessage direct = seal(c, s.lcd(1), 2, as_bytes("solo"), rng);
  CHECK(open(c, s.lcd(2), direct).size() == 4);
}

}
