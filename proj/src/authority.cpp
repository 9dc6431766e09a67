#include "ectaks/authority.hpp"

#include <algorithm>

namespace ectaks {

namespace {

std::string arrow_name(NodeId i, NodeId j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

const Lcd& require_provisioned(const CaState& state, NodeId i) {
  auto it = state.lcds.find(i);
  if (it == state.lcds.end()) {
    throw Error(ErrorCode::PrerequisiteMissing, "S_" + std::to_string(i) + " is not defined");
  }
  return it->second;
}

void require_edge(const CaState& state, NodeId i, NodeId j) {
  if (i == j) throw Error(ErrorCode::InvalidParameter, "self loop at node " + std::to_string(i));
  if (!state.topology.has_arrow(i, j) || !state.topology.has_arrow(j, i)) {
    throw Error(ErrorCode::PrerequisiteMissing, "edge " + arrow_name(i, j) + " is not in the topology");
  }
  if (state.ca_secrets.contains({i, j}) || state.ca_secrets.contains({j, i})) {
    throw Error(ErrorCode::AlreadyProvisioned, "edge " + arrow_name(i, j) + " already has topology vectors");
  }
}

void publish(CaState& state, NodeId i, NodeId j, const FieldVector& m) {
  state.lcds.at(i).pub[j] = lift_vector(state.curve, m);
  state.ca_secrets[{i, j}] = m;
}

}  // namespace

const Lcd& CaState::lcd(NodeId i) const {
  auto it = lcds.find(i);
  if (it == lcds.end()) throw Error(ErrorCode::UnknownNode, "node " + std::to_string(i) + " is not provisioned");
  return it->second;
}

const Cluster* CaState::cluster_of(NodeId master) const {
  for (const auto& c : clusters) {
    if (c.master == master) return &c;
  }
  return nullptr;
}

FieldVector sample_nonzero_product(const FieldVector& k, Rng& rng) {
  for (int attempt = 0; attempt < kRetryBound; ++attempt) {
    FieldVector x = sample_nonzero_vector(k.modulus(), rng, k.size());
    if (!dot(k, x).is_zero()) return x;
  }
  throw Error(ErrorCode::InfeasibleConstraint, "no vector with nonzero product after retry bound");
}

FreshEdgeDraw sample_fresh_edge(const FieldVector& k_i, const FieldVector& t_i, Rng& rng,
                                std::optional<FieldElement> gamma) {
  FreshEdgeDraw d;
  if (gamma) {
    if (gamma->is_zero()) throw Error(ErrorCode::ZeroSessionKey, "cluster product is zero");
    d.m_ij = solve_dot_constraint(k_i, *gamma, rng);
  } else {
    d.m_ij = sample_nonzero_product(k_i, rng);
  }
  // k_j . t_i = k_i . m_ij; the right side is nonzero so k_j is too.
  d.k_j = solve_dot_constraint(t_i, dot(k_i, d.m_ij), rng);
  d.m_ji = sample_nonzero_product(d.k_j, rng);
  // k_i . t_j = k_j . m_ji
  d.t_j = solve_dot_constraint(k_i, dot(d.k_j, d.m_ji), rng);
  return d;
}

CaState empty_state(Ant topology, CurveParams curve) {
  validate(curve);
  validate_ant(topology);
  CaState state;
  state.topology = std::move(topology);
  state.curve = std::move(curve);
  return state;
}

void init_root(CaState& state, NodeId i, Rng& rng) {
  if (i < 1 || i > state.topology.n) throw Error(ErrorCode::IdOutOfRange, "node " + std::to_string(i));
  if (state.provisioned(i)) {
    throw Error(ErrorCode::AlreadyProvisioned, "S_" + std::to_string(i) + " is already defined");
  }
  const u64 p = state.curve.p;
  Lcd lcd;
  lcd.node = i;
  lcd.secret.k = sample_nonzero_vector(p, rng);
  lcd.secret.t = sample_nonzero_vector(p, rng);
  state.lcds.emplace(i, std::move(lcd));
}

void assign_fresh_edge(CaState& state, NodeId i, NodeId j, Rng& rng) {
  require_edge(state, i, j);
  const Lcd& tail = require_provisioned(state, i);
  if (state.provisioned(j)) {
    throw Error(ErrorCode::AlreadyProvisioned, "S_" + std::to_string(j) + " is already defined");
  }
  const FreshEdgeDraw d = sample_fresh_edge(tail.secret.k, tail.secret.t, rng);

  Lcd head;
  head.node = j;
  head.secret = {d.k_j, d.t_j};
  state.lcds.emplace(j, std::move(head));
  publish(state, i, j, d.m_ij);
  publish(state, j, i, d.m_ji);
}

void assign_existing_edge(CaState& state, NodeId i, NodeId j, Rng& rng) {
  require_edge(state, i, j);
  const SecretComponent& si = require_provisioned(state, i).secret;
  const SecretComponent& sj = require_provisioned(state, j).secret;
  const FieldElement forward = dot(sj.k, si.t);   // k_i . m_{i-j} must equal this
  const FieldElement backward = dot(si.k, sj.t);  // k_j . m_{j-i} must equal this
  if (forward.is_zero() || backward.is_zero()) {
    throw Error(ErrorCode::ZeroSessionKey, "edge " + arrow_name(i, j) + " would carry a zero session key");
  }
  FieldVector m_ij = solve_dot_constraint(si.k, forward, rng);
  FieldVector m_ji = solve_dot_constraint(sj.k, backward, rng);
  publish(state, i, j, m_ij);
  publish(state, j, i, m_ji);
}

CaState provision(const Ant& topology, const CurveParams& curve, Rng& rng, const ProvisionOptions& options) {
  CaState state = empty_state(topology, curve);
  if (curve.p <= topology.n) {
    throw Error(ErrorCode::ParameterMismatch, "subgroup order p = " + std::to_string(curve.p) +
                                                  " must exceed the node count N = " + std::to_string(topology.n));
  }
  const AssignmentPlan plan = plan_assignment(state.topology, options.roots);

  std::size_t next_step = 0;
  for (std::size_t c = 0; c < plan.roots.size(); ++c) {
    std::size_t end = next_step;
    while (end < plan.steps.size() && plan.component_of_step[end] == c) ++end;

    const CaState snapshot = state;
    for (int attempt = 0;; ++attempt) {
      try {
        init_root(state, plan.roots[c], rng);
        for (std::size_t s = next_step; s < end; ++s) {
          const auto& step = plan.steps[s];
          if (step.kind == EdgeCase::Fresh) {
            assign_fresh_edge(state, step.edge.first, step.edge.second, rng);
          } else {
            assign_existing_edge(state, step.edge.first, step.edge.second, rng);
          }
        }
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroSessionKey || attempt + 1 >= kRetryBound) throw;
        state = snapshot;
      }
    }
    next_step = end;
  }
  return state;
}

void form_cluster(CaState& state, NodeId master, const std::set<NodeId>& members, Rng& rng) {
  const SecretComponent& sm = require_provisioned(state, master).secret;
  const u64 p = state.curve.p;

  std::optional<u64> gamma;
  if (const Cluster* existing = state.cluster_of(master)) gamma = existing->gamma;

  auto bind = [&](NodeId j, u64 product) {
    if (product == 0) {
      throw Error(ErrorCode::ZeroSessionKey, "member " + std::to_string(j) + " would carry a zero product");
    }
    if (!gamma) {
      gamma = product;
    } else if (*gamma != product) {
      throw Error(ErrorCode::ClusterConflict, "member " + std::to_string(j) + " is bound to product " +
                                                  std::to_string(product) + ", cluster uses " +
                                                  std::to_string(*gamma));
    }
  };

  std::vector<NodeId> linked;    // provisioned, arrow already provisioned
  std::vector<NodeId> existing;  // provisioned, no edge to master yet
  std::vector<NodeId> fresh;     // new ids beyond the current topology
  for (NodeId j : members) {
    if (j == master) throw Error(ErrorCode::InvalidParameter, "master cannot be its own member");
    if (j > state.topology.n) {
      fresh.push_back(j);
    } else if (!state.provisioned(j)) {
      throw Error(ErrorCode::PrerequisiteMissing, "member " + std::to_string(j) + " is not provisioned");
    } else if (state.ca_secrets.contains({master, j})) {
      linked.push_back(j);
    } else {
      existing.push_back(j);
    }
  }
  for (std::size_t n = 0; n < fresh.size(); ++n) {
    if (fresh[n] != state.topology.n + 1 + n) {
      throw Error(ErrorCode::IdOutOfRange, "new member ids must extend 1.." + std::to_string(state.topology.n) +
                                               " contiguously");
    }
  }

  // Products already fixed by provisioned arrows come first.
  for (NodeId j : linked) bind(j, dot(sm.k, state.ca_secrets.at({master, j})).value());
  for (NodeId j : existing) bind(j, dot(state.lcds.at(j).secret.k, sm.t).value());
  for (NodeId j : existing) {
    if (dot(sm.k, state.lcds.at(j).secret.t).is_zero()) {
      throw Error(ErrorCode::ZeroSessionKey, "edge " + arrow_name(j, master) + " would carry a zero session key");
    }
  }
  if (!gamma) gamma = rng.uniform_in(1, p - 1);

  CaState next = state;
  for (NodeId j : existing) {
    next.topology.arrows.insert({master, j});
    next.topology.arrows.insert({j, master});
    assign_existing_edge(next, master, j, rng);
  }
  for (NodeId j : fresh) {
    next.topology.n = j;
    next.topology.arrows.insert({master, j});
    next.topology.arrows.insert({j, master});
    const FreshEdgeDraw d = sample_fresh_edge(sm.k, sm.t, rng, FieldElement(*gamma, p));
    Lcd head;
    head.node = j;
    head.secret = {d.k_j, d.t_j};
    next.lcds.emplace(j, std::move(head));
    publish(next, master, j, d.m_ij);
    publish(next, j, master, d.m_ji);
  }

  auto it = std::find_if(next.clusters.begin(), next.clusters.end(),
                         [&](const Cluster& c) { return c.master == master; });
  if (it == next.clusters.end()) {
    next.clusters.push_back({master, members, *gamma});
  } else {
    it->members.insert(members.begin(), members.end());
  }
  state = std::move(next);
}

Lcd replace_node(CaState& state, NodeId i) {
  const Lcd& lcd = state.lcd(i);
  ++state.replacements[i];
  return lcd;
}

void admit_node(CaState& state, NodeId j, const std::set<NodeId>& neighbors, Rng& rng) {
  if (j >= 1 && j <= state.topology.n) {
    throw Error(ErrorCode::IdCollision, "node " + std::to_string(j) + " already exists");
  }
  if (j != state.topology.n + 1) {
    throw Error(ErrorCode::IdOutOfRange, "new node id must be " + std::to_string(state.topology.n + 1));
  }
  for (NodeId i : neighbors) {
    if (i == j) throw Error(ErrorCode::SelfLoop, "node " + std::to_string(j) + " cannot neighbor itself");
    require_provisioned(state, i);
  }

  CaState base = state;
  base.topology.n = j;
  for (NodeId i : neighbors) {
    base.topology.arrows.insert({i, j});
    base.topology.arrows.insert({j, i});
  }

  for (int attempt = 0;; ++attempt) {
    CaState next = base;
    try {
      if (neighbors.empty()) {
        init_root(next, j, rng);
      } else {
        auto it = neighbors.begin();
        assign_fresh_edge(next, *it, j, rng);
        for (++it; it != neighbors.end(); ++it) assign_existing_edge(next, *it, j, rng);
      }
      state = std::move(next);
      return;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroSessionKey || attempt + 1 >= kRetryBound) throw;
    }
  }
}

Lcd export_lcd(const CaState& state, NodeId i) { return state.lcd(i); }

std::map<NodeId, PublicComponent> export_public_directory(const CaState& state) {
  std::map<NodeId, PublicComponent> dir;
  for (const auto& [id, lcd] : state.lcds) dir.emplace(id, lcd.pub);
  return dir;
}

std::vector<std::string> audit(const CaState& state) {
  std::vector<std::string> issues;
  const auto& g = state.topology;
  try {
    validate_ant(g);
  } catch (const Error& e) {
    issues.emplace_back(e.what());
  }
  for (NodeId i = 1; i <= g.n; ++i) {
    auto it = state.lcds.find(i);
    if (it == state.lcds.end()) {
      issues.push_back("node " + std::to_string(i) + " has no LCD");
      continue;
    }
    const Lcd& lcd = it->second;
    if (lcd.secret.k.is_zero() || lcd.secret.t.is_zero()) {
      issues.push_back("node " + std::to_string(i) + " has a zero secret vector");
    }
    std::vector<NodeId> keys;
    for (const auto& [j, v] : lcd.pub) {
      keys.push_back(j);
      if (v.all_identity()) issues.push_back("P_" + std::to_string(i) + " holds an all-identity vector");
    }
    if (keys != g.neighbors(i)) {
      issues.push_back("P_" + std::to_string(i) + " does not match the outbound arrows of node " + std::to_string(i));
    }
  }
  for (const auto& [tail, head] : g.arrows) {
    const std::string name = arrow_name(tail, head);
    auto m = state.ca_secrets.find({tail, head});
    if (m == state.ca_secrets.end()) {
      issues.push_back("arrow " + name + " has no CA pre-image");
      continue;
    }
    if (!state.provisioned(tail) || !state.provisioned(head)) continue;
    const Lcd& li = state.lcds.at(tail);
    const Lcd& lj = state.lcds.at(head);
    auto pub = li.pub.find(head);
    if (pub == li.pub.end() || lift_vector(state.curve, m->second) != pub->second) {
      issues.push_back("published vector of " + name + " is not the lift of its pre-image");
    }
    const FieldElement lhs = dot(li.secret.k, m->second);
    if (lhs != dot(lj.secret.k, li.secret.t)) issues.push_back("k_i . m_ij != k_j . t_i on " + name);
    if (lhs.is_zero()) issues.push_back("zero session product on " + name);
  }
  for (const auto& c : state.clusters) {
    if (c.gamma == 0) issues.push_back("cluster of " + std::to_string(c.master) + " has zero product");
    for (NodeId j : c.members) {
      auto m = state.ca_secrets.find({c.master, j});
      if (m == state.ca_secrets.end() || !state.provisioned(c.master) ||
          dot(state.lcds.at(c.master).secret.k, m->second).value() != c.gamma) {
        issues.push_back("cluster member " + std::to_string(j) + " is off the common product");
      }
    }
  }
  return issues;
}

}  // namespace ectaks
