#include "ectaks/topology.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace ectaks {

Ant Ant::from_edges(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  Ant g;
  g.n = n;
  for (const auto& [i, j] : edges) {
    g.arrows.insert({i, j});
    g.arrows.insert({j, i});
  }
  return g;
}

std::vector<NodeId> Ant::neighbors(NodeId i) const {
  std::vector<NodeId> out;
  for (auto it = arrows.lower_bound({i, 0}); it != arrows.end() && it->first == i; ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::pair<NodeId, NodeId>> Ant::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& [i, j] : arrows) {
    if (i < j) out.emplace_back(i, j);
  }
  return out;
}

const Ant& validate_ant(const Ant& g) {
  for (const auto& [i, j] : g.arrows) {
    if (i < 1 || i > g.n || j < 1 || j > g.n) {
      throw Error(ErrorCode::IdOutOfRange, "arrow (" + std::to_string(i) + "," + std::to_string(j) +
                                               ") references a node outside 1.." + std::to_string(g.n));
    }
    if (i == j) throw Error(ErrorCode::SelfLoop, "self loop at node " + std::to_string(i));
    if (!g.has_arrow(j, i)) {
      throw Error(ErrorCode::AsymmetricArrow, "arrow (" + std::to_string(i) + "," + std::to_string(j) +
                                                  ") has no reverse arrow");
    }
  }
  return g;
}

AntSubgraph out_subgraph(const Ant& g, NodeId i) {
  if (i < 1 || i > g.n) throw Error(ErrorCode::IdOutOfRange, "node " + std::to_string(i));
  AntSubgraph sub;
  sub.owner = i;
  sub.nodes.insert(i);
  for (NodeId j : g.neighbors(i)) {
    sub.arrows.insert({i, j});
    sub.nodes.insert(j);
  }
  return sub;
}

std::vector<std::vector<NodeId>> connected_components(const Ant& g) {
  std::vector<int> comp(g.n + 1, -1);
  std::vector<std::vector<NodeId>> out;
  for (NodeId start = 1; start <= g.n; ++start) {
    if (comp[start] != -1) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::deque<NodeId> queue{start};
    comp[start] = id;
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      out.back().push_back(u);
      for (NodeId v : g.neighbors(u)) {
        if (comp[v] == -1) {
          comp[v] = id;
          queue.push_back(v);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

AssignmentPlan plan_assignment(const Ant& g, const std::optional<std::vector<NodeId>>& roots) {
  validate_ant(g);
  const auto components = connected_components(g);
  std::vector<std::size_t> comp_of(g.n + 1, 0);
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (NodeId v : components[c]) comp_of[v] = c;
  }

  AssignmentPlan plan;
  if (roots) {
    if (roots->size() != components.size()) {
      throw Error(ErrorCode::RootsMismatch, "expected " + std::to_string(components.size()) +
                                                " roots, got " + std::to_string(roots->size()));
    }
    plan.roots.assign(components.size(), 0);
    for (NodeId r : *roots) {
      if (r < 1 || r > g.n) throw Error(ErrorCode::RootsMismatch, "root " + std::to_string(r) + " out of range");
      auto& slot = plan.roots[comp_of[r]];
      if (slot != 0) {
        throw Error(ErrorCode::RootsMismatch, "roots " + std::to_string(slot) + " and " + std::to_string(r) +
                                                  " share a component");
      }
      slot = r;
    }
  } else {
    for (const auto& c : components) plan.roots.push_back(c.front());
  }

  std::vector<bool> defined(g.n + 1, false);
  std::set<std::pair<NodeId, NodeId>> handled;
  for (std::size_t c = 0; c < plan.roots.size(); ++c) {
    const NodeId root = plan.roots[c];
    defined[root] = true;
    std::deque<NodeId> queue{root};
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      for (NodeId v : g.neighbors(u)) {
        const std::pair<NodeId, NodeId> key{std::min(u, v), std::max(u, v)};
        if (!handled.insert(key).second) continue;
        if (defined[v]) {
          plan.steps.push_back({{u, v}, EdgeCase::Existing});
        } else {
          defined[v] = true;
          plan.steps.push_back({{u, v}, EdgeCase::Fresh});
          queue.push_back(v);
        }
        plan.component_of_step.push_back(c);
      }
    }
  }
  return plan;
}

}  // namespace ectaks
