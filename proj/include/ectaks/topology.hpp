#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "ectaks/error.hpp"

namespace ectaks {

using NodeId = std::uint32_t;
using Arrow = std::pair<NodeId, NodeId>;  // (tail, head)

// Authenticated network topology: a directed graph on nodes 1..n. A
// validated Ant is symmetric and loop-free.
struct Ant {
  NodeId n = 0;
  std::set<Arrow> arrows;

  // Builds the symmetric closure of the given unordered pairs.
  static Ant from_edges(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& edges);

  bool has_arrow(NodeId tail, NodeId head) const { return arrows.contains({tail, head}); }
  std::vector<NodeId> neighbors(NodeId i) const;
  // Unordered pairs {i, j} with i < j.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  friend bool operator==(const Ant&, const Ant&) = default;
};

// Throws AsymmetricArrow, SelfLoop or IdOutOfRange naming the offending ids.
const Ant& validate_ant(const Ant& g);

struct AntSubgraph {
  NodeId owner = 0;
  std::set<Arrow> arrows;  // E_i: arrows with tail == owner
  std::set<NodeId> nodes;  // V_i = {owner} u heads(E_i)
};

AntSubgraph out_subgraph(const Ant& g, NodeId i);

// Node sets of the connected components, ordered by smallest member.
std::vector<std::vector<NodeId>> connected_components(const Ant& g);

enum class EdgeCase { Fresh, Existing };

struct AssignmentStep {
  Arrow edge;  // tail already provisioned when the step runs
  EdgeCase kind;

  friend bool operator==(const AssignmentStep&, const AssignmentStep&) = default;
};

struct AssignmentPlan {
  std::vector<NodeId> roots;  // one per component, in component order
  std::vector<AssignmentStep> steps;
  // Which root each step belongs to, parallel to steps.
  std::vector<std::size_t> component_of_step;
};

// Breadth-first from each root, neighbors in ascending id order. Default
// roots are the smallest id of each component.
AssignmentPlan plan_assignment(const Ant& g, const std::optional<std::vector<NodeId>>& roots = std::nullopt);

}  // namespace ectaks
