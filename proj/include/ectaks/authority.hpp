#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ectaks/curve.hpp"
#include "ectaks/field.hpp"
#include "ectaks/topology.hpp"

namespace ectaks {

// S_i = {k_i, t_i}: local and transmitted key components.
struct SecretComponent {
  FieldVector k;
  FieldVector t;

  friend bool operator==(const SecretComponent&, const SecretComponent&) = default;
};

// P_i: neighbor j -> topology vector m_{i-j} G.
using PublicComponent = std::map<NodeId, PointVector>;

// Local configuration data preloaded into a node.
struct Lcd {
  NodeId node = 0;
  SecretComponent secret;
  PublicComponent pub;

  friend bool operator==(const Lcd&, const Lcd&) = default;
};

// Point-to-multipoint group: every member arrow from the master carries the
// same scalar product gamma = k_master . m_{master-j}.
struct Cluster {
  NodeId master = 0;
  std::set<NodeId> members;
  u64 gamma = 0;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

// Everything the certification authority knows. ca_secrets holds the
// pre-images m_{i-j} and must never leave the CA.
struct CaState {
  Ant topology;
  CurveParams curve;
  std::map<NodeId, Lcd> lcds;
  std::map<Arrow, FieldVector> ca_secrets;
  std::vector<Cluster> clusters;
  std::map<NodeId, unsigned> replacements;

  bool provisioned(NodeId i) const { return lcds.contains(i); }
  const Lcd& lcd(NodeId i) const;
  const Cluster* cluster_of(NodeId master) const;

  friend bool operator==(const CaState&, const CaState&) = default;
};

// Field-level outcome of one fresh-edge assignment from provisioned node i
// to a new node j.
struct FreshEdgeDraw {
  FieldVector m_ij;
  FieldVector k_j;
  FieldVector m_ji;
  FieldVector t_j;
};

// Samples the fresh-edge parameters. With `gamma`, m_ij is drawn on the line
// k_i . m_ij = gamma instead of uniformly among vectors with nonzero product.
FreshEdgeDraw sample_fresh_edge(const FieldVector& k_i, const FieldVector& t_i, Rng& rng,
                                std::optional<FieldElement> gamma = std::nullopt);

// Nonzero vector x with k . x != 0, uniform among those.
FieldVector sample_nonzero_product(const FieldVector& k, Rng& rng);

CaState empty_state(Ant topology, CurveParams curve);

void init_root(CaState& state, NodeId i, Rng& rng);
void assign_fresh_edge(CaState& state, NodeId i, NodeId j, Rng& rng);
void assign_existing_edge(CaState& state, NodeId i, NodeId j, Rng& rng);

struct ProvisionOptions {
  std::optional<std::vector<NodeId>> roots;
};

// Runs the full sequential assignment. Requires p > N. A component whose
// existing-case step would force a zero session key is re-drawn from its
// root, at most kRetryBound times.
CaState provision(const Ant& topology, const CurveParams& curve, Rng& rng,
                  const ProvisionOptions& options = {});

void form_cluster(CaState& state, NodeId master, const std::set<NodeId>& members, Rng& rng);

// The replacement device receives the very same LCD; only the revocation
// counter of node i moves.
Lcd replace_node(CaState& state, NodeId i);

void admit_node(CaState& state, NodeId j, const std::set<NodeId>& neighbors, Rng& rng);

Lcd export_lcd(const CaState& state, NodeId i);
std::map<NodeId, PublicComponent> export_public_directory(const CaState& state);

// Replays every CaState invariant; returns human-readable violations.
std::vector<std::string> audit(const CaState& state);

}  // namespace ectaks
