#pragma once

#include <array>
#include <functional>
#include <set>
#include <vector>

#include <Eigen/Core>

#include "ectaks/authority.hpp"
#include "ectaks/curve.hpp"

namespace ectaks {

// Residues mod p stored in Eigen containers. Arithmetic is done by the
// *_mod functions below, never by Eigen's operators (which would overflow).
using ResidueMatrix = Eigen::Matrix<u64, Eigen::Dynamic, Eigen::Dynamic>;
using ResidueVector = Eigen::Matrix<u64, Eigen::Dynamic, 1>;

struct RowEchelon {
  ResidueMatrix reduced;  // reduced row echelon form
  std::vector<Eigen::Index> pivot_cols;
  u64 det = 0;  // only meaningful for square input
};

// Gauss-Jordan over F_p. Pivot: first nonzero entry, scanning rows in
// ascending order. Deterministic.
RowEchelon row_reduce(const ResidueMatrix& a, u64 p);

template <typename Derived>
std::size_t rank_mod(const Eigen::MatrixBase<Derived>& a, u64 p) {
  return row_reduce(a.template cast<u64>(), p).pivot_cols.size();
}

template <typename Derived>
u64 det_mod(const Eigen::MatrixBase<Derived>& a, u64 p) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidParameter, "determinant of a non-square matrix");
  return row_reduce(a.template cast<u64>(), p).det;
}

ResidueVector mat_vec_mod(const ResidueMatrix& a, const ResidueVector& x, u64 p);

// Solution set of A x = b over F_p: particular + span(kernel).
struct AffineSolution {
  u64 p = 0;
  std::size_t rank = 0;
  bool consistent = false;
  ResidueVector particular;
  std::vector<ResidueVector> kernel;

  bool unique() const { return consistent && kernel.empty(); }
  // p^(dim kernel) as a floating count; exact while it fits in 2^64.
  long double size() const;
  bool contains(const ResidueMatrix& a, const ResidueVector& b, const ResidueVector& x) const;
  ResidueVector sample(Rng& rng) const;
};

AffineSolution solve_mod(const ResidueMatrix& a, const ResidueVector& b, u64 p);

// Attacker's system over the unknown x = (t_target, k_target): per
// compromised neighbor j, rows (k_j, -m_{target-j}) and (0, 0, t_j) with
// right-hand sides 0 and k_j . m_{j-target}.
struct AttackSystem {
  u64 p = 0;
  NodeId target = 0;
  std::vector<NodeId> compromised;
  ResidueMatrix a;
  ResidueVector b;
};

// Rows for one compromised neighbor, given field-level data.
void append_neighbor_rows(AttackSystem& sys, const FieldVector& k_j, const FieldVector& t_j,
                          const FieldVector& m_target_j, const FieldVector& m_j_target);

// Discrete log of Q to the base G of the curve.
using DiscreteLogOracle = std::function<u64(const CurveParams&, const CurvePoint&)>;
DiscreteLogOracle brute_force_oracle();

AttackSystem build_attack_system(const CurveParams& curve, NodeId target, const PublicComponent& target_public,
                                 const std::vector<Lcd>& compromised, const DiscreteLogOracle& oracle);

SecretComponent secret_from_unknowns(const ResidueVector& x, u64 p);
ResidueVector unknowns_from_secret(const SecretComponent& s);

struct RecoveryReport {
  AttackSystem system;
  AffineSolution solution;
  std::optional<u64> det;   // only for square systems
  bool truth_in_space = false;
  bool exact_match = false;  // unique solution equals the true secret
  SecretComponent candidate;  // the unique solution, or a uniform draw from the space
  bool candidate_is_truth = false;
  bool candidate_authenticated = false;
};

// Impersonates `target` with `secret` against every neighbor of the target
// in both directions (seal/open). True only if every session verifies.
bool authenticates_as(const CaState& state, NodeId target, const SecretComponent& secret, Rng& rng);

RecoveryReport recover_secret(const CaState& state, NodeId target, const std::set<NodeId>& compromised,
                              const DiscreteLogOracle& oracle, Rng& rng);

// Target 1 linked to compromised nodes 2, 3 and to `witnesses` further
// honest neighbors 4, 5, ... Built with the step operations directly, so the
// p > N provisioning rule does not apply.
CaState build_target_star(const CurveParams& curve, unsigned witnesses, Rng& rng);

// --- success probability ---

struct SpEstimate {
  u64 p = 0;
  u64 trials = 0;
  u64 successes = 0;
  double estimate = 0;
  double stddev = 0;  // binomial standard error of the estimate
  double ci_low = 0;  // 99% Wilson interval
  double ci_high = 0;
};

// Field-level Monte Carlo over the star (1,2), (1,3): counts det(A) != 0.
// Trial i draws from Rng(seed, i), so results do not depend on `threads`.
SpEstimate estimate_sp(u64 p, u64 trials, u64 seed, unsigned threads = 0);

struct SpCensus {
  u64 p = 0;
  u64 tuples = 0;             // assignment outcomes enumerated
  u64 invertible_tuples = 0;  // outcomes with det(A) != 0
  u64 fraction_num = 0;       // invertible_tuples / tuples, reduced
  u64 fraction_den = 1;
  std::array<u64, 5> rank_histogram{};  // over outcomes
  u64 admissible_matrices = 0;          // distinct A
  u64 invertible_admissible_matrices = 0;
  u64 formula_ip = 0;                   // (p^2 - p)^4 (p^2 - 1)^2
  u64 p12 = 0;

  double fraction() const { return static_cast<double>(invertible_tuples) / static_cast<double>(tuples); }
  // fraction > formula_ip / p^12
  bool exceeds_formula_bound() const;
};

// Exhaustive census of the assignment procedure's support; p in {2, 3}.
SpCensus exact_sp_small(u64 p);

}  // namespace ectaks
