#include "ectaks/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "ectaks/session.hpp"

namespace ectaks {

namespace md = modular;

RowEchelon row_reduce(const ResidueMatrix& a, u64 p) {
  RowEchelon out;
  ResidueMatrix m = a.unaryExpr([p](u64 v) { return v % p; });
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  u64 det = 1 % p;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index pivot = -1;
    for (Eigen::Index i = r; i < rows; ++i) {
      if (m(i, c) != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != r) {
      m.row(pivot).swap(m.row(r));
      det = md::neg(det, p);
    }
    det = md::mul(det, m(r, c), p);
    const u64 inv = md::inv(m(r, c), p);
    for (Eigen::Index j = 0; j < cols; ++j) m(r, j) = md::mul(m(r, j), inv, p);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      const u64 f = m(i, c);
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = md::sub(m(i, j), md::mul(f, m(r, j), p), p);
    }
    out.pivot_cols.push_back(c);
    ++r;
  }
  out.det = (rows == cols && r == rows) ? det : 0;
  out.reduced = std::move(m);
  return out;
}

ResidueVector mat_vec_mod(const ResidueMatrix& a, const ResidueVector& x, u64 p) {
  if (a.cols() != x.size()) throw Error(ErrorCode::ParameterMismatch, "matrix/vector shapes differ");
  ResidueVector y(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    u64 acc = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) acc = md::add(acc, md::mul(a(i, j) % p, x(j) % p, p), p);
    y(i) = acc;
  }
  return y;
}

long double AffineSolution::size() const {
  if (!consistent) return 0;
  return std::pow(static_cast<long double>(p), static_cast<long double>(kernel.size()));
}

bool AffineSolution::contains(const ResidueMatrix& a, const ResidueVector& b, const ResidueVector& x) const {
  return consistent && mat_vec_mod(a, x, p) == b.unaryExpr([this](u64 v) { return v % p; });
}

ResidueVector AffineSolution::sample(Rng& rng) const {
  ResidueVector x = particular;
  for (const auto& k : kernel) {
    const u64 r = rng.uniform(p);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = md::add(x(i), md::mul(r, k(i), p), p);
  }
  return x;
}

AffineSolution solve_mod(const ResidueMatrix& a, const ResidueVector& b, u64 p) {
  if (a.rows() != b.size()) throw Error(ErrorCode::ParameterMismatch, "right-hand side has wrong length");
  const Eigen::Index n = a.cols();
  ResidueMatrix aug(a.rows(), n + 1);
  aug << a, b;
  const RowEchelon ech = row_reduce(aug, p);

  AffineSolution sol;
  sol.p = p;
  sol.consistent = ech.pivot_cols.empty() || ech.pivot_cols.back() != n;
  sol.rank = ech.pivot_cols.size() - (sol.consistent ? 0 : 1);
  if (!sol.consistent) return sol;

  std::vector<bool> is_pivot(n, false);
  sol.particular = ResidueVector::Zero(n);
  for (std::size_t r = 0; r < ech.pivot_cols.size(); ++r) {
    is_pivot[ech.pivot_cols[r]] = true;
    sol.particular(ech.pivot_cols[r]) = ech.reduced(static_cast<Eigen::Index>(r), n);
  }
  for (Eigen::Index f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    ResidueVector v = ResidueVector::Zero(n);
    v(f) = 1;
    for (std::size_t r = 0; r < ech.pivot_cols.size(); ++r) {
      v(ech.pivot_cols[r]) = md::neg(ech.reduced(static_cast<Eigen::Index>(r), f), p);
    }
    sol.kernel.push_back(std::move(v));
  }
  return sol;
}

void append_neighbor_rows(AttackSystem& sys, const FieldVector& k_j, const FieldVector& t_j,
                          const FieldVector& m_target_j, const FieldVector& m_j_target) {
  const u64 p = sys.p;
  const Eigen::Index r = sys.a.rows();
  sys.a.conservativeResize(r + 2, 4);
  sys.b.conservativeResize(r + 2);
  sys.a.row(r) << k_j[0], k_j[1], md::neg(m_target_j[0], p), md::neg(m_target_j[1], p);
  sys.a.row(r + 1) << 0, 0, t_j[0], t_j[1];
  sys.b(r) = 0;
  sys.b(r + 1) = dot(k_j, m_j_target).value();
}

DiscreteLogOracle brute_force_oracle() {
  return [](const CurveParams& curve, const CurvePoint& q) { return ecdl_bruteforce(curve, curve.g, q, curve.p); };
}

namespace {

FieldVector recover_vector(const CurveParams& curve, const PointVector& v, const DiscreteLogOracle& oracle) {
  std::vector<u64> coords;
  for (const auto& pt : v.points()) coords.push_back(oracle(curve, pt));
  return FieldVector(curve.p, std::move(coords));
}

}  // namespace

AttackSystem build_attack_system(const CurveParams& curve, NodeId target, const PublicComponent& target_public,
                                 const std::vector<Lcd>& compromised, const DiscreteLogOracle& oracle) {
  AttackSystem sys;
  sys.p = curve.p;
  sys.target = target;
  sys.a.resize(0, 4);
  sys.b.resize(0);
  for (const Lcd& lcd : compromised) {
    auto to_j = target_public.find(lcd.node);
    auto to_target = lcd.pub.find(target);
    if (to_j == target_public.end() || to_target == lcd.pub.end()) {
      throw Error(ErrorCode::PrerequisiteMissing,
                  "node " + std::to_string(lcd.node) + " is not connected to target " + std::to_string(target));
    }
    const FieldVector m_target_j = recover_vector(curve, to_j->second, oracle);
    const FieldVector m_j_target = recover_vector(curve, to_target->second, oracle);
    append_neighbor_rows(sys, lcd.secret.k, lcd.secret.t, m_target_j, m_j_target);
    sys.compromised.push_back(lcd.node);
  }
  return sys;
}

SecretComponent secret_from_unknowns(const ResidueVector& x, u64 p) {
  return {FieldVector(p, {x(2), x(3)}), FieldVector(p, {x(0), x(1)})};
}

ResidueVector unknowns_from_secret(const SecretComponent& s) {
  ResidueVector x(4);
  x << s.t[0], s.t[1], s.k[0], s.k[1];
  return x;
}

bool authenticates_as(const CaState& state, NodeId target, const SecretComponent& secret, Rng& rng) {
  static constexpr std::string_view kProbe = "impersonation probe";
  Lcd impostor = state.lcd(target);
  impostor.secret = secret;
  const Bytes probe(kProbe.begin(), kProbe.end());
  try {
    for (NodeId j : state.topology.neighbors(target)) {
      const Lcd& peer = state.lcd(j);
      if (open(state.curve, peer, seal(state.curve, impostor, j, probe, rng)) != probe) return false;
      if (open(state.curve, impostor, seal(state.curve, peer, target, probe, rng)) != probe) return false;
    }
  } catch (const Error&) {
    return false;
  }
  return true;
}

RecoveryReport recover_secret(const CaState& state, NodeId target, const std::set<NodeId>& compromised,
                              const DiscreteLogOracle& oracle, Rng& rng) {
  const Lcd& truth = state.lcd(target);
  std::vector<Lcd> stolen;
  for (NodeId j : compromised) {
    if (!state.topology.has_arrow(target, j)) {
      throw Error(ErrorCode::PrerequisiteMissing,
                  "compromised node " + std::to_string(j) + " is not a neighbor of " + std::to_string(target));
    }
    stolen.push_back(state.lcd(j));
  }
  if (stolen.empty()) throw Error(ErrorCode::PrerequisiteMissing, "no compromised nodes");

  RecoveryReport report;
  report.system = build_attack_system(state.curve, target, truth.pub, stolen, oracle);
  const u64 p = state.curve.p;
  report.solution = solve_mod(report.system.a, report.system.b, p);
  if (!report.solution.consistent) {
    // The true secret always solves the system.
    throw std::logic_error("attack system is inconsistent");
  }
  if (report.system.a.rows() == report.system.a.cols()) report.det = det_mod(report.system.a, p);

  const ResidueVector x_true = unknowns_from_secret(truth.secret);
  report.truth_in_space = report.solution.contains(report.system.a, report.system.b, x_true);
  const ResidueVector x = report.solution.unique() ? report.solution.particular : report.solution.sample(rng);
  report.candidate = secret_from_unknowns(x, p);
  report.candidate_is_truth = report.candidate == truth.secret;
  report.exact_match = report.solution.unique() && report.candidate_is_truth;
  report.candidate_authenticated = authenticates_as(state, target, report.candidate, rng);
  return report;
}

CaState build_target_star(const CurveParams& curve, unsigned witnesses, Rng& rng) {
  const NodeId n = 3 + witnesses;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId j = 2; j <= n; ++j) edges.emplace_back(1, j);
  CaState state = empty_state(Ant::from_edges(n, edges), curve);
  init_root(state, 1, rng);
  for (NodeId j = 2; j <= n; ++j) assign_fresh_edge(state, 1, j, rng);
  return state;
}

namespace {

bool star_trial_invertible(u64 p, Rng& rng) {
  const FieldVector k1 = sample_nonzero_vector(p, rng);
  const FieldVector t1 = sample_nonzero_vector(p, rng);
  AttackSystem sys;
  sys.p = p;
  sys.a.resize(0, 4);
  for (int neighbor = 0; neighbor < 2; ++neighbor) {
    const FreshEdgeDraw d = sample_fresh_edge(k1, t1, rng);
    append_neighbor_rows(sys, d.k_j, d.t_j, d.m_ij, d.m_ji);
  }
  return det_mod(sys.a, p) != 0;
}

}  // namespace

SpEstimate estimate_sp(u64 p, u64 trials, u64 seed, unsigned threads) {
  if (!is_prime(p) || p >= kMaxModulus) throw Error(ErrorCode::InvalidParameter, "p must be a prime below 2^61");
  if (trials == 0) throw Error(ErrorCode::InvalidParameter, "trials must be positive");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<u64>(threads, trials));

  std::vector<u64> counts(threads, 0);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (u64 i = w; i < trials; i += threads) {
          Rng rng(seed, i);
          if (star_trial_invertible(p, rng)) ++counts[w];
        }
      });
    }
  }

  SpEstimate est;
  est.p = p;
  est.trials = trials;
  est.successes = std::accumulate(counts.begin(), counts.end(), u64{0});
  const double n = static_cast<double>(trials);
  est.estimate = static_cast<double>(est.successes) / n;
  est.stddev = std::sqrt(est.estimate * (1 - est.estimate) / n);
  constexpr double z = 2.5758293035489004;  // two-sided 99%
  const double centre = (est.estimate + z * z / (2 * n)) / (1 + z * z / n);
  const double half = z / (1 + z * z / n) * std::sqrt(est.estimate * (1 - est.estimate) / n + z * z / (4 * n * n));
  est.ci_low = std::max(0.0, centre - half);
  est.ci_high = std::min(1.0, centre + half);
  return est;
}

bool SpCensus::exceeds_formula_bound() const {
  using u128 = unsigned __int128;
  return static_cast<u128>(invertible_tuples) * p12 > static_cast<u128>(formula_ip) * tuples;
}

SpCensus exact_sp_small(u64 p) {
  if (p != 2 && p != 3) throw Error(ErrorCode::InvalidParameter, "exhaustive census supports p in {2, 3}");

  std::vector<FieldVector> all;
  for (u64 x = 0; x < p; ++x) {
    for (u64 y = 0; y < p; ++y) all.emplace_back(p, std::vector<u64>{x, y});
  }
  std::vector<FieldVector> nonzero(all.begin() + 1, all.end());

  SpCensus census;
  census.p = p;
  const u64 p2 = p * p;
  census.formula_ip = (p2 - p) * (p2 - p) * (p2 - p) * (p2 - p) * (p2 - 1) * (p2 - 1);
  census.p12 = 1;
  for (int i = 0; i < 12; ++i) census.p12 *= p;

  u64 cells = 1;
  for (int i = 0; i < 16; ++i) cells *= p;
  // 0 = not seen; otherwise rank + 1 of the matrix with that base-p code.
  std::vector<std::uint8_t> seen(cells, 0);

  struct Half {
    u64 k0, k1, m0, m1, t0, t1;
  };

  for (const auto& k1 : nonzero) {
    for (const auto& t1 : nonzero) {
      // Every outcome of one fresh edge from node 1, one entry per
      // (m_1j, k_j, m_j1, t_j) tuple.
      std::vector<Half> outcomes;
      for (const auto& m1j : nonzero) {
        const FieldElement c = dot(k1, m1j);
        if (c.is_zero()) continue;
        for (const auto& kj : all) {
          if (dot(kj, t1) != c) continue;
          for (const auto& mj1 : nonzero) {
            const FieldElement d = dot(kj, mj1);
            if (d.is_zero()) continue;
            for (const auto& tj : all) {
              if (dot(k1, tj) != d) continue;
              outcomes.push_back({kj[0], kj[1], md::neg(m1j[0], p), md::neg(m1j[1], p), tj[0], tj[1]});
            }
          }
        }
      }
      for (const Half& r2 : outcomes) {
        for (const Half& r3 : outcomes) {
          const std::array<u64, 16> entries{r2.k0, r2.k1, r2.m0, r2.m1, 0, 0, r2.t0, r2.t1,
                                            r3.k0, r3.k1, r3.m0, r3.m1, 0, 0, r3.t0, r3.t1};
          u64 code = 0;
          for (u64 e : entries) code = code * p + e;
          std::uint8_t& slot = seen[code];
          if (slot == 0) {
            ResidueMatrix a(4, 4);
            for (int i = 0; i < 16; ++i) a(i / 4, i % 4) = entries[i];
            const std::size_t rank = rank_mod(a, p);
            slot = static_cast<std::uint8_t>(rank + 1);
            ++census.admissible_matrices;
            if (rank == 4) ++census.invertible_admissible_matrices;
          }
          const unsigned rank = slot - 1u;
          ++census.tuples;
          ++census.rank_histogram[rank];
          if (rank == 4) ++census.invertible_tuples;
        }
      }
    }
  }
  const u64 g = std::gcd(census.invertible_tuples, census.tuples);
  census.fraction_num = census.invertible_tuples / g;
  census.fraction_den = census.tuples / g;
  return census;
}

}  // namespace ectaks
