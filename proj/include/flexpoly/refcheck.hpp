#pragma once

#include "flexpoly/optimize.hpp"
#include "flexpoly/setfn.hpp"
#include "flexpoly/simplex.hpp"

// Brute-force oracles, deliberately independent of the set-function sweep:
// the LP route goes through the raw power/SoC constraints and the dense
// simplex, and the vertex route enumerates whole permutation classes. Size
// guards fail hard; these exist to certify the fast paths, not to scale.

namespace flexpoly {

struct HalfspaceRow {
  std::uint32_t subset = 0;  // bit t set <=> step t+1 belongs to the subset
  bool upper = false;        // false: u(subset) >= bound, true: u(subset) <= bound
  double bound = 0;
};

struct HRep {
  int horizon = 0;
  std::vector<HalfspaceRow> rows;
};

// Full hyperplane description of the g-polymatroid: two rows per nonempty
// subset, skipping infinite bounds as vacuous.
inline HRep enumerate_constraints(const ParamodularOracle& oracle) {
  const int horizon = oracle.horizon();
  require(horizon <= 12, "enumerate_constraints: horizon too large for full enumeration");
  HRep rep;
  rep.horizon = horizon;
  const std::uint32_t full = std::uint32_t{1} << horizon;
  for (std::uint32_t bits = 1; bits < full; ++bits) {
    const SubsetBounds v = oracle.eval(SubsetMask::from_bits(bits, horizon));
    if (v.lo > -kInf) rep.rows.push_back({bits, false, v.lo});
    if (v.hi < kInf) rep.rows.push_back({bits, true, v.hi});
  }
  return rep;
}

// LP over the enumerated hyperplane description via the dense simplex,
// optionally with extra coupling rows.
inline LpSolution hrep_lp(const ParamodularOracle& oracle, const std::vector<double>& cost,
                          const CouplingConstraints& coupling = {}) {
  const int horizon = oracle.horizon();
  require(static_cast<int>(cost.size()) == horizon, "hrep_lp: cost length mismatch");
  check_coupling(coupling, horizon);
  const HRep rep = enumerate_constraints(oracle);

  LpProblem lp;
  lp.c = cost;
  lp.lo = free_bounds_lo(horizon);
  lp.hi = free_bounds_hi(horizon);
  for (const auto& row : rep.rows) {
    std::vector<double> coeffs(static_cast<std::size_t>(horizon), 0.0);
    for (int t = 0; t < horizon; ++t)
      if (row.subset >> t & 1u) coeffs[static_cast<std::size_t>(t)] = row.upper ? 1.0 : -1.0;
    lp.a_ub.push_back(std::move(coeffs));
    lp.b_ub.push_back(row.upper ? row.bound : -row.bound);
  }
  for (std::size_t i = 0; i < coupling.rows.size(); ++i) {
    lp.a_ub.push_back(coupling.rows[i]);
    lp.b_ub.push_back(coupling.rhs[i]);
  }
  return simplex_solve(lp);
}

struct BruteLpResult {
  Profile u;
  double objective = 0;
};

// Total enumeration of the labeled vertex set: every ordering of the lifted
// ground set is materialized and the cheapest vertex wins.
inline BruteLpResult brute_lp(const ParamodularOracle& oracle, const std::vector<double>& cost) {
  const int horizon = oracle.horizon();
  require(horizon <= 7, "brute_lp: horizon too large for permutation enumeration");
  require(static_cast<int>(cost.size()) == horizon, "brute_lp: cost length mismatch");

  Permutation pi;
  pi.order.resize(static_cast<std::size_t>(horizon) + 1);
  std::iota(pi.order.begin(), pi.order.end(), 0);
  BruteLpResult best;
  best.objective = kInf;
  do {
    const Vertex v = vertex_from_permutation(oracle, pi);
    const double obj = dot(cost, v.u);
    if (obj < best.objective) {
      best.objective = obj;
      best.u = v.u;
    }
  } while (std::next_permutation(pi.order.begin(), pi.order.end()));
  return best;
}

namespace detail {

inline void append_device_rows(LpProblem& lp, const DeviceParams& p, int offset) {
  const int horizon = p.horizon();
  for (int t = 0; t < horizon; ++t) {
    lp.lo[static_cast<std::size_t>(offset + t)] = p.u_lo[static_cast<std::size_t>(t)];
    lp.hi[static_cast<std::size_t>(offset + t)] = p.u_hi[static_cast<std::size_t>(t)];
  }
  for (int t = 0; t < horizon; ++t) {
    const bool has_lo = p.x_lo[static_cast<std::size_t>(t)] > -kInf;
    const bool has_hi = p.x_hi[static_cast<std::size_t>(t)] < kInf;
    if (!has_lo && !has_hi) continue;
    std::vector<double> row(lp.c.size(), 0.0);
    for (int s = 0; s <= t; ++s) row[static_cast<std::size_t>(offset + s)] = 1.0;
    if (has_hi) {
      lp.a_ub.push_back(row);
      lp.b_ub.push_back(p.x_hi[static_cast<std::size_t>(t)]);
    }
    if (has_lo) {
      for (auto& v : row) v = -v;
      lp.a_ub.push_back(std::move(row));
      lp.b_ub.push_back(-p.x_lo[static_cast<std::size_t>(t)]);
    }
  }
}

}  // namespace detail

// Extreme of u(A) over a single device's raw constraint set. This is the LP
// counterpart of the set-function pair and never touches the sweep.
inline double support_value(const DeviceParams& params, const SubsetMask& a, bool maximize) {
  const int horizon = params.horizon();
  require(horizon <= 6, "support_value: horizon too large");
  require(a.ground_size() == horizon, "support_value: mask size mismatch");

  LpProblem lp;
  lp.c.assign(static_cast<std::size_t>(horizon), 0.0);
  for (int t = 0; t < horizon; ++t)
    if (a.contains(t)) lp.c[static_cast<std::size_t>(t)] = maximize ? -1.0 : 1.0;
  lp.lo.assign(static_cast<std::size_t>(horizon), 0.0);
  lp.hi.assign(static_cast<std::size_t>(horizon), 0.0);
  detail::append_device_rows(lp, params, 0);
  const LpSolution sol = simplex_solve(lp);
  require(sol.status == LpStatus::optimal, "support_value: infeasible device");
  return maximize ? -sol.objective : sol.objective;
}

// Same extreme over a population: stacked per-device variables, objective on
// the summed profile. Certifies the Minkowski-sum identities numerically.
inline double support_value(const Population& pop, const SubsetMask& a, bool maximize) {
  const int horizon = pop.horizon;
  require(horizon <= 6, "support_value: horizon too large");
  require(a.ground_size() == horizon, "support_value: mask size mismatch");
  const int n_dev = static_cast<int>(pop.devices.size());
  if (n_dev == 0) return 0.0;

  LpProblem lp;
  lp.c.assign(static_cast<std::size_t>(horizon * n_dev), 0.0);
  lp.lo.assign(lp.c.size(), 0.0);
  lp.hi.assign(lp.c.size(), 0.0);
  for (int i = 0; i < n_dev; ++i)
    for (int t = 0; t < horizon; ++t)
      if (a.contains(t))
        lp.c[static_cast<std::size_t>(i * horizon + t)] = maximize ? -1.0 : 1.0;
  for (int i = 0; i < n_dev; ++i)
    detail::append_device_rows(lp, pop.devices[static_cast<std::size_t>(i)].params, i * horizon);
  const LpSolution sol = simplex_solve(lp);
  require(sol.status == LpStatus::optimal, "support_value: infeasible population");
  return maximize ? -sol.objective : sol.objective;
}

struct CoupledReference {
  LpStatus status = LpStatus::infeasible;
  Profile u;
  double objective = 0;
};

// Reference for the coupled solve: the enumerated hyperplane description
// plus the coupling rows, handed to the dense simplex.
inline CoupledReference coupled_reference(const ParamodularOracle& oracle,
                                          const std::vector<double>& cost,
                                          const CouplingConstraints& coupling) {
  require(oracle.horizon() <= 5, "coupled_reference: horizon too large");
  const LpSolution sol = hrep_lp(oracle, cost, coupling);
  CoupledReference out;
  out.status = sol.status;
  if (sol.status == LpStatus::optimal) {
    out.u = sol.x;
    out.objective = sol.objective;
  }
  return out;
}

}  // namespace flexpoly
