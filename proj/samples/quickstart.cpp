// Minimal end-to-end walk: build a tiny population, price it, solve the
// aggregate LP, and split the optimum back onto the devices.

#include <cstdio>

#include "flexpoly/flexpoly.hpp"

int main() {
  using namespace flexpoly;
  const int horizon = 4;

  Population pop;
  pop.horizon = horizon;
  EvSpec ev;
  ev.arrive = 1;
  ev.depart = 3;
  ev.m_hi = 2.0;
  ev.cap = ev.e_lo = ev.e_hi = 3.0;
  pop.devices.push_back({"ev0", DeviceKind::ev, build_ev(ev, horizon)});
  pop.devices.push_back({"ess0", DeviceKind::ess, build_ess(-1.0, 1.0, 1.0, 2.0, horizon)});
  pop.devices.push_back({"load0", DeviceKind::fixed_load, build_fixed_load({0.5, 0.5, 0.5, 0.5})});

  const auto oracle = make_population_oracle(pop);
  const std::vector<double> price{30.0, 18.0, 22.0, 35.0};

  // One coupling row: total consumption in step 2 capped at 2.5.
  CouplingConstraints coupling;
  coupling.rows.push_back({0.0, 1.0, 0.0, 0.0});
  coupling.rhs.push_back(2.5);

  const SolveResult sol = solve_lp_coupled(*oracle, price, coupling);
  if (!sol.feasible()) {
    std::puts("infeasible");
    return 2;
  }
  std::printf("objective %.6g with %zu atoms\n", sol.objective, sol.atoms.size());

  const DisaggregationResult split = disaggregate(pop, sol.atoms, sol.u_star);
  std::printf("disaggregation residual %.3e\n", split.residual);
  for (const auto& s : split.schedules) {
    std::printf("%-6s", s.id.c_str());
    for (double v : s.u) std::printf(" %8.4f", v);
    std::printf("  feasible=%s\n", s.feasible ? "yes" : "no");
  }
  return split.ok ? 0 : 1;
}
