#pragma once

// Shared generators for randomized tests. Parameters are drawn from dyadic
// grids (multiples of 0.25 or 0.125) so algebraically equal quantities stay
// bit-for-bit equal in floating point and exact-equality checks stay honest.

#include "flexpoly/flexpoly.hpp"

namespace testutil {

using namespace flexpoly;

inline EvSpec random_charging_ev(Rng& rng, int horizon) {
  EvSpec s;
  s.arrive = rng.uniform_int(1, horizon);
  s.depart = rng.uniform_int(s.arrive, horizon);
  const int len = s.depart - s.arrive + 1;
  s.m_lo = 0;
  s.m_hi = rng.uniform_grid(0.25, 2.0, 0.25);
  const double chargeable = len * s.m_hi;
  s.e0 = 0;
  s.e_lo = rng.uniform_grid(0.0, chargeable, 0.25);
  s.cap = std::min(chargeable, s.e_lo + rng.uniform_grid(0.0, 1.0, 0.25));
  s.e_hi = rng.uniform() < 0.5 ? s.e_lo : s.cap;
  return s;
}

inline EvSpec random_v2g_ev(Rng& rng, int horizon) {
  EvSpec s;
  s.arrive = rng.uniform_int(1, horizon);
  s.depart = rng.uniform_int(s.arrive, horizon);
  const int len = s.depart - s.arrive + 1;
  s.m_hi = rng.uniform_grid(0.25, 2.0, 0.25);
  s.m_lo = -s.m_hi;
  s.cap = std::max(0.25, rng.uniform_grid(0.25, 0.75 * len * s.m_hi, 0.25));
  s.e0 = rng.uniform_grid(0.0, s.cap, 0.25);
  s.e_lo = rng.uniform_grid(0.0, s.cap, 0.25);
  s.e_hi = s.cap;
  if (s.e_lo > s.e_hi) std::swap(s.e_lo, s.e_hi);
  return s;
}

// Box device with SoC bounds wrapped around a feasible witness profile, so
// arbitrary raw parameter shapes get exercised without ever being infeasible.
inline DeviceParams random_raw_device(Rng& rng, int horizon) {
  DeviceParams p;
  p.u_lo.resize(static_cast<std::size_t>(horizon));
  p.u_hi.resize(static_cast<std::size_t>(horizon));
  p.x_lo.resize(static_cast<std::size_t>(horizon));
  p.x_hi.resize(static_cast<std::size_t>(horizon));
  double prefix = 0;
  for (int t = 0; t < horizon; ++t) {
    const double lo = rng.uniform_grid(-2.0, 1.5, 0.25);
    const double width = rng.uniform_grid(0.0, 2.0, 0.25);
    const double witness = lo + rng.uniform_grid(0.0, width, 0.25);
    p.u_lo[static_cast<std::size_t>(t)] = lo;
    p.u_hi[static_cast<std::size_t>(t)] = lo + width;
    prefix += witness;
    if (rng.uniform() < 0.3) {
      p.x_lo[static_cast<std::size_t>(t)] = -kInf;
      p.x_hi[static_cast<std::size_t>(t)] = kInf;
    } else {
      p.x_lo[static_cast<std::size_t>(t)] = prefix - rng.uniform_grid(0.0, 2.0, 0.25);
      p.x_hi[static_cast<std::size_t>(t)] = prefix + rng.uniform_grid(0.0, 2.0, 0.25);
    }
  }
  return p;
}

inline DeviceParams random_device(Rng& rng, int horizon) {
  DeviceParams p;
  switch (rng.uniform_int(0, 5)) {
    case 0:
      p = build_ev(random_charging_ev(rng, horizon), horizon);
      break;
    case 1:
      p = build_ev(random_v2g_ev(rng, horizon), horizon);
      break;
    case 2: {
      const double m = rng.uniform_grid(0.25, 1.5, 0.25);
      const double cap = rng.uniform_grid(0.25, 3.0, 0.25);
      p = build_ess(-m, m, rng.uniform_grid(0.0, cap, 0.25), cap, horizon);
      break;
    }
    case 3: {
      std::vector<double> g(static_cast<std::size_t>(horizon));
      for (auto& v : g) v = rng.uniform_grid(0.0, 2.0, 0.25);
      p = build_generation(g);
      break;
    }
    case 4: {
      std::vector<double> load(static_cast<std::size_t>(horizon));
      for (auto& v : load) v = rng.uniform_grid(-1.0, 1.5, 0.25);
      p = build_fixed_load(load);
      break;
    }
    default:
      p = random_raw_device(rng, horizon);
      break;
  }
  const auto v = validate(p);
  if (!v.ok()) throw std::logic_error("test generator produced an invalid device: " + v.detail);
  return p;
}

inline Population random_population(Rng& rng, int horizon, int count) {
  Population pop;
  pop.horizon = horizon;
  for (int i = 0; i < count; ++i)
    pop.devices.push_back({"d" + std::to_string(i), DeviceKind::raw, random_device(rng, horizon)});
  return pop;
}

inline std::vector<double> random_cost(Rng& rng, int horizon) {
  std::vector<double> c(static_cast<std::size_t>(horizon));
  for (auto& v : c) v = rng.uniform_grid(-2.0, 2.0, 0.25);  // coarse grid provokes ties
  return c;
}

// The worked reference device used across the suites: unit-rate EV present
// for the whole three-step horizon that must end exactly at 2 units.
inline DeviceParams reference_ev() {
  EvSpec s;
  s.arrive = 1;
  s.depart = 3;
  s.m_lo = 0;
  s.m_hi = 1;
  s.e0 = 0;
  s.cap = 2;
  s.e_lo = 2;
  s.e_hi = 2;
  return build_ev(s, 3);
}

inline SubsetMask mask_of(std::initializer_list<int> steps_1based, int horizon) {
  SubsetMask m(horizon);
  for (int t : steps_1based) m.set(t - 1, true);
  return m;
}

}  // namespace testutil
