#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace flexpoly {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Net power per step; negative entries mean generation. With unit-length
// steps, per-step energy and power coincide, so state of charge is a plain
// prefix sum of the profile.
using Profile = std::vector<double>;

struct TimeHorizon {
  int steps = 1;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), "dot: length mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double inf_norm(const std::vector<double>& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Power and state-of-charge envelope of one device. Power bounds are finite;
// SoC bounds may be +-inf, which switches the cumulative constraint off for
// that step. Keeping the power bounds finite means no two infinities of
// opposite sign can ever meet in an evaluation.
struct DeviceParams {
  std::vector<double> u_lo, u_hi;  // per-step power bounds
  std::vector<double> x_lo, x_hi;  // bounds on the prefix sums, relative to x(0) = 0

  int horizon() const { return static_cast<int>(u_lo.size()); }
};

enum class DeviceKind { ev, ess, generation, fixed_load, raw };

std::string to_string(DeviceKind k);
DeviceKind device_kind_from_string(const std::string& s);

struct Device {
  std::string id;
  DeviceKind kind = DeviceKind::raw;
  DeviceParams params;
};

struct Population {
  int horizon = 0;
  std::vector<Device> devices;
};

// EV charging requirements: plugged in over the inclusive step window
// [arrive, depart] (1-based), power within [m_lo, m_hi] while present,
// stored energy within [0, cap] throughout and within [e_lo, e_hi] at
// departure. e0 is the energy already on board at arrival.
struct EvSpec {
  int arrive = 1;
  int depart = 1;
  double m_lo = 0;
  double m_hi = 0;
  double e0 = 0;
  double cap = 0;
  double e_lo = 0;
  double e_hi = 0;
};

inline DeviceParams build_ev(const EvSpec& s, int horizon) {
  require(horizon >= 1, "build_ev: horizon must be positive");
  require(1 <= s.arrive && s.arrive <= s.depart && s.depart <= horizon,
          "build_ev: charging window outside horizon");
  require(s.m_lo <= s.m_hi, "build_ev: power bounds out of order");
  require(std::isfinite(s.m_lo) && std::isfinite(s.m_hi), "build_ev: power bounds must be finite");
  require(0 <= s.e0 && s.e0 <= s.cap, "build_ev: initial energy outside [0, cap]");
  require(s.e_lo <= s.e_hi && s.e_hi <= s.cap, "build_ev: departure energy bounds invalid");

  DeviceParams p;
  p.u_lo.assign(horizon, 0.0);
  p.u_hi.assign(horizon, 0.0);
  for (int t = s.arrive; t <= s.depart; ++t) {
    p.u_lo[t - 1] = s.m_lo;
    p.u_hi[t - 1] = s.m_hi;
  }
  p.x_lo.assign(horizon, -s.e0);
  p.x_hi.assign(horizon, s.cap - s.e0);
  for (int t = s.depart; t <= horizon; ++t) {
    p.x_lo[t - 1] = s.e_lo - s.e0;
    p.x_hi[t - 1] = s.e_hi - s.e0;
  }
  return p;
}

// A storage system is an EV that never leaves: same power band everywhere,
// and no departure target beyond the capacity limits themselves.
inline DeviceParams build_ess(double m_lo, double m_hi, double e0, double cap, int horizon) {
  require(horizon >= 1, "build_ess: horizon must be positive");
  require(m_lo <= m_hi, "build_ess: power bounds out of order");
  require(std::isfinite(m_lo) && std::isfinite(m_hi), "build_ess: power bounds must be finite");
  require(cap >= 0, "build_ess: negative capacity");
  require(0 <= e0 && e0 <= cap, "build_ess: initial energy outside [0, cap]");

  DeviceParams p;
  p.u_lo.assign(horizon, m_lo);
  p.u_hi.assign(horizon, m_hi);
  p.x_lo.assign(horizon, -e0);
  p.x_hi.assign(horizon, cap - e0);
  return p;
}

// Curtailable generation: consumption between -g_max(t) (full output) and 0
// (fully curtailed); no storage, so the cumulative constraints are disabled.
inline DeviceParams build_generation(const std::vector<double>& g_max) {
  require(!g_max.empty(), "build_generation: empty horizon");
  DeviceParams p;
  const int horizon = static_cast<int>(g_max.size());
  p.u_lo.resize(horizon);
  p.u_hi.assign(horizon, 0.0);
  for (int t = 0; t < horizon; ++t) {
    require(std::isfinite(g_max[t]) && g_max[t] >= 0, "build_generation: g_max entries must be >= 0");
    p.u_lo[t] = -g_max[t];
  }
  p.x_lo.assign(horizon, -kInf);
  p.x_hi.assign(horizon, kInf);
  return p;
}

inline DeviceParams build_fixed_load(const std::vector<double>& load) {
  require(!load.empty(), "build_fixed_load: empty horizon");
  for (double v : load) require(std::isfinite(v), "build_fixed_load: load must be finite");
  DeviceParams p;
  p.u_lo = load;
  p.u_hi = load;
  p.x_lo.assign(load.size(), -kInf);
  p.x_hi.assign(load.size(), kInf);
  return p;
}

// Largest amount by which `u` violates the power or cumulative constraints
// of `params`; zero for interior profiles.
inline double membership_violation(const DeviceParams& params, const Profile& u) {
  require(static_cast<int>(u.size()) == params.horizon(), "membership: profile length mismatch");
  double worst = 0;
  double x = 0;
  for (int t = 0; t < params.horizon(); ++t) {
    worst = std::max(worst, params.u_lo[t] - u[t]);
    worst = std::max(worst, u[t] - params.u_hi[t]);
    x += u[t];
    if (params.x_lo[t] > -kInf) worst = std::max(worst, params.x_lo[t] - x);
    if (params.x_hi[t] < kInf) worst = std::max(worst, x - params.x_hi[t]);
  }
  return worst;
}

inline bool check_membership(const DeviceParams& params, const Profile& u, double tol) {
  return membership_violation(params, u) <= tol;
}

enum class DeviceFault { none, bound_order, infeasible };

struct ValidationResult {
  DeviceFault fault = DeviceFault::none;
  std::string detail;
  bool ok() const { return fault == DeviceFault::none; }
};

// Decides whether the flexibility set is nonempty by propagating the
// reachable state-of-charge interval forwards, then backwards. The forward
// pass alone is exact for this chain structure; the backward pass is kept as
// an independent cross-check of the same answer.
inline ValidationResult validate(const DeviceParams& p) {
  const int horizon = p.horizon();
  if (horizon < 1) return {DeviceFault::bound_order, "empty horizon"};
  if (p.u_hi.size() != p.u_lo.size() || p.x_lo.size() != p.u_lo.size() ||
      p.x_hi.size() != p.u_lo.size())
    return {DeviceFault::bound_order, "bound vectors have mismatched lengths"};
  for (int t = 0; t < horizon; ++t) {
    if (std::isnan(p.u_lo[t]) || std::isnan(p.u_hi[t]) || std::isnan(p.x_lo[t]) ||
        std::isnan(p.x_hi[t]))
      return {DeviceFault::bound_order, "NaN bound at step " + std::to_string(t + 1)};
    if (!std::isfinite(p.u_lo[t]) || !std::isfinite(p.u_hi[t]))
      return {DeviceFault::bound_order, "power bound not finite at step " + std::to_string(t + 1)};
    if (p.u_lo[t] > p.u_hi[t])
      return {DeviceFault::bound_order, "u_lo > u_hi at step " + std::to_string(t + 1)};
    if (p.x_lo[t] > p.x_hi[t])
      return {DeviceFault::bound_order, "x_lo > x_hi at step " + std::to_string(t + 1)};
  }

  double lo = 0, hi = 0;  // reachable SoC interval after each step
  for (int t = 0; t < horizon; ++t) {
    lo = std::max(lo + p.u_lo[t], p.x_lo[t]);
    hi = std::min(hi + p.u_hi[t], p.x_hi[t]);
    if (lo > hi)
      return {DeviceFault::infeasible,
              "reachable SoC interval empty at step " + std::to_string(t + 1)};
  }

  // Backward pass: interval of SoC values from which the tail stays feasible.
  double blo = p.x_lo[horizon - 1], bhi = p.x_hi[horizon - 1];
  for (int t = horizon - 1; t >= 1; --t) {
    blo = std::max(blo - p.u_hi[t], p.x_lo[t - 1]);
    bhi = std::min(bhi - p.u_lo[t], p.x_hi[t - 1]);
    if (blo > bhi)
      return {DeviceFault::infeasible,
              "backward SoC interval empty at step " + std::to_string(t)};
  }
  blo -= p.u_hi[0];
  bhi -= p.u_lo[0];
  if (blo > 0 || bhi < 0)
    return {DeviceFault::infeasible, "initial SoC 0 cannot reach a feasible trajectory"};

  return {};
}

inline std::string to_string(DeviceKind k) {
  switch (k) {
    case DeviceKind::ev: return "ev";
    case DeviceKind::ess: return "ess";
    case DeviceKind::generation: return "generation";
    case DeviceKind::fixed_load: return "fixed_load";
    case DeviceKind::raw: return "raw";
  }
  throw std::logic_error("unknown device kind");
}

inline DeviceKind device_kind_from_string(const std::string& s) {
  if (s == "ev") return DeviceKind::ev;
  if (s == "ess") return DeviceKind::ess;
  if (s == "generation") return DeviceKind::generation;
  if (s == "fixed_load") return DeviceKind::fixed_load;
  if (s == "raw") return DeviceKind::raw;
  throw std::invalid_argument("unknown device kind: " + s);
}

inline void check_population(const Population& pop) {
  require(pop.horizon >= 1, "population: horizon must be positive");
  std::vector<std::string> ids;
  ids.reserve(pop.devices.size());
  for (const auto& d : pop.devices) {
    require(d.params.horizon() == pop.horizon,
            "population: device " + d.id + " has a different horizon");
    ids.push_back(d.id);
  }
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 1; i < ids.size(); ++i)
    require(ids[i] != ids[i - 1], "population: duplicate device id " + ids[i]);
}

}  // namespace flexpoly
