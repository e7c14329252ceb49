#pragma once

#include "flexpoly/core.hpp"
#include "flexpoly/optimize.hpp"

namespace flexpoly {

struct DeviceSchedule {
  std::string id;
  Profile u;
  bool feasible = false;
};

struct DisaggregationResult {
  std::vector<DeviceSchedule> schedules;
  double residual = 0;  // inf-norm gap between the target and the schedule sum
  bool ok = false;
};

// Splits a solved aggregate profile among the devices: every atom's ordering
// selects one vertex per device, and each device receives the same convex
// combination of its own vertices. The per-device sums reproduce the
// aggregate vertex for every atom, so the schedules add up to the target.
inline DisaggregationResult disaggregate(const Population& pop, std::vector<Atom> atoms,
                                         const Profile& u_target, double tol = 1e-9) {
  const int horizon = pop.horizon;
  require(static_cast<int>(u_target.size()) == horizon, "disaggregate: target length mismatch");
  require(!atoms.empty(), "disaggregate: no atoms");
  double wsum = 0;
  for (const auto& a : atoms) {
    require(a.weight >= -1e-12, "disaggregate: negative atom weight");
    require(a.vertex.label.size() == horizon + 1, "disaggregate: atom lacks a permutation label");
    wsum += a.weight;
  }
  require(std::abs(wsum - 1.0) <= 1e-9, "disaggregate: atom weights do not sum to one");
  if (static_cast<int>(atoms.size()) > horizon + 1) caratheodory_reduce(atoms, horizon);

  DisaggregationResult out;
  out.schedules.reserve(pop.devices.size());
  Profile total(static_cast<std::size_t>(horizon), 0.0);
  for (const auto& dev : pop.devices) {
    DeviceOracle oracle(dev.params);
    DeviceSchedule sched;
    sched.id = dev.id;
    sched.u.assign(static_cast<std::size_t>(horizon), 0.0);
    for (const auto& atom : atoms) {
      const Vertex v = vertex_from_permutation(oracle, atom.vertex.label);
      for (int t = 0; t < horizon; ++t)
        sched.u[static_cast<std::size_t>(t)] += atom.weight * v.u[static_cast<std::size_t>(t)];
    }
    sched.feasible = check_membership(dev.params, sched.u, tol);
    for (int t = 0; t < horizon; ++t) total[static_cast<std::size_t>(t)] += sched.u[static_cast<std::size_t>(t)];
    out.schedules.push_back(std::move(sched));
  }

  out.residual = 0;
  for (int t = 0; t < horizon; ++t)
    out.residual = std::max(out.residual,
                            std::abs(u_target[static_cast<std::size_t>(t)] - total[static_cast<std::size_t>(t)]));
  out.ok = out.residual <= tol;
  for (const auto& s : out.schedules) out.ok = out.ok && s.feasible;
  return out;
}

struct Violation {
  std::string device_id;  // empty for aggregate-level violations
  std::string kind;       // "residual" or "membership"
  double magnitude = 0;
};

struct VerificationReport {
  double residual = 0;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Recomputes the aggregation residual and every device membership from
// scratch; all failures are collected with their magnitudes instead of
// stopping at the first.
inline VerificationReport verify_disaggregation(const Population& pop,
                                                const std::vector<DeviceSchedule>& schedules,
                                                const Profile& u_target, double tol = 1e-9) {
  const int horizon = pop.horizon;
  require(static_cast<int>(u_target.size()) == horizon, "verify: target length mismatch");
  require(schedules.size() == pop.devices.size(), "verify: schedule count mismatch");

  VerificationReport report;
  Profile total(static_cast<std::size_t>(horizon), 0.0);
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    const auto& dev = pop.devices[i];
    const auto& sched = schedules[i];
    require(sched.id == dev.id, "verify: schedule order does not match the population");
    require(static_cast<int>(sched.u.size()) == horizon, "verify: schedule length mismatch");
    for (int t = 0; t < horizon; ++t) total[static_cast<std::size_t>(t)] += sched.u[static_cast<std::size_t>(t)];
    const double viol = membership_violation(dev.params, sched.u);
    if (viol > tol) report.violations.push_back({dev.id, "membership", viol});
  }
  for (int t = 0; t < horizon; ++t)
    report.residual = std::max(report.residual,
                               std::abs(u_target[static_cast<std::size_t>(t)] - total[static_cast<std::size_t>(t)]));
  if (report.residual > tol) report.violations.push_back({"", "residual", report.residual});
  return report;
}

}  // namespace flexpoly
