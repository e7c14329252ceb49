#pragma once

#include <map>
#include <memory>
#include <optional>

#include "flexpoly/setfn.hpp"

namespace flexpoly {

// Minkowski-sum oracle: the pair of the aggregate flexibility set is the
// componentwise sum of the member pairs. Members are summed in a fixed
// order so repeated evaluations are reproducible.
class AggregateOracle final : public ParamodularOracle {
 public:
  AggregateOracle(int horizon, std::vector<std::shared_ptr<const ParamodularOracle>> members)
      : horizon_(horizon), members_(std::move(members)) {
    require(horizon_ >= 1, "AggregateOracle: horizon must be positive");
    for (const auto& m : members_) {
      require(m != nullptr, "AggregateOracle: null member");
      require(m->horizon() == horizon_, "AggregateOracle: member horizon mismatch");
    }
  }

  int horizon() const override { return horizon_; }
  const std::vector<std::shared_ptr<const ParamodularOracle>>& members() const { return members_; }

  SubsetBounds eval(const SubsetMask& a) const override {
    require(a.ground_size() == horizon_, "eval: mask size mismatch");
    SubsetBounds total;
    for (const auto& m : members_) {
      const SubsetBounds v = m->eval(a);
      total.lo += v.lo;
      total.hi += v.hi;
    }
    return total;
  }

 private:
  int horizon_;
  std::vector<std::shared_ptr<const ParamodularOracle>> members_;
};

inline std::shared_ptr<const ParamodularOracle> make_device_oracle(const DeviceParams& params) {
  return std::make_shared<DeviceOracle>(params);
}

inline std::vector<std::shared_ptr<const ParamodularOracle>> make_device_oracles(
    const Population& pop) {
  std::vector<std::shared_ptr<const ParamodularOracle>> out;
  out.reserve(pop.devices.size());
  for (const auto& d : pop.devices) out.push_back(make_device_oracle(d.params));
  return out;
}

inline std::shared_ptr<const AggregateOracle> make_population_oracle(const Population& pop) {
  return std::make_shared<AggregateOracle>(pop.horizon, make_device_oracles(pop));
}

// Charging-only EV reduced to what its set functions depend on: the window
// [arrive, depart] (1-based), the charging rate cap m, and the admissible
// final energy net of what is already on board.
struct EvChargeSpec {
  int arrive = 1;
  int depart = 1;
  double m = 0;
  double e_min = 0;  // required final energy, net of the initial charge
  double e_max = 0;  // allowed final energy, net of the initial charge
};

// Profile over a window of `len` steps that front-loads charging: full rate
// until `energy` is met, a fractional step, then idle.
inline std::vector<double> ev_frontload_profile(int len, double m, double energy) {
  std::vector<double> v(static_cast<std::size_t>(len), 0.0);
  for (int t = 0; t < len; ++t)
    v[static_cast<std::size_t>(t)] = std::min(m, std::max(0.0, energy - t * m));
  return v;
}

// Mirror image: idle as long as possible, then a fractional step, then full
// rate so `energy` lands exactly at the end of the window.
inline std::vector<double> ev_delay_profile(int len, double m, double energy) {
  std::vector<double> v(static_cast<std::size_t>(len), 0.0);
  for (int t = 0; t < len; ++t)
    v[static_cast<std::size_t>(t)] = std::min(m, std::max(0.0, energy - (len - 1 - t) * m));
  return v;
}

// Closed-form pair of one charging-only EV: with k steps of the window in A,
// the device can shift at most (|window|-k)*m of its required energy out of
// A, and can consume at most k*m (capped by the final-energy ceiling) in A.
inline SubsetBounds eval_charging_ev(const EvChargeSpec& s, const SubsetMask& a) {
  int k = 0;
  for (int t = s.arrive; t <= s.depart; ++t)
    if (t - 1 < a.ground_size() && a.contains(t - 1)) ++k;
  const int len = s.depart - s.arrive + 1;
  return {std::max(s.e_min - (len - k) * s.m, 0.0), std::min(k * s.m, s.e_max)};
}

// Recovers the charging-only EV structure from raw device parameters, or
// nullopt if the parameters do not have that exact shape.
inline std::optional<EvChargeSpec> recover_charging_ev(const DeviceParams& p) {
  const int horizon = p.horizon();
  if (horizon < 1) return std::nullopt;
  for (double v : p.u_lo)
    if (v != 0.0) return std::nullopt;  // discharging capability

  int a = -1, d = -1;
  for (int t = 0; t < horizon; ++t) {
    if (p.u_hi[t] != 0.0) {
      if (a < 0) a = t;
      d = t;
    }
  }
  EvChargeSpec spec;
  if (a < 0) {
    // Zero-power device: the all-zero profile is its only member, so it
    // contributes nothing. Only valid if zero satisfies every SoC bound.
    for (int t = 0; t < horizon; ++t)
      if (p.x_lo[static_cast<std::size_t>(t)] > 0 || p.x_hi[static_cast<std::size_t>(t)] < 0)
        return std::nullopt;
    return spec;  // unit window, m = e_min = e_max = 0
  }
  spec.m = p.u_hi[a];
  if (spec.m < 0) return std::nullopt;
  for (int t = a; t <= d; ++t)
    if (p.u_hi[t] != spec.m) return std::nullopt;
  spec.arrive = a + 1;
  spec.depart = d + 1;

  // SoC bounds must be flat before departure and flat at the target after.
  spec.e_min = p.x_lo[static_cast<std::size_t>(horizon - 1)];
  spec.e_max = p.x_hi[static_cast<std::size_t>(horizon - 1)];
  if (!std::isfinite(spec.e_min) || !std::isfinite(spec.e_max)) return std::nullopt;
  for (int t = d; t < horizon; ++t)
    if (p.x_lo[static_cast<std::size_t>(t)] != spec.e_min ||
        p.x_hi[static_cast<std::size_t>(t)] != spec.e_max)
      return std::nullopt;
  if (d >= 1) {
    const double head_lo = p.x_lo[0], head_hi = p.x_hi[0];
    if (head_lo > 0 || head_hi < spec.e_max) return std::nullopt;
    for (int t = 0; t < d; ++t)
      if (p.x_lo[static_cast<std::size_t>(t)] != head_lo ||
          p.x_hi[static_cast<std::size_t>(t)] != head_hi)
        return std::nullopt;
  }
  return spec;
}

// Fleet oracle for charging-only EVs. Vehicles sharing an arrival/departure
// window are merged into one bucket holding the summed extremal profiles, so
// the representation size depends on the number of distinct windows, never
// on the fleet size.
class EvFleetOracle final : public ParamodularOracle {
 public:
  EvFleetOracle(int horizon, const std::vector<EvChargeSpec>& fleet) : horizon_(horizon) {
    require(horizon_ >= 1, "EvFleetOracle: horizon must be positive");
    std::map<std::pair<int, int>, std::size_t> index;
    for (const auto& s : fleet) {
      require(1 <= s.arrive && s.arrive <= s.depart && s.depart <= horizon_,
              "EvFleetOracle: window outside horizon");
      require(s.m >= 0, "EvFleetOracle: negative charging rate");
      const int len = s.depart - s.arrive + 1;
      auto [it, fresh] = index.try_emplace({s.arrive, s.depart}, buckets_.size());
      if (fresh) {
        Bucket b;
        b.arrive = s.arrive;
        b.depart = s.depart;
        b.lo_prefix.assign(static_cast<std::size_t>(len) + 1, 0.0);
        b.hi_prefix.assign(static_cast<std::size_t>(len) + 1, 0.0);
        buckets_.push_back(std::move(b));
      }
      Bucket& b = buckets_[it->second];
      const auto delay = ev_delay_profile(len, s.m, std::max(s.e_min, 0.0));
      const auto front = ev_frontload_profile(len, s.m, std::max(s.e_max, 0.0));
      for (int t = 0; t < len; ++t) {
        b.lo_prefix[static_cast<std::size_t>(t) + 1] += delay[static_cast<std::size_t>(t)];
        b.hi_prefix[static_cast<std::size_t>(t) + 1] += front[static_cast<std::size_t>(t)];
      }
    }
    for (auto& b : buckets_)
      for (std::size_t t = 1; t < b.lo_prefix.size(); ++t) {
        b.lo_prefix[t] += b.lo_prefix[t - 1];
        b.hi_prefix[t] += b.hi_prefix[t - 1];
      }
  }

  int horizon() const override { return horizon_; }
  std::size_t bucket_count() const { return buckets_.size(); }

  SubsetBounds eval(const SubsetMask& a) const override {
    require(a.ground_size() == horizon_, "eval: mask size mismatch");
    // One prefix-count pass over A, then O(1) per bucket.
    std::vector<int> cnt(static_cast<std::size_t>(horizon_) + 1, 0);
    for (int t = 0; t < horizon_; ++t)
      cnt[static_cast<std::size_t>(t) + 1] = cnt[static_cast<std::size_t>(t)] + (a.contains(t) ? 1 : 0);
    SubsetBounds total;
    for (const auto& b : buckets_) {
      const int k = cnt[static_cast<std::size_t>(b.depart)] - cnt[static_cast<std::size_t>(b.arrive - 1)];
      total.lo += b.lo_prefix[static_cast<std::size_t>(k)];
      total.hi += b.hi_prefix[static_cast<std::size_t>(k)];
    }
    return total;
  }

 private:
  struct Bucket {
    int arrive = 1, depart = 1;
    std::vector<double> lo_prefix, hi_prefix;  // k-th entry: sum of first k steps
  };
  int horizon_ = 0;
  std::vector<Bucket> buckets_;
};

// Builds the compact fleet oracle from a population of charging-only EVs.
// Devices must be valid and carry the exact charging-only parameter shape.
inline EvFleetOracle build_ev_fleet(const Population& fleet) {
  std::vector<EvChargeSpec> specs;
  specs.reserve(fleet.devices.size());
  for (const auto& d : fleet.devices) {
    const auto v = validate(d.params);
    require(v.ok(), "build_ev_fleet: invalid device " + d.id + ": " + v.detail);
    auto spec = recover_charging_ev(d.params);
    require(spec.has_value(), "build_ev_fleet: device " + d.id + " is not a charging-only EV");
    specs.push_back(*spec);
  }
  return EvFleetOracle(fleet.horizon, specs);
}

}  // namespace flexpoly
