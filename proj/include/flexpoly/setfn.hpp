#pragma once

#include <cstdint>
#include <memory>

#include "flexpoly/core.hpp"

namespace flexpoly {

// Subset of a ground set of n elements, with cached cardinality.
class SubsetMask {
 public:
  SubsetMask() = default;
  explicit SubsetMask(int n) : bits_(static_cast<std::size_t>(n), 0) {}

  static SubsetMask from_bits(std::uint64_t bits, int n) {
    require(n >= 0 && n <= 64, "SubsetMask: ground set too large for bit literal");
    SubsetMask m(n);
    for (int i = 0; i < n; ++i)
      if (bits >> i & 1u) m.set(i, true);
    return m;
  }

  int ground_size() const { return static_cast<int>(bits_.size()); }
  int count() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool contains(int i) const { return bits_[static_cast<std::size_t>(i)] != 0; }

  void set(int i, bool value) {
    char v = value ? 1 : 0;
    count_ += static_cast<int>(v) - static_cast<int>(bits_[static_cast<std::size_t>(i)]);
    bits_[static_cast<std::size_t>(i)] = v;
  }

  SubsetMask complement() const {
    SubsetMask m(ground_size());
    for (int i = 0; i < ground_size(); ++i) m.set(i, !contains(i));
    return m;
  }

  std::uint64_t to_bits() const {
    require(ground_size() <= 64, "SubsetMask: too large for bit literal");
    std::uint64_t b = 0;
    for (int i = 0; i < ground_size(); ++i)
      if (contains(i)) b |= std::uint64_t{1} << i;
    return b;
  }

 private:
  std::vector<char> bits_;
  int count_ = 0;
};

// Bounds a set-function pair assigns to one subset of steps: lo is the least
// total energy the device(s) can consume over those steps, hi the greatest.
struct SubsetBounds {
  double lo = 0;
  double hi = 0;
};

// Evaluator for a super-/submodular pair (p, b) defining a g-polymatroid
// over the step ground set. eval must return p(A) in .lo and b(A) in .hi,
// with p(empty) = b(empty) = 0.
class ParamodularOracle {
 public:
  virtual ~ParamodularOracle() = default;
  virtual int horizon() const = 0;
  virtual SubsetBounds eval(const SubsetMask& a) const = 0;
};

// Exact set-function pair of a single device's flexibility set.
//
// The pair is defined by repeatedly intersecting the per-step power box with
// one SoC plank per step. Intersecting the plank for step s only reshapes
// the pair on subsets of {1..s}; outside that prefix both functions stay the
// modular power sums. Tracking the reshaped prefix values for A and for its
// complement is therefore enough to evaluate the full recursion in one
// forward sweep: O(T) time and O(1) state per call.
class DeviceOracle final : public ParamodularOracle {
 public:
  explicit DeviceOracle(DeviceParams params) : params_(std::move(params)) {
    auto v = validate(params_);
    require(v.ok(), "DeviceOracle: invalid device: " + v.detail);
  }

  int horizon() const override { return params_.horizon(); }
  const DeviceParams& params() const { return params_; }

  SubsetBounds eval(const SubsetMask& a) const override {
    require(a.ground_size() == params_.horizon(), "eval: mask size mismatch");
    double in_lo = 0, in_hi = 0;    // pair values on the swept prefix of A
    double out_lo = 0, out_hi = 0;  // same for the complement of A
    const int horizon = params_.horizon();
    for (int t = 0; t < horizon; ++t) {
      const bool in = a.contains(t);
      const double pa = in_lo + (in ? params_.u_lo[t] : 0.0);
      const double ba = in_hi + (in ? params_.u_hi[t] : 0.0);
      const double pc = out_lo + (in ? 0.0 : params_.u_lo[t]);
      const double bc = out_hi + (in ? 0.0 : params_.u_hi[t]);
      // pa/ba/pc/bc stay finite (power bounds are finite), so the plank
      // terms below saturate cleanly when a SoC bound is infinite.
      in_lo = std::max(pa, params_.x_lo[t] - bc);
      in_hi = std::min(ba, params_.x_hi[t] - pc);
      out_lo = std::max(pc, params_.x_lo[t] - ba);
      out_hi = std::min(bc, params_.x_hi[t] - pa);
    }
    return {in_lo, in_hi};
  }

 private:
  DeviceParams params_;
};

namespace detail {

inline double modular_sum(const std::vector<double>& w, std::uint64_t mask) {
  double s = 0;
  for (std::size_t t = 0; t < w.size(); ++t)
    if (mask >> t & 1u) s += w[t];
  return s;
}

inline double naive_lower(const DeviceParams& p, int level, std::uint64_t a);

inline double naive_upper(const DeviceParams& p, int level, std::uint64_t a) {
  if (level == 0) return modular_sum(p.u_hi, a);
  const std::uint64_t prefix = (std::uint64_t{1} << level) - 1;
  const std::uint64_t full = (std::uint64_t{1} << p.horizon()) - 1;
  const double head = naive_upper(p, level - 1, a & prefix);
  const double plank = p.x_hi[level - 1] - naive_lower(p, level - 1, ~a & full & prefix);
  return std::min(head, plank) + modular_sum(p.u_hi, a & ~prefix);
}

inline double naive_lower(const DeviceParams& p, int level, std::uint64_t a) {
  if (level == 0) return modular_sum(p.u_lo, a);
  const std::uint64_t prefix = (std::uint64_t{1} << level) - 1;
  const std::uint64_t full = (std::uint64_t{1} << p.horizon()) - 1;
  const double head = naive_lower(p, level - 1, a & prefix);
  const double plank = p.x_lo[level - 1] - naive_upper(p, level - 1, ~a & full & prefix);
  return std::max(head, plank) + modular_sum(p.u_lo, a & ~prefix);
}

}  // namespace detail

// Reference evaluator that expands the plank-intersection recursion
// literally, one level per step. Exponential in T; test use only.
inline SubsetBounds eval_device_naive(const DeviceParams& params, const SubsetMask& a) {
  require(params.horizon() <= 16, "eval_device_naive: horizon too large for literal expansion");
  require(a.ground_size() == params.horizon(), "eval_device_naive: mask size mismatch");
  const std::uint64_t bits = a.to_bits();
  return {detail::naive_lower(params, params.horizon(), bits),
          detail::naive_upper(params, params.horizon(), bits)};
}

// Exhaustively checks that (p, b) is a paramodular pair: zero at the empty
// set, b submodular, p supermodular, and the cross-inequality
// b(A) - p(B) >= b(A\B) - p(B\A) over all subset pairs.
inline bool check_paramodular(const ParamodularOracle& oracle, double tol = 1e-9) {
  const int n = oracle.horizon();
  require(n <= 12, "check_paramodular: ground set too large for exhaustive pair check");
  const std::uint64_t full = std::uint64_t{1} << n;
  std::vector<SubsetBounds> vals(full);
  for (std::uint64_t m = 0; m < full; ++m) vals[m] = oracle.eval(SubsetMask::from_bits(m, n));

  if (std::abs(vals[0].lo) > tol || std::abs(vals[0].hi) > tol) return false;
  for (std::uint64_t a = 0; a < full; ++a) {
    for (std::uint64_t b = 0; b < full; ++b) {
      const double b_sub =
          vals[a].hi + vals[b].hi - vals[a | b].hi - vals[a & b].hi;
      if (b_sub < -tol) return false;
      const double p_sup =
          vals[a | b].lo + vals[a & b].lo - vals[a].lo - vals[b].lo;
      if (p_sup < -tol) return false;
      const double cross =
          vals[a].hi - vals[b].lo - vals[a & ~b].hi + vals[b & ~a].lo;
      if (cross < -tol) return false;
    }
  }
  return true;
}

}  // namespace flexpoly
