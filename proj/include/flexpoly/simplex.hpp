#pragma once

#include <cstddef>
#include <vector>

#include "flexpoly/core.hpp"

namespace flexpoly {

enum class LpStatus { optimal, infeasible, unbounded };

// min c'x  s.t.  a_ub x <= b_ub,  a_eq x = b_eq,  lo <= x <= hi.
// lo/hi entries may be +-inf; lo/hi must have the same length as c.
struct LpProblem {
  std::vector<double> c;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
  std::vector<double> lo, hi;
};

// Duals follow the pricing convention: for a column with objective
// coefficient c_j, inequality coefficients a_j and equality coefficients
// g_j, its reduced cost is c_j + dual_ub' a_j - dual_eq' g_j, and
// dual_ub >= 0 at an optimum.
struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0;
  std::vector<double> dual_ub;
  std::vector<double> dual_eq;
  int pivots = 0;
};

namespace detail {

class DenseSimplex {
 public:
  explicit DenseSimplex(const LpProblem& lp) : lp_(lp) { build(); }

  LpSolution solve() {
    LpSolution out;

    // Phase 1: minimize the artificial total.
    set_costs(phase1_costs_);
    const Run r1 = bland_loop(/*allow_unbounded=*/false);
    out.pivots += r1.pivots;
    if (objective_value() > feas_tol_) {
      out.status = LpStatus::infeasible;
      return out;
    }
    drive_out_artificials();

    // Phase 2: the real objective, artificial columns barred from entering.
    set_costs(phase2_costs_);
    const Run r2 = bland_loop(/*allow_unbounded=*/true);
    out.pivots += r2.pivots;
    if (r2.unbounded) {
      out.status = LpStatus::unbounded;
      return out;
    }

    out.status = LpStatus::optimal;
    extract_primal(out);
    extract_duals(out);
    return out;
  }

 private:
  struct VarMap {
    int col = -1;        // main standard-form column
    int neg_col = -1;    // second column of a free split
    double shift = 0;    // x = shift + sign*y  (or y_pos - y_neg)
    double sign = 1;
  };

  struct Run {
    int pivots = 0;
    bool unbounded = false;
  };

  static constexpr double kPivTol = 1e-10;

  const LpProblem& lp_;
  int n_user_ = 0;
  int n_rows_ = 0;
  int n_struct_ = 0;     // structural + slack columns
  int n_total_ = 0;      // including artificials
  std::vector<VarMap> vmap_;
  std::vector<std::vector<double>> tab_;  // n_rows_ x (n_total_ + 1), rhs last
  std::vector<std::vector<double>> orig_; // frozen copy for dual extraction
  std::vector<double> red_;               // reduced-cost row
  double z_ = 0;                          // objective of the current costs
  std::vector<int> basis_;
  std::vector<double> phase1_costs_, phase2_costs_;
  std::vector<int> row_of_ub_, row_of_eq_;  // user row -> standard row
  std::vector<double> flip_;                // +-1 per standard row
  double feas_tol_ = 1e-9;

  void build() {
    n_user_ = static_cast<int>(lp_.c.size());
    require(n_user_ >= 1, "simplex: need at least one variable");
    require(lp_.lo.size() == lp_.c.size() && lp_.hi.size() == lp_.c.size(),
            "simplex: bounds length mismatch");
    for (const auto& row : lp_.a_ub) require(static_cast<int>(row.size()) == n_user_, "simplex: a_ub row length");
    for (const auto& row : lp_.a_eq) require(static_cast<int>(row.size()) == n_user_, "simplex: a_eq row length");
    require(lp_.a_ub.size() == lp_.b_ub.size() && lp_.a_eq.size() == lp_.b_eq.size(),
            "simplex: rhs length mismatch");

    // Variable substitutions to reach y >= 0.
    int next = 0;
    std::vector<std::pair<int, double>> bound_rows;  // (user var, width) for lo/hi boxes
    vmap_.resize(static_cast<std::size_t>(n_user_));
    for (int j = 0; j < n_user_; ++j) {
      const double lo = lp_.lo[j], hi = lp_.hi[j];
      require(!(std::isnan(lo) || std::isnan(hi)) && lo <= hi, "simplex: bad variable bounds");
      auto& vm = vmap_[static_cast<std::size_t>(j)];
      if (lo > -kInf) {
        vm = {next++, -1, lo, 1.0};
        if (hi < kInf) bound_rows.push_back({j, hi - lo});
      } else if (hi < kInf) {
        vm = {next++, -1, hi, -1.0};
      } else {
        vm.col = next++;
        vm.neg_col = next++;
      }
    }
    const int n_y = next;

    const int m_ub = static_cast<int>(lp_.a_ub.size());
    const int m_box = static_cast<int>(bound_rows.size());
    const int m_eq = static_cast<int>(lp_.a_eq.size());
    n_rows_ = m_ub + m_box + m_eq;
    const int n_slack = m_ub + m_box;
    n_struct_ = n_y + n_slack;
    n_total_ = n_struct_ + n_rows_;  // one artificial per row

    tab_.assign(static_cast<std::size_t>(n_rows_),
                std::vector<double>(static_cast<std::size_t>(n_total_) + 1, 0.0));
    flip_.assign(static_cast<std::size_t>(n_rows_), 1.0);
    row_of_ub_.resize(static_cast<std::size_t>(m_ub));
    row_of_eq_.resize(static_cast<std::size_t>(m_eq));

    double bscale = 1.0;
    auto fill_row = [&](int r, const std::vector<double>& coeffs, double rhs, int slack) {
      auto& row = tab_[static_cast<std::size_t>(r)];
      double adj = rhs;
      for (int j = 0; j < n_user_; ++j) {
        const double a = coeffs[static_cast<std::size_t>(j)];
        require(std::isfinite(a), "simplex: non-finite coefficient");
        if (a == 0.0) continue;
        const auto& vm = vmap_[static_cast<std::size_t>(j)];
        if (vm.neg_col >= 0) {
          row[static_cast<std::size_t>(vm.col)] += a;
          row[static_cast<std::size_t>(vm.neg_col)] -= a;
        } else {
          row[static_cast<std::size_t>(vm.col)] += a * vm.sign;
          adj -= a * vm.shift;
        }
      }
      if (slack >= 0) row[static_cast<std::size_t>(slack)] = 1.0;
      row[static_cast<std::size_t>(n_total_)] = adj;
      bscale = std::max(bscale, std::abs(adj));
    };

    int r = 0, slack = n_y;
    for (int i = 0; i < m_ub; ++i, ++r, ++slack) {
      require(std::isfinite(lp_.b_ub[static_cast<std::size_t>(i)]), "simplex: non-finite rhs");
      row_of_ub_[static_cast<std::size_t>(i)] = r;
      fill_row(r, lp_.a_ub[static_cast<std::size_t>(i)], lp_.b_ub[static_cast<std::size_t>(i)], slack);
    }
    for (const auto& [j, width] : bound_rows) {
      auto& row = tab_[static_cast<std::size_t>(r)];
      row[static_cast<std::size_t>(vmap_[static_cast<std::size_t>(j)].col)] = 1.0;
      row[static_cast<std::size_t>(slack)] = 1.0;
      row[static_cast<std::size_t>(n_total_)] = width;
      ++r;
      ++slack;
    }
    for (int i = 0; i < m_eq; ++i, ++r) {
      require(std::isfinite(lp_.b_eq[static_cast<std::size_t>(i)]), "simplex: non-finite rhs");
      row_of_eq_[static_cast<std::size_t>(i)] = r;
      fill_row(r, lp_.a_eq[static_cast<std::size_t>(i)], lp_.b_eq[static_cast<std::size_t>(i)], -1);
    }
    feas_tol_ = 1e-9 * (1.0 + bscale);

    // Make every rhs nonnegative, then give each row its artificial column.
    basis_.assign(static_cast<std::size_t>(n_rows_), -1);
    for (int i = 0; i < n_rows_; ++i) {
      auto& row = tab_[static_cast<std::size_t>(i)];
      if (row[static_cast<std::size_t>(n_total_)] < 0) {
        flip_[static_cast<std::size_t>(i)] = -1.0;
        for (auto& v : row) v = -v;
      }
      row[static_cast<std::size_t>(n_struct_ + i)] = 1.0;
      basis_[static_cast<std::size_t>(i)] = n_struct_ + i;
    }
    orig_ = tab_;

    // Costs for the two phases over standard-form columns.
    phase1_costs_.assign(static_cast<std::size_t>(n_total_), 0.0);
    for (int i = 0; i < n_rows_; ++i) phase1_costs_[static_cast<std::size_t>(n_struct_ + i)] = 1.0;
    phase2_costs_.assign(static_cast<std::size_t>(n_total_), 0.0);
    for (int j = 0; j < n_user_; ++j) {
      const auto& vm = vmap_[static_cast<std::size_t>(j)];
      const double c = lp_.c[static_cast<std::size_t>(j)];
      require(std::isfinite(c), "simplex: non-finite objective coefficient");
      if (vm.neg_col >= 0) {
        phase2_costs_[static_cast<std::size_t>(vm.col)] += c;
        phase2_costs_[static_cast<std::size_t>(vm.neg_col)] -= c;
      } else {
        phase2_costs_[static_cast<std::size_t>(vm.col)] += c * vm.sign;
      }
    }
  }

  std::vector<double> costs_;

  void set_costs(const std::vector<double>& costs) {
    costs_ = costs;
    red_.assign(static_cast<std::size_t>(n_total_), 0.0);
    z_ = 0;
    for (int j = 0; j < n_total_; ++j) red_[static_cast<std::size_t>(j)] = costs_[static_cast<std::size_t>(j)];
    for (int i = 0; i < n_rows_; ++i) {
      const double cb = costs_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
      if (cb == 0.0) continue;
      const auto& row = tab_[static_cast<std::size_t>(i)];
      for (int j = 0; j < n_total_; ++j) red_[static_cast<std::size_t>(j)] -= cb * row[static_cast<std::size_t>(j)];
      z_ += cb * row[static_cast<std::size_t>(n_total_)];
    }
  }

  double objective_value() const { return z_; }

  bool artificial(int col) const { return col >= n_struct_; }

  void pivot(int row, int col) {
    auto& pr = tab_[static_cast<std::size_t>(row)];
    const double piv = pr[static_cast<std::size_t>(col)];
    for (auto& v : pr) v /= piv;
    for (int i = 0; i < n_rows_; ++i) {
      if (i == row) continue;
      auto& other = tab_[static_cast<std::size_t>(i)];
      const double f = other[static_cast<std::size_t>(col)];
      if (f == 0.0) continue;
      for (int j = 0; j <= n_total_; ++j)
        other[static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
      other[static_cast<std::size_t>(col)] = 0.0;
    }
    const double rf = red_[static_cast<std::size_t>(col)];
    if (rf != 0.0) {
      for (int j = 0; j < n_total_; ++j)
        red_[static_cast<std::size_t>(j)] -= rf * pr[static_cast<std::size_t>(j)];
      red_[static_cast<std::size_t>(col)] = 0.0;
      z_ += rf * pr[static_cast<std::size_t>(n_total_)];
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // Bland's rule: enter the lowest-index improving column, leave by the
  // lowest basis index among the minimum-ratio rows. Anti-cycling, and the
  // determinism matters more here than speed.
  Run bland_loop(bool allow_unbounded) {
    Run run;
    const bool phase2 = allow_unbounded;
    const int pivot_cap = 20000 + 200 * (n_rows_ + n_total_);
    for (;;) {
      int enter = -1;
      for (int j = 0; j < n_total_; ++j) {
        if (phase2 && artificial(j)) continue;
        if (red_[static_cast<std::size_t>(j)] < -kPivTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return run;

      int leave = -1;
      double best = 0;
      for (int i = 0; i < n_rows_; ++i) {
        const double a = tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
        if (a <= kPivTol) continue;
        const double ratio = tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(n_total_)] / a;
        if (leave < 0 || ratio < best - 1e-12 ||
            (ratio <= best + 1e-12 &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) {
        require(allow_unbounded, "simplex: phase-1 objective unbounded below");
        run.unbounded = true;
        return run;
      }
      pivot(leave, enter);
      if (++run.pivots > pivot_cap)
        throw std::runtime_error("simplex: pivot limit exceeded");
    }
  }

  // Swap zero-level artificials out of the basis where a structural column
  // is available; rows with none are redundant and stay inert (their basic
  // artificial keeps value zero and the row never pivots again).
  void drive_out_artificials() {
    for (int i = 0; i < n_rows_; ++i) {
      if (!artificial(basis_[static_cast<std::size_t>(i)])) continue;
      const auto& row = tab_[static_cast<std::size_t>(i)];
      for (int j = 0; j < n_struct_; ++j) {
        if (std::abs(row[static_cast<std::size_t>(j)]) > 1e-8) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  void extract_primal(LpSolution& out) const {
    std::vector<double> y(static_cast<std::size_t>(n_total_), 0.0);
    for (int i = 0; i < n_rows_; ++i)
      y[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] =
          tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(n_total_)];
    out.x.assign(static_cast<std::size_t>(n_user_), 0.0);
    for (int j = 0; j < n_user_; ++j) {
      const auto& vm = vmap_[static_cast<std::size_t>(j)];
      if (vm.neg_col >= 0)
        out.x[static_cast<std::size_t>(j)] =
            y[static_cast<std::size_t>(vm.col)] - y[static_cast<std::size_t>(vm.neg_col)];
      else
        out.x[static_cast<std::size_t>(j)] = vm.shift + vm.sign * y[static_cast<std::size_t>(vm.col)];
    }
    out.objective = dot(lp_.c, out.x);
  }

  // Solve B'y = c_B on the frozen constraint matrix, then map the row duals
  // back through the per-row sign flips.
  void extract_duals(LpSolution& out) const {
    const int m = n_rows_;
    std::vector<std::vector<double>> bt(static_cast<std::size_t>(m),
                                        std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
    for (int i = 0; i < m; ++i) {
      const int col = basis_[static_cast<std::size_t>(i)];
      for (int r = 0; r < m; ++r)
        bt[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] =
            orig_[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
      bt[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] =
          costs_[static_cast<std::size_t>(col)];
    }
    // Gaussian elimination with partial pivoting.
    for (int k = 0; k < m; ++k) {
      int p = k;
      for (int i = k + 1; i < m; ++i)
        if (std::abs(bt[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) >
            std::abs(bt[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)]))
          p = i;
      std::swap(bt[static_cast<std::size_t>(k)], bt[static_cast<std::size_t>(p)]);
      const double diag = bt[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
      if (std::abs(diag) < 1e-13) continue;  // singular direction: dual left at zero
      for (int i = 0; i < m; ++i) {
        if (i == k) continue;
        const double f =
            bt[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] / diag;
        if (f == 0.0) continue;
        for (int j = k; j <= m; ++j)
          bt[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
              f * bt[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      }
    }
    std::vector<double> yrow(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < m; ++k) {
      const double diag = bt[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
      if (std::abs(diag) >= 1e-13)
        yrow[static_cast<std::size_t>(k)] =
            bt[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] / diag;
    }

    out.dual_ub.assign(lp_.b_ub.size(), 0.0);
    for (std::size_t i = 0; i < lp_.b_ub.size(); ++i) {
      const int r = row_of_ub_[i];
      out.dual_ub[i] = -flip_[static_cast<std::size_t>(r)] * yrow[static_cast<std::size_t>(r)];
    }
    out.dual_eq.assign(lp_.b_eq.size(), 0.0);
    for (std::size_t i = 0; i < lp_.b_eq.size(); ++i) {
      const int r = row_of_eq_[i];
      out.dual_eq[i] = flip_[static_cast<std::size_t>(r)] * yrow[static_cast<std::size_t>(r)];
    }
  }
};

}  // namespace detail

inline LpSolution simplex_solve(const LpProblem& lp) {
  detail::DenseSimplex s(lp);
  return s.solve();
}

inline std::vector<double> free_bounds_lo(int n) { return std::vector<double>(static_cast<std::size_t>(n), -kInf); }
inline std::vector<double> free_bounds_hi(int n) { return std::vector<double>(static_cast<std::size_t>(n), kInf); }

}  // namespace flexpoly
