#pragma once

#include <functional>
#include <future>
#include <map>
#include <numeric>

#include "flexpoly/setfn.hpp"

namespace flexpoly {

// Ordering of the lifted ground set {aux, 1..T}; element 0 is the auxiliary
// lifting element, element i >= 1 is step i.
struct Permutation {
  std::vector<int> order;

  int size() const { return static_cast<int>(order.size()); }
  bool operator==(const Permutation& o) const { return order == o.order; }
};

inline void check_permutation(const Permutation& pi, int lifted_size) {
  require(pi.size() == lifted_size, "permutation: wrong length");
  std::vector<char> seen(static_cast<std::size_t>(lifted_size), 0);
  for (int v : pi.order) {
    require(0 <= v && v < lifted_size && !seen[static_cast<std::size_t>(v)],
            "permutation: not a bijection over the lifted ground set");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

// Extreme point of the g-polymatroid together with the ordering that
// produces it through the marginal construction.
struct Vertex {
  Profile u;
  Permutation label;
};

struct Atom {
  double weight = 0;
  Vertex vertex;
};

struct CouplingConstraints {
  std::vector<std::vector<double>> rows;  // m x T
  std::vector<double> rhs;                // length m

  int size() const { return static_cast<int>(rows.size()); }
};

inline void check_coupling(const CouplingConstraints& c, int horizon) {
  require(c.rows.size() == c.rhs.size(), "coupling: row/rhs count mismatch");
  for (const auto& row : c.rows) {
    require(static_cast<int>(row.size()) == horizon, "coupling: row length mismatch");
    for (double v : row) require(std::isfinite(v), "coupling: non-finite coefficient");
  }
  for (double v : c.rhs) require(std::isfinite(v), "coupling: non-finite rhs");
}

// Submodular extension of the pair over the lifted ground set {aux} + steps.
// On pure step subsets it is b; once the auxiliary element joins, it flips
// to -p of the complementary steps, which pins u(steps) + u(aux) = 0 on the
// base polyhedron and makes the g-polymatroid its projection.
class LiftedOracle {
 public:
  explicit LiftedOracle(const ParamodularOracle& base) : base_(base) {}

  int ground_size() const { return base_.horizon() + 1; }

  double eval(const SubsetMask& a) const {
    const int horizon = base_.horizon();
    require(a.ground_size() == horizon + 1, "lifted eval: mask size mismatch");
    SubsetMask steps(horizon);
    if (a.contains(0)) {
      for (int t = 0; t < horizon; ++t) steps.set(t, !a.contains(t + 1));
      return -base_.eval(steps).lo;
    }
    for (int t = 0; t < horizon; ++t) steps.set(t, a.contains(t + 1));
    return base_.eval(steps).hi;
  }

 private:
  const ParamodularOracle& base_;
};

namespace detail {

// Marginal values of the lifted function along the prefix chain of `order`.
// The evaluations are independent, so they can be fanned out across threads;
// every thread computes the same doubles, so the result does not depend on
// the thread count.
inline std::vector<double> chain_values(const LiftedOracle& lifted,
                                        const std::vector<int>& order, int threads) {
  const int n = static_cast<int>(order.size());
  std::vector<double> vals(static_cast<std::size_t>(n) + 1, 0.0);
  auto eval_range = [&](int from, int to) {
    for (int k = from; k < to; ++k) {
      SubsetMask prefix(n);
      for (int i = 0; i < k; ++i) prefix.set(order[static_cast<std::size_t>(i)], true);
      vals[static_cast<std::size_t>(k)] = lifted.eval(prefix);
    }
  };
  if (threads <= 1 || n < 4) {
    eval_range(1, n + 1);
  } else {
    const int workers = std::min(threads, n);
    std::vector<std::future<void>> futs;
    futs.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      const int from = 1 + w * n / workers;
      const int to = 1 + (w + 1) * n / workers;
      futs.push_back(std::async(std::launch::async, eval_range, from, to));
    }
    for (auto& f : futs) f.get();
  }
  return vals;
}

}  // namespace detail

// Builds the vertex selected by an ordering of the lifted ground set: each
// element receives the marginal increment of the lifted function along the
// prefix chain, and the auxiliary component is dropped at the end.
inline Vertex vertex_from_permutation(const ParamodularOracle& oracle, const Permutation& pi,
                                      int threads = 1) {
  const int horizon = oracle.horizon();
  check_permutation(pi, horizon + 1);
  const LiftedOracle lifted(oracle);
  const auto vals = detail::chain_values(lifted, pi.order, threads);

  std::vector<double> lifted_point(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (int k = 1; k <= horizon + 1; ++k) {
    const double inc = vals[static_cast<std::size_t>(k)] - vals[static_cast<std::size_t>(k) - 1];
    require(!std::isnan(inc), "vertex construction: oracle returned NaN");
    lifted_point[static_cast<std::size_t>(pi.order[static_cast<std::size_t>(k - 1)])] = inc;
  }
  Vertex v;
  v.u.assign(lifted_point.begin() + 1, lifted_point.end());
  v.label = pi;
  return v;
}

// Orders the lifted cost vector non-decreasingly (auxiliary element carries
// cost zero and index 0, so it precedes equal-cost steps) and returns the
// vertex of that ordering; this minimizes cost'u over the g-polymatroid.
inline Vertex greedy_lp(const ParamodularOracle& oracle, const std::vector<double>& cost,
                        int threads = 1) {
  const int horizon = oracle.horizon();
  require(static_cast<int>(cost.size()) == horizon, "greedy_lp: cost length mismatch");
  for (double v : cost) require(std::isfinite(v), "greedy_lp: cost must be finite");

  Permutation pi;
  pi.order.resize(static_cast<std::size_t>(horizon) + 1);
  std::iota(pi.order.begin(), pi.order.end(), 0);
  auto lifted_cost = [&](int i) { return i == 0 ? 0.0 : cost[static_cast<std::size_t>(i - 1)]; };
  std::sort(pi.order.begin(), pi.order.end(), [&](int lhs, int rhs) {
    const double cl = lifted_cost(lhs), cr = lifted_cost(rhs);
    if (cl != cr) return cl < cr;
    return lhs < rhs;
  });
  return vertex_from_permutation(oracle, pi, threads);
}

// Thins a convex combination down to at most T+1 atoms without moving the
// combined point: repeatedly finds an affine dependency among the atom
// points and shifts weight along it until one weight reaches zero.
inline void caratheodory_reduce(std::vector<Atom>& atoms, int horizon) {
  require(!atoms.empty(), "caratheodory_reduce: no atoms");
  while (static_cast<int>(atoms.size()) > horizon + 1) {
    const int k = static_cast<int>(atoms.size());
    const int rows = horizon + 1;
    std::vector<std::vector<double>> m(static_cast<std::size_t>(rows),
                                       std::vector<double>(static_cast<std::size_t>(k), 1.0));
    for (int r = 0; r < horizon; ++r)
      for (int j = 0; j < k; ++j)
        m[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
            atoms[static_cast<std::size_t>(j)].vertex.u[static_cast<std::size_t>(r)];

    // Reduced row echelon form; the first pivotless column yields a
    // dependency with that column's coefficient set to one.
    std::vector<int> pivot_of_col(static_cast<std::size_t>(k), -1);
    int rank = 0;
    for (int col = 0; col < k && rank < rows; ++col) {
      int best = -1;
      for (int r = rank; r < rows; ++r)
        if (best < 0 || std::abs(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                            std::abs(m[static_cast<std::size_t>(best)][static_cast<std::size_t>(col)]))
          best = r;
      if (best < 0 || std::abs(m[static_cast<std::size_t>(best)][static_cast<std::size_t>(col)]) < 1e-11)
        continue;
      std::swap(m[static_cast<std::size_t>(rank)], m[static_cast<std::size_t>(best)]);
      const double piv = m[static_cast<std::size_t>(rank)][static_cast<std::size_t>(col)];
      for (auto& v : m[static_cast<std::size_t>(rank)]) v /= piv;
      for (int r = 0; r < rows; ++r) {
        if (r == rank) continue;
        const double f = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
        if (f == 0.0) continue;
        for (int j = 0; j < k; ++j)
          m[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] -=
              f * m[static_cast<std::size_t>(rank)][static_cast<std::size_t>(j)];
      }
      pivot_of_col[static_cast<std::size_t>(col)] = rank;
      ++rank;
    }
    int free_col = -1;
    for (int col = 0; col < k; ++col)
      if (pivot_of_col[static_cast<std::size_t>(col)] < 0) {
        free_col = col;
        break;
      }
    require(free_col >= 0, "caratheodory_reduce: no affine dependency found");

    std::vector<double> alpha(static_cast<std::size_t>(k), 0.0);
    alpha[static_cast<std::size_t>(free_col)] = 1.0;
    for (int col = 0; col < k; ++col) {
      const int r = pivot_of_col[static_cast<std::size_t>(col)];
      if (r >= 0)
        alpha[static_cast<std::size_t>(col)] =
            -m[static_cast<std::size_t>(r)][static_cast<std::size_t>(free_col)];
    }
    // The all-ones row forces the alpha entries to sum to zero, so a
    // positive entry always exists in alpha or its negation.
    double theta = kInf;
    bool have_pos = false;
    for (int j = 0; j < k; ++j)
      if (alpha[static_cast<std::size_t>(j)] > 1e-12) have_pos = true;
    if (!have_pos)
      for (auto& v : alpha) v = -v;
    int zeroed = -1;
    for (int j = 0; j < k; ++j) {
      if (alpha[static_cast<std::size_t>(j)] <= 1e-12) continue;
      const double t = atoms[static_cast<std::size_t>(j)].weight / alpha[static_cast<std::size_t>(j)];
      if (t < theta) {
        theta = t;
        zeroed = j;
      }
    }
    require(zeroed >= 0, "caratheodory_reduce: degenerate dependency");
    for (int j = 0; j < k; ++j)
      atoms[static_cast<std::size_t>(j)].weight -= theta * alpha[static_cast<std::size_t>(j)];
    atoms[static_cast<std::size_t>(zeroed)].weight = 0.0;
    std::erase_if(atoms, [](const Atom& a) { return a.weight <= 1e-13; });
  }
}

enum class SolveStatus { optimal, infeasible, iteration_cap };

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  Profile u_star;                      // empty when no feasible point was found
  double objective = 0;
  std::vector<Atom> atoms;             // convex combination certifying u_star
  std::vector<double> aux;             // values of master-only auxiliary variables
  std::vector<double> dual_coupling;
  double dual_convexity = 0;
  int pricing_rounds = 0;

  bool feasible() const { return status != SolveStatus::infeasible && !u_star.empty(); }
};

struct DwOptions {
  double reduced_cost_tol = 1e-8;
  int max_rounds = 0;  // 0: defaults to 10 * (m + T)
  int threads = 1;
  double feas_tol = 1e-9;
};

// Extra master-only columns (continuous, nonnegative), e.g. epigraph
// variables for piecewise-linear objectives on the aggregate profile.
struct MasterAux {
  std::vector<double> cost;                // length q
  std::vector<std::vector<double>> cols;   // m x q coefficients in the coupling rows

  int size() const { return static_cast<int>(cost.size()); }
};

namespace detail {

// Restricted master kept warm across pricing rounds: a dense revised
// simplex over the coupling rows plus the convexity row. Columns only ever
// get appended, which leaves the current basis primal feasible, so each
// reoptimization is a handful of Bland pivots instead of a cold solve.
class DwRevisedMaster {
 public:
  DwRevisedMaster(const CouplingConstraints& coupling, const MasterAux& aux)
      : m_(coupling.size()), rows_(m_ + 1) {
    flip_.assign(static_cast<std::size_t>(m_), 1.0);
    rhs_.assign(static_cast<std::size_t>(rows_), 0.0);
    for (int i = 0; i < m_; ++i) {
      if (coupling.rhs[static_cast<std::size_t>(i)] < 0) flip_[static_cast<std::size_t>(i)] = -1.0;
      rhs_[static_cast<std::size_t>(i)] =
          flip_[static_cast<std::size_t>(i)] * coupling.rhs[static_cast<std::size_t>(i)];
    }
    rhs_[static_cast<std::size_t>(m_)] = 1.0;  // convexity

    binv_.assign(static_cast<std::size_t>(rows_),
                 std::vector<double>(static_cast<std::size_t>(rows_), 0.0));
    for (int r = 0; r < rows_; ++r) binv_[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)] = 1.0;
    basis_.assign(static_cast<std::size_t>(rows_), -1);
    xb_ = rhs_;

    // Slack per coupling row; rows flipped to a negative slack sign get an
    // artificial as the initial basic instead. The convexity row always
    // starts on its artificial.
    for (int i = 0; i < m_; ++i) {
      std::vector<double> a(static_cast<std::size_t>(rows_), 0.0);
      a[static_cast<std::size_t>(i)] = flip_[static_cast<std::size_t>(i)];
      const int slack = add_col({std::move(a), 0.0, 0.0, false, -1});
      if (flip_[static_cast<std::size_t>(i)] > 0) set_basis(i, slack);
    }
    for (int r = 0; r < rows_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] >= 0) continue;
      std::vector<double> a(static_cast<std::size_t>(rows_), 0.0);
      a[static_cast<std::size_t>(r)] = 1.0;
      set_basis(r, add_col({std::move(a), 1.0, 0.0, true, -1}));
    }
    for (int q = 0; q < aux.size(); ++q) {
      std::vector<double> a(static_cast<std::size_t>(rows_), 0.0);
      for (int i = 0; i < m_; ++i)
        a[static_cast<std::size_t>(i)] = flip_[static_cast<std::size_t>(i)] *
                                         aux.cols[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)];
      aux_cols_.push_back(add_col({std::move(a), 0.0, aux.cost[static_cast<std::size_t>(q)], false, -1}));
    }
  }

  void add_lambda(double cost, const std::vector<double>& cut) {
    std::vector<double> a(static_cast<std::size_t>(rows_), 0.0);
    for (int i = 0; i < m_; ++i)
      a[static_cast<std::size_t>(i)] = flip_[static_cast<std::size_t>(i)] * cut[static_cast<std::size_t>(i)];
    a[static_cast<std::size_t>(m_)] = 1.0;
    lambda_cols_.push_back(add_col({std::move(a), 0.0, cost, false,
                                    static_cast<int>(lambda_cols_.size())}));
  }

  void set_phase1(bool phase1) { phase1_ = phase1; }

  void reoptimize() {
    const int pivot_cap = 20000 + 200 * (rows_ + static_cast<int>(cols_.size()));
    int pivots = 0;
    for (;;) {
      const std::vector<double> y = duals();
      int enter = -1;
      for (int j = 0; j < static_cast<int>(cols_.size()); ++j) {
        const auto& col = cols_[static_cast<std::size_t>(j)];
        if (!phase1_ && col.artificial) continue;
        double rc = (phase1_ ? col.phase1_cost : col.phase2_cost);
        for (int r = 0; r < rows_; ++r)
          rc -= y[static_cast<std::size_t>(r)] * col.a[static_cast<std::size_t>(r)];
        if (rc < -1e-10) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;

      std::vector<double> w(static_cast<std::size_t>(rows_), 0.0);
      const auto& a = cols_[static_cast<std::size_t>(enter)].a;
      for (int r = 0; r < rows_; ++r) {
        double s = 0;
        for (int k = 0; k < rows_; ++k)
          s += binv_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)];
        w[static_cast<std::size_t>(r)] = s;
      }

      // In phase 2, a zero-level basic artificial must not regain value:
      // if the entering direction touches its row, swap it out right there.
      int leave = -1;
      if (!phase1_) {
        for (int r = 0; r < rows_; ++r) {
          const auto& bc = cols_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
          if (bc.artificial && std::abs(w[static_cast<std::size_t>(r)]) > 1e-9) {
            leave = r;
            break;
          }
        }
      }
      if (leave < 0) {
        double best = kInf;
        for (int r = 0; r < rows_; ++r) {
          if (w[static_cast<std::size_t>(r)] <= 1e-10) continue;
          best = std::min(best, xb_[static_cast<std::size_t>(r)] / w[static_cast<std::size_t>(r)]);
        }
        require(best < kInf, "dw master: unbounded restricted master");
        for (int r = 0; r < rows_; ++r) {
          if (w[static_cast<std::size_t>(r)] <= 1e-10) continue;
          const double ratio = xb_[static_cast<std::size_t>(r)] / w[static_cast<std::size_t>(r)];
          if (ratio > best + 1e-12) continue;
          if (leave < 0 || basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])
            leave = r;
        }
      }

      const double theta = std::max(0.0, xb_[static_cast<std::size_t>(leave)] /
                                             w[static_cast<std::size_t>(leave)]);
      for (int r = 0; r < rows_; ++r) xb_[static_cast<std::size_t>(r)] -= theta * w[static_cast<std::size_t>(r)];
      xb_[static_cast<std::size_t>(leave)] = theta;
      const double piv = w[static_cast<std::size_t>(leave)];
      auto& prow = binv_[static_cast<std::size_t>(leave)];
      for (auto& v : prow) v /= piv;
      for (int r = 0; r < rows_; ++r) {
        if (r == leave) continue;
        const double f = w[static_cast<std::size_t>(r)];
        if (f == 0.0) continue;
        auto& row = binv_[static_cast<std::size_t>(r)];
        for (int k = 0; k < rows_; ++k)
          row[static_cast<std::size_t>(k)] -= f * prow[static_cast<std::size_t>(k)];
      }
      basis_[static_cast<std::size_t>(leave)] = enter;
      if (++pivots > pivot_cap) throw std::runtime_error("dw master: pivot limit exceeded");
    }
  }

  double objective() const {
    double obj = 0;
    for (int r = 0; r < rows_; ++r) {
      const auto& col = cols_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
      obj += (phase1_ ? col.phase1_cost : col.phase2_cost) * xb_[static_cast<std::size_t>(r)];
    }
    return obj;
  }

  std::vector<double> lambda_values() const { return values_of(lambda_cols_); }
  std::vector<double> aux_values() const { return values_of(aux_cols_); }

  // mu >= 0 for the coupling rows under the pricing convention
  // reduced cost = c_j + mu' (C v_j) - sigma.
  std::vector<double> coupling_duals() const {
    const std::vector<double> y = duals();
    std::vector<double> mu(static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i)
      mu[static_cast<std::size_t>(i)] =
          -flip_[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    return mu;
  }

  double convexity_dual() const { return duals()[static_cast<std::size_t>(m_)]; }

 private:
  struct Col {
    std::vector<double> a;  // stored with row flips applied
    double phase1_cost = 0;
    double phase2_cost = 0;
    bool artificial = false;
    int lambda_id = -1;
  };

  int add_col(Col col) {
    cols_.push_back(std::move(col));
    return static_cast<int>(cols_.size()) - 1;
  }

  void set_basis(int row, int col) { basis_[static_cast<std::size_t>(row)] = col; }

  std::vector<double> duals() const {
    std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
    for (int r = 0; r < rows_; ++r) {
      const auto& col = cols_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
      const double cb = phase1_ ? col.phase1_cost : col.phase2_cost;
      if (cb == 0.0) continue;
      for (int k = 0; k < rows_; ++k)
        y[static_cast<std::size_t>(k)] += cb * binv_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
    }
    return y;
  }

  std::vector<double> values_of(const std::vector<int>& cols) const {
    std::vector<double> out(cols.size(), 0.0);
    for (int r = 0; r < rows_; ++r)
      for (std::size_t j = 0; j < cols.size(); ++j)
        if (basis_[static_cast<std::size_t>(r)] == cols[j]) out[j] = xb_[static_cast<std::size_t>(r)];
    return out;
  }

  int m_ = 0;
  int rows_ = 0;
  bool phase1_ = true;
  std::vector<double> flip_, rhs_, xb_;
  std::vector<std::vector<double>> binv_;
  std::vector<int> basis_;
  std::vector<Col> cols_;
  std::vector<int> lambda_cols_, aux_cols_;
};

}  // namespace detail

// Column generation for  min cost'u  over the g-polymatroid intersected
// with coupling rows Cu <= d. The master optimizes weights over labeled
// vertices; pricing asks the greedy LP for the vertex minimizing
// cost + C'mu. Feasibility is established first by pricing against pure
// violation, which certifies infeasible couplings on convergence.
inline SolveResult solve_lp_coupled(const ParamodularOracle& oracle,
                                    const std::vector<double>& cost,
                                    const CouplingConstraints& coupling,
                                    const DwOptions& opts = {},
                                    const MasterAux& aux = {}) {
  const int horizon = oracle.horizon();
  require(static_cast<int>(cost.size()) == horizon, "solve_lp_coupled: cost length mismatch");
  check_coupling(coupling, horizon);
  const int m = coupling.size();
  require(aux.size() == 0 || static_cast<int>(aux.cols.size()) == m,
          "solve_lp_coupled: aux column shape mismatch");
  for (const auto& col : aux.cols)
    require(static_cast<int>(col.size()) == aux.size(), "solve_lp_coupled: aux column shape mismatch");

  SolveResult out;
  if (m == 0 && aux.size() == 0) {
    Vertex v = greedy_lp(oracle, cost, opts.threads);
    out.status = SolveStatus::optimal;
    out.u_star = v.u;
    out.objective = dot(cost, v.u);
    out.dual_convexity = out.objective;
    out.atoms.push_back({1.0, std::move(v)});
    out.pricing_rounds = 1;
    return out;
  }

  const int max_rounds = opts.max_rounds > 0 ? opts.max_rounds : 10 * (m + horizon);
  double rhs_scale = 1.0;
  for (double v : coupling.rhs) rhs_scale = std::max(rhs_scale, std::abs(v));

  std::vector<Vertex> pool;
  std::map<std::vector<int>, std::size_t> by_label;
  detail::DwRevisedMaster master(coupling, aux);
  auto add_column = [&](Vertex v) {
    auto [it, fresh] = by_label.try_emplace(v.label.order, pool.size());
    if (!fresh) return false;
    std::vector<double> cut(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) cut[static_cast<std::size_t>(i)] = dot(coupling.rows[static_cast<std::size_t>(i)], v.u);
    master.add_lambda(dot(cost, v.u), cut);
    pool.push_back(std::move(v));
    return true;
  };

  add_column(greedy_lp(oracle, cost, opts.threads));
  out.pricing_rounds = 1;

  bool phase1 = true;
  while (true) {
    master.reoptimize();
    if (phase1 && master.objective() <= opts.feas_tol * rhs_scale) {
      phase1 = false;
      master.set_phase1(false);
      continue;
    }
    if (out.pricing_rounds >= max_rounds) {
      out.status = SolveStatus::iteration_cap;
      break;
    }
    const std::vector<double> mu = master.coupling_duals();
    std::vector<double> pricing_cost(static_cast<std::size_t>(horizon), 0.0);
    if (!phase1) pricing_cost = cost;
    for (int i = 0; i < m; ++i) {
      if (mu[static_cast<std::size_t>(i)] == 0.0) continue;
      for (int t = 0; t < horizon; ++t)
        pricing_cost[static_cast<std::size_t>(t)] +=
            mu[static_cast<std::size_t>(i)] * coupling.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
    }
    Vertex v = greedy_lp(oracle, pricing_cost, opts.threads);
    ++out.pricing_rounds;
    const double reduced = dot(pricing_cost, v.u) - master.convexity_dual();
    if (reduced >= -opts.reduced_cost_tol || !add_column(std::move(v))) {
      if (phase1) {
        out.status = SolveStatus::infeasible;
        return out;
      }
      out.status = SolveStatus::optimal;
      break;
    }
  }

  if (phase1) {
    // Ran out of rounds while still chasing feasibility.
    out.u_star.clear();
    return out;
  }

  const std::vector<double> lambda = master.lambda_values();
  double wsum = 0;
  for (double w : lambda)
    if (w > 1e-12) wsum += w;
  require(wsum > 0, "solve_lp_coupled: empty master solution");
  out.atoms.clear();
  for (std::size_t j = 0; j < pool.size(); ++j)
    if (lambda[j] > 1e-12) out.atoms.push_back({lambda[j] / wsum, pool[j]});
  out.u_star.assign(static_cast<std::size_t>(horizon), 0.0);
  for (const auto& a : out.atoms)
    for (int t = 0; t < horizon; ++t)
      out.u_star[static_cast<std::size_t>(t)] += a.weight * a.vertex.u[static_cast<std::size_t>(t)];
  out.aux = master.aux_values();
  out.objective = dot(cost, out.u_star);
  for (int q = 0; q < aux.size(); ++q)
    out.objective += aux.cost[static_cast<std::size_t>(q)] * out.aux[static_cast<std::size_t>(q)];
  out.dual_coupling = master.coupling_duals();
  out.dual_convexity = master.convexity_dual();
  return out;
}

struct FwOptions {
  int max_iters = 1000;
  double gap_tol = 1e-6;
  bool line_search = false;  // default keeps the deterministic 2/(k+2) step
  int threads = 1;
  std::function<void(const Profile&)> on_iterate;
};

struct FwResult {
  Profile u;
  double objective = 0;
  double gap = kInf;
  int iterations = 0;
  bool converged = false;
  std::vector<Atom> atoms;
};

namespace detail {

inline double golden_section(const std::function<double(double)>& f) {
  const double inv_phi = 0.6180339887498949;
  double a = 0.0, b = 1.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Conditional-gradient loop over the g-polymatroid: every linear subproblem
// is one greedy call, and the running convex combination of the visited
// vertices is kept so the result can be disaggregated like any other solve.
inline FwResult frank_wolfe(const ParamodularOracle& oracle,
                            const std::function<double(const Profile&)>& f,
                            const std::function<Profile(const Profile&)>& grad,
                            const FwOptions& opts = {}) {
  const int horizon = oracle.horizon();
  require(opts.max_iters >= 1, "frank_wolfe: need at least one iteration");

  FwResult out;
  std::map<std::vector<int>, std::size_t> atom_of_label;
  {
    Vertex v0 = greedy_lp(oracle, std::vector<double>(static_cast<std::size_t>(horizon), 0.0),
                          opts.threads);
    out.u = v0.u;
    atom_of_label[v0.label.order] = 0;
    out.atoms.push_back({1.0, std::move(v0)});
  }
  if (opts.on_iterate) opts.on_iterate(out.u);

  for (int k = 0;; ++k) {
    Profile g = grad(out.u);
    require(static_cast<int>(g.size()) == horizon, "frank_wolfe: gradient length mismatch");
    for (double v : g)
      require(std::isfinite(v), "frank_wolfe: non-finite gradient");
    Vertex v = greedy_lp(oracle, g, opts.threads);
    out.gap = dot(g, out.u) - dot(g, v.u);
    if (out.gap <= opts.gap_tol) {
      out.converged = true;
      break;
    }
    if (k >= opts.max_iters) break;

    double gamma = 2.0 / (k + 2);
    if (opts.line_search) {
      const Profile base = out.u;
      gamma = detail::golden_section([&](double t) {
        Profile p(base);
        for (int i = 0; i < horizon; ++i)
          p[static_cast<std::size_t>(i)] += t * (v.u[static_cast<std::size_t>(i)] - base[static_cast<std::size_t>(i)]);
        return f(p);
      });
    }
    for (int i = 0; i < horizon; ++i)
      out.u[static_cast<std::size_t>(i)] += gamma * (v.u[static_cast<std::size_t>(i)] - out.u[static_cast<std::size_t>(i)]);
    for (auto& a : out.atoms) a.weight *= 1.0 - gamma;
    auto [it, fresh] = atom_of_label.try_emplace(v.label.order, out.atoms.size());
    if (fresh)
      out.atoms.push_back({gamma, std::move(v)});
    else
      out.atoms[it->second].weight += gamma;
    out.iterations = k + 1;
    if (opts.on_iterate) opts.on_iterate(out.u);
  }

  double wsum = 0;
  for (const auto& a : out.atoms) wsum += a.weight;
  if (wsum > 0)
    for (auto& a : out.atoms) a.weight /= wsum;
  out.objective = f(out.u);
  return out;
}

}  // namespace flexpoly
