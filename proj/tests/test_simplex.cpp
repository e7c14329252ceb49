#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace flexpoly;

namespace {

LpProblem one_var() {
  LpProblem lp;
  lp.c = {1.0};
  lp.lo = {-kInf};
  lp.hi = {kInf};
  return lp;
}

}  // namespace

TEST_CASE("minimize x subject to x >= 1", "[simplex]") {
  LpProblem lp = one_var();
  lp.a_ub = {{-1.0}};
  lp.b_ub = {-1.0};
  const LpSolution sol = simplex_solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.x[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(sol.objective == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("contradictory rows are reported infeasible", "[simplex]") {
  LpProblem lp = one_var();
  lp.a_ub = {{1.0}, {-1.0}};
  lp.b_ub = {0.0, -1.0};  // x <= 0 and x >= 1
  CHECK(simplex_solve(lp).status == LpStatus::infeasible);
}

TEST_CASE("an open descent direction is reported unbounded", "[simplex]") {
  LpProblem lp = one_var();
  lp.c = {-1.0};
  lp.a_ub = {{-1.0}};
  lp.b_ub = {0.0};  // x >= 0, minimize -x
  CHECK(simplex_solve(lp).status == LpStatus::unbounded);
}

TEST_CASE("box objective picks the right corner", "[simplex]") {
  LpProblem lp;
  lp.c = {1.0, -2.0, 0.5};
  lp.lo = {-1.0, -3.0, 0.0};
  lp.hi = {2.0, 4.0, 1.5};
  const LpSolution sol = simplex_solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.x[0] == Catch::Approx(-1.0).margin(1e-9));
  CHECK(sol.x[1] == Catch::Approx(4.0).margin(1e-9));
  CHECK(sol.x[2] == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("equality constraints with free variables", "[simplex]") {
  // min x + y  s.t.  x + y + z = 2,  z <= 1, all free otherwise.
  LpProblem lp;
  lp.c = {1.0, 1.0, 0.0};
  lp.lo = free_bounds_lo(3);
  lp.hi = free_bounds_hi(3);
  lp.a_eq = {{1.0, 1.0, 1.0}};
  lp.b_eq = {2.0};
  lp.a_ub = {{0.0, 0.0, 1.0}};
  lp.b_ub = {1.0};
  const LpSolution sol = simplex_solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.objective == Catch::Approx(1.0).margin(1e-9));
  CHECK(sol.x[2] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("duals satisfy complementarity and the pricing identity", "[simplex]") {
  // min -3x - 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18, x,y >= 0.
  LpProblem lp;
  lp.c = {-3.0, -5.0};
  lp.lo = {0.0, 0.0};
  lp.hi = {kInf, kInf};
  lp.a_ub = {{1.0, 0.0}, {0.0, 2.0}, {3.0, 2.0}};
  lp.b_ub = {4.0, 12.0, 18.0};
  const LpSolution sol = simplex_solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.x[0] == Catch::Approx(2.0).margin(1e-9));
  CHECK(sol.x[1] == Catch::Approx(6.0).margin(1e-9));
  CHECK(sol.objective == Catch::Approx(-36.0).margin(1e-9));

  for (std::size_t i = 0; i < lp.b_ub.size(); ++i) {
    const double slack = lp.b_ub[i] - dot(lp.a_ub[i], sol.x);
    CHECK(sol.dual_ub[i] >= -1e-9);
    CHECK(std::abs(sol.dual_ub[i] * slack) <= 1e-9);  // complementarity
  }
  // Reduced cost of every structural column is nonnegative at the optimum.
  for (int j = 0; j < 2; ++j) {
    double rc = lp.c[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < lp.b_ub.size(); ++i)
      rc += sol.dual_ub[i] * lp.a_ub[i][static_cast<std::size_t>(j)];
    CHECK(rc >= -1e-9);
    if (sol.x[static_cast<std::size_t>(j)] > 1e-9) CHECK(std::abs(rc) <= 1e-9);
  }
}

TEST_CASE("equality duals follow the pricing convention", "[simplex]") {
  // min x + 2y  s.t.  x + y = 1, x,y >= 0; the basic column prices to zero.
  LpProblem lp;
  lp.c = {1.0, 2.0};
  lp.lo = {0.0, 0.0};
  lp.hi = {kInf, kInf};
  lp.a_eq = {{1.0, 1.0}};
  lp.b_eq = {1.0};
  const LpSolution sol = simplex_solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.objective == Catch::Approx(1.0).margin(1e-9));
  CHECK(sol.dual_eq[0] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("degenerate ties terminate under Bland's rule", "[simplex]") {
  // Redundant stacked rows force degenerate pivots.
  LpProblem lp;
  lp.c = {-1.0, -1.0};
  lp.lo = {0.0, 0.0};
  lp.hi = {kInf, kInf};
  lp.a_ub = {{1.0, 1.0}, {1.0, 1.0}, {2.0, 2.0}, {1.0, 0.0}};
  lp.b_ub = {1.0, 1.0, 2.0, 1.0};
  const LpSolution sol = simplex_solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.objective == Catch::Approx(-1.0).margin(1e-9));
}

TEST_CASE("fixed variables via equal bounds", "[simplex]") {
  LpProblem lp;
  lp.c = {1.0, 1.0};
  lp.lo = {0.5, -kInf};
  lp.hi = {0.5, kInf};
  lp.a_ub = {{0.0, -1.0}};
  lp.b_ub = {2.0};  // y >= -2
  const LpSolution sol = simplex_solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.x[0] == Catch::Approx(0.5).margin(1e-12));
  CHECK(sol.objective == Catch::Approx(-1.5).margin(1e-9));
}

TEST_CASE("random box LPs match the componentwise optimum", "[simplex][property]") {
  Rng rng(99);
  for (int it = 0; it < 40; ++it) {
    const int n = rng.uniform_int(1, 6);
    LpProblem lp;
    lp.c.resize(static_cast<std::size_t>(n));
    lp.lo.resize(static_cast<std::size_t>(n));
    lp.hi.resize(static_cast<std::size_t>(n));
    double expect = 0;
    for (int j = 0; j < n; ++j) {
      lp.c[static_cast<std::size_t>(j)] = rng.uniform_grid(-2.0, 2.0, 0.25);
      lp.lo[static_cast<std::size_t>(j)] = rng.uniform_grid(-3.0, 0.0, 0.25);
      lp.hi[static_cast<std::size_t>(j)] = rng.uniform_grid(0.0, 3.0, 0.25);
      expect += lp.c[static_cast<std::size_t>(j)] >= 0
                    ? lp.c[static_cast<std::size_t>(j)] * lp.lo[static_cast<std::size_t>(j)]
                    : lp.c[static_cast<std::size_t>(j)] * lp.hi[static_cast<std::size_t>(j)];
    }
    const LpSolution sol = simplex_solve(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE(sol.objective == Catch::Approx(expect).margin(1e-9));
  }
}
