#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace flexpoly;
using testutil::reference_ev;

TEST_CASE("build_ev produces the documented bound shapes", "[core]") {
  const DeviceParams p = reference_ev();
  CHECK(p.u_lo == std::vector<double>{0, 0, 0});
  CHECK(p.u_hi == std::vector<double>{1, 1, 1});
  CHECK(p.x_lo == std::vector<double>{0, 0, 2});
  CHECK(p.x_hi == std::vector<double>{2, 2, 2});

  EvSpec s;
  s.arrive = 2;
  s.depart = 2;
  s.m_lo = 0;
  s.m_hi = 5;
  s.e0 = 1;
  s.cap = 4;
  s.e_lo = 1;
  s.e_hi = 4;
  const DeviceParams q = build_ev(s, 3);
  CHECK(q.u_lo == std::vector<double>{0, 0, 0});
  CHECK(q.u_hi == std::vector<double>{0, 5, 0});
  CHECK(q.x_lo == std::vector<double>{-1, 0, 0});
  CHECK(q.x_hi == std::vector<double>{3, 3, 3});
}

TEST_CASE("build_ev with a full-horizon window and zero demand", "[core]") {
  EvSpec s;
  s.arrive = 1;
  s.depart = 4;
  s.m_hi = 1;
  s.e0 = 0;
  s.cap = 3;
  s.e_lo = 0;
  s.e_hi = 0;
  const DeviceParams p = build_ev(s, 4);
  CHECK(p.x_lo == std::vector<double>{0, 0, 0, 0});
  CHECK(p.x_hi == std::vector<double>{3, 3, 3, 0});
}

TEST_CASE("build_ev rejects bad windows and orderings", "[core]") {
  EvSpec s;
  s.arrive = 2;
  s.depart = 5;
  s.m_hi = 1;
  s.cap = s.e_lo = s.e_hi = 1;
  CHECK_THROWS_AS(build_ev(s, 4), std::invalid_argument);
  s.depart = 1;
  CHECK_THROWS_AS(build_ev(s, 4), std::invalid_argument);
  s.arrive = 1;
  s.depart = 4;
  s.m_lo = 2;  // above m_hi
  CHECK_THROWS_AS(build_ev(s, 4), std::invalid_argument);
}

TEST_CASE("build_ess bounds", "[core]") {
  const DeviceParams p = build_ess(-1, 1, 1, 2, 2);
  CHECK(p.u_lo == std::vector<double>{-1, -1});
  CHECK(p.u_hi == std::vector<double>{1, 1});
  CHECK(p.x_lo == std::vector<double>{-1, -1});
  CHECK(p.x_hi == std::vector<double>{1, 1});

  const DeviceParams zero_band = build_ess(0, 0, 0, 1, 3);
  CHECK(check_membership(zero_band, {0, 0, 0}, 0.0));
  CHECK_FALSE(check_membership(zero_band, {0.1, 0, 0}, 1e-3));

  // Zero capacity: every prefix sum pinned at zero.
  const DeviceParams pinned = build_ess(-2, 2, 0, 0, 2);
  CHECK(check_membership(pinned, {0, 0}, 0.0));
  CHECK_FALSE(check_membership(pinned, {1, -1}, 1e-6));
  CHECK_THROWS_AS(build_ess(-1, 1, 0, -1, 2), std::invalid_argument);
}

TEST_CASE("build_generation and build_fixed_load", "[core]") {
  const DeviceParams g = build_generation({1, 0});
  CHECK(g.u_lo == std::vector<double>{-1, 0});
  CHECK(g.u_hi == std::vector<double>{0, 0});
  CHECK(g.x_lo[0] == -kInf);
  CHECK(g.x_hi[1] == kInf);
  CHECK_THROWS_AS(build_generation({1, -0.5}), std::invalid_argument);
  CHECK(build_generation({3, 3, 3}).u_lo == std::vector<double>{-3, -3, -3});

  const DeviceParams zero_gen = build_generation({0, 0});
  CHECK(check_membership(zero_gen, {0, 0}, 0.0));
  CHECK_FALSE(check_membership(zero_gen, {-0.1, 0}, 1e-3));

  const DeviceParams load = build_fixed_load({2, 2});
  CHECK(check_membership(load, {2, 2}, 0.0));
  CHECK_FALSE(check_membership(load, {2, 1.5}, 1e-3));
  CHECK(check_membership(build_fixed_load({1, -1}), {1, -1}, 0.0));
}

TEST_CASE("check_membership on the reference EV", "[core]") {
  const DeviceParams p = reference_ev();
  CHECK(check_membership(p, {1, 1, 0}, 0.0));
  CHECK_FALSE(check_membership(p, {1, 1, 1}, 1e-6));  // final SoC overshoots
  CHECK_THROWS_AS(check_membership(p, {1, 1}, 0.0), std::invalid_argument);

  const DeviceParams g = build_generation({1, 1});
  CHECK(check_membership(g, g.u_lo, 0.0));
}

TEST_CASE("membership is monotone in the tolerance", "[core][property]") {
  Rng rng(42);
  for (int it = 0; it < 50; ++it) {
    const int horizon = rng.uniform_int(1, 5);
    const DeviceParams p = testutil::random_device(rng, horizon);
    Profile u(static_cast<std::size_t>(horizon));
    for (auto& v : u) v = rng.uniform(-2.5, 2.5);
    const double small = rng.uniform(0.0, 0.5), extra = rng.uniform(0.0, 2.0);
    if (check_membership(p, u, small)) CHECK(check_membership(p, u, small + extra));
  }
}

TEST_CASE("validate accepts the reference EV and rejects broken devices", "[core]") {
  CHECK(validate(reference_ev()).ok());
  CHECK(validate(build_fixed_load({1, 1})).ok());

  // Demands 3 units with at most 2 chargeable.
  EvSpec s;
  s.arrive = 1;
  s.depart = 2;
  s.m_hi = 1;
  s.e0 = 0;
  s.cap = 3;
  s.e_lo = 3;
  s.e_hi = 3;
  const auto r = validate(build_ev(s, 2));
  CHECK(r.fault == DeviceFault::infeasible);

  DeviceParams bad = reference_ev();
  bad.u_lo[1] = 2.0;  // above u_hi
  CHECK(validate(bad).fault == DeviceFault::bound_order);

  DeviceParams crossed = reference_ev();
  crossed.x_lo[0] = 3.0;  // above x_hi
  CHECK(validate(crossed).fault == DeviceFault::bound_order);

  DeviceParams nan_bound = reference_ev();
  nan_bound.x_hi[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK(validate(nan_bound).fault == DeviceFault::bound_order);

  // Infeasibility created by the interplay of later bounds: must bank 2 by
  // step 2 but the cap at step 1 makes that unreachable.
  DeviceParams tight;
  tight.u_lo = {0, 0};
  tight.u_hi = {1, 1};
  tight.x_lo = {-kInf, 2.5};
  tight.x_hi = {0.5, kInf};
  CHECK(validate(tight).fault == DeviceFault::infeasible);
}

TEST_CASE("population checks", "[core]") {
  Population pop;
  pop.horizon = 3;
  pop.devices.push_back({"a", DeviceKind::raw, reference_ev()});
  pop.devices.push_back({"b", DeviceKind::fixed_load, build_fixed_load({1, 1, 1})});
  CHECK_NOTHROW(check_population(pop));

  pop.devices.push_back({"a", DeviceKind::raw, reference_ev()});
  CHECK_THROWS_AS(check_population(pop), std::invalid_argument);
  pop.devices.pop_back();
  pop.devices.push_back({"c", DeviceKind::fixed_load, build_fixed_load({1, 1})});
  CHECK_THROWS_AS(check_population(pop), std::invalid_argument);
}

TEST_CASE("kind names round-trip", "[core]") {
  for (DeviceKind k : {DeviceKind::ev, DeviceKind::ess, DeviceKind::generation,
                       DeviceKind::fixed_load, DeviceKind::raw})
    CHECK(device_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(device_kind_from_string("windmill"), std::invalid_argument);
}
