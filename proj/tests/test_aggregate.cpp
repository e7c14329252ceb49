#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace flexpoly;
using testutil::mask_of;
using testutil::reference_ev;

TEST_CASE("aggregate pair is the member sum", "[aggregate]") {
  const auto ev = make_device_oracle(reference_ev());
  AggregateOracle two(3, {ev, ev});
  const auto v = two.eval(mask_of({1, 2, 3}, 3));
  CHECK(v.lo == 4.0);
  CHECK(v.hi == 4.0);

  AggregateOracle one(3, {ev});
  for (std::uint64_t bits = 0; bits < 8; ++bits) {
    const auto m = SubsetMask::from_bits(bits, 3);
    CHECK(one.eval(m).lo == ev->eval(m).lo);
    CHECK(one.eval(m).hi == ev->eval(m).hi);
  }

  const auto load = make_device_oracle(build_fixed_load({1, 1, 1}));
  AggregateOracle mixed(3, {ev, load});
  const auto w = mixed.eval(mask_of({2}, 3));
  CHECK(w.lo == 1.0);
  CHECK(w.hi == 2.0);
}

TEST_CASE("duplicating every member doubles the pair exactly", "[aggregate][property]") {
  Rng rng(21);
  for (int it = 0; it < 20; ++it) {
    const int horizon = rng.uniform_int(1, 5);
    const Population pop = testutil::random_population(rng, horizon, rng.uniform_int(1, 4));
    auto members = make_device_oracles(pop);
    AggregateOracle once(horizon, members);
    auto twice_members = members;
    twice_members.insert(twice_members.end(), members.begin(), members.end());
    AggregateOracle twice(horizon, twice_members);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << horizon); ++bits) {
      const auto m = SubsetMask::from_bits(bits, horizon);
      REQUIRE(twice.eval(m).lo == 2.0 * once.eval(m).lo);
      REQUIRE(twice.eval(m).hi == 2.0 * once.eval(m).hi);
    }
  }
}

TEST_CASE("aggregate of paramodular members stays paramodular", "[aggregate]") {
  Rng rng(23);
  const Population pop = testutil::random_population(rng, 4, 3);
  const auto oracle = make_population_oracle(pop);
  CHECK(check_paramodular(*oracle));
}

TEST_CASE("horizon mismatch is rejected", "[aggregate]") {
  const auto a = make_device_oracle(build_fixed_load({1, 1}));
  const auto b = make_device_oracle(build_fixed_load({1, 1, 1}));
  CHECK_THROWS_AS(AggregateOracle(2, {a, b}), std::invalid_argument);
}

TEST_CASE("extremal charging profiles of the worked example", "[aggregate]") {
  CHECK(ev_delay_profile(3, 1.0, 2.0) == std::vector<double>{0, 1, 1});
  CHECK(ev_frontload_profile(3, 1.0, 2.0) == std::vector<double>{1, 1, 0});
  // Fractional remainder sits on the single partial step.
  CHECK(ev_delay_profile(3, 1.0, 1.5) == std::vector<double>{0, 0.5, 1});
  CHECK(ev_frontload_profile(3, 1.0, 1.5) == std::vector<double>{1, 0.5, 0});
  // Ceiling above what the window admits saturates at full rate.
  CHECK(ev_frontload_profile(2, 1.0, 5.0) == std::vector<double>{1, 1});
}

TEST_CASE("fleet oracle on a single vehicle", "[aggregate]") {
  EvChargeSpec s;
  s.arrive = 1;
  s.depart = 3;
  s.m = 1.0;
  s.e_min = 2.0;
  s.e_max = 2.0;
  const EvFleetOracle fleet(3, {s});
  CHECK(fleet.bucket_count() == 1);

  auto v = fleet.eval(mask_of({2}, 3));
  CHECK(v.lo == 0.0);
  CHECK(v.hi == 1.0);
  v = fleet.eval(SubsetMask(3));
  CHECK(v.lo == 0.0);
  CHECK(v.hi == 0.0);
  v = fleet.eval(mask_of({1, 2, 3}, 3));
  CHECK(v.lo == 2.0);
  CHECK(v.hi == 2.0);
}

TEST_CASE("empty fleet evaluates to zero", "[aggregate]") {
  const EvFleetOracle fleet(4, {});
  CHECK(fleet.bucket_count() == 0);
  for (std::uint64_t bits = 0; bits < 16; ++bits) {
    const auto v = fleet.eval(SubsetMask::from_bits(bits, 4));
    CHECK(v.lo == 0.0);
    CHECK(v.hi == 0.0);
  }
}

TEST_CASE("identical vehicles share a bucket and double its profiles", "[aggregate]") {
  EvChargeSpec s;
  s.arrive = 2;
  s.depart = 4;
  s.m = 0.75;
  s.e_min = 1.5;
  s.e_max = 2.0;
  const EvFleetOracle one(5, {s});
  const EvFleetOracle two(5, {s, s});
  CHECK(two.bucket_count() == 1);
  for (std::uint64_t bits = 0; bits < 32; ++bits) {
    const auto m = SubsetMask::from_bits(bits, 5);
    REQUIRE(two.eval(m).lo == 2.0 * one.eval(m).lo);
    REQUIRE(two.eval(m).hi == 2.0 * one.eval(m).hi);
  }
}

TEST_CASE("closed-form single-EV pair equals the device oracle exactly", "[aggregate][property]") {
  Rng rng(31);
  for (int it = 0; it < 60; ++it) {
    const int horizon = rng.uniform_int(1, 6);
    const EvSpec spec = testutil::random_charging_ev(rng, horizon);
    const DeviceParams params = build_ev(spec, horizon);
    const DeviceOracle oracle(params);
    const auto rec = recover_charging_ev(params);
    REQUIRE(rec.has_value());
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << horizon); ++bits) {
      const auto m = SubsetMask::from_bits(bits, horizon);
      const auto closed = eval_charging_ev(*rec, m);
      const auto swept = oracle.eval(m);
      REQUIRE(closed.lo == swept.lo);
      REQUIRE(closed.hi == swept.hi);
    }
  }
}

TEST_CASE("fleet oracle equals the generic aggregate exactly", "[aggregate][property]") {
  Rng rng(33);
  for (int it = 0; it < 30; ++it) {
    const int horizon = rng.uniform_int(1, 6);
    const int n = rng.uniform_int(1, 6);
    Population pop;
    pop.horizon = horizon;
    for (int i = 0; i < n; ++i)
      pop.devices.push_back({"ev" + std::to_string(i), DeviceKind::ev,
                             build_ev(testutil::random_charging_ev(rng, horizon), horizon)});
    const EvFleetOracle fleet = build_ev_fleet(pop);
    const auto generic = make_population_oracle(pop);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << horizon); ++bits) {
      const auto m = SubsetMask::from_bits(bits, horizon);
      const auto a = fleet.eval(m);
      const auto b = generic->eval(m);
      REQUIRE(a.lo == Catch::Approx(b.lo).margin(1e-12));
      REQUIRE(a.hi == Catch::Approx(b.hi).margin(1e-12));
    }
    CHECK(check_paramodular(fleet));
  }
}

TEST_CASE("fleet construction rejects devices that can discharge", "[aggregate]") {
  Population pop;
  pop.horizon = 3;
  EvSpec s;
  s.arrive = 1;
  s.depart = 3;
  s.m_lo = -1;
  s.m_hi = 1;
  s.cap = 2;
  s.e0 = 1;
  s.e_lo = 0;
  s.e_hi = 2;
  pop.devices.push_back({"v2g", DeviceKind::ev, build_ev(s, 3)});
  CHECK_THROWS_AS(build_ev_fleet(pop), std::invalid_argument);

  // Varying charge rate does not fit the single-rate window shape.
  Population ragged;
  ragged.horizon = 3;
  DeviceParams p;
  p.u_lo = {0, 0, 0};
  p.u_hi = {1, 2, 1};
  p.x_lo = {0, 0, 0};
  p.x_hi = {2, 2, 2};
  ragged.devices.push_back({"r", DeviceKind::raw, p});
  CHECK_THROWS_AS(build_ev_fleet(ragged), std::invalid_argument);
}

TEST_CASE("a non-discharging storage unit is a whole-horizon charging EV", "[aggregate]") {
  Population pop;
  pop.horizon = 3;
  pop.devices.push_back({"e", DeviceKind::ess, build_ess(0, 1, 0.5, 1, 3)});
  const EvFleetOracle fleet = build_ev_fleet(pop);
  const DeviceOracle direct(pop.devices[0].params);
  for (std::uint64_t bits = 0; bits < 8; ++bits) {
    const auto m = SubsetMask::from_bits(bits, 3);
    CHECK(fleet.eval(m).lo == direct.eval(m).lo);
    CHECK(fleet.eval(m).hi == direct.eval(m).hi);
  }
}

TEST_CASE("charging-EV recovery round-trips the builder", "[aggregate]") {
  Rng rng(35);
  for (int it = 0; it < 40; ++it) {
    const int horizon = rng.uniform_int(1, 6);
    const EvSpec s = testutil::random_charging_ev(rng, horizon);
    const auto rec = recover_charging_ev(build_ev(s, horizon));
    REQUIRE(rec.has_value());
    if (s.m_hi > 0) {
      CHECK(rec->arrive == s.arrive);
      CHECK(rec->depart == s.depart);
      CHECK(rec->m == s.m_hi);
      CHECK(rec->e_min == s.e_lo - s.e0);
      CHECK(rec->e_max == s.e_hi - s.e0);
    }
  }
  CHECK_FALSE(recover_charging_ev(build_ess(-1, 1, 0.5, 1, 3)).has_value());
}
