#pragma once

#include <chrono>
#include <future>
#include <map>

#include <json.hpp>

#include "flexpoly/aggregate.hpp"
#include "flexpoly/disaggregate.hpp"
#include "flexpoly/io.hpp"
#include "flexpoly/optimize.hpp"
#include "flexpoly/rng.hpp"

namespace flexpoly {

struct Range {
  double lo = 0, hi = 0;
};

// Sampling ranges for random scenario generation. The defaults mirror the
// case-study composition: 50 EVs (half with discharging capability) plus
// 100 households carrying a load, curtailable generation and a storage unit
// each. All sampling is uniform within the stated ranges.
struct ScenarioConfig {
  int horizon = 24;
  std::uint64_t seed = 1;

  struct {
    int count = 50;
    double v2g_fraction = 0.5;
    Range rate{1.0, 3.0};              // charging rate cap
    Range window_fraction{0.25, 1.0};  // window length relative to the horizon
    Range demand_fraction{0.2, 0.9};   // required energy relative to window * rate
  } evs;

  struct {
    int count = 100;
    Range load{0.05, 0.6};
    Range generation{0.0, 0.8};
    Range ess_capacity{1.0, 4.0};
    Range ess_rate{0.25, 1.0};
  } households;

  struct {
    int rows = 0;
    Range slack{0.5, 3.0};  // headroom added on top of a known feasible point
    double density = 0.5;
  } coupling;

  struct {
    std::vector<int> horizons{12, 24, 48, 96};
    int instances = 3;
    int coupling_rows = 10;
  } bench;

  std::string price_file;
  int days = 30;
  Range price_level{10.0, 60.0};
};

namespace detail {

inline Range range_from_json(const nlohmann::json& j, Range fallback) {
  if (j.is_null()) return fallback;
  if (!j.is_array() || j.size() != 2) throw ValidationError("config: ranges must be [lo, hi]");
  Range r{j[0].get<double>(), j[1].get<double>()};
  if (!(r.lo <= r.hi)) throw ValidationError("config: range out of order");
  return r;
}

}  // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  const auto get = [&](const char* key) { return j.contains(key) ? j.at(key) : nlohmann::json(); };
  if (!get("T").is_null()) cfg.horizon = j.at("T").get<int>();
  if (!get("seed").is_null()) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("evs")) {
    const auto& e = j.at("evs");
    if (e.contains("count")) cfg.evs.count = e.at("count").get<int>();
    if (e.contains("v2g_fraction")) cfg.evs.v2g_fraction = e.at("v2g_fraction").get<double>();
    cfg.evs.rate = detail::range_from_json(e.contains("rate") ? e.at("rate") : nlohmann::json(), cfg.evs.rate);
    cfg.evs.window_fraction = detail::range_from_json(
        e.contains("window_fraction") ? e.at("window_fraction") : nlohmann::json(), cfg.evs.window_fraction);
    cfg.evs.demand_fraction = detail::range_from_json(
        e.contains("demand_fraction") ? e.at("demand_fraction") : nlohmann::json(), cfg.evs.demand_fraction);
  }
  if (j.contains("households")) {
    const auto& h = j.at("households");
    if (h.contains("count")) cfg.households.count = h.at("count").get<int>();
    cfg.households.load = detail::range_from_json(h.contains("load") ? h.at("load") : nlohmann::json(), cfg.households.load);
    cfg.households.generation = detail::range_from_json(
        h.contains("generation") ? h.at("generation") : nlohmann::json(), cfg.households.generation);
    cfg.households.ess_capacity = detail::range_from_json(
        h.contains("ess_capacity") ? h.at("ess_capacity") : nlohmann::json(), cfg.households.ess_capacity);
    cfg.households.ess_rate = detail::range_from_json(
        h.contains("ess_rate") ? h.at("ess_rate") : nlohmann::json(), cfg.households.ess_rate);
  }
  if (j.contains("coupling")) {
    const auto& c = j.at("coupling");
    if (c.contains("rows")) cfg.coupling.rows = c.at("rows").get<int>();
    cfg.coupling.slack = detail::range_from_json(c.contains("slack") ? c.at("slack") : nlohmann::json(), cfg.coupling.slack);
    if (c.contains("density")) cfg.coupling.density = c.at("density").get<double>();
  }
  if (j.contains("bench")) {
    const auto& b = j.at("bench");
    if (b.contains("horizons")) cfg.bench.horizons = b.at("horizons").get<std::vector<int>>();
    if (b.contains("instances")) cfg.bench.instances = b.at("instances").get<int>();
    if (b.contains("coupling_rows")) cfg.bench.coupling_rows = b.at("coupling_rows").get<int>();
  }
  if (j.contains("price_file")) cfg.price_file = j.at("price_file").get<std::string>();
  if (j.contains("days")) cfg.days = j.at("days").get<int>();
  cfg.price_level = detail::range_from_json(j.contains("price_level") ? j.at("price_level") : nlohmann::json(),
                                            cfg.price_level);
  if (cfg.horizon < 1 || cfg.evs.count < 0 || cfg.households.count < 0)
    throw ValidationError("config: counts and horizon must be nonnegative");
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  return scenario_from_json(detail::parse_file(path));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Samples one population; every device is feasible by construction and the
// result is fully determined by the config and the generator state.
inline Population sample_population(const ScenarioConfig& cfg, Rng& rng) {
  Population pop;
  pop.horizon = cfg.horizon;
  const int horizon = cfg.horizon;

  const int n_v2g = static_cast<int>(std::lround(cfg.evs.count * cfg.evs.v2g_fraction));
  for (int i = 0; i < cfg.evs.count; ++i) {
    const bool v2g = i < n_v2g;
    const int len = std::max(
        1, std::min(horizon, static_cast<int>(std::lround(
                                 horizon * rng.uniform(cfg.evs.window_fraction.lo, cfg.evs.window_fraction.hi)))));
    const int arrive = rng.uniform_int(1, horizon - len + 1);
    const double m = rng.uniform(cfg.evs.rate.lo, cfg.evs.rate.hi);
    EvSpec s;
    s.arrive = arrive;
    s.depart = arrive + len - 1;
    s.m_hi = m;
    if (v2g) {
      s.m_lo = -m;
      s.cap = rng.uniform(0.25, 0.75) * len * m;
      s.e0 = rng.uniform(0.0, s.cap);
      s.e_lo = rng.uniform(0.0, s.cap);
      s.e_hi = s.cap;
    } else {
      s.m_lo = 0;
      const double demand = rng.uniform(cfg.evs.demand_fraction.lo, cfg.evs.demand_fraction.hi) * len * m;
      s.e0 = 0;
      s.cap = demand;
      s.e_lo = demand;
      s.e_hi = demand;
    }
    Device d;
    d.id = "ev" + std::to_string(i);
    d.kind = DeviceKind::ev;
    d.params = build_ev(s, horizon);
    pop.devices.push_back(std::move(d));
  }

  for (int h = 0; h < cfg.households.count; ++h) {
    const std::string base = "h" + std::to_string(h);
    std::vector<double> load(static_cast<std::size_t>(horizon)), gen(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
      load[static_cast<std::size_t>(t)] = rng.uniform(cfg.households.load.lo, cfg.households.load.hi);
      gen[static_cast<std::size_t>(t)] = rng.uniform(cfg.households.generation.lo, cfg.households.generation.hi);
    }
    const double cap = rng.uniform(cfg.households.ess_capacity.lo, cfg.households.ess_capacity.hi);
    const double rate = rng.uniform(cfg.households.ess_rate.lo, cfg.households.ess_rate.hi);
    pop.devices.push_back({base + ":load", DeviceKind::fixed_load, build_fixed_load(load)});
    pop.devices.push_back({base + ":gen", DeviceKind::generation, build_generation(gen)});
    pop.devices.push_back({base + ":ess", DeviceKind::ess, build_ess(-rate, rate, cap / 2, cap, horizon)});
  }

  for (const auto& d : pop.devices) {
    const auto v = validate(d.params);
    require(v.ok(), "sample_population: generated an invalid device: " + v.detail);
  }
  return pop;
}

// Coupling rows anchored at a known feasible point, so sampled instances
// stay feasible: row * u_ref + slack becomes the right-hand side.
inline CouplingConstraints sample_coupling(int rows, const ScenarioConfig& cfg, const Profile& u_ref,
                                           Rng& rng) {
  CouplingConstraints c;
  const int horizon = static_cast<int>(u_ref.size());
  for (int i = 0; i < rows; ++i) {
    std::vector<double> row(static_cast<std::size_t>(horizon), 0.0);
    bool any = false;
    for (int t = 0; t < horizon; ++t) {
      if (rng.uniform() < cfg.coupling.density) {
        row[static_cast<std::size_t>(t)] = rng.uniform(0.25, 1.0);
        any = true;
      }
    }
    if (!any) row[static_cast<std::size_t>(rng.uniform_int(0, horizon - 1))] = 1.0;
    const double rhs = dot(row, u_ref) + rng.uniform(cfg.coupling.slack.lo, cfg.coupling.slack.hi);
    c.rows.push_back(std::move(row));
    c.rhs.push_back(rhs);
  }
  return c;
}

// Day-shaped nonnegative prices: a two-peak daily profile scaled by a
// lognormal factor per step.
inline std::vector<double> synthetic_prices(int horizon, const ScenarioConfig& cfg, Rng& rng) {
  std::vector<double> prices(static_cast<std::size_t>(horizon), 0.0);
  const double level = rng.uniform(cfg.price_level.lo, cfg.price_level.hi);
  for (int t = 0; t < horizon; ++t) {
    const double x = static_cast<double>(t) / horizon;
    const double shape = 1.0 + 0.4 * std::exp(-40.0 * (x - 0.33) * (x - 0.33)) +
                         0.6 * std::exp(-40.0 * (x - 0.75) * (x - 0.75));
    prices[static_cast<std::size_t>(t)] = level * shape * rng.lognormal(0.0, 0.15);
  }
  return prices;
}

// Devices named "<group>:<part>" share a baseline group; everything else
// stands alone.
inline std::string group_key(const std::string& id) {
  const auto pos = id.find(':');
  return pos == std::string::npos ? id : id.substr(0, pos);
}

// Charge-as-soon-as-possible profile for an EV: full admissible power until
// the required departure energy is banked, then idle.
inline Profile ev_baseline_profile(const DeviceParams& p) {
  const int horizon = p.horizon();
  Profile u(static_cast<std::size_t>(horizon), 0.0);
  const double target = std::max(p.x_lo[static_cast<std::size_t>(horizon - 1)], 0.0);
  double x = 0;
  for (int t = 0; t < horizon; ++t) {
    double step = std::min(p.u_hi[static_cast<std::size_t>(t)], target - x);
    step = std::min(step, p.x_hi[static_cast<std::size_t>(t)] - x);
    step = std::max(step, 0.0);
    u[static_cast<std::size_t>(t)] = step;
    x += step;
  }
  require(check_membership(p, u, 1e-9), "ev_baseline_profile: device is not EV-shaped");
  return u;
}

struct BaselineResult {
  Profile aggregate;
  double l1_total = 0;  // sum over devices of their absolute baseline energy
  std::vector<DeviceSchedule> schedules;
};

// Baseline operating point of a population: EVs charge as soon as possible;
// each household group minimizes the l1 norm of its net consumption over its
// own aggregate set (column generation with epigraph variables in the
// master) and the optimum is split back onto the group members.
inline BaselineResult compute_baseline(const Population& pop, const DwOptions& opts = {}) {
  const int horizon = pop.horizon;
  BaselineResult out;
  out.aggregate.assign(static_cast<std::size_t>(horizon), 0.0);
  out.schedules.resize(pop.devices.size());

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < pop.devices.size(); ++i) {
    const auto& dev = pop.devices[i];
    if (dev.kind == DeviceKind::ev) {
      Profile u = ev_baseline_profile(dev.params);
      for (int t = 0; t < horizon; ++t) out.aggregate[static_cast<std::size_t>(t)] += u[static_cast<std::size_t>(t)];
      for (double v : u) out.l1_total += std::abs(v);
      out.schedules[i] = {dev.id, std::move(u), true};
    } else {
      groups[group_key(dev.id)].push_back(i);
    }
  }

  for (const auto& [key, members] : groups) {
    Population sub;
    sub.horizon = horizon;
    for (std::size_t i : members) sub.devices.push_back(pop.devices[i]);

    // min sum_t s(t)  s.t.  u - s <= 0, -u - s <= 0, u in the group set.
    CouplingConstraints coupling;
    MasterAux aux;
    aux.cost.assign(static_cast<std::size_t>(horizon), 1.0);
    aux.cols.assign(static_cast<std::size_t>(2 * horizon),
                    std::vector<double>(static_cast<std::size_t>(horizon), 0.0));
    for (int t = 0; t < horizon; ++t) {
      std::vector<double> row(static_cast<std::size_t>(horizon), 0.0);
      row[static_cast<std::size_t>(t)] = 1.0;
      coupling.rows.push_back(row);
      coupling.rhs.push_back(0.0);
      aux.cols[static_cast<std::size_t>(t)][static_cast<std::size_t>(t)] = -1.0;
    }
    for (int t = 0; t < horizon; ++t) {
      std::vector<double> row(static_cast<std::size_t>(horizon), 0.0);
      row[static_cast<std::size_t>(t)] = -1.0;
      coupling.rows.push_back(row);
      coupling.rhs.push_back(0.0);
      aux.cols[static_cast<std::size_t>(horizon + t)][static_cast<std::size_t>(t)] = -1.0;
    }

    const auto oracle = make_population_oracle(sub);
    const std::vector<double> zero_cost(static_cast<std::size_t>(horizon), 0.0);
    SolveResult sol = solve_lp_coupled(*oracle, zero_cost, coupling, opts, aux);
    require(sol.feasible(), "compute_baseline: household solve failed for group " + key);

    DisaggregationResult split = disaggregate(sub, sol.atoms, sol.u_star, 1e-9);
    require(split.ok, "compute_baseline: household disaggregation failed for group " + key);
    for (std::size_t k = 0; k < members.size(); ++k) {
      const auto& sched = split.schedules[k];
      for (int t = 0; t < horizon; ++t)
        out.aggregate[static_cast<std::size_t>(t)] += sched.u[static_cast<std::size_t>(t)];
      out.schedules[members[k]] = sched;
    }
    out.l1_total += sol.objective;
  }
  return out;
}

struct BenchRow {
  int horizon = 0;
  int devices = 0;
  std::string method;
  int instance = 0;
  std::int64_t wall_us = 0;
};

inline std::int64_t elapsed_us(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - from)
      .count();
}

// Wall-clock timings of the two solver entry points over a grid of horizons,
// fresh random instances per cell. Rows come back sorted by (T, instance,
// method) no matter how workers interleave.
inline std::vector<BenchRow> run_bench(const ScenarioConfig& cfg, int workers = 1) {
  struct Cell {
    int horizon, instance;
  };
  std::vector<Cell> cells;
  for (int horizon : cfg.bench.horizons)
    for (int i = 0; i < cfg.bench.instances; ++i) cells.push_back({horizon, i});

  std::vector<std::vector<BenchRow>> results(cells.size());
  auto run_cell = [&](std::size_t idx) {
    const Cell cell = cells[idx];
    ScenarioConfig local = cfg;
    local.horizon = cell.horizon;
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(cell.horizon) * 1000003ull +
                                   static_cast<std::uint64_t>(cell.instance)));
    const Population pop = sample_population(local, rng);
    const auto oracle = make_population_oracle(pop);
    std::vector<double> cost(static_cast<std::size_t>(cell.horizon));
    for (auto& v : cost) v = rng.uniform(-1.0, 1.0);
    const Profile u_ref = greedy_lp(*oracle, std::vector<double>(static_cast<std::size_t>(cell.horizon), 0.0)).u;
    const CouplingConstraints coupling = sample_coupling(cfg.bench.coupling_rows, local, u_ref, rng);
    const int n_dev = static_cast<int>(pop.devices.size());

    auto t0 = std::chrono::steady_clock::now();
    const Vertex v = greedy_lp(*oracle, cost);
    const std::int64_t greedy_us = elapsed_us(t0);
    (void)v;

    t0 = std::chrono::steady_clock::now();
    const SolveResult sol = solve_lp_coupled(*oracle, cost, coupling);
    const std::int64_t dw_us = elapsed_us(t0);
    require(sol.feasible(), "run_bench: sampled instance unexpectedly infeasible");

    results[idx] = {{cell.horizon, n_dev, "greedy", cell.instance, greedy_us},
                    {cell.horizon, n_dev, "dw", cell.instance, dw_us}};
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::vector<std::future<void>> futs;
    std::size_t next = 0;
    while (next < cells.size()) {
      while (static_cast<int>(futs.size()) < workers && next < cells.size())
        futs.push_back(std::async(std::launch::async, run_cell, next++));
      for (auto& f : futs) f.get();
      futs.clear();
    }
  }

  std::vector<BenchRow> rows;
  for (const auto& cell_rows : results)
    for (const auto& r : cell_rows) rows.push_back(r);
  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    if (a.horizon != b.horizon) return a.horizon < b.horizon;
    if (a.instance != b.instance) return a.instance < b.instance;
    return a.method < b.method;
  });
  return rows;
}

inline void save_bench_csv(const std::vector<BenchRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "T,N,method,instance,wall_time_us\n";
  for (const auto& r : rows)
    out << r.horizon << "," << r.devices << "," << r.method << "," << r.instance << "," << r.wall_us
        << "\n";
  detail::write_file(path, out.str());
}

struct CaseStudyRow {
  int day = 0;
  double baseline_cost = 0;
  double optimized_cost = 0;
  double cumulative_baseline = 0;
  double cumulative_optimized = 0;
};

// One uncoupled cost-minimization per day against a fresh population, with
// the baseline operating point priced on the same day-ahead series.
inline std::vector<CaseStudyRow> run_case_study(const ScenarioConfig& cfg,
                                                const std::vector<PriceRow>& prices, int days,
                                                const DwOptions& opts = {}) {
  require(days >= 0, "run_case_study: negative day count");
  // Per-day price vectors; synthetic when no file rows were supplied.
  std::vector<std::pair<int, std::vector<double>>> day_prices;
  if (!prices.empty()) {
    std::map<int, std::map<int, double>> by_day;
    for (const auto& r : prices) by_day[r.day][r.step] = r.price;
    for (const auto& [day, steps] : by_day) {
      if (static_cast<int>(day_prices.size()) == days) break;
      std::vector<double> c(static_cast<std::size_t>(cfg.horizon), 0.0);
      for (int t = 1; t <= cfg.horizon; ++t) {
        const auto it = steps.find(t);
        if (it == steps.end())
          throw ValidationError("price file: day " + std::to_string(day) + " lacks step " +
                                std::to_string(t));
        c[static_cast<std::size_t>(t - 1)] = it->second;
      }
      day_prices.push_back({day, std::move(c)});
    }
    if (static_cast<int>(day_prices.size()) < days)
      throw ValidationError("price file: fewer days than requested");
  } else {
    for (int d = 0; d < days; ++d) {
      Rng rng(mix_seed(cfg.seed, 7700000ull + static_cast<std::uint64_t>(d)));
      day_prices.push_back({d + 1, synthetic_prices(cfg.horizon, cfg, rng)});
    }
  }

  std::vector<CaseStudyRow> rows;
  double cum_base = 0, cum_opt = 0;
  for (int d = 0; d < days; ++d) {
    Rng rng(mix_seed(cfg.seed, 3300000ull + static_cast<std::uint64_t>(d)));
    const Population pop = sample_population(cfg, rng);
    const auto& cost = day_prices[static_cast<std::size_t>(d)].second;

    const BaselineResult baseline = compute_baseline(pop, opts);
    const double base_cost = dot(cost, baseline.aggregate);

    const auto oracle = make_population_oracle(pop);
    const Vertex v = greedy_lp(*oracle, cost, opts.threads);
    const double opt_cost = dot(cost, v.u);

    cum_base += base_cost;
    cum_opt += opt_cost;
    rows.push_back({day_prices[static_cast<std::size_t>(d)].first, base_cost, opt_cost, cum_base, cum_opt});
  }
  return rows;
}

inline void save_case_study_csv(const std::vector<CaseStudyRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "day,baseline_cost,optimized_cost,cumulative_baseline,cumulative_optimized\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g\n", r.day, r.baseline_cost,
                  r.optimized_cost, r.cumulative_baseline, r.cumulative_optimized);
    out << buf;
  }
  detail::write_file(path, out.str());
}

}  // namespace flexpoly
