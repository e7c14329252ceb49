// Command-line front end: population generation, solving, disaggregation,
// baseline computation, and the benchmark / case-study harnesses.
//
// Exit codes: 0 ok, 2 infeasible problem, 3 validation error, 4 I/O error.

#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "flexpoly/flexpoly.hpp"

namespace fp = flexpoly;

namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;

std::vector<double> parse_cost_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw fp::ValidationError("cannot parse cost entry '" + token + "'");
    }
  }
  if (out.empty()) throw fp::ValidationError("empty cost vector");
  return out;
}

std::vector<double> resolve_cost(const std::string& cost_list, const std::string& price_file,
                                 int day, int horizon) {
  if (!cost_list.empty()) {
    auto c = parse_cost_list(cost_list);
    if (static_cast<int>(c.size()) != horizon)
      throw fp::ValidationError("cost vector length does not match the population horizon");
    return c;
  }
  if (price_file.empty()) throw fp::ValidationError("need --cost or --price-file");
  const auto rows = fp::load_prices(price_file);
  std::vector<double> c(static_cast<std::size_t>(horizon), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(horizon), false);
  for (const auto& r : rows) {
    if (r.day != day || r.step < 1 || r.step > horizon) continue;
    c[static_cast<std::size_t>(r.step - 1)] = r.price;
    seen[static_cast<std::size_t>(r.step - 1)] = true;
  }
  for (int t = 0; t < horizon; ++t)
    if (!seen[static_cast<std::size_t>(t)])
      throw fp::ValidationError("price file lacks day " + std::to_string(day) + " step " +
                                std::to_string(t + 1));
  return c;
}

int cmd_gen(const std::string& config_path, std::uint64_t seed, bool seed_set,
            const std::string& output) {
  fp::ScenarioConfig cfg = config_path.empty() ? fp::ScenarioConfig{} : fp::load_scenario(config_path);
  if (seed_set) cfg.seed = seed;
  fp::Rng rng(cfg.seed);
  const fp::Population pop = fp::sample_population(cfg, rng);
  fp::save_population(pop, output);
  std::cout << "wrote " << pop.devices.size() << " devices over T=" << pop.horizon << " to "
            << output << "\n";
  return 0;
}

int cmd_solve(const std::string& input, const std::string& cost_list, const std::string& price_file,
              int day, const std::string& coupling_path, const std::string& output, double tol,
              int parallel) {
  const fp::Population pop = fp::load_population(input);
  const auto cost = resolve_cost(cost_list, price_file, day, pop.horizon);
  fp::CouplingConstraints coupling;
  if (!coupling_path.empty()) coupling = fp::load_coupling(coupling_path);

  const auto oracle = fp::make_population_oracle(pop);
  fp::DwOptions opts;
  opts.reduced_cost_tol = tol > 0 ? tol : 1e-8;
  opts.threads = parallel;

  const auto t0 = std::chrono::steady_clock::now();
  const fp::SolveResult sol = fp::solve_lp_coupled(*oracle, cost, coupling, opts);
  const std::int64_t us = fp::elapsed_us(t0);

  if (sol.status == fp::SolveStatus::infeasible) {
    std::cerr << "infeasible: coupling constraints cut off the aggregate flexibility set\n";
    return kExitInfeasible;
  }
  if (sol.status == fp::SolveStatus::iteration_cap)
    std::cerr << "warning: pricing round cap reached after " << sol.pricing_rounds
              << " rounds; result may be suboptimal\n";

  fp::SolveArtifact artifact{sol.u_star, sol.objective, sol.atoms, us};
  fp::save_result(artifact, output);
  std::printf("objective %.12g in %lld us (%d pricing rounds, %zu atoms)\n", sol.objective,
              static_cast<long long>(us), sol.pricing_rounds, sol.atoms.size());
  return 0;
}

int cmd_disagg(const std::string& input, const std::string& result_path, const std::string& output,
               double tol) {
  const fp::Population pop = fp::load_population(input);
  const fp::SolveArtifact artifact = fp::load_result(result_path);
  if (artifact.atoms.empty()) throw fp::ValidationError("result file carries no atoms");
  for (const auto& a : artifact.atoms)
    if (a.vertex.label.size() != pop.horizon + 1)
      throw fp::ValidationError("result atoms do not match the population horizon (stale file?)");

  // Reject tampered results: the stored point must match its own atoms.
  fp::Profile recombined(static_cast<std::size_t>(pop.horizon), 0.0);
  for (const auto& a : artifact.atoms)
    for (int t = 0; t < pop.horizon; ++t)
      recombined[static_cast<std::size_t>(t)] += a.weight * a.vertex.u[static_cast<std::size_t>(t)];
  for (int t = 0; t < pop.horizon; ++t)
    if (std::abs(recombined[static_cast<std::size_t>(t)] - artifact.u_star[static_cast<std::size_t>(t)]) > 1e-6)
      throw fp::ValidationError("result file is inconsistent: atoms do not recombine to u_star");

  const double use_tol = tol > 0 ? tol : 1e-9;
  const fp::DisaggregationResult split = fp::disaggregate(pop, artifact.atoms, artifact.u_star, use_tol);
  const fp::VerificationReport report =
      fp::verify_disaggregation(pop, split.schedules, artifact.u_star, use_tol);
  fp::save_schedule_csv(split.schedules, report, output);
  std::printf("residual %.3e, %zu violation(s)\n", report.residual, report.violations.size());
  return report.ok() ? 0 : kExitValidation;
}

int cmd_baseline(const std::string& input, const std::string& output, int parallel) {
  const fp::Population pop = fp::load_population(input);
  fp::DwOptions opts;
  opts.threads = parallel;
  const fp::BaselineResult base = fp::compute_baseline(pop, opts);

  nlohmann::json devices = nlohmann::json::array();
  for (const auto& s : base.schedules) devices.push_back({{"id", s.id}, {"u", s.u}});
  nlohmann::json j{
      {"u_baseline", base.aggregate}, {"l1_total", base.l1_total}, {"devices", devices}};
  fp::detail::write_file(output, j.dump(2) + "\n");
  std::printf("baseline l1 total %.12g\n", base.l1_total);
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& output, int parallel) {
  const fp::ScenarioConfig cfg =
      config_path.empty() ? fp::ScenarioConfig{} : fp::load_scenario(config_path);
  const auto rows = fp::run_bench(cfg, parallel);
  fp::save_bench_csv(rows, output);
  std::cout << "wrote " << rows.size() << " timing rows to " << output << "\n";
  return 0;
}

int cmd_case_study(const std::string& config_path, const std::string& price_file, int days,
                   const std::string& output, int parallel) {
  fp::ScenarioConfig cfg = config_path.empty() ? fp::ScenarioConfig{} : fp::load_scenario(config_path);
  if (!price_file.empty()) cfg.price_file = price_file;
  std::vector<fp::PriceRow> prices;
  if (!cfg.price_file.empty()) prices = fp::load_prices(cfg.price_file);
  const int use_days = days >= 0 ? days : cfg.days;
  fp::DwOptions opts;
  opts.threads = parallel;
  const auto rows = fp::run_case_study(cfg, prices, use_days, opts);
  fp::save_case_study_csv(rows, output);
  if (!rows.empty())
    std::printf("cumulative optimized %.12g vs baseline %.12g over %d day(s)\n",
                rows.back().cumulative_optimized, rows.back().cumulative_baseline, use_days);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact aggregate-flexibility toolkit for DER populations"};
  app.require_subcommand(1);

  std::string input, output, config_path, coupling_path, result_path, cost_list, price_file;
  std::uint64_t seed = 1;
  double tol = -1;
  int parallel = 1, day = 1, days = -1;

  auto* gen = app.add_subcommand("gen", "Sample a random population and write it as JSON");
  gen->add_option("--config", config_path, "Scenario config JSON");
  auto* seed_opt = gen->add_option("--seed", seed, "Override the config seed");
  gen->add_option("--output", output, "Population JSON path")->required();

  auto* solve = app.add_subcommand("solve", "Minimize energy cost over the aggregate set");
  solve->add_option("--input", input, "Population JSON")->required();
  solve->add_option("--cost", cost_list, "Comma-separated cost vector");
  solve->add_option("--price-file", price_file, "Price CSV (day,t,price)");
  solve->add_option("--day", day, "Day to read from the price file");
  solve->add_option("--coupling", coupling_path, "Coupling constraints JSON");
  solve->add_option("--output", output, "Result JSON path")->required();
  solve->add_option("--tol", tol, "Pricing reduced-cost tolerance");
  solve->add_option("--parallel", parallel, "Worker threads for oracle evaluations");

  auto* disagg = app.add_subcommand("disagg", "Split a solved profile into device schedules");
  disagg->add_option("--input", input, "Population JSON")->required();
  disagg->add_option("--result", result_path, "Result JSON from solve")->required();
  disagg->add_option("--output", output, "Schedule CSV path")->required();
  disagg->add_option("--tol", tol, "Feasibility tolerance");

  auto* baseline = app.add_subcommand("baseline", "Baseline operating point of a population");
  baseline->add_option("--input", input, "Population JSON")->required();
  baseline->add_option("--output", output, "Baseline JSON path")->required();
  baseline->add_option("--parallel", parallel, "Worker threads");

  auto* bench = app.add_subcommand("bench", "Time the solvers over a horizon grid");
  bench->add_option("--config", config_path, "Scenario config JSON");
  bench->add_option("--output", output, "Timing CSV path")->required();
  bench->add_option("--parallel", parallel, "Parallel bench workers");

  auto* cs = app.add_subcommand("case-study", "Daily baseline-vs-optimized cost comparison");
  cs->add_option("--config", config_path, "Scenario config JSON");
  cs->add_option("--price-file", price_file, "Price CSV (day,t,price); synthetic when omitted");
  cs->add_option("--days", days, "Number of days to simulate");
  cs->add_option("--output", output, "Cost CSV path")->required();
  cs->add_option("--parallel", parallel, "Worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(config_path, seed, seed_opt->count() > 0, output);
    if (solve->parsed())
      return cmd_solve(input, cost_list, price_file, day, coupling_path, output, tol, parallel);
    if (disagg->parsed()) return cmd_disagg(input, result_path, output, tol);
    if (baseline->parsed()) return cmd_baseline(input, output, parallel);
    if (bench->parsed()) return cmd_bench(config_path, output, parallel);
    if (cs->parsed()) return cmd_case_study(config_path, price_file, days, output, parallel);
  } catch (const fp::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fp::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
