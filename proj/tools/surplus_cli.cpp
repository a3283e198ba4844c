// Batch front door: parse a portfolio file, run the selected surplus-sharing
// models, emit reports, run capital sweeps and the oracle verification suite.
//
// Exit codes: 0 all acceptability verdicts true, 3 some verdict false,
//             1 input/validation error, 2 internal error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "surplus/surplus.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;
constexpr int kExitRejected = 3;

struct RunConfig {
  std::string input;
  std::string model = "all";
  std::string format = "text";
  std::string out;
  std::string grid;
  std::uint64_t seed = 42;
  int instances = 200;
};

void write_output(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file '" + out_path + "'");
  out << payload;
}

std::vector<int> selected_models(const surplus::Portfolio& pf, const std::string& selector) {
  if (selector == "all") {
    std::vector<int> models{1, 2};
    if (pf.premia) {
      models.push_back(3);
      if (pf.fr) models.push_back(4);
    }
    return models;
  }
  const int m = std::stoi(selector);
  return {m};
}

surplus::ModelReport run_model(const surplus::Portfolio& pf, int model) {
  switch (model) {
    case 1: return surplus::model1_run(pf);
    case 2: return surplus::model2_run(pf);
    case 3: return surplus::model3_run(pf);
    case 4: return surplus::model4_run(pf);
    default: throw std::invalid_argument("model: must be 1..4");
  }
}

int do_run(const RunConfig& cfg) {
  const surplus::Portfolio pf = surplus::io::load_portfolio(cfg.input);
  const std::vector<int> models = selected_models(pf, cfg.model);
  std::vector<surplus::ModelReport> reports;
  reports.reserve(models.size());
  for (int m : models) reports.push_back(run_model(pf, m));

  std::string payload;
  if (cfg.format == "json") {
    surplus::io::json doc;
    doc["reports"] = surplus::io::json::array();
    for (const auto& r : reports) doc["reports"].push_back(surplus::io::report_to_json(r, pf.space));
    payload = doc.dump(2) + "\n";
  } else if (cfg.format == "csv") {
    std::ostringstream out;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (i) out << '\n';
      out << surplus::io::report_to_csv(reports[i], pf.space);
    }
    payload = out.str();
  } else {
    std::ostringstream out;
    for (const auto& r : reports) out << surplus::io::report_to_text(r, pf.space) << '\n';
    payload = out.str();
  }
  write_output(cfg.out, payload);

  for (const auto& r : reports)
    if (!r.all_accepted) return kExitRejected;
  return kExitOk;
}

std::vector<double> parse_grid(const std::string& spec) {
  // lo:hi:steps
  double lo = 0.0, hi = 0.0;
  int steps = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &steps) != 3 || steps < 1)
    throw std::invalid_argument("grid: expected lo:hi:steps with steps >= 1");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    grid.push_back(lo);
    return grid;
  }
  for (int k = 0; k < steps; ++k)
    grid.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1));
  return grid;
}

int do_sweep(const RunConfig& cfg) {
  const surplus::Portfolio pf = surplus::io::load_portfolio(cfg.input);
  if (cfg.grid.empty()) throw std::invalid_argument("grid: required for sweep");
  const std::vector<double> grid = parse_grid(cfg.grid);
  const surplus::SweepTable table = surplus::capital_sweep(pf, grid);

  std::string payload;
  if (cfg.format == "json") payload = surplus::io::sweep_to_json(table).dump(2) + "\n";
  else if (cfg.format == "csv") payload = surplus::io::sweep_to_csv(table);
  else payload = surplus::io::sweep_to_text(table);
  write_output(cfg.out, payload);

  return (table.retention_monotone && table.utility_monotone) ? kExitOk : kExitRejected;
}

int do_validate(const RunConfig& cfg) {
  const surplus::Portfolio pf = surplus::io::load_portfolio(cfg.input);
  std::cout << "valid portfolio: " << pf.n_agents() << " agents, " << pf.space.size()
            << " atoms" << (pf.premia ? ", charged premia" : "")
            << (pf.fr ? ", reinsurer utility" : "") << "\n";
  return kExitOk;
}

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

/// Reproduces the oracle-backed acceptance checks: enumeration vs Choquet,
/// bisection vs exact retention, premium exhaustion.
int do_verify(const RunConfig& cfg) {
  using namespace surplus;
  int failures = 0;
  auto check = [&failures](bool ok, const std::string& label) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << label << "\n";
    if (!ok) ++failures;
  };

  {
    ProbSpace space({"w1", "w2", "w3", "w4"}, {0.25, 0.25, 0.25, 0.25});
    std::vector<RandomVar> claims{RandomVar({0, 1, 1, 2}), RandomVar({0, 0, 1, 2})};
    const Distortion f0 = Distortion::power(2);
    const Distortion fr = Distortion::power(3);
    const RandomVar s = aggregate_sum(claims);

    check(close(oracle::oracle_utility(space, f0, -s), -41.0 / 16.0, 1e-12) &&
              close(total_premium(space, f0, claims), 41.0 / 16.0, 1e-12),
          "reference fixture: total premium equals enumeration over 24 extreme points");
    const PremiumVector premia = fair_premia(space, f0, claims);
    check(close(premia.per_agent[0], 22.0 / 16.0, 1e-12) &&
              close(premia.per_agent[1], 19.0 / 16.0, 1e-12),
          "reference fixture: fair premia (22/16, 19/16)");
    const WorstCaseMeasure q0 = worst_case_measure(space, f0, s);
    check(close(oracle::oracle_retention(space, q0.measure, s, 1.0), 29.0 / 9.0, 1e-9) &&
              close(solve_retention(RetentionProblem{space, s, q0.measure, 1.0}).R, 29.0 / 9.0,
                    1e-12),
          "reference fixture: retention 29/9 via bisection and exact inversion");
    const WorstCaseMeasure qr = worst_case_measure(space, fr, s);
    check(close(solve_retention(RetentionProblem{space, s, qr.measure, 1.0}).R, 257.0 / 64.0,
                1e-12),
          "reference fixture: reinsurer retention 257/64");
  }

  int utility_bad = 0, retention_bad = 0, exhaustion_bad = 0;
  std::mt19937_64 seeder(cfg.seed);
  for (int t = 0; t < cfg.instances; ++t) {
    oracle::InstanceDims dims;
    dims.atoms = 2 + static_cast<std::size_t>(seeder() % 5);  // up to 6 for enumeration
    dims.agents = 1 + static_cast<std::size_t>(seeder() % 3);
    dims.tie_frequency = 0.4 * static_cast<double>(seeder() % 100) / 100.0;
    const auto inst = oracle::random_instance(seeder(), dims);
    const Portfolio& pf = inst.portfolio;
    const RandomVar s = pf.aggregate();

    std::mt19937_64 rng(inst.seed + 17);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    std::vector<double> xs(pf.space.size());
    for (double& v : xs) v = val(rng);
    const RandomVar x(xs);
    if (!close(choquet_utility(pf.space, pf.f0, x), oracle::oracle_utility(pf.space, pf.f0, x),
               1e-9))
      ++utility_bad;

    const WorstCaseMeasure q0 = worst_case_measure(pf.space, pf.f0, s);
    const double target = pf.k0;
    const double exact = solve_retention(RetentionProblem{pf.space, s, q0.measure, target}).R;
    if (!close(exact, oracle::oracle_retention(pf.space, q0.measure, s, target), 1e-8))
      ++retention_bad;

    const PremiumVector premia = fair_premia(pf.space, pf.f0, pf.claims);
    if (!close(premia.total, total_premium(pf.space, pf.f0, pf.claims), 1e-12))
      ++exhaustion_bad;
  }
  check(utility_bad == 0, "random instances: Choquet equals extreme-point enumeration (" +
                              std::to_string(cfg.instances) + " draws)");
  check(retention_bad == 0, "random instances: exact retention equals bisection oracle");
  check(exhaustion_bad == 0, "random instances: fair premia exhaust the total premium");

  return failures == 0 ? kExitOk : kExitRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surplus-sharing models with coherent distortion utilities"};
  app.require_subcommand(1);

  RunConfig cfg;

  CLI::App* run = app.add_subcommand("run", "run surplus-sharing models on a portfolio file");
  run->add_option("input", cfg.input, "portfolio JSON file")->required();
  run->add_option("--model", cfg.model, "1|2|3|4|all")
      ->check(CLI::IsMember({"1", "2", "3", "4", "all"}));
  run->add_option("--format", cfg.format, "json|csv|text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  run->add_option("--out", cfg.out, "output file (default stdout)");

  CLI::App* sweep = app.add_subcommand("sweep", "model-4 capital sensitivity sweep");
  sweep->add_option("input", cfg.input, "portfolio JSON file")->required();
  sweep->add_option("--grid", cfg.grid, "capital grid lo:hi:steps")->required();
  sweep->add_option("--format", cfg.format, "json|csv|text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  sweep->add_option("--out", cfg.out, "output file (default stdout)");

  CLI::App* validate = app.add_subcommand("validate", "validate a portfolio file");
  validate->add_option("input", cfg.input, "portfolio JSON file")->required();

  CLI::App* verify = app.add_subcommand("verify", "run the oracle verification suite");
  verify->add_option("--seed", cfg.seed, "generator seed");
  verify->add_option("--instances", cfg.instances, "number of random instances")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (run->parsed()) return do_run(cfg);
    if (sweep->parsed()) return do_sweep(cfg);
    if (validate->parsed()) return do_validate(cfg);
    if (verify->parsed()) return do_verify(cfg);
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
