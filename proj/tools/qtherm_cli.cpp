// Copyright 2026 The qtherm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qtherm_cli: batch front end for the qtherm library.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qtherm/collision.hpp"
#include "qtherm/entropy.hpp"
#include "qtherm/experiment.hpp"
#include "qtherm/optimality.hpp"
#include "qtherm/random_ops.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace qtherm;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitThreshold = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out;
};

std::vector<double> parse_list(const std::string& name, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("--" + name + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--" + name + " must not be empty");
  return out;
}

void report(const json& j, const Common& common, const std::string& file) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!common.out.empty()) {
    prepare_output_dir(common.out);
    std::ofstream(std::filesystem::path(common.out) / file, std::ios::binary) << text;
  }
}

json nullable(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

int run_ensemble_cmd(const Common& common, const std::string& preset) {
  ExperimentConfig cfg;
  if (preset == "full") cfg = ExperimentConfig::full_preset();
  if (!common.config.empty()) cfg = ExperimentConfig::load(common.config);
  if (common.seed) cfg.seed = *common.seed;
  if (common.workers) cfg.workers = *common.workers;
  if (!common.out.empty()) cfg.output_dir = common.out;
  cfg.validate();
  prepare_output_dir(cfg.output_dir);

  int code = kExitOk;
  EnsembleResult result;
  try {
    result = run_ensemble(cfg);
  } catch (FailureThresholdExceeded& e) {
    std::cerr << "qtherm_cli: " << e.what() << "\n";
    result = std::move(e.result);
    code = kExitThreshold;
  }
  emit_outputs(result, cfg);
  std::cout << "items " << result.items << ", failed " << result.failed_items << ", outputs in " << cfg.output_dir
            << "\n";
  for (const auto& [kind, t] : result.transitions) {
    std::cout << target_kind_name(kind) << ": delta* = " << format_number(t.delta_star) << " in ["
              << format_number(t.region_low) << ", " << format_number(t.region_high) << "]\n";
  }
  return code;
}

int run_convex_split(const Common& common, const std::string& p_text, const std::string& q_text, std::size_t n_max) {
  const auto p = parse_list("p", p_text);
  const auto q = parse_list("q", q_text);
  const auto rho = DensityMatrix::diagonal(p);
  const auto sigma = DensityMatrix::diagonal(q);
  const double d = dmax(rho, sigma).value;
  json rows = json::array();
  bool all_hold = true;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double measured = convex_split_distance_diagonal(p, q, n);
    const double bound = std::sqrt(std::exp2(d) / static_cast<double>(n));
    const bool holds = measured * measured <= bound * bound + 1e-9;
    all_hold = all_hold && holds;
    rows.push_back({{"n", n}, {"distance", measured}, {"bound", bound}, {"holds", holds}});
  }
  report({{"dmax_bits", d}, {"rows", rows}, {"all_hold", all_hold}}, common, "convex_split.json");
  return kExitOk;
}

int run_n_epsilon(const Common& common, const std::string& p_text, const std::string& q_text,
                  const std::string& e_text, double epsilon, std::size_t n_max) {
  const auto p = parse_list("p", p_text);
  const auto q = parse_list("q", q_text);
  const auto e = parse_list("energies", e_text);
  const auto r = find_n_epsilon(DensityMatrix::diagonal(p), DensityMatrix::diagonal(q), ComplexMatrix::diagonal(e),
                                epsilon, n_max);
  json j;
  j["epsilon"] = epsilon;
  j["n_epsilon"] = r.n_epsilon ? json(*r.n_epsilon) : json(nullptr);
  j["distances"] = r.distances;
  j["dmax_bits"] = r.dmax_bits;
  j["upper_bound"] = r.upper_bound;
  j["lower_bound"] = nullable(r.lower_bound);
  j["esc_verified"] = r.esc_verified;
  j["upper_bound_only"] = r.upper_bound_only;
  j["note"] = r.note;
  report(j, common, "n_epsilon.json");
  return kExitOk;
}

int run_esc(const Common& common, const std::string& e_text, std::size_t n_max, double tol) {
  const auto e = parse_list("energies", e_text);
  const auto r = check_esc(e, n_max, tol);
  json verdicts = json::array();
  for (std::size_t n = 1; n <= r.verdicts.size(); ++n) {
    const auto v = r.verdict(n);
    verdicts.push_back({{"n", n}, {"verdict", v == EscVerdict::pass ? "pass" : v == EscVerdict::fail ? "fail" : "unchecked"}});
  }
  json collisions = json::array();
  for (const auto& c : r.collisions) collisions.push_back({{"n", c.n}, {"m", c.m}, {"m_prime", c.m_prime}, {"gap", c.gap}});
  report({{"energies", e},
          {"n_max", n_max},
          {"tol_e", tol},
          {"passes", r.passes()},
          {"incomplete", r.incomplete},
          {"verdicts", verdicts},
          {"collisions", collisions}},
         common, "esc.json");
  return kExitOk;
}

int run_counterexample(const Common& common, const std::string& e_text, double beta) {
  const auto e = parse_list("energies", e_text);
  const auto r = appendix_c_counterexample(e, beta);
  report({{"energies", e},
          {"beta", beta},
          {"populations", r.populations},
          {"d_convex_split", r.d_convex_split},
          {"d_improved", r.d_improved},
          {"difference", r.difference},
          {"predicted", r.predicted},
          {"residual", r.residual},
          {"weight_defect", r.weight_defect},
          {"precondition", r.precondition},
          {"strict", r.strict},
          {"note", r.note}},
         common, "counterexample.json");
  return kExitOk;
}

int run_dynamics_check(const Common& common, std::size_t processes, std::size_t trajectories, double t) {
  const std::uint64_t seed = common.seed.value_or(7);
  const unsigned workers = common.workers.value_or(0) == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                                            : *common.workers;
  const std::vector<double> energies{0.0, 1.0};
  json rows = json::array();
  double worst_rk4 = 0.0, worst_mc = 0.0;
  for (std::size_t k = 0; k < processes; ++k) {
    SplitMix64 rng(derive_seed(seed, k));
    const std::size_t n = 2 + k % 2;
    const auto channel = sample_energy_preserving_channel(energies, n, rng.next());
    std::vector<double> rates;
    for (std::size_t i = 0; i < channel.size(); ++i) rates.push_back(rng.uniform(0.5, 1.5));
    const CollisionProcess proc(ComplexMatrix::diagonal(energies), n, channel.unitaries(), rates);
    const auto rho0 = random_density_matrix(proc.dimension(), rng);
    const auto series = evolve_series(proc, rho0, t);
    const double d_rk4 = trace_distance(series.state, evolve_rk4(proc, rho0, t));
    const double d_mc = trace_distance(series.state, evolve_trajectories(proc, rho0, t, trajectories, rng.next(),
                                                                         TrajectorySampler::competing_clocks, workers));
    worst_rk4 = std::max(worst_rk4, d_rk4);
    worst_mc = std::max(worst_mc, d_mc);
    rows.push_back({{"process", k}, {"subsystems", n}, {"unitaries", channel.size()}, {"series_order", series.order},
                    {"series_vs_rk4", d_rk4}, {"series_vs_trajectories", d_mc}});
  }
  const bool ok = worst_rk4 <= 1e-6 && worst_mc <= 5e-3;
  report({{"time", t}, {"trajectories", trajectories}, {"rows", rows}, {"max_series_vs_rk4", worst_rk4},
          {"max_series_vs_trajectories", worst_mc}, {"within_tolerance", ok}},
         common, "dynamics_check.json");
  return ok ? kExitOk : kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qtherm_cli: thermalization toolkit"};
  app.require_subcommand(1);
  Common common;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Config file (flat key = value)");
    sub->add_option("--seed", seed, "Master seed")->each([&](const std::string&) { common.seed = seed; });
    sub->add_option("--workers", workers, "Worker threads (0: all cores)")->each([&](const std::string&) {
      common.workers = workers;
    });
    sub->add_option("--out", common.out, "Output directory");
  };

  std::string preset = "default";
  auto* ens = app.add_subcommand("ensemble", "Disorder ensemble of D_max curves");
  add_common(ens);
  ens->add_option("--preset", preset, "default or full")->check(CLI::IsMember({"default", "full"}));

  std::string p_text = "1,0", q_text = "0.5,0.5", e_text;
  std::size_t n_max = 8;
  auto* cs = app.add_subcommand("convex-split", "Convex-split distance against its bound (diagonal inputs)");
  add_common(cs);
  cs->add_option("--p", p_text, "Populations of rho");
  cs->add_option("--q", q_text, "Populations of sigma");
  cs->add_option("--n", n_max, "Largest number of copies");

  double epsilon = 0.4;
  std::size_t scan = 0;
  std::string ne_energies = "0,1";
  auto* ne = app.add_subcommand("n-epsilon", "Smallest bath size reaching epsilon");
  add_common(ne);
  ne->add_option("--p", p_text, "Populations of omega");
  ne->add_option("--q", q_text, "Populations of tau");
  ne->add_option("--energies", ne_energies, "Local energies");
  ne->add_option("--epsilon", epsilon, "Target distance");
  ne->add_option("--n-max", scan, "Scan limit (0: upper bound)");

  std::string esc_energies = "0,1,2.5";
  std::size_t esc_n = 4;
  double esc_tol = kDefaultEnergyTolerance;
  auto* esc = app.add_subcommand("esc", "Energy-subspace condition check");
  add_common(esc);
  esc->add_option("--energies", esc_energies, "Local energies");
  esc->add_option("--n-max", esc_n, "Largest n");
  esc->add_option("--tol", esc_tol, "Energy tolerance");

  std::string ce_energies = "0,0.3,0.9,1.2";
  double beta = 1.0;
  auto* ce = app.add_subcommand("counterexample", "Degenerate-gap improvement over the convex split");
  add_common(ce);
  ce->add_option("--energies", ce_energies, "Four energies with E2 - E1 = E4 - E3");
  ce->add_option("--beta", beta, "Inverse temperature");

  std::size_t processes = 10, trajectories = 100000;
  double time = 1.0;
  auto* dc = app.add_subcommand("dynamics-check", "Series vs RK4 vs trajectories");
  add_common(dc);
  dc->add_option("--processes", processes, "Number of random processes");
  dc->add_option("--trajectories", trajectories, "Monte Carlo trajectories");
  dc->add_option("--time", time, "Evolution time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (ens->parsed()) return run_ensemble_cmd(common, preset);
    if (cs->parsed()) return run_convex_split(common, p_text, q_text, n_max);
    if (ne->parsed()) return run_n_epsilon(common, p_text, q_text, ne_energies, epsilon, scan);
    if (esc->parsed()) return run_esc(common, esc_energies, esc_n, esc_tol);
    if (ce->parsed()) return run_counterexample(common, ce_energies, beta);
    if (dc->parsed()) return run_dynamics_check(common, processes, trajectories, time);
  } catch (const ConfigError& e) {
    std::cerr << "qtherm_cli: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "qtherm_cli: invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "qtherm_cli: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
