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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtherm/error.hpp"
#include "qtherm/lattice.hpp"
#include "qtherm/thermal.hpp"

namespace qtherm {

/// Batch configuration. The file format is flat `key = value` text with `#`
/// comments; lists are comma separated. Keys match the field names.
struct ExperimentConfig {
  int sites = 10;
  std::vector<double> deltas{0.5, 1, 2, 3, 4, 5, 6, 8};
  int realizations = 20;
  std::uint64_t seed = 20240607;
  std::vector<int> region_sizes{1, 2, 3, 4, 5};
  std::vector<TargetKind> target_kinds{TargetKind::hamiltonian_gibbs, TargetKind::reduced_global_gibbs};
  double epsilon = 0.1;
  std::string output_dir = "out";
  unsigned workers = 0;  // 0: hardware concurrency
  Boundary boundary = Boundary::periodic;
  int fit_min_region = 0;  // 0: smallest configured size
  int fit_max_region = 0;  // 0: largest configured size
  int region_offset = 0;
  bool translation_average = false;  // average every region position
  double failure_threshold = 0.2;

  /// Long preset: largest supported chain, 100 realizations.
  static ExperimentConfig full_preset();

  void validate() const;  // throws ConfigError
  std::string to_text() const;
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);
  /// Applies one `key = value` assignment.
  void set(std::string_view key, std::string_view value);
  unsigned resolved_workers() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct CellStats {
  double delta = 0.0;
  int region_size = 0;
  TargetKind kind = TargetKind::hamiltonian_gibbs;
  double mean = 0.0;  // bits
  double std_error = 0.0;
  int count = 0;
};

struct SlopeFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
};

struct SlopeRow {
  double delta = 0.0;
  TargetKind kind = TargetKind::hamiltonian_gibbs;
  SlopeFit fit;
  bool valid = false;  // fewer than two usable region sizes
};

struct TransitionEstimate {
  std::vector<double> deltas;
  std::vector<double> derivative;
  double delta_star = 0.0;
  double region_low = 0.0;
  double region_high = 0.0;
};

struct FailureRecord {
  double delta = 0.0;
  int delta_index = 0;
  int realization = 0;
  std::string kind;  // empty when the whole realization failed
  int region_size = 0;
  std::string reason;
};

/// Bound illustration for the smallest region, per delta, against tau_beta(H_R).
struct BoundSummary {
  double delta = 0.0;
  int region_size = 0;
  int count = 0;
  double mean_dmax_bits = 0.0;
  double mean_upper_bound = 0.0;  // (1/eps^2) 2^dmax
  int lower_bound_count = 0;      // realizations with commuting inputs
  double mean_lower_bound = 0.0;  // 2^{dmax_smooth(2 sqrt eps)}
};

struct EnsembleResult {
  std::vector<CellStats> cells;  // sorted (delta, region_size, kind)
  std::vector<SlopeRow> slopes;  // sorted (delta, kind)
  std::vector<std::pair<TargetKind, TransitionEstimate>> transitions;
  std::vector<BoundSummary> bounds;
  std::vector<FailureRecord> failures;
  int items = 0;
  int failed_items = 0;
  std::vector<double> betas;  // per item, canonical order (NaN when unmatched)
};

/// Thrown by run_ensemble when the failed fraction exceeds the threshold.
struct FailureThresholdExceeded : Error {
  FailureThresholdExceeded(const std::string& what, EnsembleResult partial)
      : Error(what), result(std::move(partial)) {}
  EnsembleResult result;
};

/// Seed of work item (delta_index, realization).
std::uint64_t item_seed(std::uint64_t master, int delta_index, int realization);

EnsembleResult run_ensemble(const ExperimentConfig& cfg);

/// Weighted least squares y = slope * x + intercept; stderr from the residual
/// variance. Empty weights mean unit weights.
SlopeFit fit_slope(std::span<const double> x, std::span<const double> y, std::span<const double> weights = {});

/// Centered-difference derivative of slope(delta); delta* at its maximum and
/// the contiguous range around it where it stays above half the maximum.
TransitionEstimate transition_estimate(std::span<const double> deltas, std::span<const double> slopes);

/// 17 significant digits, "nan"/"inf" spelled out.
std::string format_number(double x);

std::string curves_csv(const EnsembleResult& result);
std::string slopes_csv(const EnsembleResult& result);
std::string summary_json(const EnsembleResult& result, const ExperimentConfig& cfg);

/// Creates the directory if needed and checks it accepts files.
void prepare_output_dir(const std::filesystem::path& dir);
void emit_outputs(const EnsembleResult& result, const ExperimentConfig& cfg);

}  // namespace qtherm
