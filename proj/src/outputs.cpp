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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qtherm/experiment.hpp"

namespace qtherm {
namespace {

using json = nlohmann::ordered_json;

// nlohmann prints doubles with the shortest round-trip form; we want a fixed
// 17 significant digits everywhere, and null for non-finite values.
void write_json(std::ostream& out, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << inner << json(it.key()).dump() << ": ";
        write_json(out, it.value(), indent + 1);
      }
      out << "\n" << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << inner;
        write_json(out, j[i], indent + 1);
      }
      out << "\n" << pad << "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out << (std::isfinite(x) ? format_number(x) : "null");
      return;
    }
    default:
      out << j.dump();
  }
}

bool cell_less(const CellStats& a, const CellStats& b) {
  if (a.delta != b.delta) return a.delta < b.delta;
  if (a.region_size != b.region_size) return a.region_size < b.region_size;
  return a.kind < b.kind;
}

bool slope_less(const SlopeRow& a, const SlopeRow& b) {
  if (a.delta != b.delta) return a.delta < b.delta;
  return a.kind < b.kind;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write to " + path.string() + " failed");
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string curves_csv(const EnsembleResult& result) {
  auto cells = result.cells;
  std::stable_sort(cells.begin(), cells.end(), cell_less);
  std::ostringstream out;
  out << "delta,region_size,target_kind,mean_dmax_bits,stderr,count\n";
  for (const auto& c : cells) {
    out << format_number(c.delta) << ',' << c.region_size << ',' << target_kind_name(c.kind) << ','
        << format_number(c.mean) << ',' << format_number(c.std_error) << ',' << c.count << '\n';
  }
  return out.str();
}

std::string slopes_csv(const EnsembleResult& result) {
  auto rows = result.slopes;
  std::stable_sort(rows.begin(), rows.end(), slope_less);
  std::ostringstream out;
  out << "delta,target_kind,slope,slope_stderr,intercept\n";
  for (const auto& r : rows) {
    out << format_number(r.delta) << ',' << target_kind_name(r.kind) << ',' << format_number(r.fit.slope) << ','
        << format_number(r.fit.slope_stderr) << ',' << format_number(r.fit.intercept) << '\n';
  }
  return out.str();
}

std::string summary_json(const EnsembleResult& result, const ExperimentConfig& cfg) {
  json j;
  json c;
  c["sites"] = cfg.sites;
  c["deltas"] = cfg.deltas;
  c["realizations"] = cfg.realizations;
  c["seed"] = cfg.seed;
  c["region_sizes"] = cfg.region_sizes;
  json kinds = json::array();
  for (auto k : cfg.target_kinds) kinds.push_back(std::string(target_kind_name(k)));
  c["target_kinds"] = kinds;
  c["epsilon"] = cfg.epsilon;
  c["boundary"] = cfg.boundary == Boundary::periodic ? "periodic" : "open";
  c["fit_min_region"] = cfg.fit_min_region;
  c["fit_max_region"] = cfg.fit_max_region;
  c["region_offset"] = cfg.region_offset;
  c["translation_average"] = cfg.translation_average;
  c["failure_threshold"] = cfg.failure_threshold;
  j["config"] = c;

  j["items"] = result.items;
  j["failed_items"] = result.failed_items;
  j["failure_fraction"] =
      result.items > 0 ? static_cast<double>(result.failed_items) / static_cast<double>(result.items) : 0.0;

  json tr = json::object();
  for (const auto& [kind, t] : result.transitions) {
    json e;
    e["delta_star"] = t.delta_star;
    e["region"] = {t.region_low, t.region_high};
    e["deltas"] = t.deltas;
    e["slope_derivative"] = t.derivative;
    tr[std::string(target_kind_name(kind))] = e;
  }
  j["transition"] = tr;
  // Infinite-chain critical disorder quoted in the MBL literature (J = 1
  // units); recorded for comparison only.
  j["reference_critical_disorder"] = 7.0;

  json bounds = json::array();
  for (const auto& b : result.bounds) {
    json e;
    e["delta"] = b.delta;
    e["region_size"] = b.region_size;
    e["epsilon"] = cfg.epsilon;
    e["count"] = b.count;
    e["mean_dmax_bits"] = b.mean_dmax_bits;
    e["mean_bath_copies_upper_bound"] = b.mean_upper_bound;
    e["lower_bound_count"] = b.lower_bound_count;
    e["mean_bath_copies_lower_bound"] = b.mean_lower_bound;
    bounds.push_back(e);
  }
  j["bounds"] = bounds;

  json fails = json::array();
  for (const auto& f : result.failures) {
    json e;
    e["delta"] = f.delta;
    e["realization"] = f.realization;
    e["target_kind"] = f.kind;
    e["region_size"] = f.region_size;
    e["reason"] = f.reason;
    fails.push_back(e);
  }
  j["failures"] = fails;

  std::ostringstream out;
  write_json(out, j, 0);
  out << '\n';
  return out.str();
}

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  if (!std::filesystem::is_directory(dir)) throw ConfigError(dir.string() + " is not a directory");
  const auto probe = dir / ".qtherm_write_probe";
  {
    std::ofstream out(probe, std::ios::binary);
    if (!out || !(out << "ok") || !out.flush()) throw ConfigError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

void emit_outputs(const EnsembleResult& result, const ExperimentConfig& cfg) {
  const std::filesystem::path dir = cfg.output_dir;
  prepare_output_dir(dir);
  write_file(dir / "curves.csv", curves_csv(result));
  write_file(dir / "slopes.csv", slopes_csv(result));
  write_file(dir / "summary.json", summary_json(result, cfg));
}

}  // namespace qtherm
