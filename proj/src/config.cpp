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
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "qtherm/experiment.hpp"

namespace qtherm {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected true or false, got '" + std::string(text) + "'");
}

template <class T>
std::string join(const std::vector<T>& values, auto&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fmt(values[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::full_preset() {
  ExperimentConfig cfg;
  cfg.sites = kMaxSites;
  cfg.realizations = 100;
  cfg.region_sizes = {1, 2, 3, 4, 5, 6, 7};
  cfg.deltas = {0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6, 7, 8};
  return cfg;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  if (key == "sites") {
    sites = parse_number<int>(key, value);
  } else if (key == "deltas") {
    deltas.clear();
    for (auto item : split_list(value)) deltas.push_back(parse_number<double>(key, item));
  } else if (key == "realizations") {
    realizations = parse_number<int>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "region_sizes") {
    region_sizes.clear();
    for (auto item : split_list(value)) region_sizes.push_back(parse_number<int>(key, item));
  } else if (key == "target_kinds") {
    target_kinds.clear();
    for (auto item : split_list(value)) {
      try {
        target_kinds.push_back(parse_target_kind(item));
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("config key 'target_kinds': ") + e.what());
      }
    }
  } else if (key == "epsilon") {
    epsilon = parse_number<double>(key, value);
  } else if (key == "output_dir") {
    output_dir = std::string(value);
  } else if (key == "workers") {
    workers = parse_number<unsigned>(key, value);
  } else if (key == "boundary") {
    if (value == "periodic") {
      boundary = Boundary::periodic;
    } else if (value == "open") {
      boundary = Boundary::open;
    } else {
      throw ConfigError("config key 'boundary': expected periodic or open, got '" + std::string(value) + "'");
    }
  } else if (key == "fit_min_region") {
    fit_min_region = parse_number<int>(key, value);
  } else if (key == "fit_max_region") {
    fit_max_region = parse_number<int>(key, value);
  } else if (key == "region_offset") {
    region_offset = parse_number<int>(key, value);
  } else if (key == "translation_average") {
    translation_average = parse_bool(key, value);
  } else if (key == "failure_threshold") {
    failure_threshold = parse_number<double>(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (sites < kMinSites || sites > kMaxSites) {
    fail("sites must lie in [" + std::to_string(kMinSites) + ", " + std::to_string(kMaxSites) + "]");
  }
  if (sites < 3) fail("sites must be >= 3 for the Neel-variant initial state");
  if (deltas.empty()) fail("deltas must not be empty");
  for (double d : deltas)
    if (!(d >= 0.0) || !std::isfinite(d)) fail("deltas must be finite and >= 0");
  if (realizations < 1) fail("realizations must be >= 1");
  if (region_sizes.empty()) fail("region_sizes must not be empty");
  for (int r : region_sizes)
    if (r < 1 || r > sites - 1) fail("region sizes must lie in [1, sites - 1]");
  if (target_kinds.empty()) fail("target_kinds must not be empty");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon must lie in (0, 1)");
  if (output_dir.empty()) fail("output_dir must not be empty");
  if (region_offset < 0 || region_offset >= sites) fail("region_offset must lie in [0, sites)");
  if (fit_min_region < 0 || fit_max_region < 0) fail("fit range bounds must be >= 0");
  if (fit_min_region > 0 && fit_max_region > 0 && fit_min_region > fit_max_region) fail("fit_min_region > fit_max_region");
  if (!(failure_threshold >= 0.0 && failure_threshold <= 1.0)) fail("failure_threshold must lie in [0, 1]");
  auto sorted = deltas;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) fail("deltas contain duplicates");
  auto sizes = region_sizes;
  std::sort(sizes.begin(), sizes.end());
  if (std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end()) fail("region_sizes contain duplicates");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  out << "sites = " << sites << "\n";
  out << "deltas = " << join(deltas, [](double d) { return format_number(d); }) << "\n";
  out << "realizations = " << realizations << "\n";
  out << "seed = " << seed << "\n";
  out << "region_sizes = " << join(region_sizes, [](int r) { return std::to_string(r); }) << "\n";
  out << "target_kinds = " << join(target_kinds, [](TargetKind k) { return std::string(target_kind_name(k)); })
      << "\n";
  out << "epsilon = " << format_number(epsilon) << "\n";
  out << "output_dir = " << output_dir << "\n";
  out << "workers = " << workers << "\n";
  out << "boundary = " << (boundary == Boundary::periodic ? "periodic" : "open") << "\n";
  out << "fit_min_region = " << fit_min_region << "\n";
  out << "fit_max_region = " << fit_max_region << "\n";
  out << "region_offset = " << region_offset << "\n";
  out << "translation_average = " << (translation_average ? "true" : "false") << "\n";
  out << "failure_threshold = " << format_number(failure_threshold) << "\n";
  return out.str();
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

unsigned ExperimentConfig::resolved_workers() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace qtherm
