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

#include "qtherm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "qtherm/entropy.hpp"
#include "qtherm/rng.hpp"

namespace qtherm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ItemResult {
  bool failed = false;
  double beta = kNaN;
  // values[kind][size index], sizes in ascending order
  std::vector<std::vector<std::optional<double>>> values;
  std::vector<FailureRecord> failures;
  std::optional<double> bound_dmax;
  std::optional<double> bound_smooth;
};

ItemResult run_item(const ExperimentConfig& cfg, const std::vector<int>& sizes, int delta_index, double delta,
                    int realization) {
  ItemResult out;
  out.values.assign(cfg.target_kinds.size(), std::vector<std::optional<double>>(sizes.size()));
  auto record = [&](std::string kind, int size, std::string reason) {
    out.failures.push_back({delta, delta_index, realization, std::move(kind), size, std::move(reason)});
    out.failed = true;
  };
  try {
    ChainSpec spec;
    spec.sites = cfg.sites;
    spec.disorder = delta;
    spec.boundary = cfg.boundary;
    spec.seed = item_seed(cfg.seed, delta_index, realization);
    const auto real = DisorderRealization::draw(spec, 0);
    auto spectrum = std::make_shared<const ChainSpectrum>(real);
    const Vector psi = neel_variant_state(cfg.sites);
    const EquilibriumState omega(spectrum, psi, static_cast<std::uint64_t>(realization));
    const BetaMatch match = match_beta(spectrum->energies(), omega.energy());
    out.beta = match.beta;

    std::vector<int> offsets;
    if (cfg.translation_average) {
      offsets.resize(static_cast<std::size_t>(cfg.sites));
      std::iota(offsets.begin(), offsets.end(), 0);
    } else {
      offsets.push_back(cfg.region_offset);
    }
    for (std::size_t k = 0; k < cfg.target_kinds.size(); ++k) {
      std::vector<double> sum(sizes.size(), 0.0);
      std::vector<bool> missing(sizes.size(), false);
      for (int offset : offsets) {
        const auto curve = dmax_region_curve(omega, match.beta, sizes, cfg.target_kinds[k], offset);
        for (std::size_t s = 0; s < sizes.size(); ++s) {
          if (curve[s].value) {
            sum[s] += *curve[s].value;
          } else if (!missing[s]) {
            missing[s] = true;
            record(std::string(target_kind_name(cfg.target_kinds[k])), sizes[s], curve[s].failure);
          }
        }
      }
      for (std::size_t s = 0; s < sizes.size(); ++s)
        if (!missing[s]) out.values[k][s] = sum[s] / static_cast<double>(offsets.size());
    }

    // Bound illustration: smallest region, Hamiltonian Gibbs target.
    const Region region{cfg.region_offset, sizes.front()};
    const DensityMatrix omega_r = reduce_equilibrium(omega, region);
    const DensityMatrix tau = gibbs_state(reduced_hamiltonian(real, region), match.beta);
    try {
      out.bound_dmax = dmax(omega_r, tau).value;
      out.bound_smooth = dmax_smooth(omega_r, tau, 2.0 * std::sqrt(cfg.epsilon)).value;
    } catch (const InvalidArgument&) {
      // Non-commuting pair: only the unsmoothed value is available.
    } catch (const SupportError&) {
    }
  } catch (const Error& e) {
    record("", 0, e.what());
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::uint64_t item_seed(std::uint64_t master, int delta_index, int realization) {
  const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(delta_index)) << 32) |
                            static_cast<std::uint32_t>(realization);
  return splitmix64_mix(master ^ splitmix64_mix(key));
}

EnsembleResult run_ensemble(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<int> sizes = cfg.region_sizes;
  std::sort(sizes.begin(), sizes.end());
  const int n_delta = static_cast<int>(cfg.deltas.size());
  const int n_items = n_delta * cfg.realizations;
  std::vector<ItemResult> items(static_cast<std::size_t>(n_items));

  auto work = [&](int item) {
    const int di = item / cfg.realizations;
    const int r = item % cfg.realizations;
    items[static_cast<std::size_t>(item)] = run_item(cfg, sizes, di, cfg.deltas[static_cast<std::size_t>(di)], r);
  };
  const unsigned workers = std::min<unsigned>(cfg.resolved_workers(), static_cast<unsigned>(n_items));
  if (workers <= 1) {
    for (int i = 0; i < n_items; ++i) work(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < n_items; i = next++) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  EnsembleResult result;
  result.items = n_items;
  for (const auto& it : items) {
    result.betas.push_back(it.beta);
    if (it.failed) ++result.failed_items;
    result.failures.insert(result.failures.end(), it.failures.begin(), it.failures.end());
  }

  std::vector<int> delta_order(static_cast<std::size_t>(n_delta));
  std::iota(delta_order.begin(), delta_order.end(), 0);
  std::stable_sort(delta_order.begin(), delta_order.end(),
                   [&](int a, int b) { return cfg.deltas[static_cast<std::size_t>(a)] < cfg.deltas[static_cast<std::size_t>(b)]; });
  std::vector<std::size_t> kind_order(cfg.target_kinds.size());
  std::iota(kind_order.begin(), kind_order.end(), 0);
  std::stable_sort(kind_order.begin(), kind_order.end(),
                   [&](std::size_t a, std::size_t b) { return cfg.target_kinds[a] < cfg.target_kinds[b]; });

  const int fit_lo = cfg.fit_min_region > 0 ? cfg.fit_min_region : sizes.front();
  const int fit_hi = cfg.fit_max_region > 0 ? cfg.fit_max_region : sizes.back();

  // slopes_by_kind[k] holds (delta, slope) for the transition estimate.
  std::vector<std::vector<std::pair<double, double>>> slopes_by_kind(cfg.target_kinds.size());
  for (int di : delta_order) {
    const double delta = cfg.deltas[static_cast<std::size_t>(di)];
    std::vector<std::vector<CellStats>> per_kind(cfg.target_kinds.size());
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      for (std::size_t k : kind_order) {
        std::vector<double> vals;
        for (int r = 0; r < cfg.realizations; ++r) {
          const auto& v = items[static_cast<std::size_t>(di * cfg.realizations + r)].values;
          if (!v.empty() && v[k][s]) vals.push_back(*v[k][s]);
        }
        CellStats cell;
        cell.delta = delta;
        cell.region_size = sizes[s];
        cell.kind = cfg.target_kinds[k];
        cell.count = static_cast<int>(vals.size());
        if (vals.empty()) {
          cell.mean = kNaN;
          cell.std_error = kNaN;
        } else {
          cell.mean = mean_of(vals);
          if (vals.size() > 1) {
            double ss = 0.0;
            for (double x : vals) ss += (x - cell.mean) * (x - cell.mean);
            const double sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
            cell.std_error = sd / std::sqrt(static_cast<double>(vals.size()));
          }
        }
        result.cells.push_back(cell);
        per_kind[k].push_back(cell);
      }
    }
    for (std::size_t k : kind_order) {
      std::vector<double> x, y;
      for (const auto& c : per_kind[k]) {
        if (c.count > 0 && c.region_size >= fit_lo && c.region_size <= fit_hi) {
          x.push_back(c.region_size);
          y.push_back(c.mean);
        }
      }
      SlopeRow row;
      row.delta = delta;
      row.kind = cfg.target_kinds[k];
      if (x.size() >= 2) {
        row.fit = fit_slope(x, y);
        row.valid = true;
        slopes_by_kind[k].push_back({delta, row.fit.slope});
      } else {
        row.fit = {kNaN, kNaN, kNaN};
      }
      result.slopes.push_back(row);
    }

    BoundSummary b;
    b.delta = delta;
    b.region_size = sizes.front();
    std::vector<double> d, up, low;
    for (int r = 0; r < cfg.realizations; ++r) {
      const auto& it = items[static_cast<std::size_t>(di * cfg.realizations + r)];
      if (it.bound_dmax) {
        d.push_back(*it.bound_dmax);
        up.push_back(std::exp2(*it.bound_dmax) / (cfg.epsilon * cfg.epsilon));
      }
      if (it.bound_smooth) low.push_back(std::exp2(*it.bound_smooth));
    }
    b.count = static_cast<int>(d.size());
    b.mean_dmax_bits = d.empty() ? kNaN : mean_of(d);
    b.mean_upper_bound = up.empty() ? kNaN : mean_of(up);
    b.lower_bound_count = static_cast<int>(low.size());
    b.mean_lower_bound = low.empty() ? kNaN : mean_of(low);
    result.bounds.push_back(b);
  }

  for (std::size_t k : kind_order) {
    const auto& pts = slopes_by_kind[k];
    if (pts.size() < 4) continue;
    std::vector<double> ds, ss;
    for (const auto& [dd, s] : pts) {
      ds.push_back(dd);
      ss.push_back(s);
    }
    result.transitions.emplace_back(cfg.target_kinds[k], transition_estimate(ds, ss));
  }

  const double fraction = static_cast<double>(result.failed_items) / static_cast<double>(n_items);
  if (fraction > cfg.failure_threshold) {
    std::ostringstream msg;
    msg << result.failed_items << " of " << n_items << " work items failed (fraction " << fraction
        << " above threshold " << cfg.failure_threshold << ")";
    throw FailureThresholdExceeded(msg.str(), std::move(result));
  }
  return result;
}

SlopeFit fit_slope(std::span<const double> x, std::span<const double> y, std::span<const double> weights) {
  const std::size_t n = x.size();
  if (y.size() != n || (!weights.empty() && weights.size() != n)) throw InvalidArgument("fit_slope: length mismatch");
  std::vector<double> distinct(x.begin(), x.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw InvalidArgument("fit_slope: need at least two distinct x values");
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w(i) >= 0.0)) throw InvalidArgument("fit_slope: negative weight");
    sw += w(i);
    sx += w(i) * x[i];
    sy += w(i) * y[i];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w(i) * (x[i] - xm) * (x[i] - xm);
    sxy += w(i) * (x[i] - xm) * (y[i] - ym);
  }
  SlopeFit out;
  out.slope = sxy / sxx;
  out.intercept = ym - out.slope * xm;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (out.slope * x[i] + out.intercept);
      rss += w(i) * r * r;
    }
    out.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return out;
}

TransitionEstimate transition_estimate(std::span<const double> deltas, std::span<const double> slopes) {
  const std::size_t n = deltas.size();
  if (slopes.size() != n) throw InvalidArgument("transition_estimate: length mismatch");
  if (n < 4) throw InvalidArgument("transition_estimate: need at least four delta points");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deltas[a] < deltas[b]; });
  TransitionEstimate out;
  std::vector<double> s;
  for (std::size_t i : order) {
    out.deltas.push_back(deltas[i]);
    s.push_back(slopes[i]);
  }
  const auto& d = out.deltas;
  for (std::size_t i = 1; i < n; ++i)
    if (!(d[i] > d[i - 1])) throw InvalidArgument("transition_estimate: delta values must be distinct");
  out.derivative.resize(n);
  out.derivative[0] = (s[1] - s[0]) / (d[1] - d[0]);
  out.derivative[n - 1] = (s[n - 1] - s[n - 2]) / (d[n - 1] - d[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) out.derivative[i] = (s[i + 1] - s[i - 1]) / (d[i + 1] - d[i - 1]);

  const auto top = static_cast<std::size_t>(std::max_element(out.derivative.begin(), out.derivative.end()) -
                                            out.derivative.begin());
  const double peak = out.derivative[top];
  out.delta_star = d[top];
  std::size_t lo = top, hi = top;
  if (peak > 0.0) {
    const double half = 0.5 * peak;
    while (lo > 0 && out.derivative[lo - 1] >= half) --lo;
    while (hi + 1 < n && out.derivative[hi + 1] >= half) ++hi;
  }
  out.region_low = d[lo];
  out.region_high = d[hi];
  return out;
}

}  // namespace qtherm
