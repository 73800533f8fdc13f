// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The cmlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmlab/waveform_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmlab/fft.hpp"

namespace cmlab {

SynthConfig default_synth_config(const ResourceMap& map) {
  const auto need = std::max(static_cast<std::size_t>(4 * map.span()),
                             static_cast<std::size_t>(map.max_subcarrier() + 1));
  SynthConfig cfg;
  cfg.fft_size = fft::next_power_of_two(need);
  cfg.cp_len = cfg.fft_size * 144 / 2048;
  return cfg;
}

ComplexSeq synthesize(const ResourceMap& map, const SynthConfig& cfg) {
  const std::size_t n = cfg.fft_size;
  if (n == 0) throw std::invalid_argument("synthesis fft size is zero");
  if (!map.empty() && (map.min_subcarrier() < 0 || static_cast<std::size_t>(map.max_subcarrier()) >= n)) {
    throw std::invalid_argument("resource map subcarriers [" + std::to_string(map.min_subcarrier()) + ", " +
                                std::to_string(map.max_subcarrier()) + "] exceed fft size " + std::to_string(n));
  }
  if (cfg.include_cp && cfg.cp_len > n) throw std::invalid_argument("cyclic prefix longer than the symbol");

  ComplexSeq grid(n);
  for (const auto& e : map.entries()) grid[static_cast<std::size_t>(e.subcarrier)] = e.value;
  fft::inverse_inplace(grid);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : grid) v *= scale;

  if (!cfg.include_cp) return grid;
  ComplexSeq out;
  out.reserve(n + cfg.cp_len);
  out.insert(out.end(), grid.end() - static_cast<std::ptrdiff_t>(cfg.cp_len), grid.end());
  out.insert(out.end(), grid.begin(), grid.end());
  return out;
}

double compute_rcm(std::span<const Complex> v) {
  if (v.empty()) throw std::invalid_argument("rcm of an empty signal");
  double p2 = 0.0;
  double p6 = 0.0;
  for (const auto& s : v) {
    const double a = std::norm(s);
    p2 += a;
    p6 += a * a * a;
  }
  const double n = static_cast<double>(v.size());
  p2 /= n;
  p6 /= n;
  if (!(p2 > 0.0)) throw std::invalid_argument("rcm of an all-zero signal");
  // |v|^3 normalized by rms^3, squared inside the rms: mean|v|^6 / (mean|v|^2)^3.
  return 10.0 * std::log10(p6 / (p2 * p2 * p2));
}

CmReport measure_cm(std::span<const Complex> v) {
  CmReport r;
  r.rcm_db = compute_rcm(v);
  r.cm_db = compute_cm(r.rcm_db);
  return r;
}

double percentile_nearest_rank(std::span<const double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty population");
  if (!(p > 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must lie in (0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

CmStats cm_distribution(std::vector<CmSample> population, std::vector<double> ccdf_thresholds) {
  if (population.empty()) throw std::invalid_argument("cm distribution of an empty population");
  std::vector<double> cms;
  cms.reserve(population.size());
  for (const auto& s : population) cms.push_back(s.cm_db);
  std::sort(cms.begin(), cms.end());

  CmStats stats;
  stats.percentile_95 = percentile_nearest_rank(cms, 95.0);
  if (ccdf_thresholds.empty()) {
    const int lo = static_cast<int>(std::floor(cms.front() * 10.0));
    const int hi = static_cast<int>(std::ceil(cms.back() * 10.0));
    for (int t = lo; t <= hi; ++t) ccdf_thresholds.push_back(t / 10.0);
  }
  const double n = static_cast<double>(cms.size());
  for (double t : ccdf_thresholds) {
    const auto above = cms.end() - std::upper_bound(cms.begin(), cms.end(), t);
    stats.ccdf.push_back({t, static_cast<double>(above) / n});
  }
  stats.population = std::move(population);
  return stats;
}

// ---------------------------------------------------------------------------

std::vector<int> all_prach_roots() {
  std::vector<int> roots(kPrachLength - 1);
  for (int u = 1; u < kPrachLength; ++u) roots[static_cast<std::size_t>(u - 1)] = u;
  return roots;
}

std::vector<CmSample> prach_population(const PrachPopulationConfig& cfg) {
  const auto roots = cfg.roots.empty() ? all_prach_roots() : cfg.roots;
  std::vector<CmSample> out;
  out.reserve(roots.size());
  for (int u : roots) {
    const ComplexSeq y = to_freq(gen_prach_root(u));
    ResourceMap map = build_prach_map(y, cfg.reps, cfg.scs);
    if (cfg.plan) map = apply_phase_plan(map, *cfg.plan);
    SynthConfig synth = default_synth_config(map);
    if (cfg.fft_size != 0) synth.fft_size = cfg.fft_size;
    const CmReport r = measure_cm(synthesize(map, synth));
    out.push_back({"u" + std::to_string(u), r.rcm_db, r.cm_db});
  }
  return out;
}

std::vector<CmSample> pucch_population(const PucchPopulationConfig& cfg, const CgsTable& table) {
  if (cfg.plan && cfg.plan->size() != static_cast<std::size_t>(cfg.prbs)) {
    throw std::invalid_argument("pucch plan length does not match the PRB count");
  }
  std::vector<CmSample> out;
  out.reserve(table.size() * kPrbSize);
  for (int b = 0; b < static_cast<int>(table.size()); ++b) {
    const ComplexSeq base = table.sequence(b);
    for (int alpha = 0; alpha < kPrbSize; ++alpha) {
      std::vector<ComplexSeq> prbs;
      for (int k = 0; k < cfg.prbs; ++k) {
        int cs = alpha;
        if (cfg.plan && !cfg.plan->is_rotation()) cs = (alpha + cfg.plan->shifts()[static_cast<std::size_t>(k)]) % kPrbSize;
        prbs.push_back(apply_cyclic_shift_phase(base, cs));
      }
      if (cfg.plan && cfg.plan->is_rotation()) prbs = apply_phase_plan(prbs, *cfg.plan);
      const ResourceMap map = place_prb_copies(prbs, 0, cfg.stride, cfg.scs);
      SynthConfig synth = default_synth_config(map);
      if (cfg.fft_size != 0) synth.fft_size = cfg.fft_size;
      const CmReport r = measure_cm(synthesize(map, synth));
      out.push_back({"b" + std::to_string(b) + "a" + std::to_string(alpha), r.rcm_db, r.cm_db});
    }
  }
  return out;
}

}  // namespace cmlab
