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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmlab/mapping.hpp"
#include "cmlab/seq_core.hpp"
#include "cmlab/types.hpp"

namespace cmlab {

inline constexpr double kRcmRefDb = 1.52;
inline constexpr double kCmSlope = 1.56;

struct SynthConfig {
  std::size_t fft_size = 0;
  bool include_cp = false;
  std::size_t cp_len = 0;
};

/// Smallest power of two giving at least 4x oversampling of the occupied span
/// and covering the highest occupied subcarrier. CP length is the normal CP
/// scaled to that size; CP is excluded.
SynthConfig default_synth_config(const ResourceMap& map);

/// v[t] = (1/N) sum_k G[k] exp(j 2 pi k t / N), t = 0..N-1, with subcarrier
/// index k taken as the grid bin. Mean sample power equals grid energy / N^2.
/// The CP (last cp_len samples) is prepended when cfg.include_cp is set.
ComplexSeq synthesize(const ResourceMap& map, const SynthConfig& cfg);

/// 10 log10(mean(|v / rms(v)|^6)). Throws on an all-zero signal.
double compute_rcm(std::span<const Complex> v);

constexpr double compute_cm(double rcm_db) { return (rcm_db - kRcmRefDb) / kCmSlope; }

struct CmReport {
  double rcm_db = 0.0;
  double cm_db = 0.0;
};

CmReport measure_cm(std::span<const Complex> v);

struct CmSample {
  std::string id;
  double rcm_db = 0.0;
  double cm_db = 0.0;
};

struct CcdfPoint {
  double threshold_db = 0.0;
  double exceedance = 0.0;  ///< fraction of the population with cm_db > threshold
};

struct CmStats {
  std::vector<CmSample> population;
  double percentile_95 = 0.0;
  std::vector<CcdfPoint> ccdf;
};

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.
double percentile_nearest_rank(std::span<const double> values, double p);

/// Summary over a population. Without explicit thresholds the CCDF is sampled
/// every 0.1 dB from floor(min) to ceil(max).
CmStats cm_distribution(std::vector<CmSample> population, std::vector<double> ccdf_thresholds = {});

// ---------------------------------------------------------------------------
// Standard populations
// ---------------------------------------------------------------------------

struct PrachPopulationConfig {
  int reps = 1;
  Scs scs = Scs::khz15;
  std::vector<int> roots;  ///< empty means all of 1..138
  std::optional<PhasePlan> plan;
  std::size_t fft_size = 0;  ///< 0 selects default_synth_config
};

/// One CM value per root (C_v = 0), repeated and planned per config.
std::vector<CmSample> prach_population(const PrachPopulationConfig& cfg);

struct PucchPopulationConfig {
  int prbs = 10;
  int stride = 10;
  Scs scs = Scs::khz15;
  std::optional<PhasePlan> plan;  ///< rotation plan or cyclic-shift plan (added to alpha)
  std::size_t fft_size = 0;
};

/// One CM value per (base, alpha) pair: 30 bases x 12 shifts.
std::vector<CmSample> pucch_population(const PucchPopulationConfig& cfg, const CgsTable& table = CgsTable::bundled());

std::vector<int> all_prach_roots();

}  // namespace cmlab
