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

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cmlab/mapping.hpp"
#include "cmlab/seq_core.hpp"
#include "cmlab/types.hpp"

namespace cmlab {

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

/// Adds circularly-symmetric Gaussian noise of the given total variance.
void add_noise(std::span<Complex> v, double variance, std::mt19937_64& rng);

/// Noise at snr_db relative to the mean sample power of v. An infinite SNR
/// returns v unchanged.
ComplexSeq awgn_channel(std::span<const Complex> v, double snr_db, std::uint64_t seed);

struct Tap {
  double delay_s = 0.0;
  double power_db = 0.0;
};

/// Tapped delay line at sample rate fs. With fading each tap gain is drawn
/// CN(0, p); without it the gain is sqrt(p). Output keeps the input length.
ComplexSeq multipath_channel(std::span<const Complex> v, const std::vector<Tap>& taps, double sample_rate_hz,
                             bool fading, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Receiver
// ---------------------------------------------------------------------------

inline constexpr int kDefaultNcs = 13;
inline constexpr std::size_t kCellPreambles = 64;

/// 64 preambles by root cycling: each root contributes shifts v * N_cs,
/// v = 0..floor(139 / N_cs) - 1, until 64 are collected.
class CellPreambleSet {
 public:
  /// Empty roots means 1, 2, 3, ... as many as needed.
  explicit CellPreambleSet(int n_cs = kDefaultNcs, std::vector<int> roots = {});

  int n_cs() const { return n_cs_; }
  int shifts_per_root() const { return kPrachLength / n_cs_; }
  const std::vector<int>& roots() const { return roots_; }
  const std::vector<PrachPreambleSpec>& preambles() const { return preambles_; }
  std::size_t size() const { return preambles_.size(); }
  const PrachPreambleSpec& operator[](std::size_t i) const { return preambles_[i]; }

  /// Position of a preamble's root in roots().
  std::size_t root_slot(std::size_t preamble) const;
  /// Shift index v of a preamble within its root.
  int shift_index(std::size_t preamble) const;

 private:
  int n_cs_;
  std::vector<int> roots_;
  std::vector<PrachPreambleSpec> preambles_;
};

/// Received grid with the same placement as `layout`, values read from the
/// bins of a forward FFT of one received symbol.
ResourceMap demap(std::span<const Complex> rx_bins, const ResourceMap& layout);

/// Per-copy estimates Y_n(k) e^{-j theta_n} X_u*(k), k = 0..138, one per
/// repetition. `plan` null means no de-rotation.
std::vector<ComplexSeq> per_copy_estimates(const ResourceMap& received, int root, const PhasePlan* plan);

/// Coherent average of the per-copy estimates (length 139).
ComplexSeq rx_channel_estimate(const ResourceMap& received, int root, const PhasePlan* plan);

/// Per-copy estimates concatenated in frequency order (length 139 R); the
/// delay-domain correlator of the whole occupied band.
ComplexSeq rx_wideband_estimate(const ResourceMap& received, int root, const PhasePlan* plan);

struct PowerDelayProfile {
  std::vector<double> samples;

  double mean() const;
};

/// |IFFT(estimate zero-padded to ifft_size)|^2 with an unnormalized inverse,
/// so the sum equals ifft_size times the estimate energy.
PowerDelayProfile compute_pdp(std::span<const Complex> estimate, std::size_t ifft_size);

/// Smallest power of two >= 1024 that is at least twice the occupied span.
std::size_t default_detection_ifft(int reps);

struct DetectionWindow {
  std::size_t start = 0;  ///< first bin (mod ifft size)
  std::size_t length = 0;
  std::size_t lead = 0;   ///< bins from start to the zero-delay position
};

/// Window of shift index v. A cyclic shift C moves the correlation peak to
/// bin -C * ifft / 139 and a delay moves it forward. With e_v =
/// round(v N_cs ifft / 139), window v covers e_v - e_{v-1} bins ending where
/// window v-1 starts; window 0 starts at bin 0. All windows are then moved
/// back by one sequence chip (ceil(ifft / 139) bins, at most half of window 0)
/// so that the interpolated main lobe of a zero-delay peak stays in its own
/// window. Windows never overlap.
DetectionWindow detection_window(int shift_index, int n_cs, std::size_t ifft_size);

struct PreambleVerdict {
  bool detected = false;
  double ta_estimate_s = 0.0;
  double peak_power = 0.0;
  double threshold_used = 0.0;
};

struct DetectionOutcome {
  std::vector<PreambleVerdict> verdicts;  ///< aligned with the cell set
  double noise_floor = 0.0;               ///< mean over the roots' PDP means

  std::vector<std::size_t> detected() const;
};

struct DetectParams {
  double threshold = 0.0;  ///< relative to each root's mean PDP
  Scs scs = Scs::khz15;
  double cp_len_s = normal_cp_seconds(Scs::khz15);
  /// When set, a preamble only counts as detected if its TA estimate is
  /// within half a CP of this delay.
  std::optional<double> reference_delay_s;
};

/// One PDP per root of the cell set, in roots() order.
DetectionOutcome detect(const std::vector<PowerDelayProfile>& pdps, const CellPreambleSet& cell, const DetectParams& params);

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

struct LinkConfig {
  int reps = 4;
  std::optional<PhasePlan> plan;
  CellPreambleSet cell;
  Scs scs = Scs::khz15;
  std::size_t ifft_size = 0;  ///< 0: default_detection_ifft; also the tx/rx FFT size
  std::vector<Tap> taps;      ///< empty: AWGN only
  bool fading = false;
  double delay_s = 0.0;       ///< bulk propagation delay
  double cp_len_s = normal_cp_seconds(Scs::khz15);
};

/// Transmit/receive chain for one link configuration. Waveforms of all 64
/// preambles are synthesized once.
class PrachLink {
 public:
  explicit PrachLink(LinkConfig cfg);

  const LinkConfig& config() const { return cfg_; }
  std::size_t fft_size() const { return fft_; }
  std::size_t cp_samples() const { return cp_; }
  double sample_rate_hz() const { return static_cast<double>(fft_) * scs_hz(cfg_.scs); }
  /// Time-domain noise variance for a per-resource-element SNR: signal
  /// energy per occupied subcarrier over noise energy per FFT bin. The same
  /// snr_db gives every repetition the same SNR whatever R or the FFT size.
  double noise_variance(double snr_db) const;

  /// Received symbol samples (CP included) for preamble p, or noise only
  /// when p is empty, at per-resource-element snr_db.
  ComplexSeq receive(std::optional<std::size_t> preamble, double snr_db, std::mt19937_64& rng) const;

  /// PDP per root after CP removal, FFT, de-rotation and correlation.
  std::vector<PowerDelayProfile> pdps(std::span<const Complex> rx) const;

  /// max over all preamble windows of PDP / root noise floor.
  double noise_statistic(const std::vector<PowerDelayProfile>& pdps) const;

  /// Delay the receiver should report for a transmission.
  double reference_delay_s() const;

 private:
  LinkConfig cfg_;
  std::size_t fft_ = 0;
  std::size_t cp_ = 0;
  ResourceMap layout_;
  std::vector<ComplexSeq> tx_;
  double re_energy_ = 0.0;
  std::vector<ComplexSeq> root_spectra_;
};

inline constexpr std::size_t kMinCalibrationTrials = 10000;

/// Relative threshold whose per-occasion false-alarm estimate on noise-only
/// trials does not exceed target_fa: with statistics sorted ascending, the
/// j-th smallest, j = max(1, ceil(n (1 - target_fa))).
double calibrate_threshold(const PrachLink& link, std::size_t trials, double target_fa, std::uint64_t seed);

/// Same rule applied to precomputed noise-only statistics.
double threshold_from_statistics(std::vector<double> stats, double target_fa);

struct McConfig {
  LinkConfig link;
  std::vector<double> snr_db;
  std::size_t trials = 1000;     ///< signal trials per SNR point
  std::size_t fa_trials = 1000;  ///< noise-only trials per SNR point
  std::uint64_t seed = 1;
  std::optional<double> threshold;  ///< calibrated inline when empty
  std::size_t calibration_trials = kMinCalibrationTrials;
  double target_fa = 1e-3;
};

struct McPoint {
  double snr_db = 0.0;
  std::size_t trials = 0;
  std::size_t misses = 0;
  double miss_rate = 0.0;
  std::size_t fa_trials = 0;
  std::size_t false_alarms = 0;
  double fa_rate = 0.0;
  double ta_p50_s = 0.0;  ///< |TA error| percentiles over successful trials
  double ta_p95_s = 0.0;
};

struct McStats {
  double threshold = 0.0;
  std::vector<McPoint> points;
};

/// Each trial uses its own generator seeded from (seed, point, trial), so
/// results do not depend on evaluation order.
McStats run_mc(const McConfig& cfg);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for k successes in n trials (z = 1.96).
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.96);

}  // namespace cmlab
