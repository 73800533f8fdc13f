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

#include "cmlab/prach_detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cmlab/fft.hpp"
#include "cmlab/waveform_metrics.hpp"

namespace cmlab {

namespace {

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c)};
  return std::mt19937_64(seq);
}

double mean_power(std::span<const Complex> v) {
  double acc = 0.0;
  for (const auto& s : v) acc += std::norm(s);
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

}  // namespace

void add_noise(std::span<Complex> v, double variance, std::mt19937_64& rng) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) throw std::invalid_argument("noise variance must be finite and >= 0");
  if (variance == 0.0) return;
  std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
  for (auto& s : v) {
    const double re = g(rng);
    const double im = g(rng);
    s += Complex(re, im);
  }
}

ComplexSeq awgn_channel(std::span<const Complex> v, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw std::invalid_argument("snr is NaN");
  ComplexSeq out(v.begin(), v.end());
  if (std::isinf(snr_db) && snr_db > 0) return out;
  std::mt19937_64 rng(seed);
  add_noise(out, mean_power(v) / std::pow(10.0, snr_db / 10.0), rng);
  return out;
}

ComplexSeq multipath_channel(std::span<const Complex> v, const std::vector<Tap>& taps, double sample_rate_hz,
                             bool fading, std::uint64_t seed) {
  if (taps.empty()) throw std::invalid_argument("multipath channel needs at least one tap");
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ComplexSeq out(v.size());
  for (const auto& tap : taps) {
    if (!(tap.delay_s >= 0.0)) throw std::invalid_argument("tap delay must be non-negative");
    const auto d = static_cast<std::size_t>(std::llround(tap.delay_s * sample_rate_hz));
    if (d >= v.size()) {
      throw std::invalid_argument("tap delay of " + std::to_string(d) + " samples exceeds the signal length");
    }
    const double amp = std::sqrt(std::pow(10.0, tap.power_db / 10.0));
    Complex gain(amp, 0.0);
    if (fading) {
      const double re = g(rng);
      const double im = g(rng);
      gain = amp * Complex(re, im);
    }
    for (std::size_t t = d; t < v.size(); ++t) out[t] += gain * v[t - d];
  }
  return out;
}

// ---------------------------------------------------------------------------

CellPreambleSet::CellPreambleSet(int n_cs, std::vector<int> roots) : n_cs_(n_cs) {
  if (n_cs < 1 || n_cs > kPrachLength) throw std::invalid_argument("N_cs must lie in [1, 139]");
  const int per_root = kPrachLength / n_cs;
  const auto needed = static_cast<std::size_t>((static_cast<int>(kCellPreambles) + per_root - 1) / per_root);
  if (roots.empty()) {
    for (std::size_t u = 1; u <= needed; ++u) roots.push_back(static_cast<int>(u));
  }
  if (roots.size() < needed) {
    throw std::invalid_argument("N_cs = " + std::to_string(n_cs) + " needs " + std::to_string(needed) + " roots");
  }
  roots.resize(needed);
  for (int u : roots) {
    if (u < 1 || u >= kPrachLength) throw std::invalid_argument("prach root must lie in [1, 138]");
  }
  roots_ = std::move(roots);
  for (int u : roots_) {
    for (int v = 0; v < per_root && preambles_.size() < kCellPreambles; ++v) preambles_.push_back({u, v * n_cs});
  }
}

std::size_t CellPreambleSet::root_slot(std::size_t preamble) const {
  return preamble / static_cast<std::size_t>(shifts_per_root());
}

int CellPreambleSet::shift_index(std::size_t preamble) const {
  return static_cast<int>(preamble % static_cast<std::size_t>(shifts_per_root()));
}

ResourceMap demap(std::span<const Complex> rx_bins, const ResourceMap& layout) {
  std::vector<ResourceElement> entries;
  entries.reserve(layout.size());
  for (const auto& e : layout.entries()) {
    if (e.subcarrier < 0 || static_cast<std::size_t>(e.subcarrier) >= rx_bins.size()) {
      throw std::invalid_argument("layout subcarrier outside the received bins");
    }
    entries.push_back({e.subcarrier, rx_bins[static_cast<std::size_t>(e.subcarrier)]});
  }
  std::vector<std::size_t> starts;
  for (std::size_t n = 0; n < layout.copy_count(); ++n) starts.push_back(layout.copy_range(n).first);
  return ResourceMap(std::move(entries), layout.scs(), layout.nominal_bw_hz(), std::move(starts));
}

namespace {

std::vector<ComplexSeq> copy_estimates(const ResourceMap& received, std::span<const Complex> root_spectrum,
                                       const PhasePlan* plan) {
  const std::size_t copies = received.copy_count();
  if (plan != nullptr) {
    if (!plan->is_rotation()) throw std::invalid_argument("prach receiver needs a rotation plan");
    if (plan->size() != copies) {
      throw std::invalid_argument("plan has " + std::to_string(plan->size()) + " entries but the grid has " +
                                  std::to_string(copies) + " copies");
    }
  }
  std::vector<ComplexSeq> out;
  out.reserve(copies);
  for (std::size_t n = 0; n < copies; ++n) {
    const auto [b, e] = received.copy_range(n);
    if (e - b != static_cast<std::size_t>(kPrachLength)) throw std::invalid_argument("received copy is not length 139");
    const Complex derot = plan != nullptr ? std::polar(1.0, -plan->phases()[n]) : Complex(1.0, 0.0);
    ComplexSeq est(kPrachLength);
    for (std::size_t k = 0; k < est.size(); ++k) {
      est[k] = received.entries()[b + k].value * derot * std::conj(root_spectrum[k]);
    }
    out.push_back(std::move(est));
  }
  return out;
}

ComplexSeq concatenate(const std::vector<ComplexSeq>& parts) {
  ComplexSeq out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

std::vector<ComplexSeq> per_copy_estimates(const ResourceMap& received, int root, const PhasePlan* plan) {
  return copy_estimates(received, to_freq(gen_prach_root(root)), plan);
}

ComplexSeq rx_channel_estimate(const ResourceMap& received, int root, const PhasePlan* plan) {
  const auto parts = per_copy_estimates(received, root, plan);
  ComplexSeq avg(kPrachLength);
  for (const auto& p : parts)
    for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += p[k];
  for (auto& x : avg) x /= static_cast<double>(parts.size());
  return avg;
}

ComplexSeq rx_wideband_estimate(const ResourceMap& received, int root, const PhasePlan* plan) {
  return concatenate(per_copy_estimates(received, root, plan));
}

double PowerDelayProfile::mean() const {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s;
  return acc / static_cast<double>(samples.size());
}

PowerDelayProfile compute_pdp(std::span<const Complex> estimate, std::size_t ifft_size) {
  if (ifft_size < static_cast<std::size_t>(kPrachLength)) throw std::invalid_argument("pdp ifft size must be >= 139");
  if (estimate.size() > ifft_size) {
    throw std::invalid_argument("estimate of length " + std::to_string(estimate.size()) + " exceeds ifft size " +
                                std::to_string(ifft_size));
  }
  ComplexSeq z(ifft_size);
  std::copy(estimate.begin(), estimate.end(), z.begin());
  fft::inverse_inplace(z);
  PowerDelayProfile pdp;
  pdp.samples.resize(ifft_size);
  for (std::size_t l = 0; l < ifft_size; ++l) pdp.samples[l] = std::norm(z[l]);
  return pdp;
}

std::size_t default_detection_ifft(int reps) {
  if (reps < 1) throw std::invalid_argument("repetition count must be at least 1");
  return std::max<std::size_t>(1024, 2 * fft::next_power_of_two(static_cast<std::size_t>(kPrachLength * reps)));
}

namespace {

std::size_t shift_edge(int v, int n_cs, std::size_t ifft) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(v) * n_cs * static_cast<double>(ifft) / kPrachLength));
}

}  // namespace

DetectionWindow detection_window(int shift_index, int n_cs, std::size_t ifft_size) {
  if (n_cs < 1 || n_cs > kPrachLength) throw std::invalid_argument("N_cs must lie in [1, 139]");
  const int per_root = kPrachLength / n_cs;
  if (shift_index < 0 || shift_index >= per_root) throw std::invalid_argument("shift index outside the root");
  if (ifft_size < static_cast<std::size_t>(kPrachLength)) throw std::invalid_argument("ifft size must be >= 139");
  const std::size_t first = shift_edge(1, n_cs, ifft_size);
  if (per_root > 1 && first + shift_edge(per_root - 1, n_cs, ifft_size) > ifft_size) {
    throw std::invalid_argument("detection windows overrun the ifft length");
  }
  const std::size_t chip = (ifft_size + kPrachLength - 1) / kPrachLength;
  const std::size_t lead = std::min(chip, first / 2);
  const std::size_t hi = shift_edge(shift_index, n_cs, ifft_size);
  const std::size_t lo = shift_index == 0 ? 0 : shift_edge(shift_index - 1, n_cs, ifft_size);
  const std::size_t len = shift_index == 0 ? first : hi - lo;
  return {(2 * ifft_size - hi - lead) % ifft_size, len, lead};
}

std::vector<std::size_t> DetectionOutcome::detected() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < verdicts.size(); ++i)
    if (verdicts[i].detected) out.push_back(i);
  return out;
}

DetectionOutcome detect(const std::vector<PowerDelayProfile>& pdps, const CellPreambleSet& cell,
                        const DetectParams& params) {
  if (pdps.size() != cell.roots().size()) {
    throw std::invalid_argument("expected one PDP per cell root (" + std::to_string(cell.roots().size()) + ")");
  }
  std::vector<double> floors;
  DetectionOutcome out;
  for (const auto& p : pdps) {
    floors.push_back(p.mean());
    out.noise_floor += floors.back() / static_cast<double>(pdps.size());
  }
  const double bin_s = 1.0 / scs_hz(params.scs);
  out.verdicts.resize(cell.size());
  for (std::size_t i = 0; i < cell.size(); ++i) {
    const std::size_t slot = cell.root_slot(i);
    const auto& s = pdps[slot].samples;
    const DetectionWindow w = detection_window(cell.shift_index(i), cell.n_cs(), s.size());
    double peak = -1.0;
    std::size_t at = 0;
    for (std::size_t k = 0; k < w.length; ++k) {
      const double x = s[(w.start + k) % s.size()];
      if (x > peak) {
        peak = x;
        at = k;
      }
    }
    PreambleVerdict& v = out.verdicts[i];
    v.peak_power = peak;
    v.threshold_used = params.threshold * floors[slot];
    v.ta_estimate_s = (static_cast<double>(at) - static_cast<double>(w.lead)) * bin_s / static_cast<double>(s.size());
    v.detected = peak > v.threshold_used;
    if (v.detected && params.reference_delay_s) {
      v.detected = std::abs(v.ta_estimate_s - *params.reference_delay_s) < params.cp_len_s / 2.0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

ResourceMap preamble_map(const LinkConfig& cfg, const PrachPreambleSpec& spec) {
  ResourceMap map = build_prach_map(to_freq(gen_prach_preamble(spec)), cfg.reps, cfg.scs);
  if (cfg.plan) map = apply_phase_plan(map, *cfg.plan);
  return map;
}

}  // namespace

PrachLink::PrachLink(LinkConfig cfg)
    : cfg_(std::move(cfg)),
      fft_(cfg_.ifft_size != 0 ? cfg_.ifft_size : default_detection_ifft(cfg_.reps)),
      cp_(static_cast<std::size_t>(std::llround(cfg_.cp_len_s * static_cast<double>(fft_) * scs_hz(cfg_.scs)))),
      layout_(preamble_map(cfg_, cfg_.cell[0])) {
  if (cfg_.plan && cfg_.plan->size() != static_cast<std::size_t>(cfg_.reps)) {
    throw std::invalid_argument("plan length does not match the repetition count");
  }
  if (cp_ >= fft_) throw std::invalid_argument("cyclic prefix is not shorter than the symbol");
  const SynthConfig synth{fft_, true, cp_};
  for (std::size_t p = 0; p < cfg_.cell.size(); ++p) {
    tx_.push_back(synthesize(preamble_map(cfg_, cfg_.cell[p]), synth));
  }
  for (const auto& e : layout_.entries()) re_energy_ += std::norm(e.value);
  re_energy_ /= static_cast<double>(layout_.size());
  for (int u : cfg_.cell.roots()) root_spectra_.push_back(to_freq(gen_prach_root(u)));
}

ComplexSeq PrachLink::receive(std::optional<std::size_t> preamble, double snr_db, std::mt19937_64& rng) const {
  ComplexSeq rx(fft_ + cp_);
  if (preamble) {
    if (*preamble >= tx_.size()) throw std::invalid_argument("preamble index outside the cell set");
    const ComplexSeq& x = tx_[*preamble];
    if (cfg_.taps.empty()) {
      const auto d = static_cast<std::size_t>(std::llround(cfg_.delay_s * sample_rate_hz()));
      if (d >= rx.size()) throw std::invalid_argument("delay exceeds the symbol");
      std::copy(x.begin(), x.end() - static_cast<std::ptrdiff_t>(d), rx.begin() + static_cast<std::ptrdiff_t>(d));
    } else {
      std::vector<Tap> taps = cfg_.taps;
      for (auto& t : taps) t.delay_s += cfg_.delay_s;
      rx = multipath_channel(x, taps, sample_rate_hz(), cfg_.fading, rng());
    }
  }
  add_noise(rx, noise_variance(snr_db), rng);
  return rx;
}

double PrachLink::noise_variance(double snr_db) const {
  if (std::isnan(snr_db)) throw std::invalid_argument("snr is NaN");
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  // A forward FFT of white noise with variance s2 has variance N s2 per bin.
  return re_energy_ / (static_cast<double>(fft_) * std::pow(10.0, snr_db / 10.0));
}

std::vector<PowerDelayProfile> PrachLink::pdps(std::span<const Complex> rx) const {
  if (rx.size() != fft_ + cp_) throw std::invalid_argument("received block has the wrong length");
  const ComplexSeq bins = fft::forward(rx.subspan(cp_));
  const ResourceMap received = demap(bins, layout_);
  const PhasePlan* plan = cfg_.plan ? &*cfg_.plan : nullptr;
  std::vector<PowerDelayProfile> out;
  out.reserve(root_spectra_.size());
  for (const auto& spectrum : root_spectra_) {
    out.push_back(compute_pdp(concatenate(copy_estimates(received, spectrum, plan)), fft_));
  }
  return out;
}

double PrachLink::noise_statistic(const std::vector<PowerDelayProfile>& pdps) const {
  const auto& cell = cfg_.cell;
  double stat = 0.0;
  for (std::size_t i = 0; i < cell.size(); ++i) {
    const auto& p = pdps[cell.root_slot(i)];
    const double floor = p.mean();
    const DetectionWindow w = detection_window(cell.shift_index(i), cell.n_cs(), p.samples.size());
    for (std::size_t k = 0; k < w.length; ++k) {
      stat = std::max(stat, p.samples[(w.start + k) % p.samples.size()] / floor);
    }
  }
  return stat;
}

double PrachLink::reference_delay_s() const {
  double first = 0.0;
  if (!cfg_.taps.empty()) {
    first = std::min_element(cfg_.taps.begin(), cfg_.taps.end(), [](const Tap& a, const Tap& b) {
              return a.delay_s < b.delay_s;
            })->delay_s;
  }
  return cfg_.delay_s + first;
}

double threshold_from_statistics(std::vector<double> stats, double target_fa) {
  if (stats.empty()) throw std::invalid_argument("no noise statistics");
  if (!(target_fa > 0.0 && target_fa <= 1.0)) throw std::invalid_argument("target false-alarm rate must lie in (0, 1]");
  std::sort(stats.begin(), stats.end());
  const double n = static_cast<double>(stats.size());
  auto j = static_cast<std::size_t>(std::max(1.0, std::ceil(n * (1.0 - target_fa) - 1e-9)));
  j = std::min(j, stats.size());
  return stats[j - 1];
}

double calibrate_threshold(const PrachLink& link, std::size_t trials, double target_fa, std::uint64_t seed) {
  if (trials < kMinCalibrationTrials) {
    throw std::invalid_argument("threshold calibration needs at least " + std::to_string(kMinCalibrationTrials) +
                                " noise-only trials, got " + std::to_string(trials));
  }
  std::vector<double> stats(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, 0xCA1B, t, 0);
    stats[t] = link.noise_statistic(link.pdps(link.receive(std::nullopt, 0.0, rng)));
  }
  return threshold_from_statistics(std::move(stats), target_fa);
}

McStats run_mc(const McConfig& cfg) {
  if (cfg.trials == 0) throw std::invalid_argument("monte carlo needs at least one trial per point");
  if (cfg.snr_db.empty()) throw std::invalid_argument("monte carlo needs at least one snr point");
  const PrachLink link(cfg.link);
  McStats stats;
  stats.threshold = cfg.threshold ? *cfg.threshold
                                  : calibrate_threshold(link, cfg.calibration_trials, cfg.target_fa, cfg.seed);
  DetectParams params;
  params.threshold = stats.threshold;
  params.scs = cfg.link.scs;
  params.cp_len_s = cfg.link.cp_len_s;
  params.reference_delay_s = link.reference_delay_s();

  for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
    McPoint pt;
    pt.snr_db = cfg.snr_db[i];
    pt.trials = cfg.trials;
    std::vector<double> ta_errors;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      auto rng = trial_rng(cfg.seed, i + 1, t, 1);
      const std::size_t p = std::uniform_int_distribution<std::size_t>(0, link.config().cell.size() - 1)(rng);
      const auto outcome = detect(link.pdps(link.receive(p, pt.snr_db, rng)), link.config().cell, params);
      if (outcome.verdicts[p].detected) {
        ta_errors.push_back(std::abs(outcome.verdicts[p].ta_estimate_s - *params.reference_delay_s));
      } else {
        ++pt.misses;
      }
    }
    pt.fa_trials = cfg.fa_trials;
    for (std::size_t t = 0; t < cfg.fa_trials; ++t) {
      auto rng = trial_rng(cfg.seed, i + 1, t, 2);
      if (link.noise_statistic(link.pdps(link.receive(std::nullopt, pt.snr_db, rng))) > stats.threshold) {
        ++pt.false_alarms;
      }
    }
    pt.miss_rate = static_cast<double>(pt.misses) / static_cast<double>(pt.trials);
    pt.fa_rate = pt.fa_trials == 0 ? 0.0 : static_cast<double>(pt.false_alarms) / static_cast<double>(pt.fa_trials);
    if (ta_errors.empty()) {
      pt.ta_p50_s = pt.ta_p95_s = std::numeric_limits<double>::quiet_NaN();
    } else {
      pt.ta_p50_s = percentile_nearest_rank(ta_errors, 50.0);
      pt.ta_p95_s = percentile_nearest_rank(ta_errors, 95.0);
    }
    stats.points.push_back(pt);
  }
  return stats;
}

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace cmlab
