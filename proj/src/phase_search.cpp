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

#include "cmlab/phase_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cmlab/fft.hpp"
#include "cmlab/waveform_metrics.hpp"

namespace cmlab {

PhaseGrid::PhaseGrid(int n_phases) : n_(n_phases) {
  if (n_phases < 1) throw std::invalid_argument("phase grid needs at least one phase");
}

double PhaseGrid::value(int k) const {
  const int m = ((k % n_) + n_) % n_;
  // Exact quarter and half turns keep the published plans bit-comparable.
  if (2 * m == n_) return kPi;
  return wrap_phase(kTwoPi * m / n_);
}

std::vector<double> PhaseGrid::values() const {
  std::vector<double> out(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) out[static_cast<std::size_t>(k)] = value(k);
  return out;
}

// ---------------------------------------------------------------------------

RepetitionObjective::RepetitionObjective(const std::vector<ComplexSeq>& members, int copies, int copy_spacing,
                                         std::size_t fft_size)
    : copies_(copies), members_(members.size()), fft_size_(fft_size) {
  if (members.empty()) throw std::invalid_argument("objective needs at least one member sequence");
  if (copies < 1) throw std::invalid_argument("objective needs at least one copy");
  if (copy_spacing < 1) throw std::invalid_argument("copy spacing must be positive");
  const int lags = copies - 1;
  const auto n = static_cast<std::int64_t>(fft_size);
  for (const auto& m : members) {
    const auto span = static_cast<std::int64_t>(lags) * copy_spacing + static_cast<std::int64_t>(m.size());
    if (m.empty() || span > n) {
      throw std::invalid_argument("repeated copies do not fit in fft size " + std::to_string(fft_size));
    }
  }

  const std::size_t w2 = 2 * static_cast<std::size_t>(lags) + 1;
  const std::size_t w6 = 6 * static_cast<std::size_t>(lags) + 1;
  a2_.resize(members_ * w2);
  a6_.resize(members_ * w6);

  ComplexSeq grid(fft_size);
  ComplexSeq p2(fft_size);
  ComplexSeq p6(fft_size);
  const double inv_n = 1.0 / static_cast<double>(fft_size);
  auto bin = [n](std::int64_t f) { return static_cast<std::size_t>(((f % n) + n) % n); };

  for (std::size_t i = 0; i < members_; ++i) {
    std::fill(grid.begin(), grid.end(), Complex{});
    std::copy(members[i].begin(), members[i].end(), grid.begin());
    fft::inverse_inplace(grid);
    for (std::size_t t = 0; t < fft_size; ++t) {
      const double a = std::norm(grid[t] * inv_n);
      p2[t] = a;
      p6[t] = a * a * a;
    }
    fft::forward_inplace(p2);
    fft::forward_inplace(p6);
    for (int d = -lags; d <= lags; ++d) {
      a2_[i * w2 + static_cast<std::size_t>(d + lags)] = p2[bin(-static_cast<std::int64_t>(copy_spacing) * d)] * inv_n;
    }
    for (int d = -3 * lags; d <= 3 * lags; ++d) {
      a6_[i * w6 + static_cast<std::size_t>(d + 3 * lags)] =
          p6[bin(-static_cast<std::int64_t>(copy_spacing) * d)] * inv_n;
    }
  }
}

void RepetitionObjective::member_cm(std::span<const Complex> c, std::span<double> out) const {
  if (c.size() != static_cast<std::size_t>(copies_)) {
    throw std::invalid_argument("objective expects " + std::to_string(copies_) + " coefficients");
  }
  if (out.size() != members_) throw std::invalid_argument("output span does not match member count");
  const int lags = copies_ - 1;
  const std::size_t w2 = 2 * static_cast<std::size_t>(lags) + 1;
  const std::size_t w4 = 4 * static_cast<std::size_t>(lags) + 1;
  const std::size_t w6 = 6 * static_cast<std::size_t>(lags) + 1;

  // r_d = sum_n c_{n+d} conj(c_n): coefficients of |P|^2.
  std::vector<Complex> r(w2);
  for (int d = -lags; d <= lags; ++d) {
    Complex acc{};
    for (int k = std::max(0, -d); k < copies_ && k + d < copies_; ++k) {
      acc += c[static_cast<std::size_t>(k + d)] * std::conj(c[static_cast<std::size_t>(k)]);
    }
    r[static_cast<std::size_t>(d + lags)] = acc;
  }
  // |P|^6 = (|P|^2)^3.
  std::vector<Complex> r2(w4);
  for (std::size_t i = 0; i < w2; ++i)
    for (std::size_t j = 0; j < w2; ++j) r2[i + j] += r[i] * r[j];
  std::vector<Complex> r3(w6);
  for (std::size_t i = 0; i < w4; ++i)
    for (std::size_t j = 0; j < w2; ++j) r3[i + j] += r2[i] * r[j];

  for (std::size_t m = 0; m < members_; ++m) {
    const Complex* a2 = &a2_[m * w2];
    const Complex* a6 = &a6_[m * w6];
    double m2 = 0.0;
    double m6 = 0.0;
    for (std::size_t i = 0; i < w2; ++i) m2 += (r[i] * a2[i]).real();
    for (std::size_t i = 0; i < w6; ++i) m6 += (r3[i] * a6[i]).real();
    out[m] = compute_cm(10.0 * std::log10(m6 / (m2 * m2 * m2)));
  }
}

std::vector<double> RepetitionObjective::member_cm(std::span<const double> phases) const {
  std::vector<Complex> c(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i) c[i] = std::polar(1.0, phases[i]);
  std::vector<double> out(members_);
  member_cm(c, out);
  return out;
}

double RepetitionObjective::percentile_cm(std::span<const Complex> coefficients, double p) const {
  std::vector<double> cms(members_);
  member_cm(coefficients, cms);
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(members_) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, members_);
  std::nth_element(cms.begin(), cms.begin() + static_cast<std::ptrdiff_t>(rank - 1), cms.end());
  return cms[rank - 1];
}

double RepetitionObjective::percentile_cm_phases(std::span<const double> phases, double p) const {
  std::vector<Complex> c(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i) c[i] = std::polar(1.0, phases[i]);
  return percentile_cm(c, p);
}

// ---------------------------------------------------------------------------

std::vector<int> canonical_gauge(std::span<const int> indices, int n_phases) {
  std::vector<int> out(indices.begin(), indices.end());
  if (out.empty()) return out;
  const int ref = out.front();
  for (int& k : out) k = (((k - ref) % n_phases) + n_phases) % n_phases;
  return out;
}

bool phase_lex_less(std::span<const int> a, std::span<const int> b, const PhaseGrid& grid) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [&grid](int x, int y) {
    return grid.value(x) < grid.value(y);
  });
}

PhasePlan plan_from_indices(std::span<const int> indices, const PhaseGrid& grid, PhasePlan::Kind kind) {
  std::vector<double> phases;
  phases.reserve(indices.size());
  for (int k : indices) phases.push_back(grid.value(k));
  return PhasePlan::rotation(std::move(phases), kind);
}

namespace {

// Keeps the better of (best, candidate) under the tie rule.
bool improves(double value, std::span<const int> plan, double best_value, std::span<const int> best_plan,
              const PhaseGrid& grid) {
  if (best_plan.empty()) return true;
  if (value < best_value - kTieTolerance) return true;
  if (value > best_value + kTieTolerance) return false;
  return phase_lex_less(plan, best_plan, grid);
}

}  // namespace

GridSearchResult exhaustive_grid_search(const GridObjective& objective, int copies, const PhaseGrid& grid) {
  if (copies < 1) throw std::invalid_argument("grid search needs at least one copy");
  const int n = grid.size();
  std::vector<int> plan(static_cast<std::size_t>(copies), 0);
  GridSearchResult best;
  best.value = std::numeric_limits<double>::infinity();
  while (true) {
    const double v = objective(plan);
    ++best.evaluations;
    if (improves(v, plan, best.value, best.indices, grid)) {
      best.value = v;
      best.indices = plan;
    }
    // Odometer over positions 1..M-1; position 0 is the gauge.
    int pos = copies - 1;
    while (pos >= 1 && ++plan[static_cast<std::size_t>(pos)] == n) {
      plan[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 1) break;
  }
  return best;
}

GridSearchResult greedy_descent(const GridObjective& objective, int copies, const PhaseGrid& grid,
                                const GreedyOptions& options) {
  if (copies < 1) throw std::invalid_argument("greedy descent needs at least one copy");
  if (options.restarts < 0) throw std::invalid_argument("restart count must be non-negative");
  if (options.restarts == 0 && options.initial_plans.empty()) {
    throw std::invalid_argument("greedy descent needs at least one starting plan");
  }
  const int n = grid.size();
  std::vector<std::vector<int>> starts;
  for (const auto& p : options.initial_plans) {
    if (p.size() != static_cast<std::size_t>(copies)) throw std::invalid_argument("initial plan has wrong length");
    std::vector<int> reduced(p.size());
    std::transform(p.begin(), p.end(), reduced.begin(), [n](int k) { return ((k % n) + n) % n; });
    starts.push_back(std::move(reduced));
  }
  for (int r = 0; r < options.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> p(static_cast<std::size_t>(copies));
    for (int& k : p) k = pick(rng);
    starts.push_back(std::move(p));
  }

  GridSearchResult best;
  best.value = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  for (auto plan : starts) {
    double value = objective(plan);
    ++evaluations;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t pos = 0; pos < plan.size(); ++pos) {
        const int current = plan[pos];
        int best_k = current;
        double best_v = value;
        for (int k = 0; k < n; ++k) {
          if (k == current) continue;
          plan[pos] = k;
          const double v = objective(plan);
          ++evaluations;
          if (v < best_v - 1e-12) {
            best_v = v;
            best_k = k;
          }
        }
        plan[pos] = best_k;
        value = best_v;
        changed = changed || best_k != current;
      }
      if (options.on_sweep) options.on_sweep(value);
    }
    const auto canon = canonical_gauge(plan, n);
    if (improves(value, canon, best.value, best.indices, grid)) {
      best.value = value;
      best.indices = canon;
    }
  }
  best.evaluations = evaluations;
  return best;
}

std::string to_string(SearchMethod method) {
  switch (method) {
    case SearchMethod::exhaustive: return "exhaustive";
    case SearchMethod::greedy: return "greedy";
    case SearchMethod::restricted: return "restricted";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

namespace {

std::size_t default_fft_for_span(std::size_t span) { return fft::next_power_of_two(4 * span); }

// Wraps an index objective so every evaluation is recorded.
struct Recorder {
  const GridObjective* inner;
  std::vector<std::pair<std::vector<int>, double>>* log;
  double operator()(std::span<const int> plan) const {
    const double v = (*inner)(plan);
    log->emplace_back(std::vector<int>(plan.begin(), plan.end()), v);
    return v;
  }
};

GridObjective coefficient_objective(const RepetitionObjective& obj, const PhaseGrid& grid, double percentile) {
  std::vector<Complex> roots(static_cast<std::size_t>(grid.size()));
  for (int k = 0; k < grid.size(); ++k) roots[static_cast<std::size_t>(k)] = std::polar(1.0, grid.value(k));
  return [&obj, roots, percentile](std::span<const int> plan) {
    std::vector<Complex> c(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) c[i] = roots[static_cast<std::size_t>(plan[i])];
    return obj.percentile_cm(c, percentile);
  };
}

}  // namespace

RepetitionObjective make_prach_objective(const std::vector<int>& roots, int reps, std::size_t fft_size) {
  if (reps < 1) throw std::invalid_argument("repetition count must be at least 1");
  const auto& use = roots.empty() ? all_prach_roots() : roots;
  std::vector<ComplexSeq> members;
  members.reserve(use.size());
  for (int u : use) members.push_back(to_freq(gen_prach_root(u)));
  if (fft_size == 0) fft_size = default_fft_for_span(static_cast<std::size_t>(kPrachLength * reps));
  return RepetitionObjective(members, reps, kPrachLength, fft_size);
}

SearchResult search_prach_phases(const PrachSearchOptions& options) {
  if (options.reps < 1) throw std::invalid_argument("repetition count must be at least 1");
  const PhaseGrid grid(options.n_phases);
  const double plans = std::pow(static_cast<double>(options.n_phases), options.reps);
  if (options.method == SearchMethod::exhaustive && plans > static_cast<double>(kMaxPrachExhaustivePlans)) {
    throw std::invalid_argument("exhaustive search over " + std::to_string(static_cast<long long>(plans)) +
                                " plans exceeds the budget of " + std::to_string(kMaxPrachExhaustivePlans) +
                                "; use the greedy method");
  }
  if (options.method == SearchMethod::restricted) throw std::invalid_argument("prach search is exhaustive or greedy");

  const RepetitionObjective obj = make_prach_objective(options.roots, options.reps, options.fft_size);
  const GridObjective base = coefficient_objective(obj, grid, options.percentile);
  std::vector<std::pair<std::vector<int>, double>> log;
  const GridObjective objective = options.keep_candidates ? GridObjective(Recorder{&base, &log}) : base;

  const GridSearchResult best = options.method == SearchMethod::exhaustive
                                    ? exhaustive_grid_search(objective, options.reps, grid)
                                    : greedy_descent(objective, options.reps, grid, options.greedy);
  SearchResult out;
  out.best_plan = plan_from_indices(best.indices, grid);
  out.best_cm_db = best.value;
  out.evaluations = best.evaluations;
  out.method = options.method;
  for (const auto& [plan, v] : log) out.candidates.push_back({plan_from_indices(plan, grid), v});
  return out;
}

// ---------------------------------------------------------------------------

double cyclic_shift_plan_cm(const ComplexSeq& base, const PhasePlan& plan, int stride, std::size_t fft_size) {
  const std::vector<ComplexSeq> copies(plan.size(), base);
  const ResourceMap map = place_prb_copies(apply_phase_plan(copies, plan), 0, stride);
  SynthConfig cfg = default_synth_config(map);
  if (fft_size != 0) cfg.fft_size = fft_size;
  return measure_cm(synthesize(map, cfg)).cm_db;
}

SearchResult search_alt_a(const AltAOptions& options, const CgsTable& table) {
  if (options.budget == 0) throw std::invalid_argument("alt-a search budget must be positive");
  if (options.prbs < 1 || options.prbs > kPrbSize) throw std::invalid_argument("alt-a PRB count must be in [1, 12]");
  const ComplexSeq base = gen_pucch_base(options.base, table);

  SearchResult out;
  bool have_best = false;
  auto consider = [&](const PhasePlan& plan) {
    const double cm = cyclic_shift_plan_cm(base, plan, options.stride, options.fft_size);
    ++out.evaluations;
    if (options.keep_candidates) out.candidates.push_back({plan, cm});
    const bool better = !have_best || cm < out.best_cm_db - kTieTolerance ||
                        (cm <= out.best_cm_db + kTieTolerance && plan.shifts() < out.best_plan.shifts());
    if (better) {
      out.best_plan = plan;
      out.best_cm_db = cm;
      have_best = true;
    }
  };

  if (options.mode == AltAMode::arithmetic_family) {
    out.method = SearchMethod::restricted;
    for (int alpha0 = 0; alpha0 < kPrbSize; ++alpha0) {
      for (int delta = 0; delta < kPrbSize; ++delta) {
        if (out.evaluations == options.budget) {
          out.truncated = true;
          return out;
        }
        consider(cs_step_plan(alpha0, delta, options.prbs));
      }
    }
    return out;
  }

  std::vector<int> shifts = options.shift_set;
  if (shifts.empty()) {
    for (int s = 0; s < kPrbSize; ++s) shifts.push_back(s);
  }
  std::sort(shifts.begin(), shifts.end());
  if (std::adjacent_find(shifts.begin(), shifts.end()) != shifts.end()) {
    throw std::invalid_argument("alt-a shift set has duplicates");
  }
  if (shifts.front() < 0 || shifts.back() >= kPrbSize) throw std::invalid_argument("alt-a shifts must lie in [0, 11]");
  if (shifts.size() < static_cast<std::size_t>(options.prbs)) {
    throw std::invalid_argument("alt-a shift set smaller than the PRB count");
  }

  out.method = SearchMethod::exhaustive;
  std::vector<int> current;
  std::vector<bool> used(shifts.size(), false);
  // Depth-first over ordered selections of distinct shifts, lexicographic order.
  std::function<bool()> recurse = [&]() -> bool {
    if (current.size() == static_cast<std::size_t>(options.prbs)) {
      if (out.evaluations == options.budget) return false;
      consider(PhasePlan::cyclic_shifts(current));
      return true;
    }
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      current.push_back(shifts[i]);
      const bool more = recurse();
      current.pop_back();
      used[i] = false;
      if (!more) return false;
    }
    return true;
  };
  if (!recurse()) out.truncated = true;
  return out;
}

std::array<double, kPrbSize> best_cm_per_step(const SearchResult& arithmetic) {
  std::array<double, kPrbSize> best;
  best.fill(std::numeric_limits<double>::infinity());
  for (const auto& c : arithmetic.candidates) {
    const auto& s = c.plan.shifts();
    if (s.size() < 2) continue;
    const int delta = ((s[1] - s[0]) % kPrbSize + kPrbSize) % kPrbSize;
    best[static_cast<std::size_t>(delta)] = std::min(best[static_cast<std::size_t>(delta)], c.cm_db);
  }
  return best;
}

SearchResult search_alt_b(const AltBOptions& options, const CgsTable& table) {
  if (options.budget == 0) throw std::invalid_argument("alt-b search budget must be positive");
  if (options.prbs < 1) throw std::invalid_argument("alt-b PRB count must be positive");
  if (options.n_phases < 2 || options.n_phases > 10) throw std::invalid_argument("alt-b phase count must be in [2, 10]");
  if (options.stride < 1) throw std::invalid_argument("interlace stride must be positive");
  const PhaseGrid grid(options.n_phases);
  const int spacing = kPrbSize * options.stride;
  std::size_t fft_size = options.fft_size;
  if (fft_size == 0) {
    fft_size = default_fft_for_span(static_cast<std::size_t>(spacing * (options.prbs - 1) + kPrbSize));
  }
  const RepetitionObjective obj({gen_pucch_base(options.base, table)}, options.prbs, spacing, fft_size);
  const GridObjective objective = coefficient_objective(obj, grid, 100.0);

  const double plans = std::pow(static_cast<double>(options.n_phases), options.prbs - 1);
  SearchResult out;
  GridSearchResult best;
  if (plans <= static_cast<double>(options.budget)) {
    best = exhaustive_grid_search(objective, options.prbs, grid);
    out.method = SearchMethod::exhaustive;
  } else {
    GreedyOptions greedy = options.greedy;
    std::size_t warm_evaluations = 0;
    for (int d = 2; d < options.n_phases; ++d) {
      if (options.n_phases % d != 0) continue;
      if (std::pow(static_cast<double>(d), options.prbs - 1) > static_cast<double>(options.budget)) continue;
      const PhaseGrid coarse(d);
      const GridSearchResult sub = exhaustive_grid_search(coefficient_objective(obj, coarse, 100.0), options.prbs, coarse);
      warm_evaluations += sub.evaluations;
      std::vector<int> lifted(sub.indices);
      for (int& k : lifted) k *= options.n_phases / d;
      greedy.initial_plans.push_back(std::move(lifted));
    }
    best = greedy_descent(objective, options.prbs, grid, greedy);
    best.evaluations += warm_evaluations;
    out.method = SearchMethod::greedy;
  }
  out.best_plan = plan_from_indices(best.indices, grid, PhasePlan::Kind::per_prb_rotation);
  out.best_cm_db = best.value;
  out.evaluations = best.evaluations;
  return out;
}

}  // namespace cmlab
