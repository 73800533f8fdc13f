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

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cmlab/mapping.hpp"
#include "cmlab/seq_core.hpp"
#include "cmlab/types.hpp"

namespace cmlab {

/// Uniform grid of N phases k * 2 pi / N, k = 0..N-1, reported wrapped into (-pi, pi].
class PhaseGrid {
 public:
  explicit PhaseGrid(int n_phases);

  int size() const { return n_; }
  double step() const { return kTwoPi / n_; }
  double value(int k) const;
  std::vector<double> values() const;

 private:
  int n_;
};

/// CM of R equally spaced copies of one frequency-domain sequence, for a
/// population of sequences, as a function of the per-copy phases.
///
/// With w(t) the waveform of a single copy and c_n = exp(j theta_n), the
/// repeated waveform factors as v(t) = w(t) P(t), P(t) = sum_n c_n e^{j 2 pi s n t / N}
/// (s = copy spacing in subcarriers). |P|^2 and |P|^6 are trigonometric
/// polynomials whose coefficients follow from the autocorrelation of c, so
///   mean |v|^k = sum_d coef_k[d] * (DFT of |w|^k at bin -s d) / N
/// is exact with respect to direct N-point synthesis and costs O(R) per
/// member instead of O(N log N).
class RepetitionObjective {
 public:
  /// Each member is one copy on contiguous subcarriers starting at 0.
  RepetitionObjective(const std::vector<ComplexSeq>& members, int copies, int copy_spacing, std::size_t fft_size);

  int copies() const { return copies_; }
  std::size_t member_count() const { return members_; }
  std::size_t fft_size() const { return fft_size_; }

  /// Per-member CM in dB for unit-modulus copy coefficients.
  void member_cm(std::span<const Complex> coefficients, std::span<double> out) const;
  std::vector<double> member_cm(std::span<const double> phases) const;

  /// Nearest-rank percentile of member CM; p = 95 by default.
  double percentile_cm(std::span<const Complex> coefficients, double p = 95.0) const;
  double percentile_cm_phases(std::span<const double> phases, double p = 95.0) const;

 private:
  int copies_;
  std::size_t members_;
  std::size_t fft_size_;
  // Per member, (2D+1) second-moment and (6D+1) sixth-moment coefficients,
  // D = copies - 1, indexed by lag d + D and d + 3D respectively.
  std::vector<Complex> a2_;
  std::vector<Complex> a6_;
};

/// Objective over grid indices (one index per copy).
using GridObjective = std::function<double(std::span<const int>)>;

struct GridSearchResult {
  std::vector<int> indices;  ///< canonical gauge: indices[0] == 0 for rotation objectives
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Ties closer than this are broken by the lexicographically smallest plan.
inline constexpr double kTieTolerance = 1e-9;

/// Subtracts indices[0] from every entry (mod N).
std::vector<int> canonical_gauge(std::span<const int> indices, int n_phases);

/// Lexicographic order on the wrapped phase values of two index plans.
bool phase_lex_less(std::span<const int> a, std::span<const int> b, const PhaseGrid& grid);

PhasePlan plan_from_indices(std::span<const int> indices, const PhaseGrid& grid,
                            PhasePlan::Kind kind = PhasePlan::Kind::per_repetition_rotation);

/// Enumerates all N^(M-1) plans with the first entry fixed at 0.
GridSearchResult exhaustive_grid_search(const GridObjective& objective, int copies, const PhaseGrid& grid);

struct GreedyOptions {
  int restarts = 8;
  std::uint64_t seed = 1;
  /// Starting plans tried before the random restarts.
  std::vector<std::vector<int>> initial_plans;
  /// Called with the objective value after every completed sweep.
  std::function<void(double)> on_sweep;
};

/// Coordinate descent on the phase grid: sweep positions 0..M-1, at each one
/// take the grid value minimizing the objective with the others fixed (a move
/// is only made on strict improvement), repeat sweeps to a fixpoint. Best
/// result over all starting plans, canonicalized by gauge.
GridSearchResult greedy_descent(const GridObjective& objective, int copies, const PhaseGrid& grid,
                                const GreedyOptions& options);

enum class SearchMethod { exhaustive, greedy, restricted };
std::string to_string(SearchMethod method);

struct SearchCandidate {
  PhasePlan plan;
  double cm_db = 0.0;
};

struct SearchResult {
  PhasePlan best_plan;
  double best_cm_db = 0.0;
  std::size_t evaluations = 0;
  SearchMethod method = SearchMethod::exhaustive;
  bool truncated = false;
  std::vector<SearchCandidate> candidates;
};

// ---------------------------------------------------------------------------
// PRACH
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxPrachExhaustivePlans = 65536;

/// About 2% of random starts descend into the optimum basin for eight
/// repetitions on the 4-phase grid; 256 starts miss it with probability ~0.4%.
inline constexpr int kPrachGreedyRestarts = 256;

RepetitionObjective make_prach_objective(const std::vector<int>& roots, int reps, std::size_t fft_size = 0);

struct PrachSearchOptions {
  std::vector<int> roots;  ///< empty means all of 1..138
  int reps = 4;
  int n_phases = 4;
  SearchMethod method = SearchMethod::exhaustive;
  std::size_t fft_size = 0;  ///< 0: smallest power of two >= 4 * 139 * reps
  double percentile = 95.0;
  GreedyOptions greedy{.restarts = kPrachGreedyRestarts, .seed = 1, .initial_plans = {}, .on_sweep = {}};
  bool keep_candidates = false;
};

/// Minimizes the population percentile CM over per-repetition phase plans.
SearchResult search_prach_phases(const PrachSearchOptions& options);

// ---------------------------------------------------------------------------
// PUCCH interlace
// ---------------------------------------------------------------------------

enum class AltAMode { arithmetic_family, full_permutation };

struct AltAOptions {
  PucchBaseSpec base;
  int prbs = 10;
  AltAMode mode = AltAMode::arithmetic_family;
  std::size_t budget = 100000;
  int stride = 10;
  std::vector<int> shift_set;  ///< full_permutation only; empty means 0..11
  std::size_t fft_size = 0;
  bool keep_candidates = true;
};

/// Cyclic-shift cycling across PRBs. arithmetic_family scans all 144
/// (alpha0, delta) plans of cs_step_plan; full_permutation enumerates ordered
/// selections of distinct shifts until the budget is spent.
SearchResult search_alt_a(const AltAOptions& options, const CgsTable& table = CgsTable::bundled());

/// CM of one base sequence repeated over an interlace with per-PRB cyclic shifts.
double cyclic_shift_plan_cm(const ComplexSeq& base, const PhasePlan& plan, int stride, std::size_t fft_size = 0);

/// Best CM for each step size delta = 0..11 among arithmetic-family candidates.
std::array<double, kPrbSize> best_cm_per_step(const SearchResult& arithmetic);

struct AltBOptions {
  PucchBaseSpec base;
  int prbs = 10;
  int n_phases = 4;
  std::size_t budget = 10'000'000;
  int stride = 10;
  std::size_t fft_size = 0;
  GreedyOptions greedy;
};

/// Per-PRB phase rotation on an N-phase grid: exhaustive when the gauge-fixed
/// plan count N^(M-1) fits the budget, greedy coordinate descent otherwise.
/// Greedy runs also start from the exhaustive optimum of every proper divisor
/// grid N' | N that fits the budget, so the result is never worse than those.
SearchResult search_alt_b(const AltBOptions& options, const CgsTable& table = CgsTable::bundled());

}  // namespace cmlab
