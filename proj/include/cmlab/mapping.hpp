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

#include <json.hpp>

#include "cmlab/types.hpp"

namespace cmlab {

inline constexpr double kDefaultNominalBandwidthHz = 20e6;

/// One occupied subcarrier.
struct ResourceElement {
  int subcarrier = 0;
  Complex value;
};

/// Sparse frequency-domain placement. Subcarrier indices are strictly
/// increasing. The map also remembers where each repeated copy starts so that
/// per-copy plans can be applied after construction.
class ResourceMap {
 public:
  /// `copy_starts` holds, for each copy, the position in `entries` where it
  /// begins; empty means the whole map is a single copy.
  ResourceMap(std::vector<ResourceElement> entries, Scs scs, double nominal_bw_hz,
              std::vector<std::size_t> copy_starts = {});

  const std::vector<ResourceElement>& entries() const { return entries_; }
  Scs scs() const { return scs_; }
  double nominal_bw_hz() const { return nominal_bw_hz_; }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int min_subcarrier() const;
  int max_subcarrier() const;
  /// max - min + 1, in subcarriers.
  int span() const;

  std::size_t copy_count() const { return copy_starts_.size(); }
  /// [begin, end) entry range of copy n.
  std::pair<std::size_t, std::size_t> copy_range(std::size_t n) const;

  /// Same placement with every subcarrier index moved by `offset`.
  ResourceMap translated(int offset) const;
  ResourceMap scaled(Complex factor) const;

 private:
  std::vector<ResourceElement> entries_;
  Scs scs_;
  double nominal_bw_hz_;
  std::vector<std::size_t> copy_starts_;
};

/// Per-copy phase offsets or cyclic-shift indices.
class PhasePlan {
 public:
  enum class Kind { per_repetition_rotation, per_prb_rotation, cyclic_shift_plan };

  PhasePlan() = default;

  /// Phases are stored wrapped into (-pi, pi].
  static PhasePlan rotation(std::vector<double> phases, Kind kind = Kind::per_repetition_rotation);
  /// Shift indices are stored reduced into [0, 11].
  static PhasePlan cyclic_shifts(std::vector<int> shifts);
  /// All-zero rotation plan of the given size.
  static PhasePlan identity(std::size_t size, Kind kind = Kind::per_repetition_rotation);

  Kind kind() const { return kind_; }
  bool is_rotation() const { return kind_ != Kind::cyclic_shift_plan; }
  std::size_t size() const { return is_rotation() ? phases_.size() : shifts_.size(); }

  const std::vector<double>& phases() const { return phases_; }
  const std::vector<int>& shifts() const { return shifts_; }

  /// The plan that undoes this one.
  PhasePlan conjugate() const;

 private:
  Kind kind_ = Kind::per_repetition_rotation;
  std::vector<double> phases_;
  std::vector<int> shifts_;
};

std::string to_string(PhasePlan::Kind kind);
PhasePlan::Kind plan_kind_from_string(const std::string& name);

void to_json(nlohmann::json& j, const PhasePlan& plan);
void from_json(const nlohmann::json& j, PhasePlan& plan);

PhasePlan load_plan(const std::string& path);
void save_plan(const PhasePlan& plan, const std::string& path);

struct OcbVerdict {
  double occupied_bw_hz = 0.0;
  double lower_bound_hz = 0.0;
  double upper_bound_hz = 0.0;
  bool pass = false;
};

/// `reps` contiguous copies of a length-139 frequency sequence starting at
/// `start_re`. Without `start_re` the occupied span is centred in the nominal
/// channel grid.
ResourceMap build_prach_map(std::span<const Complex> freq_seq, int reps, Scs scs,
                            std::optional<int> start_re = std::nullopt,
                            double nominal_bw_hz = kDefaultNominalBandwidthHz);

/// Default interlace stride for a 20 MHz channel: 10 at 15 kHz, 5 at 30 kHz.
int default_interlace_stride(Scs scs);

/// Places PRB k of an interlace on subcarriers [12*(interlace_index + k*stride), +12).
/// Requires 10 or 11 PRBs of length 12.
ResourceMap build_interlace_map(const std::vector<ComplexSeq>& prb_seqs, int interlace_index, int stride,
                                Scs scs = Scs::khz15, double nominal_bw_hz = kDefaultNominalBandwidthHz);

/// Same placement rule as build_interlace_map without the 10/11 PRB count
/// restriction; used by searches over reduced problem sizes.
ResourceMap place_prb_copies(const std::vector<ComplexSeq>& prb_seqs, int interlace_index, int stride,
                             Scs scs = Scs::khz15, double nominal_bw_hz = kDefaultNominalBandwidthHz);

/// Multiplies copy n by exp(j theta_n) for rotation plans, or phase-ramps it
/// by shift CS_n (apply_cyclic_shift_phase) for cyclic-shift plans.
std::vector<ComplexSeq> apply_phase_plan(const std::vector<ComplexSeq>& copies, const PhasePlan& plan);
ResourceMap apply_phase_plan(const ResourceMap& map, const PhasePlan& plan);

/// CS_n = (alpha0 + delta * n) mod 12, n = 0..count-1.
PhasePlan cs_step_plan(int alpha0, int delta, int count);

OcbVerdict check_ocb(const ResourceMap& map);

}  // namespace cmlab
