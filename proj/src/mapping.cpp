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

#include "cmlab/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "cmlab/seq_core.hpp"

namespace cmlab {

ResourceMap::ResourceMap(std::vector<ResourceElement> entries, Scs scs, double nominal_bw_hz,
                         std::vector<std::size_t> copy_starts)
    : entries_(std::move(entries)), scs_(scs), nominal_bw_hz_(nominal_bw_hz), copy_starts_(std::move(copy_starts)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) {
      throw std::invalid_argument("resource map value at subcarrier " + std::to_string(e.subcarrier) +
                                  " is not finite");
    }
    if (i > 0 && e.subcarrier <= entries_[i - 1].subcarrier) {
      throw std::invalid_argument("resource map subcarrier " + std::to_string(e.subcarrier) +
                                  " collides with or precedes " + std::to_string(entries_[i - 1].subcarrier));
    }
  }
  if (copy_starts_.empty() && !entries_.empty()) copy_starts_.push_back(0);
  for (std::size_t n = 0; n < copy_starts_.size(); ++n) {
    if (copy_starts_[n] >= entries_.size() || (n > 0 && copy_starts_[n] <= copy_starts_[n - 1])) {
      throw std::invalid_argument("resource map copy boundaries are not increasing");
    }
  }
  if (!copy_starts_.empty() && copy_starts_.front() != 0) {
    throw std::invalid_argument("resource map first copy must start at entry 0");
  }
}

int ResourceMap::min_subcarrier() const {
  if (entries_.empty()) throw std::logic_error("empty resource map");
  return entries_.front().subcarrier;
}

int ResourceMap::max_subcarrier() const {
  if (entries_.empty()) throw std::logic_error("empty resource map");
  return entries_.back().subcarrier;
}

int ResourceMap::span() const { return max_subcarrier() - min_subcarrier() + 1; }

std::pair<std::size_t, std::size_t> ResourceMap::copy_range(std::size_t n) const {
  if (n >= copy_starts_.size()) throw std::out_of_range("copy index out of range");
  const std::size_t end = n + 1 < copy_starts_.size() ? copy_starts_[n + 1] : entries_.size();
  return {copy_starts_[n], end};
}

ResourceMap ResourceMap::translated(int offset) const {
  auto moved = entries_;
  for (auto& e : moved) e.subcarrier += offset;
  return ResourceMap(std::move(moved), scs_, nominal_bw_hz_, copy_starts_);
}

ResourceMap ResourceMap::scaled(Complex factor) const {
  auto moved = entries_;
  for (auto& e : moved) e.value *= factor;
  return ResourceMap(std::move(moved), scs_, nominal_bw_hz_, copy_starts_);
}

// ---------------------------------------------------------------------------

PhasePlan PhasePlan::rotation(std::vector<double> phases, Kind kind) {
  if (kind == Kind::cyclic_shift_plan) throw std::invalid_argument("rotation plan with cyclic-shift kind");
  for (double& p : phases) {
    if (!std::isfinite(p)) throw std::invalid_argument("plan phase is not finite");
    p = wrap_phase(p);
  }
  PhasePlan plan;
  plan.kind_ = kind;
  plan.phases_ = std::move(phases);
  return plan;
}

PhasePlan PhasePlan::cyclic_shifts(std::vector<int> shifts) {
  for (int& s : shifts) s = ((s % kPrbSize) + kPrbSize) % kPrbSize;
  PhasePlan plan;
  plan.kind_ = Kind::cyclic_shift_plan;
  plan.shifts_ = std::move(shifts);
  return plan;
}

PhasePlan PhasePlan::identity(std::size_t size, Kind kind) {
  if (kind == Kind::cyclic_shift_plan) return cyclic_shifts(std::vector<int>(size, 0));
  return rotation(std::vector<double>(size, 0.0), kind);
}

PhasePlan PhasePlan::conjugate() const {
  if (kind_ == Kind::cyclic_shift_plan) {
    std::vector<int> neg(shifts_.size());
    std::transform(shifts_.begin(), shifts_.end(), neg.begin(), [](int s) { return -s; });
    return cyclic_shifts(std::move(neg));
  }
  std::vector<double> neg(phases_.size());
  std::transform(phases_.begin(), phases_.end(), neg.begin(), [](double p) { return -p; });
  return rotation(std::move(neg), kind_);
}

std::string to_string(PhasePlan::Kind kind) {
  switch (kind) {
    case PhasePlan::Kind::per_repetition_rotation: return "per_repetition_rotation";
    case PhasePlan::Kind::per_prb_rotation: return "per_prb_rotation";
    case PhasePlan::Kind::cyclic_shift_plan: return "cyclic_shift_plan";
  }
  return "unknown";
}

PhasePlan::Kind plan_kind_from_string(const std::string& name) {
  if (name == "per_repetition_rotation") return PhasePlan::Kind::per_repetition_rotation;
  if (name == "per_prb_rotation") return PhasePlan::Kind::per_prb_rotation;
  if (name == "cyclic_shift_plan") return PhasePlan::Kind::cyclic_shift_plan;
  throw std::invalid_argument("unknown plan kind '" + name + "'");
}

void to_json(nlohmann::json& j, const PhasePlan& plan) {
  j = nlohmann::json::object();
  j["kind"] = to_string(plan.kind());
  if (plan.is_rotation()) {
    j["offsets"] = plan.phases();
  } else {
    j["offsets"] = plan.shifts();
  }
}

void from_json(const nlohmann::json& j, PhasePlan& plan) {
  const auto kind = plan_kind_from_string(j.at("kind").get<std::string>());
  const auto& offsets = j.at("offsets");
  if (!offsets.is_array()) throw std::invalid_argument("plan offsets must be an array");
  if (kind == PhasePlan::Kind::cyclic_shift_plan) {
    for (const auto& v : offsets) {
      if (!v.is_number_integer()) throw std::invalid_argument("cyclic shift offsets must be integers");
    }
    plan = PhasePlan::cyclic_shifts(offsets.get<std::vector<int>>());
  } else {
    plan = PhasePlan::rotation(offsets.get<std::vector<double>>(), kind);
  }
}

PhasePlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan file: " + path);
  const auto j = nlohmann::json::parse(in);
  // Search reports embed the plan under "best_plan".
  if (j.contains("best_plan")) return j.at("best_plan").get<PhasePlan>();
  return j.get<PhasePlan>();
}

void save_plan(const PhasePlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plan file: " + path);
  out << nlohmann::json(plan).dump(2) << '\n';
}

// ---------------------------------------------------------------------------

ResourceMap build_prach_map(std::span<const Complex> freq_seq, int reps, Scs scs, std::optional<int> start_re,
                            double nominal_bw_hz) {
  if (freq_seq.size() != static_cast<std::size_t>(kPrachLength)) {
    throw std::invalid_argument("prach map needs a length-139 sequence, got " + std::to_string(freq_seq.size()));
  }
  if (reps < 1) throw std::invalid_argument("repetition count must be at least 1");
  const int span = kPrachLength * reps;
  int start = 0;
  if (start_re) {
    start = *start_re;
  } else {
    const int grid = static_cast<int>(nominal_bw_hz / scs_hz(scs));
    start = std::max(0, (grid - span) / 2);
  }
  if (start < 0) throw std::invalid_argument("negative prach start subcarrier " + std::to_string(start));

  std::vector<ResourceElement> entries;
  entries.reserve(static_cast<std::size_t>(span));
  std::vector<std::size_t> starts;
  for (int r = 0; r < reps; ++r) {
    starts.push_back(entries.size());
    for (int k = 0; k < kPrachLength; ++k) {
      entries.push_back({start + r * kPrachLength + k, freq_seq[static_cast<std::size_t>(k)]});
    }
  }
  return ResourceMap(std::move(entries), scs, nominal_bw_hz, std::move(starts));
}

int default_interlace_stride(Scs scs) { return scs == Scs::khz15 ? 10 : 5; }

ResourceMap place_prb_copies(const std::vector<ComplexSeq>& prb_seqs, int interlace_index, int stride, Scs scs,
                             double nominal_bw_hz) {
  if (prb_seqs.empty()) throw std::invalid_argument("interlace needs at least one PRB");
  if (stride < 1) throw std::invalid_argument("interlace stride must be positive");
  if (interlace_index < 0) throw std::invalid_argument("interlace index must be non-negative");
  std::vector<ResourceElement> entries;
  std::vector<std::size_t> starts;
  for (std::size_t k = 0; k < prb_seqs.size(); ++k) {
    if (prb_seqs[k].size() != kPrbSize) {
      throw std::invalid_argument("interlace PRB " + std::to_string(k) + " is not length 12");
    }
    const int prb = interlace_index + static_cast<int>(k) * stride;
    starts.push_back(entries.size());
    for (int i = 0; i < kPrbSize; ++i) entries.push_back({kPrbSize * prb + i, prb_seqs[k][static_cast<std::size_t>(i)]});
  }
  // ResourceMap rejects any PRB collision through its ordering check.
  return ResourceMap(std::move(entries), scs, nominal_bw_hz, std::move(starts));
}

ResourceMap build_interlace_map(const std::vector<ComplexSeq>& prb_seqs, int interlace_index, int stride, Scs scs,
                                double nominal_bw_hz) {
  if (prb_seqs.size() != 10 && prb_seqs.size() != 11) {
    throw std::invalid_argument("interlace must hold 10 or 11 PRBs, got " + std::to_string(prb_seqs.size()));
  }
  return place_prb_copies(prb_seqs, interlace_index, stride, scs, nominal_bw_hz);
}

namespace {

ComplexSeq apply_to_copy(std::span<const Complex> copy, const PhasePlan& plan, std::size_t n) {
  if (plan.is_rotation()) {
    const Complex rot = std::polar(1.0, plan.phases()[n]);
    ComplexSeq out(copy.begin(), copy.end());
    for (auto& v : out) v *= rot;
    return out;
  }
  return apply_cyclic_shift_phase(copy, plan.shifts()[n]);
}

}  // namespace

std::vector<ComplexSeq> apply_phase_plan(const std::vector<ComplexSeq>& copies, const PhasePlan& plan) {
  if (plan.size() != copies.size()) {
    throw std::invalid_argument("plan length " + std::to_string(plan.size()) + " does not match " +
                                std::to_string(copies.size()) + " copies");
  }
  std::vector<ComplexSeq> out;
  out.reserve(copies.size());
  for (std::size_t n = 0; n < copies.size(); ++n) out.push_back(apply_to_copy(copies[n], plan, n));
  return out;
}

ResourceMap apply_phase_plan(const ResourceMap& map, const PhasePlan& plan) {
  if (plan.size() != map.copy_count()) {
    throw std::invalid_argument("plan length " + std::to_string(plan.size()) + " does not match " +
                                std::to_string(map.copy_count()) + " copies in the map");
  }
  auto entries = map.entries();
  std::vector<std::size_t> starts;
  ComplexSeq copy;
  for (std::size_t n = 0; n < map.copy_count(); ++n) {
    const auto [begin, end] = map.copy_range(n);
    starts.push_back(begin);
    copy.clear();
    for (std::size_t i = begin; i < end; ++i) copy.push_back(entries[i].value);
    const ComplexSeq rotated = apply_to_copy(copy, plan, n);
    for (std::size_t i = begin; i < end; ++i) entries[i].value = rotated[i - begin];
  }
  return ResourceMap(std::move(entries), map.scs(), map.nominal_bw_hz(), std::move(starts));
}

PhasePlan cs_step_plan(int alpha0, int delta, int count) {
  if (count < 1) throw std::invalid_argument("cyclic-shift plan needs at least one PRB");
  std::vector<int> shifts(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    shifts[static_cast<std::size_t>(n)] = ((alpha0 + delta * n) % kPrbSize + kPrbSize) % kPrbSize;
  }
  return PhasePlan::cyclic_shifts(std::move(shifts));
}

OcbVerdict check_ocb(const ResourceMap& map) {
  if (map.empty()) throw std::invalid_argument("occupied bandwidth of an empty map");
  OcbVerdict v;
  v.occupied_bw_hz = static_cast<double>(map.span()) * scs_hz(map.scs());
  v.lower_bound_hz = 0.8 * map.nominal_bw_hz();
  v.upper_bound_hz = map.nominal_bw_hz();
  v.pass = v.occupied_bw_hz >= v.lower_bound_hz && v.occupied_bw_hz <= v.upper_bound_hz;
  return v;
}

}  // namespace cmlab
