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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmlab/phase_search.hpp"
#include "cmlab/prach_detector.hpp"
#include "cmlab/waveform_metrics.hpp"

namespace cmlab {

enum class Scenario { prach_cm, pucch_cm, phase_search, detect_mc, ocb_check };
std::string to_string(Scenario s);

/// FNV-1a 64 of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// ---------------------------------------------------------------------------
// cm
// ---------------------------------------------------------------------------

struct CmCommand {
  std::string sequence = "prach";  ///< prach | pucch
  int reps = 1;                    ///< prach repetitions
  int prbs = 10;                   ///< pucch interlace PRBs
  int stride = 0;                  ///< 0: default for the SCS
  int scs_khz = 15;
  std::vector<int> roots;          ///< prach only; empty means 1..138
  std::string plan_file;           ///< optional phase or cyclic-shift plan
  std::size_t fft_size = 0;
  std::uint64_t seed = 0;          ///< recorded only; the CM population is deterministic
  std::string out;                 ///< output prefix: <out>.csv, <out>.json
};

nlohmann::json command_json(const CmCommand& c);
CmCommand cm_command_from_json(const nlohmann::json& j);

struct CmRun {
  CmStats stats;
  nlohmann::json summary;
  OcbVerdict ocb;
};

CmRun run_cm(const CmCommand& cmd);

/// Columns: sequence_id,rcm_db,cm_db, preceded by one '#' line carrying the
/// config hash and seed.
void write_cm_csv(std::ostream& os, const CmStats& stats, const std::string& hash, std::uint64_t seed);

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

struct SearchCommand {
  std::string target = "prach";      ///< prach | alt-a | alt-b
  std::string method = "auto";       ///< auto | exhaustive | greedy
  int reps = 4;
  int n_phases = 4;
  double percentile = 95.0;
  std::vector<int> roots;
  int base = 0;
  int alpha = 0;
  int prbs = 10;
  int stride = 10;
  std::string mode = "arithmetic";   ///< alt-a: arithmetic | permutation
  std::vector<int> shift_set;
  std::size_t budget = 0;            ///< 0: target default
  int restarts = 0;                  ///< 0: target default
  std::size_t fft_size = 0;
  std::uint64_t seed = 1;
  bool candidates = false;           ///< also write <out>.candidates.csv
  std::string out;                   ///< <out>.plan.json, <out>.report.json
};

nlohmann::json command_json(const SearchCommand& c);
SearchCommand search_command_from_json(const nlohmann::json& j);

struct SearchRun {
  SearchResult result;
  nlohmann::json report;
};

SearchRun run_search(const SearchCommand& cmd);

/// Columns: plan,cm_db; plan entries separated by ';'.
void write_candidates_csv(std::ostream& os, const SearchResult& result, const std::string& hash, std::uint64_t seed);

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

struct DetectCommand {
  int reps = 4;
  std::string plan_file;
  std::optional<PhasePlan> plan;     ///< inline plan, used when plan_file is empty
  int n_cs = kDefaultNcs;
  std::vector<int> roots;
  int scs_khz = 15;
  std::vector<double> snr_db{-10.0};
  std::size_t trials = 1000;
  std::size_t fa_trials = 1000;
  std::optional<double> threshold;
  std::size_t calibration_trials = kMinCalibrationTrials;
  double target_fa = 1e-3;
  std::size_t ifft_size = 0;
  double delay_s = 0.0;
  std::vector<Tap> taps;
  bool fading = false;
  std::uint64_t seed = 1;
  std::string out;                   ///< <out>.csv, <out>.json
};

nlohmann::json command_json(const DetectCommand& c);
DetectCommand detect_command_from_json(const nlohmann::json& j);

/// "delay_s:power_db,delay_s:power_db,..."
std::vector<Tap> parse_taps(const std::string& text);

McConfig mc_config(const DetectCommand& cmd);

struct DetectRun {
  McStats stats;
  nlohmann::json manifest;  ///< includes the resolved config; feed "config" back to replay
  OcbVerdict ocb;
};

DetectRun run_detect(const DetectCommand& cmd);

/// Columns: snr_db,miss_rate,fa_rate,trials,ta_p50_s,ta_p95_s.
void write_mc_csv(std::ostream& os, const McStats& stats, const std::string& hash, std::uint64_t seed);

// ---------------------------------------------------------------------------
// ocb
// ---------------------------------------------------------------------------

struct OcbCommand {
  std::string sequence = "prach";
  int reps = 1;
  int prbs = 10;
  int stride = 0;
  int scs_khz = 15;
  double nominal_bw_hz = kDefaultNominalBandwidthHz;
};

ResourceMap ocb_map(const OcbCommand& cmd);
nlohmann::json ocb_report(const OcbVerdict& v);

/// One-line warning text for a failed verdict, empty when it passes.
std::string ocb_warning(const OcbVerdict& v);

}  // namespace cmlab
