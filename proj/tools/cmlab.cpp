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

// cmlab: cubic metric, phase plan search and PRACH detection experiments.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "cmlab/cli_io.hpp"

namespace {

void print_warning(const cmlab::OcbVerdict& v) {
  const auto w = cmlab::ocb_warning(v);
  if (!w.empty()) std::cerr << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cubic metric, phase plan search and PRACH detection experiments"};
  app.set_config("--config", "", "read options from a TOML/INI config file");
  app.require_subcommand(1);

  cmlab::CmCommand cm;
  auto* cm_cmd = app.add_subcommand("cm", "CM population statistics for PRACH or PUCCH interlace sequences");
  cm_cmd->add_option("--sequence", cm.sequence, "prach or pucch")->check(CLI::IsMember({"prach", "pucch"}));
  cm_cmd->add_option("--reps", cm.reps, "PRACH repetitions")->check(CLI::PositiveNumber);
  cm_cmd->add_option("--prbs", cm.prbs, "PUCCH interlace PRBs")->check(CLI::PositiveNumber);
  cm_cmd->add_option("--stride", cm.stride, "interlace PRB stride (0: SCS default)");
  cm_cmd->add_option("--scs-khz", cm.scs_khz, "subcarrier spacing in kHz")->check(CLI::IsMember({15, 30}));
  cm_cmd->add_option("--roots", cm.roots, "PRACH roots (default 1..138)");
  cm_cmd->add_option("--plan", cm.plan_file, "phase or cyclic-shift plan JSON")->check(CLI::ExistingFile);
  cm_cmd->add_option("--fft-size", cm.fft_size, "synthesis FFT size (0: 4x oversampled power of two)");
  cm_cmd->add_option("--seed", cm.seed, "recorded in outputs");
  cm_cmd->add_option("--out", cm.out, "output prefix for <out>.csv and <out>.json");

  cmlab::SearchCommand search;
  auto* search_cmd = app.add_subcommand("search", "phase plan search");
  search_cmd->add_option("--target", search.target, "prach, alt-a or alt-b")
      ->check(CLI::IsMember({"prach", "alt-a", "alt-b"}));
  search_cmd->add_option("--method", search.method, "auto, exhaustive or greedy")
      ->check(CLI::IsMember({"auto", "exhaustive", "greedy"}));
  search_cmd->add_option("--reps", search.reps, "PRACH repetitions")->check(CLI::PositiveNumber);
  search_cmd->add_option("--n-phases", search.n_phases, "phase grid size N")->check(CLI::PositiveNumber);
  search_cmd->add_option("--percentile", search.percentile, "population percentile minimized");
  search_cmd->add_option("--roots", search.roots, "PRACH roots (default 1..138)");
  search_cmd->add_option("--base", search.base, "PUCCH base sequence index")->check(CLI::Range(0, 29));
  search_cmd->add_option("--alpha", search.alpha, "PUCCH base cyclic shift")->check(CLI::Range(0, 11));
  search_cmd->add_option("--prbs", search.prbs, "interlace PRBs")->check(CLI::PositiveNumber);
  search_cmd->add_option("--stride", search.stride, "interlace PRB stride")->check(CLI::PositiveNumber);
  search_cmd->add_option("--mode", search.mode, "alt-a: arithmetic or permutation")
      ->check(CLI::IsMember({"arithmetic", "permutation"}));
  search_cmd->add_option("--shift-set", search.shift_set, "alt-a permutation shift set");
  search_cmd->add_option("--budget", search.budget, "evaluation budget (0: default)");
  search_cmd->add_option("--restarts", search.restarts, "greedy random restarts (0: 256 for prach, 8 otherwise)");
  search_cmd->add_option("--fft-size", search.fft_size, "synthesis FFT size (0: default)");
  search_cmd->add_option("--seed", search.seed, "greedy restart seed");
  search_cmd->add_flag("--candidates", search.candidates, "write every evaluated plan to <out>.candidates.csv");
  search_cmd->add_option("--out", search.out, "output prefix for <out>.plan.json and <out>.report.json");

  cmlab::DetectCommand detect;
  std::string taps;
  std::string replay;
  double threshold = 0.0;
  auto* detect_cmd = app.add_subcommand("detect", "PRACH detection Monte Carlo");
  detect_cmd->add_option("--reps", detect.reps, "PRACH repetitions")->check(CLI::PositiveNumber);
  detect_cmd->add_option("--plan", detect.plan_file, "phase plan JSON")->check(CLI::ExistingFile);
  detect_cmd->add_option("--n-cs", detect.n_cs, "cyclic shift spacing")->check(CLI::Range(1, 139));
  detect_cmd->add_option("--roots", detect.roots, "cell roots (default 1, 2, ...)");
  detect_cmd->add_option("--scs-khz", detect.scs_khz, "subcarrier spacing in kHz")->check(CLI::IsMember({15, 30}));
  detect_cmd->add_option("--snr-db", detect.snr_db, "per-resource-element SNR points in dB (inf allowed)");
  detect_cmd->add_option("--trials", detect.trials, "signal trials per SNR point")->check(CLI::PositiveNumber);
  detect_cmd->add_option("--fa-trials", detect.fa_trials, "noise-only trials per SNR point");
  auto* thr_opt = detect_cmd->add_option("--threshold", threshold, "relative threshold (default: calibrate)");
  detect_cmd->add_option("--calibration-trials", detect.calibration_trials, "noise-only calibration trials");
  detect_cmd->add_option("--target-fa", detect.target_fa, "per-occasion false-alarm target");
  detect_cmd->add_option("--ifft-size", detect.ifft_size, "detection IFFT size (0: default)");
  detect_cmd->add_option("--delay-s", detect.delay_s, "bulk delay in seconds");
  detect_cmd->add_option("--taps", taps, "multipath taps delay_s:power_db,...");
  detect_cmd->add_flag("--fading", detect.fading, "Rayleigh tap gains");
  detect_cmd->add_option("--seed", detect.seed, "master seed");
  detect_cmd->add_option("--replay", replay, "rerun the config stored in a manifest")->check(CLI::ExistingFile);
  detect_cmd->add_option("--out", detect.out, "output prefix for <out>.csv and <out>.json");

  cmlab::OcbCommand ocb;
  bool strict = false;
  auto* ocb_cmd = app.add_subcommand("ocb", "occupied channel bandwidth check");
  ocb_cmd->add_option("--sequence", ocb.sequence, "prach or pucch")->check(CLI::IsMember({"prach", "pucch"}));
  ocb_cmd->add_option("--reps", ocb.reps, "PRACH repetitions")->check(CLI::PositiveNumber);
  ocb_cmd->add_option("--prbs", ocb.prbs, "interlace PRBs")->check(CLI::PositiveNumber);
  ocb_cmd->add_option("--stride", ocb.stride, "interlace PRB stride (0: SCS default)");
  ocb_cmd->add_option("--scs-khz", ocb.scs_khz, "subcarrier spacing in kHz")->check(CLI::IsMember({15, 30}));
  ocb_cmd->add_option("--nominal-bw-hz", ocb.nominal_bw_hz, "nominal channel bandwidth in Hz");
  ocb_cmd->add_flag("--strict", strict, "exit with status 3 when the check fails");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cm_cmd) {
      const auto run = cmlab::run_cm(cm);
      print_warning(run.ocb);
      std::printf("population %zu  p95 CM %.4f dB  config_hash %s\n", run.stats.population.size(),
                  run.stats.percentile_95, run.summary.at("config_hash").get<std::string>().c_str());
    } else if (*search_cmd) {
      const auto run = cmlab::run_search(search);
      std::cout << run.report.dump(2) << '\n';
    } else if (*detect_cmd) {
      if (!replay.empty()) {
        const std::string out = detect.out;
        detect = cmlab::detect_command_from_json(cmlab::read_json(replay).at("config"));
        detect.out = out;
      } else {
        detect.taps = cmlab::parse_taps(taps);
        if (thr_opt->count() > 0) detect.threshold = threshold;
      }
      const auto run = cmlab::run_detect(detect);
      print_warning(run.ocb);
      std::printf("threshold %.6g  config_hash %s\n", run.stats.threshold,
                  run.manifest.at("config_hash").get<std::string>().c_str());
      for (const auto& p : run.stats.points) {
        std::printf("snr_db %g  miss %.6f  fa %.6f  trials %zu\n", p.snr_db, p.miss_rate, p.fa_rate, p.trials);
      }
    } else if (*ocb_cmd) {
      const auto verdict = cmlab::check_ocb(cmlab::ocb_map(ocb));
      print_warning(verdict);
      std::cout << cmlab::ocb_report(verdict).dump(2) << '\n';
      if (strict && !verdict.pass) return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
