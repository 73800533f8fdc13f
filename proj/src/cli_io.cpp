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

#include "cmlab/cli_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cmlab {

using nlohmann::json;

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::prach_cm: return "prach_cm";
    case Scenario::pucch_cm: return "pucch_cm";
    case Scenario::phase_search: return "phase_search";
    case Scenario::detect_mc: return "detect_mc";
    case Scenario::ocb_check: return "ocb_check";
  }
  return "unknown";
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

// JSON has no NaN or infinity.
json json_number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

void header_line(std::ostream& os, const std::string& hash, std::uint64_t seed) {
  os << "# config_hash=" << hash << " seed=" << seed << '\n';
}

std::optional<PhasePlan> load_optional_plan(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_plan(path);
}

json plan_or_null(const std::optional<PhasePlan>& p) { return p ? json(*p) : json(nullptr); }

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

// ---------------------------------------------------------------------------
// cm
// ---------------------------------------------------------------------------

json command_json(const CmCommand& c) {
  return {{"sequence", c.sequence}, {"reps", c.reps},         {"prbs", c.prbs},
          {"stride", c.stride},     {"scs_khz", c.scs_khz},   {"roots", c.roots},
          {"plan_file", c.plan_file}, {"fft_size", c.fft_size}, {"seed", c.seed}};
}

CmCommand cm_command_from_json(const json& j) {
  CmCommand c;
  get_if(j, "sequence", c.sequence);
  get_if(j, "reps", c.reps);
  get_if(j, "prbs", c.prbs);
  get_if(j, "stride", c.stride);
  get_if(j, "scs_khz", c.scs_khz);
  get_if(j, "roots", c.roots);
  get_if(j, "plan_file", c.plan_file);
  get_if(j, "fft_size", c.fft_size);
  get_if(j, "seed", c.seed);
  return c;
}

void write_cm_csv(std::ostream& os, const CmStats& stats, const std::string& hash, std::uint64_t seed) {
  header_line(os, hash, seed);
  os << "sequence_id,rcm_db,cm_db\n";
  for (const auto& s : stats.population) os << s.id << ',' << num(s.rcm_db) << ',' << num(s.cm_db) << '\n';
}

CmRun run_cm(const CmCommand& cmd) {
  const Scs scs = scs_from_khz(cmd.scs_khz);
  const auto plan = load_optional_plan(cmd.plan_file);
  CmRun run{CmStats{}, json::object(), OcbVerdict{}};
  Scenario scenario;
  if (cmd.sequence == "prach") {
    scenario = Scenario::prach_cm;
    PrachPopulationConfig cfg;
    cfg.reps = cmd.reps;
    cfg.scs = scs;
    cfg.roots = cmd.roots;
    cfg.plan = plan;
    cfg.fft_size = cmd.fft_size;
    run.stats = cm_distribution(prach_population(cfg));
    run.ocb = check_ocb(build_prach_map(to_freq(gen_prach_root(1)), cmd.reps, scs));
  } else if (cmd.sequence == "pucch") {
    scenario = Scenario::pucch_cm;
    PucchPopulationConfig cfg;
    cfg.prbs = cmd.prbs;
    cfg.stride = cmd.stride != 0 ? cmd.stride : default_interlace_stride(scs);
    cfg.scs = scs;
    cfg.plan = plan;
    cfg.fft_size = cmd.fft_size;
    run.stats = cm_distribution(pucch_population(cfg));
    const std::vector<ComplexSeq> prbs(static_cast<std::size_t>(cmd.prbs), CgsTable::bundled().sequence(0));
    run.ocb = check_ocb(place_prb_copies(prbs, 0, cfg.stride, scs));
  } else {
    throw std::invalid_argument("unknown sequence '" + cmd.sequence + "' (expected prach or pucch)");
  }

  const json config = command_json(cmd);
  const std::string hash = config_hash(config);
  std::vector<double> cms;
  for (const auto& s : run.stats.population) cms.push_back(s.cm_db);
  json ccdf = json::array();
  for (const auto& p : run.stats.ccdf) ccdf.push_back({{"threshold_db", p.threshold_db}, {"exceedance", p.exceedance}});
  run.summary = {{"scenario", to_string(scenario)},
                 {"config", config},
                 {"config_hash", hash},
                 {"seed", cmd.seed},
                 {"plan", plan_or_null(plan)},
                 {"population", cms.size()},
                 {"percentile_95_cm_db", run.stats.percentile_95},
                 {"min_cm_db", *std::min_element(cms.begin(), cms.end())},
                 {"max_cm_db", *std::max_element(cms.begin(), cms.end())},
                 {"mean_cm_db", std::accumulate(cms.begin(), cms.end(), 0.0) / static_cast<double>(cms.size())},
                 {"ccdf", ccdf},
                 {"ocb", ocb_report(run.ocb)}};

  if (!cmd.out.empty()) {
    std::ostringstream csv;
    write_cm_csv(csv, run.stats, hash, cmd.seed);
    write_text(cmd.out + ".csv", csv.str());
    write_json(cmd.out + ".json", run.summary);
  }
  return run;
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

json command_json(const SearchCommand& c) {
  return {{"target", c.target},     {"method", c.method},     {"reps", c.reps},       {"n_phases", c.n_phases},
          {"percentile", c.percentile}, {"roots", c.roots},   {"base", c.base},       {"alpha", c.alpha},
          {"prbs", c.prbs},         {"stride", c.stride},     {"mode", c.mode},       {"shift_set", c.shift_set},
          {"budget", c.budget},     {"restarts", c.restarts}, {"fft_size", c.fft_size}, {"seed", c.seed},
          {"candidates", c.candidates}};
}

SearchCommand search_command_from_json(const json& j) {
  SearchCommand c;
  get_if(j, "target", c.target);
  get_if(j, "method", c.method);
  get_if(j, "reps", c.reps);
  get_if(j, "n_phases", c.n_phases);
  get_if(j, "percentile", c.percentile);
  get_if(j, "roots", c.roots);
  get_if(j, "base", c.base);
  get_if(j, "alpha", c.alpha);
  get_if(j, "prbs", c.prbs);
  get_if(j, "stride", c.stride);
  get_if(j, "mode", c.mode);
  get_if(j, "shift_set", c.shift_set);
  get_if(j, "budget", c.budget);
  get_if(j, "restarts", c.restarts);
  get_if(j, "fft_size", c.fft_size);
  get_if(j, "seed", c.seed);
  get_if(j, "candidates", c.candidates);
  return c;
}

void write_candidates_csv(std::ostream& os, const SearchResult& result, const std::string& hash, std::uint64_t seed) {
  header_line(os, hash, seed);
  os << "plan,cm_db\n";
  for (const auto& c : result.candidates) {
    std::string plan;
    const std::size_t n = c.plan.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i != 0) plan += ';';
      plan += c.plan.is_rotation() ? num(c.plan.phases()[i]) : std::to_string(c.plan.shifts()[i]);
    }
    os << plan << ',' << num(c.cm_db) << '\n';
  }
}

SearchRun run_search(const SearchCommand& cmd) {
  if (cmd.method != "auto" && cmd.method != "exhaustive" && cmd.method != "greedy") {
    throw std::invalid_argument("unknown method '" + cmd.method + "' (expected auto, exhaustive or greedy)");
  }
  GreedyOptions greedy;
  if (cmd.restarts != 0) greedy.restarts = cmd.restarts;
  else if (cmd.target == "prach") greedy.restarts = kPrachGreedyRestarts;
  greedy.seed = cmd.seed;

  SearchRun run;
  json extra = json::object();
  if (cmd.target == "prach") {
    PrachSearchOptions o;
    o.roots = cmd.roots;
    o.reps = cmd.reps;
    o.n_phases = cmd.n_phases;
    o.fft_size = cmd.fft_size;
    o.percentile = cmd.percentile;
    o.greedy = greedy;
    o.keep_candidates = cmd.candidates;
    const double plans = std::pow(static_cast<double>(cmd.n_phases), cmd.reps);
    if (cmd.method == "greedy" ||
        (cmd.method == "auto" && plans > static_cast<double>(kMaxPrachExhaustivePlans))) {
      o.method = SearchMethod::greedy;
    } else {
      o.method = SearchMethod::exhaustive;
    }
    run.result = search_prach_phases(o);
  } else if (cmd.target == "alt-a") {
    AltAOptions o;
    o.base = {cmd.base, cmd.alpha};
    o.prbs = cmd.prbs;
    o.stride = cmd.stride;
    o.shift_set = cmd.shift_set;
    o.fft_size = cmd.fft_size;
    if (cmd.budget != 0) o.budget = cmd.budget;
    if (cmd.mode == "arithmetic") {
      o.mode = AltAMode::arithmetic_family;
    } else if (cmd.mode == "permutation") {
      o.mode = AltAMode::full_permutation;
    } else {
      throw std::invalid_argument("unknown alt-a mode '" + cmd.mode + "' (expected arithmetic or permutation)");
    }
    o.keep_candidates = true;
    run.result = search_alt_a(o);
    if (o.mode == AltAMode::arithmetic_family) {
      const auto per_step = best_cm_per_step(run.result);
      std::vector<int> order(kPrbSize);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return per_step[static_cast<std::size_t>(a)] < per_step[static_cast<std::size_t>(b)];
      });
      json steps = json::array();
      for (double v : per_step) steps.push_back(json_number(v));
      std::vector<int> lowest(order.begin(), order.begin() + 4);
      std::sort(lowest.begin(), lowest.end());
      extra["step_best_cm_db"] = steps;
      extra["step_ranking"] = order;
      extra["lowest_cm_steps"] = lowest;
    }
    if (!cmd.candidates) run.result.candidates.clear();
  } else if (cmd.target == "alt-b") {
    AltBOptions o;
    o.base = {cmd.base, cmd.alpha};
    o.prbs = cmd.prbs;
    o.n_phases = cmd.n_phases;
    o.stride = cmd.stride;
    o.fft_size = cmd.fft_size;
    o.greedy = greedy;
    if (cmd.budget != 0) o.budget = cmd.budget;
    const double plans = std::pow(static_cast<double>(cmd.n_phases), cmd.prbs - 1);
    if (cmd.method == "exhaustive" && plans > static_cast<double>(o.budget)) {
      throw std::invalid_argument("exhaustive alt-b search needs " + std::to_string(static_cast<long long>(plans)) +
                                  " evaluations, over the budget of " + std::to_string(o.budget));
    }
    if (cmd.method == "greedy") o.budget = 1;
    run.result = search_alt_b(o);
  } else {
    throw std::invalid_argument("unknown search target '" + cmd.target + "' (expected prach, alt-a or alt-b)");
  }

  const json config = command_json(cmd);
  const std::string hash = config_hash(config);
  run.report = {{"scenario", to_string(Scenario::phase_search)},
                {"config", config},
                {"config_hash", hash},
                {"seed", cmd.seed},
                {"target", cmd.target},
                {"method", to_string(run.result.method)},
                {"evaluations", run.result.evaluations},
                {"best_plan", run.result.best_plan},
                {"best_cm_db", run.result.best_cm_db},
                {"truncated", run.result.truncated}};
  run.report.update(extra);

  if (!cmd.out.empty()) {
    json plan = run.result.best_plan;
    plan["config_hash"] = hash;
    plan["seed"] = cmd.seed;
    write_json(cmd.out + ".plan.json", plan);
    write_json(cmd.out + ".report.json", run.report);
    if (cmd.candidates) {
      std::ostringstream csv;
      write_candidates_csv(csv, run.result, hash, cmd.seed);
      write_text(cmd.out + ".candidates.csv", csv.str());
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

std::vector<Tap> parse_taps(const std::string& text) {
  std::vector<Tap> taps;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("tap '" + item + "' is not delay_s:power_db");
    try {
      std::size_t used = 0;
      Tap t;
      t.delay_s = std::stod(item.substr(0, colon), &used);
      t.power_db = std::stod(item.substr(colon + 1));
      taps.push_back(t);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("tap '" + item + "' is not delay_s:power_db");
    }
  }
  return taps;
}

json command_json(const DetectCommand& c) {
  json snr = json::array();
  for (double s : c.snr_db) snr.push_back(json_number(s));
  json taps = json::array();
  for (const auto& t : c.taps) taps.push_back({{"delay_s", t.delay_s}, {"power_db", t.power_db}});
  return {{"reps", c.reps},
          {"plan_file", c.plan_file},
          {"plan", plan_or_null(c.plan)},
          {"n_cs", c.n_cs},
          {"roots", c.roots},
          {"scs_khz", c.scs_khz},
          {"snr_db", snr},
          {"trials", c.trials},
          {"fa_trials", c.fa_trials},
          {"threshold", c.threshold ? json(*c.threshold) : json(nullptr)},
          {"calibration_trials", c.calibration_trials},
          {"target_fa", c.target_fa},
          {"ifft_size", c.ifft_size},
          {"delay_s", c.delay_s},
          {"taps", taps},
          {"fading", c.fading},
          {"seed", c.seed}};
}

DetectCommand detect_command_from_json(const json& j) {
  DetectCommand c;
  get_if(j, "reps", c.reps);
  get_if(j, "plan_file", c.plan_file);
  if (j.contains("plan") && !j.at("plan").is_null()) c.plan = j.at("plan").get<PhasePlan>();
  get_if(j, "n_cs", c.n_cs);
  get_if(j, "roots", c.roots);
  get_if(j, "scs_khz", c.scs_khz);
  if (j.contains("snr_db")) {
    c.snr_db.clear();
    for (const auto& s : j.at("snr_db")) c.snr_db.push_back(number_from_json(s));
  }
  get_if(j, "trials", c.trials);
  get_if(j, "fa_trials", c.fa_trials);
  if (j.contains("threshold") && !j.at("threshold").is_null()) c.threshold = j.at("threshold").get<double>();
  get_if(j, "calibration_trials", c.calibration_trials);
  get_if(j, "target_fa", c.target_fa);
  get_if(j, "ifft_size", c.ifft_size);
  get_if(j, "delay_s", c.delay_s);
  if (j.contains("taps")) {
    for (const auto& t : j.at("taps")) c.taps.push_back({t.at("delay_s").get<double>(), t.at("power_db").get<double>()});
  }
  get_if(j, "fading", c.fading);
  get_if(j, "seed", c.seed);
  return c;
}

McConfig mc_config(const DetectCommand& cmd) {
  McConfig mc;
  mc.link.reps = cmd.reps;
  mc.link.plan = cmd.plan_file.empty() ? cmd.plan : std::optional<PhasePlan>(load_plan(cmd.plan_file));
  mc.link.cell = CellPreambleSet(cmd.n_cs, cmd.roots);
  mc.link.scs = scs_from_khz(cmd.scs_khz);
  mc.link.ifft_size = cmd.ifft_size;
  mc.link.taps = cmd.taps;
  mc.link.fading = cmd.fading;
  mc.link.delay_s = cmd.delay_s;
  mc.link.cp_len_s = normal_cp_seconds(mc.link.scs);
  mc.snr_db = cmd.snr_db;
  mc.trials = cmd.trials;
  mc.fa_trials = cmd.fa_trials;
  mc.seed = cmd.seed;
  mc.threshold = cmd.threshold;
  mc.calibration_trials = cmd.calibration_trials;
  mc.target_fa = cmd.target_fa;
  return mc;
}

void write_mc_csv(std::ostream& os, const McStats& stats, const std::string& hash, std::uint64_t seed) {
  header_line(os, hash, seed);
  os << "snr_db,miss_rate,fa_rate,trials,ta_p50_s,ta_p95_s\n";
  for (const auto& p : stats.points) {
    os << num(p.snr_db) << ',' << num(p.miss_rate) << ',' << num(p.fa_rate) << ',' << p.trials << ','
       << num(p.ta_p50_s) << ',' << num(p.ta_p95_s) << '\n';
  }
}

DetectRun run_detect(const DetectCommand& cmd) {
  // The manifest carries the plan itself so a replay needs no plan file.
  DetectCommand resolved = cmd;
  if (!cmd.plan_file.empty()) {
    resolved.plan = load_plan(cmd.plan_file);
    resolved.plan_file.clear();
  }
  resolved.out.clear();
  const McConfig mc = mc_config(resolved);

  DetectRun run;
  run.ocb = check_ocb(build_prach_map(to_freq(gen_prach_root(1)), mc.link.reps, mc.link.scs));
  run.stats = run_mc(mc);

  const json config = command_json(resolved);
  const std::string hash = config_hash(config);
  json points = json::array();
  for (const auto& p : run.stats.points) {
    points.push_back({{"snr_db", json_number(p.snr_db)},
                      {"trials", p.trials},
                      {"misses", p.misses},
                      {"miss_rate", p.miss_rate},
                      {"fa_trials", p.fa_trials},
                      {"false_alarms", p.false_alarms},
                      {"fa_rate", p.fa_rate},
                      {"ta_p50_s", json_number(p.ta_p50_s)},
                      {"ta_p95_s", json_number(p.ta_p95_s)}});
  }
  run.manifest = {{"scenario", to_string(Scenario::detect_mc)},
                  {"config", config},
                  {"config_hash", hash},
                  {"seed", cmd.seed},
                  {"threshold", run.stats.threshold},
                  {"points", points},
                  {"ocb", ocb_report(run.ocb)}};

  if (!cmd.out.empty()) {
    std::ostringstream csv;
    write_mc_csv(csv, run.stats, hash, cmd.seed);
    write_text(cmd.out + ".csv", csv.str());
    write_json(cmd.out + ".json", run.manifest);
  }
  return run;
}

// ---------------------------------------------------------------------------
// ocb
// ---------------------------------------------------------------------------

ResourceMap ocb_map(const OcbCommand& cmd) {
  const Scs scs = scs_from_khz(cmd.scs_khz);
  if (cmd.sequence == "prach") {
    return build_prach_map(to_freq(gen_prach_root(1)), cmd.reps, scs, std::nullopt, cmd.nominal_bw_hz);
  }
  if (cmd.sequence == "pucch") {
    const int stride = cmd.stride != 0 ? cmd.stride : default_interlace_stride(scs);
    if (cmd.prbs < 1) throw std::invalid_argument("PRB count must be positive");
    const std::vector<ComplexSeq> prbs(static_cast<std::size_t>(cmd.prbs), CgsTable::bundled().sequence(0));
    return place_prb_copies(prbs, 0, stride, scs, cmd.nominal_bw_hz);
  }
  throw std::invalid_argument("unknown sequence '" + cmd.sequence + "' (expected prach or pucch)");
}

json ocb_report(const OcbVerdict& v) {
  return {{"occupied_bw_hz", v.occupied_bw_hz},
          {"lower_bound_hz", v.lower_bound_hz},
          {"upper_bound_hz", v.upper_bound_hz},
          {"pass", v.pass}};
}

std::string ocb_warning(const OcbVerdict& v) {
  if (v.pass) return {};
  char buf[160];
  std::snprintf(buf, sizeof buf, "warning: occupied bandwidth %.3f MHz is outside [%.3f, %.3f] MHz", v.occupied_bw_hz / 1e6,
                v.lower_bound_hz / 1e6, v.upper_bound_hz / 1e6);
  return buf;
}

}  // namespace cmlab
