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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cmlab/fft.hpp"
#include "cmlab/waveform_metrics.hpp"
#include "oracles.hpp"

using namespace cmlab;

namespace {

ResourceMap prach(int u, int reps, int start = 0) {
  return build_prach_map(to_freq(gen_prach_root(u)), reps, Scs::khz15, start);
}

}  // namespace

TEST_CASE("synthesize: matches direct summation") {
  const auto map = prach(11, 2, 5);
  const auto v = synthesize(map, {1024, false, 0});
  CHECK(oracle::max_abs_diff(v, oracle::synthesize(map, 1024)) < 1e-12);
}

TEST_CASE("synthesize: single tone, linearity, Parseval, CP") {
  const ResourceMap tone({{17, {2.0, 0.0}}}, Scs::khz15, 20e6);
  const auto v = synthesize(tone, {256, false, 0});
  for (const auto& s : v) CHECK(std::abs(s) == doctest::Approx(2.0 / 256).epsilon(1e-12));

  const auto map = prach(3, 4, 0);
  const SynthConfig cfg = default_synth_config(map);
  const Complex a(0.3, -1.1);
  const auto va = synthesize(map.scaled(a), cfg);
  const auto v1 = synthesize(map, cfg);
  for (std::size_t i = 0; i < v1.size(); ++i) CHECK(std::abs(va[i] - a * v1[i]) < 1e-12);

  double grid = 0;
  for (const auto& e : map.entries()) grid += std::norm(e.value);
  double power = 0;
  for (const auto& s : v1) power += std::norm(s);
  power /= static_cast<double>(v1.size());
  const double n = static_cast<double>(cfg.fft_size);
  CHECK(power == doctest::Approx(grid / (n * n)).epsilon(1e-9));

  SynthConfig with_cp = cfg;
  with_cp.include_cp = true;
  const auto vc = synthesize(map, with_cp);
  REQUIRE(vc.size() == cfg.fft_size + cfg.cp_len);
  CHECK(cfg.cp_len == cfg.fft_size * 144 / 2048);
  for (std::size_t i = 0; i < cfg.cp_len; ++i) CHECK(vc[i] == v1[cfg.fft_size - cfg.cp_len + i]);

  CHECK_THROWS_AS(synthesize(map, {512, false, 0}), std::invalid_argument);
  CHECK_THROWS_AS(synthesize(map, {0, false, 0}), std::invalid_argument);
}

TEST_CASE("default synthesis size oversamples the span four times") {
  CHECK(default_synth_config(prach(1, 1)).fft_size == 1024);
  CHECK(default_synth_config(prach(1, 4)).fft_size == 4096);
  CHECK(default_synth_config(prach(1, 8)).fft_size == 8192);
  const auto m = build_interlace_map(std::vector<ComplexSeq>(10, CgsTable::bundled().sequence(0)), 0, 10);
  CHECK(default_synth_config(m).fft_size == 8192);
}

TEST_CASE("rcm: closed forms") {
  ComplexSeq constant(512);
  for (std::size_t t = 0; t < constant.size(); ++t) constant[t] = std::polar(3.0, 0.1 * static_cast<double>(t * t));
  CHECK(std::abs(compute_rcm(constant)) < 1e-12);

  // Two equal-power tones over whole beat periods.
  for (int n : {64, 1024}) {
    ComplexSeq two(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
      two[static_cast<std::size_t>(t)] = std::polar(1.0, kTwoPi * 3 * t / n) + std::polar(1.0, kTwoPi * 7 * t / n);
    }
    CHECK(compute_rcm(two) == doctest::Approx(10 * std::log10(2.5)).epsilon(1e-12));
    CHECK(std::abs(compute_rcm(two) - 3.979) < 0.01);
  }
  CHECK_THROWS_AS(compute_rcm(ComplexSeq(8)), std::invalid_argument);
  CHECK_THROWS_AS(compute_rcm(ComplexSeq{}), std::invalid_argument);
}

TEST_CASE("cm: linear map of rcm") {
  CHECK(compute_cm(1.52) == 0.0);
  CHECK(compute_cm(0.0) == doctest::Approx(-0.974).epsilon(1e-3));
  CHECK(compute_cm(3.08) == doctest::Approx(1.0));
  const auto r = measure_cm(synthesize(prach(9, 1), default_synth_config(prach(9, 1))));
  CHECK(r.cm_db == (r.rcm_db - 1.52) / 1.56);
}

TEST_CASE("cm: invariances") {
  const auto map = prach(23, 2, 0);
  const SynthConfig cfg = default_synth_config(map);
  const auto v = synthesize(map, cfg);
  const double base = compute_rcm(v);
  CHECK(base == doctest::Approx(oracle::rcm_db(v)).epsilon(1e-12));

  ComplexSeq scaled(v);
  for (auto& s : scaled) s *= Complex(-4.5, 2.0);
  CHECK(std::abs(compute_rcm(scaled) - base) < 1e-12);

  ComplexSeq rotated(v);
  std::rotate(rotated.begin(), rotated.begin() + 77, rotated.end());
  CHECK(std::abs(compute_rcm(rotated) - base) < 1e-12);

  const auto moved = synthesize(map.translated(300), cfg);
  CHECK(std::abs(compute_rcm(moved) - base) < 1e-9);
}

TEST_CASE("cm: oversampling convergence beyond 4x") {
  std::vector<ResourceMap> maps{prach(1, 1, 0), prach(50, 4, 0), prach(137, 8, 0)};
  std::vector<ComplexSeq> prbs;
  for (int k = 0; k < 10; ++k) prbs.push_back(apply_cyclic_shift_phase(CgsTable::bundled().sequence(5), (4 + 5 * k) % 12));
  maps.push_back(build_interlace_map(prbs, 0, 10));
  for (const auto& m : maps) {
    const std::size_t n4 = default_synth_config(m).fft_size;
    const double c4 = measure_cm(synthesize(m, {n4, false, 0})).cm_db;
    for (std::size_t mult : {2u, 4u}) {
      const double cn = measure_cm(synthesize(m, {n4 * mult, false, 0})).cm_db;
      CHECK(std::abs(cn - c4) < 0.05);
    }
  }
}

TEST_CASE("percentile and distribution") {
  CHECK(percentile_nearest_rank(std::vector<double>{4.2}, 95) == 4.2);
  std::vector<double> v(138);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  // ceil(0.95 * 138) = 132nd smallest.
  CHECK(percentile_nearest_rank(v, 95) == 131.0);
  CHECK(percentile_nearest_rank(std::vector<double>(100, 1.0), 95) == 1.0);
  std::vector<double> hundred(100);
  std::iota(hundred.begin(), hundred.end(), 1.0);
  CHECK(percentile_nearest_rank(hundred, 95) == 95.0);
  CHECK_THROWS(percentile_nearest_rank(std::vector<double>{}, 95));

  std::vector<CmSample> pop;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 5);
  for (int i = 0; i < 50; ++i) pop.push_back({"s" + std::to_string(i), 0.0, u(rng)});
  const auto a = cm_distribution(pop, {1.0, 2.5, 4.0});
  std::shuffle(pop.begin(), pop.end(), rng);
  const auto b = cm_distribution(pop, {1.0, 2.5, 4.0});
  CHECK(a.percentile_95 == b.percentile_95);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.ccdf[i].exceedance == b.ccdf[i].exceedance);
    const auto above = std::count_if(pop.begin(), pop.end(), [&](const CmSample& s) { return s.cm_db > a.ccdf[i].threshold_db; });
    CHECK(a.ccdf[i].exceedance == doctest::Approx(above / 50.0));
  }
  const auto one = cm_distribution({{"x", 0.0, 1.73}});
  CHECK(one.percentile_95 == 1.73);
  CHECK(one.ccdf.front().exceedance == 1.0);
  CHECK(one.ccdf.back().exceedance == 0.0);
  CHECK_THROWS(cm_distribution({}));
}

TEST_CASE("populations: direct synthesis oracle") {
  PrachPopulationConfig cfg;
  cfg.reps = 2;
  cfg.roots = {1, 70};
  const auto pop = prach_population(cfg);
  REQUIRE(pop.size() == 2);
  CHECK(pop[1].id == "u70");
  const auto m = build_prach_map(to_freq(gen_prach_root(70)), 2, Scs::khz15);
  const auto n = default_synth_config(m).fft_size;
  CHECK(pop[1].cm_db == doctest::Approx(oracle::cm_db(oracle::synthesize(m, n))).epsilon(1e-9));
  CHECK(all_prach_roots().size() == 138);
}

TEST_CASE("populations: repetition raises CM, interlace without plan is worse than one PRB") {
  PrachPopulationConfig one;
  const double p1 = cm_distribution(prach_population(one)).percentile_95;
  PrachPopulationConfig four;
  four.reps = 4;
  CHECK(cm_distribution(prach_population(four)).percentile_95 > p1 + 2.0);

  PucchPopulationConfig inter;
  const auto pucch = pucch_population(inter);
  CHECK(pucch.size() == 360);
  CHECK(pucch.front().id == "b0a0");
  double single = 0;
  for (int b = 0; b < 30; ++b) {
    std::vector<ResourceElement> e;
    const auto s = CgsTable::bundled().sequence(b);
    for (int k = 0; k < 12; ++k) e.push_back({k, s[static_cast<std::size_t>(k)]});
    const ResourceMap m(e, Scs::khz15, 20e6);
    single = std::max(single, measure_cm(synthesize(m, {256, false, 0})).cm_db);
  }
  CHECK(cm_distribution(pucch).percentile_95 > single + 3.0);

  PucchPopulationConfig bad;
  bad.plan = PhasePlan::identity(3);
  CHECK_THROWS_AS(pucch_population(bad), std::invalid_argument);
}
