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

#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

#include "cmlab/mapping.hpp"
#include "cmlab/seq_core.hpp"
#include "cmlab/waveform_metrics.hpp"
#include "oracles.hpp"

using namespace cmlab;

namespace {

ComplexSeq prach_freq(int u = 1) { return to_freq(gen_prach_root(u)); }

std::vector<ComplexSeq> prb_copies(int m, int base = 0) {
  return std::vector<ComplexSeq>(static_cast<std::size_t>(m), CgsTable::bundled().sequence(base));
}

}  // namespace

TEST_CASE("resource map: ordering and finiteness are enforced") {
  CHECK_NOTHROW(ResourceMap({{0, {1, 0}}, {3, {0, 1}}}, Scs::khz15, 20e6));
  CHECK_THROWS_AS(ResourceMap({{3, {1, 0}}, {3, {0, 1}}}, Scs::khz15, 20e6), std::invalid_argument);
  CHECK_THROWS_AS(ResourceMap({{4, {1, 0}}, {3, {0, 1}}}, Scs::khz15, 20e6), std::invalid_argument);
  CHECK_THROWS_AS(ResourceMap({{0, {NAN, 0}}}, Scs::khz15, 20e6), std::invalid_argument);
  CHECK_THROWS_AS(ResourceMap({{0, {INFINITY, 0}}}, Scs::khz15, 20e6), std::invalid_argument);
}

TEST_CASE("prach map: contiguous repetitions") {
  const auto y = prach_freq();
  const auto m1 = build_prach_map(y, 1, Scs::khz15, 0);
  REQUIRE(m1.size() == 139);
  for (int k = 0; k < 139; ++k) {
    CHECK(m1.entries()[static_cast<std::size_t>(k)].subcarrier == k);
    CHECK(m1.entries()[static_cast<std::size_t>(k)].value == y[static_cast<std::size_t>(k)]);
  }
  const auto m8 = build_prach_map(y, 8, Scs::khz15, 10);
  CHECK(m8.span() == 1112);
  CHECK(m8.min_subcarrier() == 10);
  CHECK(m8.copy_count() == 8);
  for (std::size_t n = 0; n < 8; ++n) {
    const auto [b, e] = m8.copy_range(n);
    CHECK(e - b == 139);
    for (std::size_t k = 0; k < 139; ++k) {
      CHECK(m8.entries()[b + k].subcarrier == static_cast<int>(10 + 139 * n + k));
      CHECK(m8.entries()[b + k].value == y[k]);
    }
  }
  CHECK(build_prach_map(y, 4, Scs::khz30).span() == 556);
  // Default start centres the span in the 20 MHz grid.
  const auto centred = build_prach_map(y, 8, Scs::khz15);
  CHECK(centred.min_subcarrier() == (1333 - 1112) / 2);

  CHECK_THROWS_AS(build_prach_map(y, 0, Scs::khz15), std::invalid_argument);
  CHECK_THROWS_AS(build_prach_map(y, 1, Scs::khz15, -1), std::invalid_argument);
  CHECK_THROWS_AS(build_prach_map(ComplexSeq(138), 1, Scs::khz15), std::invalid_argument);
}

TEST_CASE("interlace map: stride rule and partition") {
  const auto m = build_interlace_map(prb_copies(10), 0, 10);
  REQUIRE(m.size() == 120);
  std::set<int> prbs;
  for (const auto& e : m.entries()) prbs.insert(e.subcarrier / 12);
  CHECK(prbs == std::set<int>{0, 10, 20, 30, 40, 50, 60, 70, 80, 90});
  CHECK(m.span() == 12 * 91);
  CHECK(m.span() * 15e3 == doctest::Approx(16.38e6));
  CHECK(build_interlace_map(prb_copies(11), 2, 10).max_subcarrier() == 12 * (2 + 10 * 10) + 11);

  // PRB k copies are placed in listed order.
  std::vector<ComplexSeq> distinct;
  for (int b = 0; b < 10; ++b) distinct.push_back(CgsTable::bundled().sequence(b));
  const auto md = build_interlace_map(distinct, 3, 10);
  for (std::size_t k = 0; k < 10; ++k) {
    const auto [b, e] = md.copy_range(k);
    CHECK(md.entries()[b].subcarrier == static_cast<int>(12 * (3 + 10 * k)));
    CHECK(oracle::max_abs_diff(std::vector<Complex>{md.entries()[b + 5].value}, std::vector<Complex>{distinct[k][5]}) ==
          0.0);
  }

  // Interlaces below the stride partition the PRBs.
  for (int stride : {5, 10}) {
    std::set<int> used;
    std::size_t total = 0;
    for (int i = 0; i < stride; ++i) {
      const auto m_i = build_interlace_map(prb_copies(10), i, stride);
      for (const auto& e : m_i.entries()) {
        used.insert(e.subcarrier);
        ++total;
      }
    }
    CHECK(used.size() == total);
  }

  CHECK_THROWS_AS(build_interlace_map(prb_copies(9), 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(build_interlace_map(prb_copies(12), 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(build_interlace_map({ComplexSeq(11)}, 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(build_interlace_map(prb_copies(10), 0, 0), std::invalid_argument);
  CHECK(default_interlace_stride(Scs::khz15) == 10);
  CHECK(default_interlace_stride(Scs::khz30) == 5);
}

TEST_CASE("phase plans: storage, application, conjugate") {
  const auto p = PhasePlan::rotation({0.0, -kPi / 2, 3 * kPi, -kPi});
  CHECK(p.phases()[2] == doctest::Approx(kPi));
  CHECK(p.phases()[3] == doctest::Approx(kPi));
  for (double v : p.phases()) CHECK((v > -kPi && v <= kPi));
  CHECK(PhasePlan::cyclic_shifts({13, -1}).shifts() == std::vector<int>{1, 11});

  const auto map = build_prach_map(prach_freq(5), 4, Scs::khz15, 0);
  const auto id = apply_phase_plan(map, PhasePlan::identity(4));
  for (std::size_t i = 0; i < map.size(); ++i) CHECK(id.entries()[i].value == map.entries()[i].value);

  const auto plan = PhasePlan::rotation({0, -kPi / 2, -kPi / 2, 0});
  const auto rot = apply_phase_plan(map, plan);
  for (std::size_t n = 0; n < 4; ++n) {
    const auto [b, e] = map.copy_range(n);
    for (std::size_t i = b; i < e; ++i) {
      CHECK(std::abs(rot.entries()[i].value - map.entries()[i].value * std::polar(1.0, plan.phases()[n])) < 1e-12);
      CHECK(std::abs(std::abs(rot.entries()[i].value) - std::abs(map.entries()[i].value)) < 1e-12);
    }
  }
  const auto back = apply_phase_plan(rot, plan.conjugate());
  for (std::size_t i = 0; i < map.size(); ++i) CHECK(std::abs(back.entries()[i].value - map.entries()[i].value) < 1e-12);

  // A global constant only changes the waveform by a unit phase.
  const auto shifted = apply_phase_plan(map, PhasePlan::rotation({0.7, 0.7 - kPi / 2, 0.7 - kPi / 2, 0.7}));
  const auto v1 = synthesize(rot, default_synth_config(rot));
  const auto v2 = synthesize(shifted, default_synth_config(shifted));
  const Complex g = std::polar(1.0, 0.7);
  CHECK(oracle::max_abs_diff(v2, [&] {
          ComplexSeq r(v1.size());
          for (std::size_t i = 0; i < r.size(); ++i) r[i] = v1[i] * g;
          return r;
        }()) < 1e-12);
  CHECK(measure_cm(v1).cm_db == doctest::Approx(measure_cm(v2).cm_db).epsilon(1e-12));

  // Shift plans ramp each PRB.
  const auto copies = prb_copies(3, 7);
  const auto shifted_prbs = apply_phase_plan(copies, PhasePlan::cyclic_shifts({0, 5, 11}));
  CHECK(oracle::max_abs_diff(shifted_prbs[1], apply_cyclic_shift_phase(copies[1], 5)) < 1e-15);
  CHECK(oracle::max_abs_diff(shifted_prbs[2], apply_cyclic_shift_phase(copies[2], 11)) < 1e-15);

  CHECK_THROWS_AS(apply_phase_plan(map, PhasePlan::identity(3)), std::invalid_argument);
  CHECK_THROWS_AS(apply_phase_plan(copies, PhasePlan::cyclic_shifts({1, 2})), std::invalid_argument);
}

TEST_CASE("phase plans: json round trip and plan files") {
  const auto plan = PhasePlan::rotation({0, -kPi / 2, -kPi / 2, kPi, kPi, -kPi / 2, -kPi / 2, 0});
  const nlohmann::json j = plan;
  CHECK(j.at("kind") == "per_repetition_rotation");
  const auto back = nlohmann::json::parse(j.dump()).get<PhasePlan>();
  REQUIRE(back.size() == plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) CHECK(std::abs(back.phases()[i] - plan.phases()[i]) < 1e-12);

  const auto shifts = cs_step_plan(4, 5, 10);
  const auto sback = nlohmann::json::parse(nlohmann::json(shifts).dump()).get<PhasePlan>();
  CHECK(sback.shifts() == shifts.shifts());
  CHECK(sback.kind() == PhasePlan::Kind::cyclic_shift_plan);

  CHECK_THROWS(nlohmann::json::parse(R"({"kind":"cyclic_shift_plan","offsets":[1.5]})").get<PhasePlan>());
  CHECK_THROWS(nlohmann::json::parse(R"({"kind":"bogus","offsets":[1]})").get<PhasePlan>());

  const auto path = (std::filesystem::temp_directory_path() / "cmlab_plan_test.json").string();
  save_plan(plan, path);
  CHECK(load_plan(path).phases() == back.phases());
  std::filesystem::remove(path);
  CHECK_THROWS(load_plan("/nonexistent/plan.json"));
}

TEST_CASE("cs_step_plan: arithmetic family") {
  CHECK(cs_step_plan(4, 5, 10).shifts() == std::vector<int>{4, 9, 2, 7, 0, 5, 10, 3, 8, 1});
  CHECK(cs_step_plan(3, 0, 10).shifts() == std::vector<int>(10, 3));
  for (int delta = 0; delta < 12; ++delta) {
    const auto s = cs_step_plan(7, delta, 12).shifts();
    const std::set<int> distinct(s.begin(), s.end());
    if (std::gcd(delta, 12) == 1) {
      CHECK(distinct.size() == 12);
    } else {
      CHECK(distinct.size() < 12);
    }
  }
  CHECK(cs_step_plan(-1, -5, 3).shifts() == std::vector<int>{11, 6, 1});
}

TEST_CASE("ocb rule") {
  const auto y = prach_freq();
  const auto single = check_ocb(build_prach_map(y, 1, Scs::khz15));
  CHECK(single.occupied_bw_hz == doctest::Approx(2.085e6));
  CHECK_FALSE(single.pass);
  CHECK(single.lower_bound_hz == doctest::Approx(16e6));
  CHECK(single.upper_bound_hz == doctest::Approx(20e6));
  const auto r8 = check_ocb(build_prach_map(y, 8, Scs::khz15));
  CHECK(r8.occupied_bw_hz == doctest::Approx(16.68e6));
  CHECK(r8.pass);
  CHECK(check_ocb(build_prach_map(y, 4, Scs::khz30)).pass);
  CHECK_FALSE(check_ocb(build_prach_map(y, 1, Scs::khz30)).pass);
  CHECK(check_ocb(build_interlace_map(prb_copies(10), 0, 10)).pass);
  CHECK(check_ocb(build_interlace_map(prb_copies(10), 0, 5, Scs::khz30)).pass);
  // Above the nominal bandwidth.
  CHECK_FALSE(check_ocb(build_prach_map(y, 10, Scs::khz15, 0)).pass);

  // Monotone in repetitions: once passing, more copies only fail on the upper bound.
  bool seen_pass = false;
  for (int r = 1; r <= 9; ++r) {
    const auto v = check_ocb(build_prach_map(y, r, Scs::khz15, 0));
    if (seen_pass) CHECK((v.pass || v.occupied_bw_hz > v.upper_bound_hz));
    seen_pass = seen_pass || v.pass;
  }
  CHECK_THROWS_AS(check_ocb(ResourceMap({}, Scs::khz15, 20e6)), std::invalid_argument);
}
