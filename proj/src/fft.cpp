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

#include "cmlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace cmlab::fft {

namespace {

// FFTW's planner is not thread-safe, executing a finished plan is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign, bool in_place) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(n, sign, in_place);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // FFTW_ESTIMATE never touches the arrays, so scratch buffers are fine here.
    auto* a = fftw_alloc_complex(n);
    auto* b = in_place ? a : fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), a, b, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!in_place) fftw_free(b);
    fftw_free(a);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, int, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(std::span<const Complex> in, std::span<Complex> out, int sign) {
  if (in.empty()) throw std::invalid_argument("fft of empty input");
  fftw_plan plan = cache().get(in.size(), sign, in.data() == out.data());
  // std::complex<double> is layout-compatible with fftw_complex.
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

ComplexSeq forward(std::span<const Complex> in) {
  ComplexSeq out(in.size());
  execute(in, out, FFTW_FORWARD);
  return out;
}

ComplexSeq inverse(std::span<const Complex> in) {
  ComplexSeq out(in.size());
  execute(in, out, FFTW_BACKWARD);
  return out;
}

void forward_inplace(std::span<Complex> data) { execute(data, data, FFTW_FORWARD); }
void inverse_inplace(std::span<Complex> data) { execute(data, data, FFTW_BACKWARD); }

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace cmlab::fft
