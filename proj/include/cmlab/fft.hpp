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

#include <span>

#include "cmlab/types.hpp"

namespace cmlab::fft {

// Thin wrapper over FFTW. Plans are cached per (size, direction) and shared
// between threads; execution uses the new-array interface so concurrent calls
// are safe.
//
// Conventions (both unnormalized):
//   forward: X[k] = sum_m x[m] e^{-j 2 pi m k / n}
//   inverse: x[m] = sum_k X[k] e^{+j 2 pi m k / n}
// so inverse(forward(x)) == n * x.

ComplexSeq forward(std::span<const Complex> in);
ComplexSeq inverse(std::span<const Complex> in);

void forward_inplace(std::span<Complex> data);
void inverse_inplace(std::span<Complex> data);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

}  // namespace cmlab::fft
