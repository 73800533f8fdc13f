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

#include <complex>
#include <numbers>
#include <string_view>
#include <vector>

namespace cmlab {

using Complex = std::complex<double>;

/// Ordered sequence of complex samples. Used both for code sequences and for
/// time-domain waveforms.
using ComplexSeq = std::vector<Complex>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Length of the long PRACH Zadoff-Chu sequence.
inline constexpr int kPrachLength = 139;
/// Subcarriers per physical resource block, also the PUCCH base sequence length.
inline constexpr int kPrbSize = 12;

enum class Scs { khz15, khz30 };

constexpr double scs_hz(Scs scs) { return scs == Scs::khz15 ? 15e3 : 30e3; }

Scs scs_from_khz(int khz);
int scs_khz(Scs scs);

/// Normal cyclic prefix duration for a single symbol: 144 samples at a 2048-point
/// symbol, i.e. 144 / (2048 * scs).
constexpr double normal_cp_seconds(Scs scs) { return 144.0 / (2048.0 * scs_hz(scs)); }

/// Wraps an angle into (-pi, pi].
double wrap_phase(double radians);

}  // namespace cmlab
