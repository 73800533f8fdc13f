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

#include "cmlab/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cmlab {

Scs scs_from_khz(int khz) {
  if (khz == 15) return Scs::khz15;
  if (khz == 30) return Scs::khz30;
  throw std::invalid_argument("unsupported subcarrier spacing: " + std::to_string(khz) +
                              " kHz (expected 15 or 30)");
}

int scs_khz(Scs scs) { return scs == Scs::khz15 ? 15 : 30; }

double wrap_phase(double radians) {
  double w = std::remainder(radians, kTwoPi);  // [-pi, pi]
  if (w <= -kPi) w += kTwoPi;
  return w;
}

}  // namespace cmlab
