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

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cmlab/types.hpp"

namespace cmlab {

// ---------------------------------------------------------------------------
// Zadoff-Chu family
// ---------------------------------------------------------------------------

struct ZcParams {
  int length = kPrachLength;
  int root = 1;
};

/// Generic Zadoff-Chu sequence
///   c_k = exp(j pi k^2 r / L)       for even L
///   c_k = exp(j pi k (k+1) r / L)   for odd L
/// Throws std::invalid_argument when L < 1 or r == 0 (mod L).
ComplexSeq gen_zc(const ZcParams& params);

struct PrachPreambleSpec {
  int root = 1;          ///< physical root index u in [1, 138]
  int cyclic_shift = 0;  ///< C_v in [0, 138]
};

/// x_u(i) = exp(-j pi u i (i+1) / 139); the PRACH specialization of gen_zc
/// with root -u.
ComplexSeq gen_prach_root(int root);

/// x_{u,v}(n) = x_u((n + C_v) mod 139).
ComplexSeq gen_prach_preamble(const PrachPreambleSpec& spec);

/// Unnormalized DFT with the negative exponent:
///   y(n) = sum_m x(m) exp(-j 2 pi m n / L)
ComplexSeq to_freq(std::span<const Complex> seq);

// ---------------------------------------------------------------------------
// Length-12 computer generated sequences
// ---------------------------------------------------------------------------

inline constexpr int kCgsBaseCount = 30;

/// Immutable table of 30 rows x 12 quarter-pi phase indices; element n of
/// row b is exp(j pi phi_b(n) / 4).
class CgsTable {
 public:
  using Row = std::array<int, kPrbSize>;

  /// Parses a whitespace-separated text table. Lines starting with '#' are
  /// comments. Throws std::runtime_error on a missing file or malformed content.
  static CgsTable load(const std::filesystem::path& path);
  static CgsTable parse(const std::string& text);

  /// Table shipped with the library (data/cgs_length12.txt). The path can be
  /// overridden with the CMLAB_CGS_TABLE environment variable.
  static const CgsTable& bundled();

  const Row& phase_indices(int base) const;
  ComplexSeq sequence(int base) const;

  std::size_t size() const { return rows_.size(); }

 private:
  explicit CgsTable(std::vector<Row> rows) : rows_(std::move(rows)) {}
  std::vector<Row> rows_;
};

struct PucchBaseSpec {
  int base = 0;          ///< [0, 29]
  int cyclic_shift = 0;  ///< alpha in [0, 11]
};

/// Row `base` of the table with the cyclic-shift phase ramp applied.
ComplexSeq gen_pucch_base(const PucchBaseSpec& spec, const CgsTable& table = CgsTable::bundled());

/// Multiplies element K of a length-12 sequence by exp(j 2 pi cs K / 12).
/// In the time domain this is a circular rotation of the 12-point IDFT by cs.
ComplexSeq apply_cyclic_shift_phase(std::span<const Complex> seq, int cs);

}  // namespace cmlab
