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

#include "cmlab/seq_core.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cmlab/fft.hpp"

#ifndef CMLAB_DATA_DIR
#define CMLAB_DATA_DIR "data"
#endif

namespace cmlab {

ComplexSeq gen_zc(const ZcParams& params) {
  const std::int64_t L = params.length;
  if (L < 1) throw std::invalid_argument("zadoff-chu length must be positive");
  if (params.root % L == 0) {
    throw std::invalid_argument("zadoff-chu root " + std::to_string(params.root) +
                                " is congruent to 0 mod " + std::to_string(L));
  }
  // The exponent is pi * m / L with m taken mod 2L, reduced in integers so
  // long sequences do not lose phase precision.
  const std::int64_t period = 2 * L;
  const std::int64_t r = ((params.root % period) + period) % period;
  ComplexSeq out(static_cast<std::size_t>(L));
  for (std::int64_t k = 0; k < L; ++k) {
    const std::int64_t q = (L % 2 == 0) ? (k * k) % period : (k * (k + 1)) % period;
    const std::int64_t m = (q * r) % period;
    out[static_cast<std::size_t>(k)] = std::polar(1.0, kPi * static_cast<double>(m) / static_cast<double>(L));
  }
  return out;
}

ComplexSeq gen_prach_root(int root) {
  if (root < 1 || root >= kPrachLength) {
    throw std::invalid_argument("prach root " + std::to_string(root) + " outside [1, 138]");
  }
  return gen_zc({kPrachLength, -root});
}

ComplexSeq gen_prach_preamble(const PrachPreambleSpec& spec) {
  if (spec.cyclic_shift < 0 || spec.cyclic_shift >= kPrachLength) {
    throw std::invalid_argument("prach cyclic shift " + std::to_string(spec.cyclic_shift) +
                                " outside [0, 138]");
  }
  const ComplexSeq root = gen_prach_root(spec.root);
  ComplexSeq out(root.size());
  for (std::size_t n = 0; n < root.size(); ++n) {
    out[n] = root[(n + static_cast<std::size_t>(spec.cyclic_shift)) % root.size()];
  }
  return out;
}

ComplexSeq to_freq(std::span<const Complex> seq) {
  if (seq.empty()) throw std::invalid_argument("to_freq of empty sequence");
  return fft::forward(seq);
}

// ---------------------------------------------------------------------------

CgsTable CgsTable::parse(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    Row row{};
    std::size_t count = 0;
    std::string tok;
    while (fields >> tok) {
      if (count == row.size()) {
        throw std::runtime_error("cgs table line " + std::to_string(line_no) + ": more than 12 entries");
      }
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        throw std::runtime_error("cgs table line " + std::to_string(line_no) + ": bad entry '" + tok + "'");
      }
      if (v != -3 && v != -1 && v != 1 && v != 3) {
        throw std::runtime_error("cgs table line " + std::to_string(line_no) + ": phase index " +
                                 tok + " not in {-3,-1,1,3}");
      }
      row[count++] = v;
    }
    if (count != row.size()) {
      throw std::runtime_error("cgs table line " + std::to_string(line_no) + ": expected 12 entries, got " +
                               std::to_string(count));
    }
    rows.push_back(row);
  }
  if (rows.size() != kCgsBaseCount) {
    throw std::runtime_error("cgs table: expected 30 rows, got " + std::to_string(rows.size()));
  }
  return CgsTable(std::move(rows));
}

CgsTable CgsTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cgs table: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const CgsTable& CgsTable::bundled() {
  static const CgsTable table = [] {
    if (const char* env = std::getenv("CMLAB_CGS_TABLE"); env != nullptr && *env != '\0') {
      return load(env);
    }
    return load(std::filesystem::path(CMLAB_DATA_DIR) / "cgs_length12.txt");
  }();
  return table;
}

const CgsTable::Row& CgsTable::phase_indices(int base) const {
  if (base < 0 || static_cast<std::size_t>(base) >= rows_.size()) {
    throw std::out_of_range("cgs base index " + std::to_string(base) + " outside [0, 29]");
  }
  return rows_[static_cast<std::size_t>(base)];
}

ComplexSeq CgsTable::sequence(int base) const {
  const Row& row = phase_indices(base);
  ComplexSeq out(row.size());
  for (std::size_t n = 0; n < row.size(); ++n) out[n] = std::polar(1.0, kPi * row[n] / 4.0);
  return out;
}

ComplexSeq gen_pucch_base(const PucchBaseSpec& spec, const CgsTable& table) {
  return apply_cyclic_shift_phase(table.sequence(spec.base), spec.cyclic_shift);
}

ComplexSeq apply_cyclic_shift_phase(std::span<const Complex> seq, int cs) {
  if (seq.size() != kPrbSize) {
    throw std::invalid_argument("cyclic shift needs a length-12 sequence, got " + std::to_string(seq.size()));
  }
  if (cs < 0 || cs >= kPrbSize) {
    throw std::invalid_argument("cyclic shift " + std::to_string(cs) + " outside [0, 11]");
  }
  ComplexSeq out(seq.begin(), seq.end());
  for (int k = 0; k < kPrbSize; ++k) {
    // cs * k mod 12 keeps the ramp exact on the 12th roots of unity.
    out[static_cast<std::size_t>(k)] *= std::polar(1.0, kTwoPi * ((cs * k) % kPrbSize) / kPrbSize);
  }
  return out;
}

}  // namespace cmlab
