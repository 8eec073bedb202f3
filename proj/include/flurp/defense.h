// Copyright 2026 The flurp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "flurp/sharing.h"
#include "flurp/shuffle.h"
#include "flurp/transport.h"

namespace flurp {

struct Lur {
  std::vector<double> values;
  std::size_t window = 1;
};

std::size_t lur_length(std::size_t n, std::size_t window);
// Entry j is max |f_k| over the window [s*j, s*j + s), the last one truncated.
Lur linf_sample(std::span<const double> update, std::size_t window);

std::uint64_t sed_multiplications(std::size_t clients, std::size_t dims);

// Upper triangle by one batched multiplication, mirrored; zero diagonal.
// Output scale is twice the input scale.
SharedMatrix shared_sed_matrix(Party& party, const std::vector<ArithmeticShare>& lurs);

struct QualificationVector {
  std::vector<std::uint8_t> q;  // revealed
  ArithmeticShare counts;       // s_j, still shared
  ArithmeticShare medians;      // mu_i, still shared
};

std::size_t median_rank(std::size_t clients);  // floor(m/2)

QualificationVector neighbor_and_qualify(Party& party, const SharedMatrix& sed,
                                         const ShuffleKeys& keys);

// Public integer weights at `frac_bits`, summing to exactly 2^frac_bits over
// the qualified clients.
std::vector<std::uint64_t> aggregation_weights(std::span<const double> sizes,
                                               std::span<const std::uint8_t> q,
                                               unsigned frac_bits);

// Reveals sum_i W_i * g_i at scale (update scale + frac_bits).
std::vector<double> aggregate(Party& party, const std::vector<ArithmeticShare>& updates,
                              std::span<const std::uint8_t> q,
                              std::span<const double> sizes, unsigned frac_bits);

struct DefenseConfig {
  Ring ring{32};
  unsigned frac_bits = 8;
  std::size_t window = 1;
  unsigned key_bits = 512;
};

struct RoundOutcome {
  std::vector<std::uint8_t> qualified;
  std::vector<std::int64_t> counts;  // neighbor counts (oracle only)
  std::vector<double> global_update;
  bool skipped = false;
  TranscriptCounters counters;       // party 0, secure mode only
  double seconds = 0.0;
};

// Fixed-point ring images of the per-client LURs and updates.
struct EncodedRound {
  std::vector<RingVector> lurs;
  std::vector<RingVector> updates;
};
EncodedRound encode_round(const std::vector<std::vector<double>>& updates,
                          const DefenseConfig& cfg);

// Reference pipeline on the same ring values the secure path sees.
RoundOutcome plaintext_defense(const std::vector<std::vector<double>>& updates,
                               std::span<const double> sizes, const DefenseConfig& cfg);

// One party's side of the secure round. Both parties pass the same plaintext
// client inputs; each keeps only its own share of every client's split.
RoundOutcome secure_defense_party(Party& party,
                                  const std::vector<std::vector<double>>& updates,
                                  std::span<const double> sizes, const DefenseConfig& cfg,
                                  std::uint64_t seed);

RoundOutcome secure_defense(const std::vector<std::vector<double>>& updates,
                            std::span<const double> sizes, const DefenseConfig& cfg,
                            std::uint64_t seed);

// Plaintext SED matrix and neighbor/qualification step on ring values.
std::vector<RingVector> plain_sed_matrix(const std::vector<RingVector>& lurs, Ring ring);
std::vector<std::uint8_t> plain_qualify(const std::vector<RingVector>& sed, Ring ring,
                                        std::vector<std::int64_t>* counts = nullptr);

}  // namespace flurp
