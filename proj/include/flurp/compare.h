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

#include <cstdint>
#include <vector>

#include "flurp/sharing.h"

namespace flurp {

// XOR-shared comparison tree over n values split into q = l/m chunks each.
// Leaf index i*q + k holds chunk k (least significant first) of value i.
struct ComparisonTreeState {
  unsigned chunk_bits = 4;
  unsigned chunks_per_value = 8;
  std::size_t values = 0;
  unsigned layer = 0;
  BooleanShare lt;
  BooleanShare eq;
  BooleanShare msb;  // local msb of this party's share of x - y
};

// Leaf layer: one batched 1-of-2^m OT with party 0 as sender.
ComparisonTreeState compare_leaves(Party& party, const ArithmeticShare& x,
                                   const ArithmeticShare& y, unsigned chunk_bits = 4);
// One tree layer: halves the node count with a single correlated-AND batch.
void merge_layer(Party& party, ComparisonTreeState& state);

// Shares of 1{x_i < y_i} for every i, reading x_i - y_i as a signed l-bit
// value (valid while |x_i - y_i| < 2^{l-1}). All n pairs share one tree, so
// the round count does not depend on n.
BooleanShare packed_compare(Party& party, const ArithmeticShare& x,
                            const ArithmeticShare& y, unsigned chunk_bits = 4);

// Closed-form communication in bits: n * ((l/m) * (2^{m+1} + 6) - 6).
std::uint64_t compare_cost_bits(std::uint64_t n, unsigned l, unsigned m);
// Rounds used by this implementation: the leaf OT is one round trip
// (2 direction flips) and each of the log2(l/m) layers is one exchange.
unsigned compare_rounds(unsigned l, unsigned m);
// Round complexity of the unbatched millionaires' protocol on n pairs,
// n * log2(l), for reporting.
std::uint64_t millionaire_rounds(std::uint64_t n, unsigned l);

}  // namespace flurp
