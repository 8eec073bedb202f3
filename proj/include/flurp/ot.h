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
#include <span>
#include <utility>
#include <vector>

#include "flurp/sharing.h"

namespace flurp {

struct OtShape {
  unsigned choices = 16;     // M, a power of two
  unsigned payload_bits = 2; // bits per message, at most 8
};

// Batched 1-out-of-M OT between the two parties of `party`'s session.
//
// The sender passes n * M messages (instance-major, each below
// 2^payload_bits) and an empty choice list; the receiver passes n choices and
// an empty message list. The receiver gets its chosen messages back, the
// sender gets an empty vector.
//
// Realized from dealer-supplied random-OT correlations: the receiver sends its
// choice offset, the sender replies with every message masked under a pad the
// receiver holds for exactly one index. Formula-level cost M * payload_bits
// per instance is declared under "ot.bits".
std::vector<std::uint8_t> ot_batch(Party& party, int sender, OtShape shape,
                                   std::span<const std::uint8_t> sender_msgs,
                                   std::span<const std::uint8_t> receiver_choices);

// XOR-shared e = lt AND eq_right and f = eq_left AND eq_right, batched over
// all instances in one exchange. Uses one correlated bit-triple per instance
// (two AND triples sharing their b operand). Declares 6 bits per instance
// under "and.bits".
std::pair<BooleanShare, BooleanShare> correlated_and(Party& party,
                                                     const BooleanShare& lt,
                                                     const BooleanShare& eq_left,
                                                     const BooleanShare& eq_right);

}  // namespace flurp
