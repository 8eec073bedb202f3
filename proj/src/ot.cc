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

#include "flurp/ot.h"

#include <bit>
#include <string>

#include "flurp/error.h"

namespace flurp {

namespace {

struct RandomOt {
  std::vector<std::uint8_t> offset;  // r_j, receiver side
  std::vector<std::uint8_t> pads;    // n * M pads (sender) or n pads (receiver)
};

// Both parties draw the full block so the dealer stream stays aligned, then
// keep only their half.
RandomOt deal_random_ot(Party& party, bool is_sender, std::size_t n, OtShape shape) {
  std::mt19937_64 gen = party.dealer.next_block("rot");
  const unsigned pad_mask = (1U << shape.payload_bits) - 1;
  const std::size_t words = (shape.choices * shape.payload_bits + 63) / 64;
  const unsigned per_word = 64 / shape.payload_bits;
  RandomOt out;
  if (is_sender) {
    out.pads.resize(n * shape.choices);
  } else {
    out.offset.resize(n);
    out.pads.resize(n);
  }
  std::vector<std::uint64_t> w(words);
  for (std::size_t j = 0; j < n; ++j) {
    auto r = static_cast<std::uint8_t>(gen() & (shape.choices - 1));
    for (auto& x : w) x = gen();
    auto pad = [&](unsigned k) {
      return static_cast<std::uint8_t>((w[k / per_word] >> ((k % per_word) * shape.payload_bits)) & pad_mask);
    };
    if (is_sender) {
      for (unsigned k = 0; k < shape.choices; ++k) out.pads[j * shape.choices + k] = pad(k);
    } else {
      out.offset[j] = r;
      out.pads[j] = pad(r);
    }
  }
  return out;
}

void validate(OtShape shape) {
  if (shape.choices < 2 || shape.choices > 256 || !std::has_single_bit(shape.choices)) {
    throw ShapeError("ot: choice count must be a power of two in [2, 256]");
  }
  if (shape.payload_bits == 0 || shape.payload_bits > 8) {
    throw ShapeError("ot: payload width must be 1..8 bits");
  }
}

}  // namespace

std::vector<std::uint8_t> ot_batch(Party& party, int sender, OtShape shape,
                                   std::span<const std::uint8_t> sender_msgs,
                                   std::span<const std::uint8_t> receiver_choices) {
  validate(shape);
  const bool is_sender = party.id() == sender;
  const unsigned choice_bits = static_cast<unsigned>(std::countr_zero(shape.choices));
  const unsigned mask = shape.choices - 1;
  if (is_sender) {
    if (sender_msgs.size() % shape.choices != 0) {
      throw ShapeError("ot: sender message count is not a multiple of M");
    }
    const std::size_t n = sender_msgs.size() / shape.choices;
    for (auto m : sender_msgs) {
      if (m >> shape.payload_bits) throw ShapeError("ot: message wider than payload");
    }
    RandomOt rot = deal_random_ot(party, true, n, shape);
    Bytes in = party.net.receive("ot.choice");
    auto offsets = unpack_bits(in, n, choice_bits);
    std::vector<std::uint8_t> masked(n * shape.choices);
    for (std::size_t j = 0; j < n; ++j) {
      for (unsigned k = 0; k < shape.choices; ++k) {
        unsigned idx = (k - offsets[j]) & mask;
        masked[j * shape.choices + k] = static_cast<std::uint8_t>(
            sender_msgs[j * shape.choices + k] ^ rot.pads[j * shape.choices + idx]);
      }
    }
    party.net.send(pack_bits(masked, shape.payload_bits), "ot.reply");
    party.net.declare("ot.bits", n * shape.choices * shape.payload_bits);
    party.net.declare("ot.instances", n);
    return {};
  }
  const std::size_t n = receiver_choices.size();
  for (auto c : receiver_choices) {
    if (c >= shape.choices) throw ShapeError("ot: choice out of range");
  }
  RandomOt rot = deal_random_ot(party, false, n, shape);
  std::vector<std::uint8_t> offsets(n);
  for (std::size_t j = 0; j < n; ++j) {
    offsets[j] = static_cast<std::uint8_t>((receiver_choices[j] - rot.offset[j]) & mask);
  }
  party.net.send(pack_bits(offsets, choice_bits), "ot.choice");
  Bytes in = party.net.receive("ot.reply");
  auto masked = unpack_bits(in, n * shape.choices, shape.payload_bits);
  std::vector<std::uint8_t> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = static_cast<std::uint8_t>(masked[j * shape.choices + receiver_choices[j]] ^ rot.pads[j]);
  }
  party.net.declare("ot.bits", n * shape.choices * shape.payload_bits);
  party.net.declare("ot.instances", n);
  return out;
}

std::pair<BooleanShare, BooleanShare> correlated_and(Party& party,
                                                     const BooleanShare& lt,
                                                     const BooleanShare& eq_left,
                                                     const BooleanShare& eq_right) {
  const std::size_t n = lt.size();
  if (eq_left.size() != n || eq_right.size() != n) {
    throw ShapeError("correlated_and: batch lengths differ");
  }
  const int id = party.id();
  // Correlated triples: (a1, b, a1 b) and (a2, b, a2 b), XOR-shared.
  std::vector<std::uint8_t> a1(n), a2(n), b(n), c1(n), c2(n);
  std::mt19937_64 gen = party.dealer.next_block("cand");
  for (std::size_t base = 0; base < n; base += 64) {
    std::uint64_t va1 = gen(), va2 = gen(), vb = gen();
    std::uint64_t s_a1 = gen(), s_a2 = gen(), s_b = gen(), s_c1 = gen(), s_c2 = gen();
    std::uint64_t vc1 = va1 & vb, vc2 = va2 & vb;
    if (id == 1) {
      s_a1 ^= va1;
      s_a2 ^= va2;
      s_b ^= vb;
      s_c1 ^= vc1;
      s_c2 ^= vc2;
    }
    for (std::size_t k = 0; k < 64 && base + k < n; ++k) {
      a1[base + k] = (s_a1 >> k) & 1U;
      a2[base + k] = (s_a2 >> k) & 1U;
      b[base + k] = (s_b >> k) & 1U;
      c1[base + k] = (s_c1 >> k) & 1U;
      c2[base + k] = (s_c2 >> k) & 1U;
    }
  }
  std::vector<std::uint8_t> opened(3 * n);
  for (std::size_t j = 0; j < n; ++j) {
    opened[j] = (lt.bits[j] ^ a1[j]) & 1U;
    opened[n + j] = (eq_left.bits[j] ^ a2[j]) & 1U;
    opened[2 * n + j] = (eq_right.bits[j] ^ b[j]) & 1U;
  }
  Bytes in = party.net.exchange(pack_bits(opened, 1), "and.open");
  auto peer = unpack_bits(in, 3 * n, 1);
  BooleanShare e{id, std::vector<std::uint8_t>(n)}, f{id, std::vector<std::uint8_t>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    std::uint8_t d1 = opened[j] ^ peer[j];
    std::uint8_t d2 = opened[n + j] ^ peer[n + j];
    std::uint8_t g = opened[2 * n + j] ^ peer[2 * n + j];
    std::uint8_t ev = c1[j] ^ (d1 & b[j]) ^ (g & a1[j]);
    std::uint8_t fv = c2[j] ^ (d2 & b[j]) ^ (g & a2[j]);
    if (id == 0) {
      ev ^= d1 & g;
      fv ^= d2 & g;
    }
    e.bits[j] = ev & 1U;
    f.bits[j] = fv & 1U;
  }
  party.net.declare("and.bits", 6 * n);
  party.net.declare("and.instances", n);
  return {std::move(e), std::move(f)};
}

}  // namespace flurp
