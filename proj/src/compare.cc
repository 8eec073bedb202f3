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

#include "flurp/compare.h"

#include <bit>

#include "flurp/error.h"
#include "flurp/ot.h"

namespace flurp {

namespace {

void check_chunking(unsigned l, unsigned m) {
  if (m == 0 || m > 8 || l % m != 0 || !std::has_single_bit(l / m)) {
    throw ShapeError("packed_compare: chunk width must divide l into a power-of-two count");
  }
}

}  // namespace

ComparisonTreeState compare_leaves(Party& party, const ArithmeticShare& x,
                                   const ArithmeticShare& y, unsigned chunk_bits) {
  if (x.size() != y.size() || x.ring != y.ring) {
    throw ShapeError("packed_compare: operand width mismatch");
  }
  if (x.size() == 0) throw ShapeError("packed_compare: no pairs to compare");
  const Ring ring = x.ring;
  const unsigned l = ring.bits();
  check_chunking(l, chunk_bits);
  const unsigned q = l / chunk_bits;
  const unsigned M = 1U << chunk_bits;
  const std::size_t n = x.size();
  const std::uint64_t low_mask = (std::uint64_t{1} << (l - 1)) - 1;
  const int id = party.id();

  ComparisonTreeState st;
  st.chunk_bits = chunk_bits;
  st.chunks_per_value = q;
  st.values = n;
  st.lt = {id, std::vector<std::uint8_t>(n * q)};
  st.eq = {id, std::vector<std::uint8_t>(n * q)};
  st.msb = {id, std::vector<std::uint8_t>(n)};

  // Party 0 holds alpha = 2^{l-1} - 1 - w_0, party 1 holds beta = w_1, so
  // alpha < beta exactly when the low l-1 bits of the two shares carry.
  std::vector<std::uint64_t> packed(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t d = ring.sub(x.values[i], y.values[i]);
    st.msb.bits[i] = ring.msb(d) ? 1 : 0;
    std::uint64_t w = d & low_mask;
    packed[i] = id == 0 ? low_mask - w : w;
  }
  auto chunk = [&](std::size_t leaf) {
    return static_cast<std::uint8_t>((packed[leaf / q] >> (chunk_bits * (leaf % q))) & (M - 1));
  };

  const OtShape shape{M, 2};
  if (id == 0) {
    std::vector<std::uint8_t> msgs(n * q * M);
    for (std::size_t j = 0; j < n * q; ++j) {
      std::uint64_t r = party.rng();
      std::uint8_t lt0 = r & 1U, eq0 = (r >> 1) & 1U;
      st.lt.bits[j] = lt0;
      st.eq.bits[j] = eq0;
      const unsigned a = chunk(j);
      for (unsigned k = 0; k < M; ++k) {
        std::uint8_t s = lt0 ^ (a < k ? 1 : 0);
        std::uint8_t t = eq0 ^ (a == k ? 1 : 0);
        msgs[j * M + k] = static_cast<std::uint8_t>(s | (t << 1));
      }
    }
    ot_batch(party, 0, shape, msgs, {});
  } else {
    std::vector<std::uint8_t> choices(n * q);
    for (std::size_t j = 0; j < n * q; ++j) choices[j] = chunk(j);
    auto got = ot_batch(party, 0, shape, {}, choices);
    for (std::size_t j = 0; j < n * q; ++j) {
      st.lt.bits[j] = got[j] & 1U;
      st.eq.bits[j] = (got[j] >> 1) & 1U;
    }
  }
  party.net.declare("compare.bits", n * q * M * 2);
  return st;
}

void merge_layer(Party& party, ComparisonTreeState& st) {
  const std::size_t nodes = st.lt.size() / 2;
  const int id = party.id();
  BooleanShare lt_lo{id, std::vector<std::uint8_t>(nodes)};
  BooleanShare eq_lo{id, std::vector<std::uint8_t>(nodes)};
  BooleanShare eq_hi{id, std::vector<std::uint8_t>(nodes)};
  for (std::size_t j = 0; j < nodes; ++j) {
    lt_lo.bits[j] = st.lt.bits[2 * j];
    eq_lo.bits[j] = st.eq.bits[2 * j];
    eq_hi.bits[j] = st.eq.bits[2 * j + 1];
  }
  auto [e, f] = correlated_and(party, lt_lo, eq_lo, eq_hi);
  BooleanShare lt{id, std::vector<std::uint8_t>(nodes)};
  for (std::size_t j = 0; j < nodes; ++j) lt.bits[j] = st.lt.bits[2 * j + 1] ^ e.bits[j];
  st.lt = std::move(lt);
  st.eq = std::move(f);
  st.layer += 1;
  party.net.declare("compare.bits", 6 * nodes);
}

BooleanShare packed_compare(Party& party, const ArithmeticShare& x,
                            const ArithmeticShare& y, unsigned chunk_bits) {
  ComparisonTreeState st = compare_leaves(party, x, y, chunk_bits);
  while (st.lt.size() > st.values) merge_layer(party, st);
  BooleanShare out{party.id(), std::vector<std::uint8_t>(st.values)};
  for (std::size_t i = 0; i < st.values; ++i) out.bits[i] = st.lt.bits[i] ^ st.msb.bits[i];
  party.net.declare("compare.calls", 1);
  party.net.declare("compare.pairs", st.values);
  return out;
}

std::uint64_t compare_cost_bits(std::uint64_t n, unsigned l, unsigned m) {
  const std::uint64_t q = l / m;
  return n * (q * ((std::uint64_t{1} << (m + 1)) + 6) - 6);
}

unsigned compare_rounds(unsigned l, unsigned m) {
  return 2 + static_cast<unsigned>(std::countr_zero(l / m));
}

std::uint64_t millionaire_rounds(std::uint64_t n, unsigned l) {
  return n * static_cast<std::uint64_t>(std::countr_zero(l));
}

}  // namespace flurp
