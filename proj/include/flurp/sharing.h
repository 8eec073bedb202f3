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
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "flurp/transport.h"

namespace flurp {

// Bit width of the share ring Z_{2^l}. Only 32 and 64 are supported.
class Ring {
 public:
  constexpr explicit Ring(unsigned bits = 32) : bits_(bits) {}
  constexpr unsigned bits() const { return bits_; }
  constexpr std::uint64_t mask() const {
    return bits_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits_) - 1;
  }
  constexpr std::uint64_t reduce(std::uint64_t v) const { return v & mask(); }
  constexpr std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    return (a + b) & mask();
  }
  constexpr std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
    return (a - b) & mask();
  }
  constexpr std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return (a * b) & mask();
  }
  constexpr std::uint64_t neg(std::uint64_t a) const { return (0 - a) & mask(); }
  constexpr bool msb(std::uint64_t a) const { return (a >> (bits_ - 1)) & 1U; }
  // Two's-complement reading of a ring element.
  constexpr std::int64_t to_signed(std::uint64_t a) const {
    if (bits_ == 64) return static_cast<std::int64_t>(a);
    return msb(a) ? static_cast<std::int64_t>(a) - (std::int64_t{1} << bits_)
                  : static_cast<std::int64_t>(a);
  }
  constexpr std::uint64_t from_signed(std::int64_t v) const {
    return static_cast<std::uint64_t>(v) & mask();
  }
  void validate() const;
  friend constexpr bool operator==(Ring, Ring) = default;

 private:
  unsigned bits_;
};

using RingVector = std::vector<std::uint64_t>;

// Real numbers embedded in the ring with `frac_bits` fractional bits,
// negatives in two's complement.
struct FixedPointCodec {
  unsigned frac_bits = 16;
  Ring ring{32};

  std::uint64_t encode(double x) const;
  double decode(std::uint64_t v) const;
  // Decodes a value carrying `scale` fractional bits (e.g. 2f after a product).
  double decode_at(std::uint64_t v, unsigned scale) const;
  RingVector encode(std::span<const double> xs) const;
  std::vector<double> decode(std::span<const std::uint64_t> vs) const;
};

// One party's half of an additive sharing over Z_{2^l}.
struct ArithmeticShare {
  int party = 0;
  Ring ring{32};
  unsigned scale = 0;
  RingVector values;

  std::size_t size() const { return values.size(); }
  ArithmeticShare slice(std::size_t from, std::size_t to) const;
};

// One party's half of an XOR sharing of bits (each entry 0 or 1).
struct BooleanShare {
  int party = 0;
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
};

// One party's half of a batch of multiplication triples c = a * b.
// Each triple may be consumed by exactly one multiplication.
struct BeaverTriple {
  int party = 0;
  Ring ring{32};
  RingVector a, b, c;
  bool consumed = false;

  std::size_t size() const { return a.size(); }
};

// Source of correlated randomness for one session. Both parties hold a dealer
// built from the same seed and must draw blocks in the same order; each party
// keeps only its own half of every block.
class Dealer {
 public:
  explicit Dealer(std::uint64_t seed) : seed_(seed) {}
  std::mt19937_64 next_block(std::string_view purpose);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// Per-party protocol context for one session.
struct Party {
  Party(Endpoint& endpoint, std::uint64_t session_seed);

  int id() const { return net.party(); }

  Endpoint& net;
  Dealer dealer;
  std::mt19937_64 rng;
};

std::pair<ArithmeticShare, ArithmeticShare> split(std::span<const std::uint64_t> secret,
                                                  Ring ring, unsigned scale,
                                                  std::uint64_t seed);
RingVector reveal(const ArithmeticShare& s0, const ArithmeticShare& s1);
std::vector<std::uint8_t> reveal(const BooleanShare& s0, const BooleanShare& s1);

ArithmeticShare add(const ArithmeticShare& x, const ArithmeticShare& y);
ArithmeticShare sub(const ArithmeticShare& x, const ArithmeticShare& y);
// Adds a public constant vector; only party 0 changes its payload.
ArithmeticShare add_public(const ArithmeticShare& x, std::span<const std::uint64_t> c);
// Sharing of a public vector: party 0 holds it, party 1 holds zeros.
ArithmeticShare share_public(int party, Ring ring, unsigned scale,
                             std::span<const std::uint64_t> c);
// Multiplies every element by a public ring constant (scale unchanged).
ArithmeticShare scale_public(const ArithmeticShare& x, std::uint64_t k);
// Sum of all elements as a one-element sharing.
ArithmeticShare sum(const ArithmeticShare& x);
// Local probabilistic truncation by `bits` fractional bits.
ArithmeticShare truncate_local(const ArithmeticShare& x, unsigned bits);

std::pair<BeaverTriple, BeaverTriple> deal_triples(std::size_t count, Ring ring,
                                                   std::uint64_t seed);
// This party's half of `count` fresh triples from the session dealer.
BeaverTriple draw_triples(Party& party, std::size_t count, Ring ring);

// Beaver multiplication: one exchange of the masked values x - a, y - b.
ArithmeticShare mul(Party& party, const ArithmeticShare& x,
                    const ArithmeticShare& y, BeaverTriple& triple);
ArithmeticShare mul(Party& party, const ArithmeticShare& x,
                    const ArithmeticShare& y);

// Converts XOR-shared bits to arithmetic shares of 0/1.
ArithmeticShare b2a(Party& party, const BooleanShare& x, Ring ring);

// Both parties learn the shared values.
RingVector open(Party& party, const ArithmeticShare& x, std::string_view tag);
std::vector<std::uint8_t> open(Party& party, const BooleanShare& x,
                               std::string_view tag);

// Wire format: u8 l | u8 f | u64 length | length * (l/8)-byte LE elements.
Bytes serialize(const ArithmeticShare& share);
ArithmeticShare deserialize_share(std::span<const std::uint8_t> bytes, int party);

// Ring vectors packed at l/8 bytes per element, no header.
Bytes pack_ring(Ring ring, std::span<const std::uint64_t> values);
RingVector unpack_ring(Ring ring, std::span<const std::uint8_t> bytes,
                       std::size_t count);

}  // namespace flurp
