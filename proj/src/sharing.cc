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

#include "flurp/sharing.h"

#include <cmath>
#include <string>

#include "flurp/error.h"

namespace flurp {

namespace {

void check_compatible(const ArithmeticShare& x, const ArithmeticShare& y,
                      const char* what) {
  if (x.size() != y.size() || x.ring != y.ring || x.scale != y.scale) {
    throw ShapeError(std::string(what) + ": share shape mismatch");
  }
}

std::uint64_t hash_purpose(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) h = (h ^ static_cast<std::uint8_t>(c)) * 0x100000001b3ULL;
  return h;
}

std::mt19937_64 seeded(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> v;
  for (auto w : words) {
    v.push_back(static_cast<std::uint32_t>(w));
    v.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(v.begin(), v.end());
  return std::mt19937_64(seq);
}

}  // namespace

void Ring::validate() const {
  if (bits_ != 32 && bits_ != 64) {
    throw RangeError("ring width must be 32 or 64, got " + std::to_string(bits_));
  }
}

std::uint64_t FixedPointCodec::encode(double x) const {
  const double limit = std::ldexp(1.0, static_cast<int>(ring.bits() - frac_bits - 1));
  if (!std::isfinite(x) || std::fabs(x) >= limit) {
    throw OverflowError("fixed-point overflow encoding " + std::to_string(x));
  }
  auto mag = static_cast<std::uint64_t>(std::llround(std::fabs(x) * std::ldexp(1.0, static_cast<int>(frac_bits))));
  return x < 0 ? ring.neg(mag) : ring.reduce(mag);
}

double FixedPointCodec::decode(std::uint64_t v) const { return decode_at(v, frac_bits); }

double FixedPointCodec::decode_at(std::uint64_t v, unsigned scale) const {
  return std::ldexp(static_cast<double>(ring.to_signed(ring.reduce(v))),
                    -static_cast<int>(scale));
}

RingVector FixedPointCodec::encode(std::span<const double> xs) const {
  RingVector out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(encode(x));
  return out;
}

std::vector<double> FixedPointCodec::decode(std::span<const std::uint64_t> vs) const {
  std::vector<double> out;
  out.reserve(vs.size());
  for (auto v : vs) out.push_back(decode(v));
  return out;
}

ArithmeticShare ArithmeticShare::slice(std::size_t from, std::size_t to) const {
  if (from > to || to > values.size()) throw ShapeError("slice out of range");
  ArithmeticShare s{party, ring, scale, {}};
  s.values.assign(values.begin() + static_cast<std::ptrdiff_t>(from),
                  values.begin() + static_cast<std::ptrdiff_t>(to));
  return s;
}

std::mt19937_64 Dealer::next_block(std::string_view purpose) {
  return seeded({seed_, counter_++, hash_purpose(purpose)});
}

Party::Party(Endpoint& endpoint, std::uint64_t session_seed)
    : net(endpoint),
      dealer(session_seed),
      rng(seeded({session_seed, 0x9e3779b97f4a7c15ULL,
                  static_cast<std::uint64_t>(endpoint.party())})) {}

std::pair<ArithmeticShare, ArithmeticShare> split(std::span<const std::uint64_t> secret,
                                                  Ring ring, unsigned scale,
                                                  std::uint64_t seed) {
  ring.validate();
  std::mt19937_64 gen = seeded({seed, 0x5eed});
  ArithmeticShare s0{0, ring, scale, {}}, s1{1, ring, scale, {}};
  s0.values.reserve(secret.size());
  s1.values.reserve(secret.size());
  for (auto v : secret) {
    std::uint64_t r = ring.reduce(gen());
    s0.values.push_back(r);
    s1.values.push_back(ring.sub(v, r));
  }
  return {std::move(s0), std::move(s1)};
}

RingVector reveal(const ArithmeticShare& s0, const ArithmeticShare& s1) {
  check_compatible(s0, s1, "reveal");
  RingVector out(s0.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = s0.ring.add(s0.values[i], s1.values[i]);
  }
  return out;
}

std::vector<std::uint8_t> reveal(const BooleanShare& s0, const BooleanShare& s1) {
  if (s0.size() != s1.size()) throw ShapeError("reveal: boolean share mismatch");
  std::vector<std::uint8_t> out(s0.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (s0.bits[i] ^ s1.bits[i]) & 1U;
  return out;
}

ArithmeticShare add(const ArithmeticShare& x, const ArithmeticShare& y) {
  check_compatible(x, y, "add");
  if (x.party != y.party) throw ShapeError("add: shares belong to different parties");
  ArithmeticShare z = x;
  for (std::size_t i = 0; i < z.size(); ++i) z.values[i] = x.ring.add(x.values[i], y.values[i]);
  return z;
}

ArithmeticShare sub(const ArithmeticShare& x, const ArithmeticShare& y) {
  check_compatible(x, y, "sub");
  if (x.party != y.party) throw ShapeError("sub: shares belong to different parties");
  ArithmeticShare z = x;
  for (std::size_t i = 0; i < z.size(); ++i) z.values[i] = x.ring.sub(x.values[i], y.values[i]);
  return z;
}

ArithmeticShare add_public(const ArithmeticShare& x, std::span<const std::uint64_t> c) {
  if (c.size() != x.size()) throw ShapeError("add_public: length mismatch");
  ArithmeticShare z = x;
  if (x.party == 0) {
    for (std::size_t i = 0; i < z.size(); ++i) z.values[i] = x.ring.add(x.values[i], c[i]);
  }
  return z;
}

ArithmeticShare share_public(int party, Ring ring, unsigned scale,
                             std::span<const std::uint64_t> c) {
  ArithmeticShare z{party, ring, scale, RingVector(c.size(), 0)};
  if (party == 0) {
    for (std::size_t i = 0; i < c.size(); ++i) z.values[i] = ring.reduce(c[i]);
  }
  return z;
}

ArithmeticShare scale_public(const ArithmeticShare& x, std::uint64_t k) {
  ArithmeticShare z = x;
  for (auto& v : z.values) v = x.ring.mul(v, k);
  return z;
}

ArithmeticShare sum(const ArithmeticShare& x) {
  std::uint64_t acc = 0;
  for (auto v : x.values) acc = x.ring.add(acc, v);
  return ArithmeticShare{x.party, x.ring, x.scale, {acc}};
}

ArithmeticShare truncate_local(const ArithmeticShare& x, unsigned bits) {
  if (bits > x.scale) throw RangeError("truncate_local: more bits than scale");
  ArithmeticShare z = x;
  z.scale = x.scale - bits;
  for (auto& v : z.values) {
    if (x.party == 0) {
      v = v >> bits;
    } else {
      v = x.ring.neg(x.ring.neg(v) >> bits);
    }
  }
  return z;
}

std::pair<BeaverTriple, BeaverTriple> deal_triples(std::size_t count, Ring ring,
                                                   std::uint64_t seed) {
  ring.validate();
  std::mt19937_64 gen = seeded({seed, 0x7219});
  BeaverTriple t0{0, ring, {}, {}, {}}, t1{1, ring, {}, {}, {}};
  for (auto* t : {&t0, &t1}) {
    t->a.resize(count);
    t->b.resize(count);
    t->c.resize(count);
  }
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t a = ring.reduce(gen()), b = ring.reduce(gen());
    std::uint64_t c = ring.mul(a, b);
    t0.a[i] = ring.reduce(gen());
    t0.b[i] = ring.reduce(gen());
    t0.c[i] = ring.reduce(gen());
    t1.a[i] = ring.sub(a, t0.a[i]);
    t1.b[i] = ring.sub(b, t0.b[i]);
    t1.c[i] = ring.sub(c, t0.c[i]);
  }
  return {std::move(t0), std::move(t1)};
}

BeaverTriple draw_triples(Party& party, std::size_t count, Ring ring) {
  std::mt19937_64 gen = party.dealer.next_block("beaver");
  auto [t0, t1] = deal_triples(count, ring, gen());
  return party.id() == 0 ? std::move(t0) : std::move(t1);
}

Bytes pack_ring(Ring ring, std::span<const std::uint64_t> values) {
  const unsigned width = ring.bits() / 8;
  Bytes out;
  out.reserve(values.size() * width);
  for (auto v : values) {
    for (unsigned k = 0; k < width; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  return out;
}

RingVector unpack_ring(Ring ring, std::span<const std::uint8_t> bytes,
                       std::size_t count) {
  const unsigned width = ring.bits() / 8;
  if (bytes.size() != count * width) throw ShapeError("unpack_ring: size mismatch");
  RingVector out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t v = 0;
    for (unsigned k = 0; k < width; ++k) {
      v |= static_cast<std::uint64_t>(bytes[i * width + k]) << (8 * k);
    }
    out[i] = v;
  }
  return out;
}

ArithmeticShare mul(Party& party, const ArithmeticShare& x,
                    const ArithmeticShare& y, BeaverTriple& triple) {
  if (x.size() != y.size() || x.ring != y.ring) throw ShapeError("mul: shape mismatch");
  if (triple.consumed) throw TripleReuseError("mul: Beaver triple already consumed");
  if (triple.size() != x.size() || triple.ring != x.ring) {
    throw ShapeError("mul: triple batch does not match operands");
  }
  triple.consumed = true;
  const Ring ring = x.ring;
  const std::size_t n = x.size();
  RingVector masked(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    masked[i] = ring.sub(x.values[i], triple.a[i]);
    masked[n + i] = ring.sub(y.values[i], triple.b[i]);
  }
  Bytes in = party.net.exchange(pack_ring(ring, masked), "mul.open");
  RingVector peer = unpack_ring(ring, in, 2 * n);
  ArithmeticShare z{party.id(), ring, x.scale + y.scale, RingVector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t e = ring.add(masked[i], peer[i]);
    std::uint64_t f = ring.add(masked[n + i], peer[n + i]);
    std::uint64_t v = ring.add(triple.c[i],
                               ring.add(ring.mul(e, triple.b[i]), ring.mul(f, triple.a[i])));
    if (party.id() == 0) v = ring.add(v, ring.mul(e, f));
    z.values[i] = v;
  }
  party.net.declare("mul.count", n);
  return z;
}

ArithmeticShare mul(Party& party, const ArithmeticShare& x,
                    const ArithmeticShare& y) {
  BeaverTriple t = draw_triples(party, x.size(), x.ring);
  return mul(party, x, y, t);
}

ArithmeticShare b2a(Party& party, const BooleanShare& x, Ring ring) {
  const std::size_t n = x.size();
  ArithmeticShare own{party.id(), ring, 0, RingVector(n, 0)};
  ArithmeticShare from0{party.id(), ring, 0, RingVector(n, 0)};
  ArithmeticShare from1{party.id(), ring, 0, RingVector(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    if (x.bits[i] > 1) throw RangeError("b2a: payload entry is not a bit");
    own.values[i] = x.bits[i];
    (party.id() == 0 ? from0 : from1).values[i] = x.bits[i];
  }
  // x0 XOR x1 = x0 + x1 - 2 * x0 * x1, where x_b is known only to party b.
  ArithmeticShare prod = mul(party, from0, from1);
  prod.scale = 0;
  ArithmeticShare z = own;
  for (std::size_t i = 0; i < n; ++i) {
    z.values[i] = ring.sub(own.values[i], ring.mul(2, prod.values[i]));
  }
  return z;
}

RingVector open(Party& party, const ArithmeticShare& x, std::string_view tag) {
  Bytes in = party.net.exchange(pack_ring(x.ring, x.values), tag);
  RingVector peer = unpack_ring(x.ring, in, x.size());
  RingVector out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.ring.add(x.values[i], peer[i]);
  return out;
}

std::vector<std::uint8_t> open(Party& party, const BooleanShare& x,
                               std::string_view tag) {
  Bytes in = party.net.exchange(pack_bits(x.bits, 1), tag);
  auto peer = unpack_bits(in, x.size(), 1);
  std::vector<std::uint8_t> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (x.bits[i] ^ peer[i]) & 1U;
  return out;
}

Bytes serialize(const ArithmeticShare& share) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(share.ring.bits()));
  out.push_back(static_cast<std::uint8_t>(share.scale));
  put_u64(out, share.size());
  Bytes body = pack_ring(share.ring, share.values);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

ArithmeticShare deserialize_share(std::span<const std::uint8_t> bytes, int party) {
  if (bytes.size() < 10) throw ShapeError("share: truncated header");
  Ring ring(bytes[0]);
  ring.validate();
  ArithmeticShare s{party, ring, bytes[1], {}};
  std::size_t pos = 2;
  std::uint64_t n = get_u64(bytes, pos);
  if (bytes.size() - pos != n * (ring.bits() / 8)) {
    throw ShapeError("share: payload length does not match header");
  }
  s.values = unpack_ring(ring, bytes.subspan(pos), n);
  return s;
}

}  // namespace flurp
