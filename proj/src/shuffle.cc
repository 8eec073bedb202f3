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

#include "flurp/shuffle.h"

#include <algorithm>
#include <numeric>

namespace flurp {

namespace {

// Batches carry the key id so a receiver holding the wrong key fails loudly.
Bytes pack_ciphertexts(const std::vector<AheCiphertext>& cts) {
  Bytes out;
  put_u64(out, cts.size());
  put_u64(out, cts.empty() ? 0 : cts[0].key_id);
  for (const auto& c : cts) put_mpz(out, c.value);
  return out;
}

std::vector<AheCiphertext> unpack_ciphertexts(std::span<const std::uint8_t> in,
                                              std::size_t& pos, std::uint64_t key_id,
                                              std::size_t expected) {
  std::uint64_t n = get_u64(in, pos);
  if (n != expected) throw ShapeError("shuffle: unexpected ciphertext count");
  if (get_u64(in, pos) != key_id && n != 0) {
    throw KeyMismatchError("shuffle: ciphertext batch under an unexpected key");
  }
  std::vector<AheCiphertext> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back({get_mpz(in, pos), key_id});
  return out;
}

mpz_class ring_to_mpz(std::uint64_t v) {
  mpz_class z;
  mpz_import(z.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return z;
}

std::uint64_t mpz_to_ring(const mpz_class& z, Ring ring) {
  mpz_class r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), z.get_mpz_t(), ring.bits());
  std::uint64_t v = 0;
  std::size_t count = 0;
  mpz_export(&v, &count, -1, sizeof(v), 0, 0, r.get_mpz_t());
  return count == 0 ? 0 : v;
}

// Applies per-row permutations to a row-major flattened vector.
template <typename T>
std::vector<T> permute_flat(const std::vector<T>& flat, const std::vector<std::size_t>& shape,
                            const PermutationSet& perms) {
  std::vector<T> out;
  out.reserve(flat.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    for (std::size_t j = 0; j < shape[i]; ++j) out.push_back(flat[offset + perms[i][j]]);
    offset += shape[i];
  }
  return out;
}

void check_perms(const PermutationSet& perms, const std::vector<std::size_t>& shape) {
  if (perms.size() != shape.size()) throw ShapeError("shuffle: permutation set has wrong row count");
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (perms[i].size() != shape[i] || !is_permutation(perms[i])) {
      throw ShapeError("shuffle: row permutation is not a bijection");
    }
  }
}

}  // namespace

std::size_t SharedMatrix::element_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

std::vector<std::size_t> SharedMatrix::shape() const {
  std::vector<std::size_t> s;
  s.reserve(rows.size());
  for (const auto& r : rows) s.push_back(r.size());
  return s;
}

SharedMatrix matrix_from_share(const ArithmeticShare& flat, std::size_t rows,
                               std::size_t cols) {
  if (flat.size() != rows * cols) throw ShapeError("matrix_from_share: size mismatch");
  SharedMatrix m{flat.party, flat.ring, flat.scale, std::vector<RingVector>(rows)};
  for (std::size_t i = 0; i < rows; ++i) {
    m.rows[i].assign(flat.values.begin() + static_cast<std::ptrdiff_t>(i * cols),
                     flat.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
  }
  return m;
}

ArithmeticShare flatten(const SharedMatrix& m) {
  ArithmeticShare s{m.party, m.ring, m.scale, {}};
  s.values.reserve(m.element_count());
  for (const auto& r : m.rows) s.values.insert(s.values.end(), r.begin(), r.end());
  return s;
}

std::vector<RingVector> reveal(const SharedMatrix& s0, const SharedMatrix& s1) {
  if (s0.shape() != s1.shape() || s0.ring != s1.ring) throw ShapeError("reveal: matrix shape mismatch");
  std::vector<RingVector> out(s0.rows.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].resize(s0.rows[i].size());
    for (std::size_t j = 0; j < out[i].size(); ++j) {
      out[i][j] = s0.ring.add(s0.rows[i][j], s1.rows[i][j]);
    }
  }
  return out;
}

bool is_permutation(const std::vector<std::size_t>& p) {
  std::vector<bool> seen(p.size(), false);
  for (auto v : p) {
    if (v >= p.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

PermutationSet random_permutations(const std::vector<std::size_t>& row_lengths,
                                   std::mt19937_64& rng) {
  PermutationSet out(row_lengths.size());
  for (std::size_t i = 0; i < row_lengths.size(); ++i) {
    out[i].resize(row_lengths[i]);
    std::iota(out[i].begin(), out[i].end(), std::size_t{0});
    // Fisher-Yates with an explicit draw so results do not depend on the
    // standard library's shuffle.
    for (std::size_t k = out[i].size(); k > 1; --k) {
      std::size_t j = static_cast<std::size_t>(rng() % k);
      std::swap(out[i][k - 1], out[i][j]);
    }
  }
  return out;
}

PermutationSet inverse(const PermutationSet& perms) {
  PermutationSet out(perms.size());
  for (std::size_t i = 0; i < perms.size(); ++i) {
    out[i].resize(perms[i].size());
    for (std::size_t j = 0; j < perms[i].size(); ++j) out[i][perms[i][j]] = j;
  }
  return out;
}

ShuffleKeys exchange_shuffle_keys(Party& party, unsigned key_bits,
                                  std::uint64_t seed) {
  ShuffleKeys keys;
  keys.own = ahe_keygen(key_bits, seed ^ (0xa5a5a5a5ULL + static_cast<std::uint64_t>(party.id())));
  Bytes in = party.net.exchange(serialize(keys.own.pk), "ahe.pk");
  keys.peer = deserialize_public_key(in);
  return keys;
}

SharedMatrix matrix_shared_shuffle(Party& party, const SharedMatrix& d,
                                   const PermutationSet& own_perms,
                                   const ShuffleKeys& keys) {
  const auto shape = d.shape();
  check_perms(own_perms, shape);
  const std::size_t total = d.element_count();
  const Ring ring = d.ring;
  const mpz_class offset = mpz_class(1) << kShuffleMaskBits;
  std::vector<std::uint64_t> local;
  local.reserve(total);
  for (const auto& r : d.rows) local.insert(local.end(), r.begin(), r.end());

  SharedMatrix out{party.id(), ring, d.scale, std::vector<RingVector>(shape.size())};
  auto fill_rows = [&](const std::vector<std::uint64_t>& flat) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
      out.rows[i].assign(flat.begin() + static_cast<std::ptrdiff_t>(k),
                         flat.begin() + static_cast<std::ptrdiff_t>(k + shape[i]));
      k += shape[i];
    }
  };

  if (party.id() == 1) {
    const AhePublicKey& pk1 = keys.own.pk;
    const AhePublicKey& pk0 = keys.peer;
    std::vector<AheCiphertext> enc_share;
    enc_share.reserve(total);
    for (auto v : local) enc_share.push_back(ahe_enc(keys.own, ring_to_mpz(v), party.rng));
    party.net.send(pack_ciphertexts(enc_share), "shuffle.leg1");

    Bytes in = party.net.receive("shuffle.leg2");
    std::size_t pos = 0;
    auto masked = unpack_ciphertexts(in, pos, pk1.key_id, total);
    auto enc_mask = unpack_ciphertexts(in, pos, pk0.key_id, total);

    std::vector<std::uint64_t> share(total);
    std::vector<AheCiphertext> ret;
    ret.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
      mpz_class x = ahe_dec(keys.own.sk, masked[k]);
      mpz_class r = random_below(offset, party.rng);
      share[k] = ring.sub(mpz_to_ring(x, ring), mpz_to_ring(r, ring));
      ret.push_back(ahe_rerandomize(pk0, ahe_add_plain(pk0, enc_mask[k], r), party.rng));
    }
    share = permute_flat(share, shape, own_perms);
    ret = permute_flat(ret, shape, own_perms);
    party.net.send(pack_ciphertexts(ret), "shuffle.leg3");
    fill_rows(share);
  } else {
    const AhePublicKey& pk0 = keys.own.pk;
    const AhePublicKey& pk1 = keys.peer;
    Bytes in = party.net.receive("shuffle.leg1");
    std::size_t pos = 0;
    auto enc_share = unpack_ciphertexts(in, pos, pk1.key_id, total);
    std::vector<AheCiphertext> masked, enc_mask;
    masked.reserve(total);
    enc_mask.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
      mpz_class l = random_below(offset, party.rng);
      // Enc(D + 2^kappa - L) under pk1, refreshed so it cannot be linked to
      // party 1's own ciphertext.
      mpz_class plain = ring_to_mpz(local[k]) + offset - l;
      masked.push_back(ahe_rerandomize(pk1, ahe_add_plain(pk1, enc_share[k], plain), party.rng));
      enc_mask.push_back(ahe_enc(keys.own, l, party.rng));
    }
    masked = permute_flat(masked, shape, own_perms);
    enc_mask = permute_flat(enc_mask, shape, own_perms);
    Bytes leg2 = pack_ciphertexts(masked);
    Bytes second = pack_ciphertexts(enc_mask);
    leg2.insert(leg2.end(), second.begin(), second.end());
    party.net.send(leg2, "shuffle.leg2");

    Bytes back = party.net.receive("shuffle.leg3");
    std::size_t back_pos = 0;
    auto ret = unpack_ciphertexts(back, back_pos, pk0.key_id, total);
    std::vector<std::uint64_t> share(total);
    for (std::size_t k = 0; k < total; ++k) share[k] = mpz_to_ring(ahe_dec(keys.own.sk, ret[k]), ring);
    fill_rows(share);
  }
  party.net.declare("shuffle.ciphertexts", 4 * total);
  party.net.declare("shuffle.legs", 3);
  return out;
}

}  // namespace flurp
