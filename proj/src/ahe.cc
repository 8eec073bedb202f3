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

#include "flurp/ahe.h"

#include <string>
#include <vector>

#include "flurp/error.h"

namespace flurp {

namespace {

std::uint64_t key_id_of(const mpz_class& n) {
  std::size_t count = 0;
  std::vector<std::uint8_t> raw((mpz_sizeinbase(n.get_mpz_t(), 2) + 7) / 8);
  mpz_export(raw.data(), &count, 1, 1, 1, 0, n.get_mpz_t());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < count; ++i) h = (h ^ raw[i]) * 0x100000001b3ULL;
  return h;
}

mpz_class random_bits(unsigned bits, std::mt19937_64& rng) {
  std::vector<std::uint64_t> words((bits + 63) / 64);
  for (auto& w : words) w = rng();
  mpz_class v;
  mpz_import(v.get_mpz_t(), words.size(), -1, sizeof(std::uint64_t), 0, 0,
             words.data());
  mpz_class one = 1;
  v &= (one << bits) - 1;
  return v;
}

mpz_class random_prime(unsigned bits, std::mt19937_64& rng) {
  mpz_class v = random_bits(bits, rng);
  mpz_setbit(v.get_mpz_t(), bits - 1);
  mpz_setbit(v.get_mpz_t(), bits - 2);
  mpz_class p;
  mpz_nextprime(p.get_mpz_t(), v.get_mpz_t());
  return p;
}

mpz_class powm(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

mpz_class invert(const mpz_class& a, const mpz_class& mod) {
  mpz_class out;
  if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0) {
    throw Error("ahe: value not invertible");
  }
  return out;
}

// h = L_p(g^{p-1} mod p^2)^{-1} mod p with L_p(x) = (x - 1) / p.
mpz_class crt_constant(const mpz_class& n, const mpz_class& p, const mpz_class& p2) {
  mpz_class g = n + 1;
  mpz_class x = powm(g, p - 1, p2);
  mpz_class l = (x - 1) / p;
  return invert(l % p, p);
}

void check_key(const AhePublicKey& pk, const AheCiphertext& c) {
  if (c.key_id != pk.key_id) throw KeyMismatchError("ahe: ciphertext under a different key");
}

}  // namespace

mpz_class random_below(const mpz_class& bound, std::mt19937_64& rng) {
  const unsigned bits = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
  while (true) {
    mpz_class v = random_bits(bits, rng);
    if (v < bound) return v;
  }
}

AheKeypair ahe_keygen(unsigned bits, std::uint64_t seed) {
  if (bits != 512 && bits != 1024 && bits != 2048) {
    throw RangeError("ahe: unsupported key size " + std::to_string(bits));
  }
  std::mt19937_64 rng(seed);
  mpz_class p, q, n;
  do {
    p = random_prime(bits / 2, rng);
    q = random_prime(bits / 2, rng);
    n = p * q;
  } while (p == q || mpz_sizeinbase(n.get_mpz_t(), 2) != bits);
  AheKeypair kp;
  kp.pk.n = n;
  kp.pk.n_squared = n * n;
  kp.pk.bits = bits;
  kp.pk.key_id = key_id_of(n);
  kp.sk.p = p;
  kp.sk.q = q;
  kp.sk.p_squared = p * p;
  kp.sk.q_squared = q * q;
  kp.sk.hp = crt_constant(n, p, kp.sk.p_squared);
  kp.sk.hq = crt_constant(n, q, kp.sk.q_squared);
  kp.sk.q_inv_p = invert(q, p);
  kp.sk.n_mod_phi_p2 = n % (p * (p - 1));
  kp.sk.n_mod_phi_q2 = n % (q * (q - 1));
  kp.sk.q2_inv_p2 = invert(kp.sk.q_squared, kp.sk.p_squared);
  kp.sk.key_id = kp.pk.key_id;
  return kp;
}

AheCiphertext ahe_enc(const AhePublicKey& pk, const mpz_class& m,
                      std::mt19937_64& rng) {
  if (m < 0 || m >= pk.n) throw RangeError("ahe: plaintext outside [0, N)");
  mpz_class r;
  do {
    r = random_below(pk.n, rng);
  } while (r == 0);
  mpz_class gm = (1 + m * pk.n) % pk.n_squared;
  mpz_class c = (gm * powm(r, pk.n, pk.n_squared)) % pk.n_squared;
  return {c, pk.key_id};
}

AheCiphertext ahe_enc(const AheKeypair& kp, const mpz_class& m, std::mt19937_64& rng) {
  const AhePublicKey& pk = kp.pk;
  const AheSecretKey& sk = kp.sk;
  if (m < 0 || m >= pk.n) throw RangeError("ahe: plaintext outside [0, N)");
  mpz_class r;
  do {
    r = random_below(pk.n, rng);
  } while (r == 0);
  mpz_class rp = powm(r % sk.p_squared, sk.n_mod_phi_p2, sk.p_squared);
  mpz_class rq = powm(r % sk.q_squared, sk.n_mod_phi_q2, sk.q_squared);
  mpz_class h = ((rp - rq) * sk.q2_inv_p2) % sk.p_squared;
  if (h < 0) h += sk.p_squared;
  mpz_class rn = rq + h * sk.q_squared;
  mpz_class gm = (1 + m * pk.n) % pk.n_squared;
  return {(gm * rn) % pk.n_squared, pk.key_id};
}

mpz_class ahe_dec(const AheSecretKey& sk, const AheCiphertext& c) {
  if (c.key_id != sk.key_id) throw KeyMismatchError("ahe: decrypting under the wrong key");
  mpz_class xp = powm(c.value % sk.p_squared, sk.p - 1, sk.p_squared);
  mpz_class mp = (((xp - 1) / sk.p) * sk.hp) % sk.p;
  mpz_class xq = powm(c.value % sk.q_squared, sk.q - 1, sk.q_squared);
  mpz_class mq = (((xq - 1) / sk.q) * sk.hq) % sk.q;
  mpz_class diff = ((mp - mq) * sk.q_inv_p) % sk.p;
  if (diff < 0) diff += sk.p;
  return mq + sk.q * diff;
}

AheCiphertext ahe_add(const AhePublicKey& pk, const AheCiphertext& a,
                      const AheCiphertext& b) {
  check_key(pk, a);
  check_key(pk, b);
  return {(a.value * b.value) % pk.n_squared, pk.key_id};
}

AheCiphertext ahe_add_plain(const AhePublicKey& pk, const AheCiphertext& a,
                            const mpz_class& m) {
  check_key(pk, a);
  mpz_class mm = m % pk.n;
  if (mm < 0) mm += pk.n;
  mpz_class gm = (1 + mm * pk.n) % pk.n_squared;
  return {(a.value * gm) % pk.n_squared, pk.key_id};
}

AheCiphertext ahe_sub_plain(const AhePublicKey& pk, const AheCiphertext& a,
                            const mpz_class& m) {
  mpz_class mm = m % pk.n;
  if (mm < 0) mm += pk.n;
  return ahe_add_plain(pk, a, (pk.n - mm) % pk.n);
}

AheCiphertext ahe_rerandomize(const AhePublicKey& pk, const AheCiphertext& a,
                              std::mt19937_64& rng) {
  check_key(pk, a);
  mpz_class r;
  do {
    r = random_below(pk.n, rng);
  } while (r == 0);
  return {(a.value * powm(r, pk.n, pk.n_squared)) % pk.n_squared, pk.key_id};
}

void put_mpz(Bytes& out, const mpz_class& v) {
  if (v < 0) throw RangeError("put_mpz: negative value");
  std::size_t len = v == 0 ? 0 : (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  put_u32(out, static_cast<std::uint32_t>(len));
  std::size_t start = out.size();
  out.resize(start + len);
  std::size_t count = 0;
  if (len > 0) mpz_export(out.data() + start, &count, 1, 1, 1, 0, v.get_mpz_t());
}

mpz_class get_mpz(std::span<const std::uint8_t> in, std::size_t& pos) {
  std::uint32_t len = get_u32(in, pos);
  if (pos + len > in.size()) throw ShapeError("get_mpz: truncated magnitude");
  mpz_class v;
  if (len > 0) mpz_import(v.get_mpz_t(), len, 1, 1, 1, 0, in.data() + pos);
  pos += len;
  return v;
}

Bytes serialize(const AhePublicKey& pk) {
  Bytes out;
  put_u32(out, pk.bits);
  put_mpz(out, pk.n);
  return out;
}

AhePublicKey deserialize_public_key(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  AhePublicKey pk;
  pk.bits = get_u32(bytes, pos);
  pk.n = get_mpz(bytes, pos);
  pk.n_squared = pk.n * pk.n;
  pk.key_id = key_id_of(pk.n);
  return pk;
}

}  // namespace flurp
