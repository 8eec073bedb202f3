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

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <span>

#include "flurp/transport.h"

namespace flurp {

// Paillier public key with generator g = N + 1.
struct AhePublicKey {
  mpz_class n;
  mpz_class n_squared;
  unsigned bits = 0;
  std::uint64_t key_id = 0;
};

struct AheSecretKey {
  mpz_class p, q;
  mpz_class p_squared, q_squared;
  mpz_class hp, hq;    // CRT decryption constants
  mpz_class q_inv_p;   // q^{-1} mod p
  mpz_class n_mod_phi_p2, n_mod_phi_q2;  // N mod p(p-1), N mod q(q-1)
  mpz_class q2_inv_p2;                   // (q^2)^{-1} mod p^2
  std::uint64_t key_id = 0;
};

struct AheKeypair {
  AhePublicKey pk;
  AheSecretKey sk;
};

struct AheCiphertext {
  mpz_class value;
  std::uint64_t key_id = 0;
};

// Generates a key pair whose modulus N has exactly `bits` bits. Accepted
// sizes are 512 (test mode), 1024 (default) and 2048.
AheKeypair ahe_keygen(unsigned bits, std::uint64_t seed);

// Uniform integer in [0, bound).
mpz_class random_below(const mpz_class& bound, std::mt19937_64& rng);

AheCiphertext ahe_enc(const AhePublicKey& pk, const mpz_class& m,
                      std::mt19937_64& rng);
// Same distribution as ahe_enc, computed mod p^2 and q^2 by the key owner.
AheCiphertext ahe_enc(const AheKeypair& kp, const mpz_class& m, std::mt19937_64& rng);
mpz_class ahe_dec(const AheSecretKey& sk, const AheCiphertext& c);

// Enc(m1) (+) Enc(m2) = Enc(m1 + m2 mod N).
AheCiphertext ahe_add(const AhePublicKey& pk, const AheCiphertext& a,
                      const AheCiphertext& b);
// Enc(m1) [+] m2 = Enc(m1 + m2 mod N). Does not refresh the randomness.
AheCiphertext ahe_add_plain(const AhePublicKey& pk, const AheCiphertext& a,
                            const mpz_class& m);
// Enc(m1) [+] (N - m2) = Enc(m1 - m2 mod N).
AheCiphertext ahe_sub_plain(const AhePublicKey& pk, const AheCiphertext& a,
                            const mpz_class& m);
// Multiplies in a fresh encryption of zero so the result is unlinkable to the
// input ciphertext.
AheCiphertext ahe_rerandomize(const AhePublicKey& pk, const AheCiphertext& a,
                              std::mt19937_64& rng);

// Ciphertext wire format: u32 LE byte length | big-endian magnitude.
void put_mpz(Bytes& out, const mpz_class& v);
mpz_class get_mpz(std::span<const std::uint8_t> in, std::size_t& pos);

Bytes serialize(const AhePublicKey& pk);
AhePublicKey deserialize_public_key(std::span<const std::uint8_t> bytes);

}  // namespace flurp
