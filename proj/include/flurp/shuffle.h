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
#include <random>
#include <vector>

#include "flurp/ahe.h"
#include "flurp/error.h"
#include "flurp/sharing.h"

namespace flurp {

// One permutation per row; row i may have its own length.
using PermutationSet = std::vector<std::vector<std::size_t>>;

// One party's half of a (possibly ragged) shared matrix.
struct SharedMatrix {
  int party = 0;
  Ring ring{32};
  unsigned scale = 0;
  std::vector<RingVector> rows;

  std::size_t row_count() const { return rows.size(); }
  std::size_t element_count() const;
  std::vector<std::size_t> shape() const;
};

SharedMatrix matrix_from_share(const ArithmeticShare& flat, std::size_t rows,
                               std::size_t cols);
ArithmeticShare flatten(const SharedMatrix& m);
std::vector<RingVector> reveal(const SharedMatrix& s0, const SharedMatrix& s1);

bool is_permutation(const std::vector<std::size_t>& p);
PermutationSet random_permutations(const std::vector<std::size_t>& row_lengths,
                                   std::mt19937_64& rng);
PermutationSet inverse(const PermutationSet& perms);

// out[i][j] = in[i][perm[i][j]].
template <typename T>
std::vector<std::vector<T>> matrix_shuffle_plain(const std::vector<std::vector<T>>& in,
                                                 const PermutationSet& perms) {
  if (perms.size() != in.size()) throw ShapeError("matrix_shuffle: row count mismatch");
  std::vector<std::vector<T>> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (perms[i].size() != in[i].size() || !is_permutation(perms[i])) {
      throw ShapeError("matrix_shuffle: row " + std::to_string(i) +
                       " permutation is not a bijection of its columns");
    }
    out[i].reserve(in[i].size());
    for (std::size_t j = 0; j < in[i].size(); ++j) out[i].push_back(in[i][perms[i][j]]);
  }
  return out;
}

// A party's own key pair plus the peer's public key.
struct ShuffleKeys {
  AheKeypair own;
  AhePublicKey peer;
};

// Generates this party's key pair and swaps public keys with the peer.
ShuffleKeys exchange_shuffle_keys(Party& party, unsigned key_bits,
                                  std::uint64_t seed);

// Statistical masking width for the shuffle: masks are drawn from
// [0, 2^kShuffleMaskBits) and offset by 2^kShuffleMaskBits so the masked
// plaintext never wraps modulo N.
inline constexpr unsigned kShuffleMaskBits = 128;

// Row-wise shared shuffle under party 0's permutations followed by party 1's.
// Each party passes only its own permutation set. Three message legs carrying
// 4 * (element count) ciphertexts in total; party 1's key protects the data
// path and party 0's key the mask-return path.
SharedMatrix matrix_shared_shuffle(Party& party, const SharedMatrix& d,
                                   const PermutationSet& own_perms,
                                   const ShuffleKeys& keys);

}  // namespace flurp
