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
#include <string>

#include "flurp/transport.h"

namespace flurp {

struct CompareBench {
  std::size_t pairs = 0;
  unsigned bits = 32;
  unsigned chunk_bits = 4;
  std::uint64_t measured_rounds = 0;
  std::uint64_t accounted_bits = 0;
  std::uint64_t formula_bits = 0;
  std::uint64_t formula_rounds = 0;
  std::uint64_t millionaire_rounds = 0;
  std::uint64_t bytes_sent = 0;
  std::size_t mismatches = 0;
  double seconds = 0.0;
};

// Random signed pairs in (-2^{l-2}, 2^{l-2}); with `net` this process runs one
// party, otherwise both run in-process.
CompareBench bench_compare(std::size_t pairs, unsigned bits, unsigned chunk_bits,
                           std::uint64_t seed, Endpoint* net = nullptr);

struct MedianBench {
  std::size_t clients = 0;
  std::uint64_t bytes = 0;  // party 0, sent + received
  std::uint64_t rounds = 0;
  std::uint64_t ciphertexts = 0;
  std::size_t compare_calls = 0;
  bool medians_ok = false;
  double seconds = 0.0;
};

MedianBench bench_median(std::size_t clients, unsigned key_bits, unsigned bits,
                         std::uint64_t seed, Endpoint* net = nullptr);

std::string compare_csv_header();
std::string to_csv(const CompareBench& b);
std::string median_csv_header();
std::string to_csv(const MedianBench& b);

}  // namespace flurp
