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

#include "flurp/bench.h"

#include <chrono>
#include <numeric>
#include <random>
#include <sstream>

#include "flurp/compare.h"
#include "flurp/select.h"
#include "flurp/session.h"
#include "flurp/sharing.h"
#include "flurp/shuffle.h"

namespace flurp {

namespace {

template <typename Fn>
auto run_with(std::uint64_t seed, Endpoint* net, Fn&& fn) {
  if (net) {
    Party party(*net, seed);
    return fn(party);
  }
  auto [r0, r1] = run_two_party(seed, fn);
  (void)r1;
  return r0;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

CompareBench bench_compare(std::size_t pairs, unsigned bits, unsigned chunk_bits,
                           std::uint64_t seed, Endpoint* net) {
  const Ring ring(bits);
  ring.validate();
  std::mt19937_64 rng(seed);
  const std::int64_t bound = std::int64_t{1} << (bits - 2);
  std::uniform_int_distribution<std::int64_t> dist(-bound + 1, bound - 1);
  RingVector x(pairs), y(pairs);
  std::vector<std::uint8_t> expect(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    std::int64_t a = dist(rng), b = dist(rng);
    x[i] = ring.from_signed(a);
    y[i] = ring.from_signed(b);
    expect[i] = a < b;
  }
  auto xs = split(x, ring, 0, seed + 1);
  auto ys = split(y, ring, 0, seed + 2);

  CompareBench out;
  out.pairs = pairs;
  out.bits = bits;
  out.chunk_bits = chunk_bits;
  auto t0 = std::chrono::steady_clock::now();
  auto res = run_with(seed, net, [&](Party& party) {
    const auto& xa = party.id() == 0 ? xs.first : xs.second;
    const auto& ya = party.id() == 0 ? ys.first : ys.second;
    const TranscriptCounters before = party.net.counters();
    BooleanShare c = packed_compare(party, xa, ya, chunk_bits);
    TranscriptCounters after = party.net.counters();
    // The check below is outside the measured protocol.
    auto bitsv = open(party, c, "bench.reveal");
    after.rounds -= before.rounds;
    after.bytes_sent -= before.bytes_sent;
    after.declared["compare.bits"] -= before.declared_value("compare.bits");
    return std::make_pair(bitsv, after);
  });
  out.seconds = since(t0);
  out.measured_rounds = res.second.rounds;
  out.accounted_bits = res.second.declared_value("compare.bits");
  out.bytes_sent = res.second.bytes_sent;
  out.formula_bits = compare_cost_bits(pairs, bits, chunk_bits);
  out.formula_rounds = compare_rounds(bits, chunk_bits);
  out.millionaire_rounds = millionaire_rounds(pairs, bits);
  for (std::size_t i = 0; i < pairs; ++i) out.mismatches += res.first[i] != expect[i];
  return out;
}

MedianBench bench_median(std::size_t clients, unsigned key_bits, unsigned bits,
                         std::uint64_t seed, Endpoint* net) {
  const Ring ring(bits);
  ring.validate();
  const std::size_t m = clients;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> dist(0, (std::uint64_t{1} << 24) - 1);
  RingVector flat(m * m);
  for (auto& v : flat) v = dist(rng);
  auto sh = split(flat, ring, 0, seed + 3);
  const std::size_t t = m / 2;

  MedianBench out;
  out.clients = m;
  auto t0 = std::chrono::steady_clock::now();
  auto res = run_with(seed, net, [&](Party& party) {
    SharedMatrix a = matrix_from_share(party.id() == 0 ? sh.first : sh.second, m, m);
    ShuffleKeys keys = exchange_shuffle_keys(party, key_bits, seed);
    PermutationSet perms = random_permutations(a.shape(), party.rng);
    SharedMatrix s = matrix_shared_shuffle(party, a, perms, keys);
    SelectionTask task{std::move(s), std::vector<std::size_t>(m, t), std::vector<std::size_t>(m)};
    std::iota(task.source.begin(), task.source.end(), std::size_t{0});
    SelectionResult sel = mul_row_quick_select(party, task);
    TranscriptCounters c = party.net.counters();
    ArithmeticShare med{party.id(), ring, 0, RingVector(m)};
    for (std::size_t i = 0; i < m; ++i) med.values[i] = sel.values.at(i).values.at(0);
    RingVector revealed = open(party, med, "bench.reveal");
    return std::make_tuple(revealed, c, sel.compare_calls);
  });
  out.seconds = since(t0);
  const auto& c = std::get<1>(res);
  out.bytes = c.bytes_sent + c.bytes_received;
  out.rounds = c.rounds;
  out.ciphertexts = c.declared_value("shuffle.ciphertexts");
  out.compare_calls = std::get<2>(res);
  out.medians_ok = true;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::int64_t> row(flat.begin() + static_cast<std::ptrdiff_t>(i * m),
                                  flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * m));
    if (static_cast<std::uint64_t>(kth_largest_plain(row, t)) != std::get<0>(res)[i]) {
      out.medians_ok = false;
    }
  }
  return out;
}

std::string compare_csv_header() {
  return "pairs,bits,chunk_bits,measured_rounds,formula_rounds,millionaire_rounds,"
         "accounted_bits,formula_bits,bytes_sent,mismatches,seconds";
}

std::string to_csv(const CompareBench& b) {
  std::ostringstream os;
  os << b.pairs << ',' << b.bits << ',' << b.chunk_bits << ',' << b.measured_rounds << ','
     << b.formula_rounds << ',' << b.millionaire_rounds << ',' << b.accounted_bits << ','
     << b.formula_bits << ',' << b.bytes_sent << ',' << b.mismatches << ',' << b.seconds;
  return os.str();
}

std::string median_csv_header() {
  return "clients,bytes,rounds,ciphertexts,compare_calls,medians_ok,seconds";
}

std::string to_csv(const MedianBench& b) {
  std::ostringstream os;
  os << b.clients << ',' << b.bytes << ',' << b.rounds << ',' << b.ciphertexts << ','
     << b.compare_calls << ',' << (b.medians_ok ? 1 : 0) << ',' << b.seconds;
  return os.str();
}

}  // namespace flurp
