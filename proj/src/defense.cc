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

#include "flurp/defense.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>

#include "flurp/compare.h"
#include "flurp/error.h"
#include "flurp/select.h"
#include "flurp/session.h"

namespace flurp {

std::size_t lur_length(std::size_t n, std::size_t window) {
  if (window == 0) throw RangeError("linf_sample: window must be positive");
  return n / window + (n % window != 0 ? 1 : 0);
}

Lur linf_sample(std::span<const double> update, std::size_t window) {
  Lur out;
  out.window = window;
  out.values.assign(lur_length(update.size(), window), 0.0);
  for (std::size_t k = 0; k < update.size(); ++k) {
    double& slot = out.values[k / window];
    slot = std::max(slot, std::fabs(update[k]));
  }
  return out;
}

std::uint64_t sed_multiplications(std::size_t clients, std::size_t dims) {
  return static_cast<std::uint64_t>(clients) * (clients - 1) / 2 * dims;
}

SharedMatrix shared_sed_matrix(Party& party, const std::vector<ArithmeticShare>& lurs) {
  const std::size_t m = lurs.size();
  if (m == 0) throw ShapeError("shared_sed_matrix: no clients");
  const std::size_t d = lurs[0].size();
  for (const auto& v : lurs) {
    if (v.size() != d) throw ShapeError("shared_sed_matrix: LUR length mismatch");
    if (v.scale != lurs[0].scale || v.ring != lurs[0].ring) {
      throw ShapeError("shared_sed_matrix: LUR scale mismatch");
    }
  }
  const Ring ring = lurs[0].ring;
  ArithmeticShare diff{party.id(), ring, lurs[0].scale, {}};
  diff.values.reserve(sed_multiplications(m, d));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        diff.values.push_back(ring.sub(lurs[i].values[k], lurs[j].values[k]));
      }
    }
  }
  SharedMatrix out{party.id(), ring, 2 * lurs[0].scale,
                   std::vector<RingVector>(m, RingVector(m, 0))};
  if (diff.size() == 0) return out;
  ArithmeticShare sq = mul(party, diff, diff);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < d; ++k) acc = ring.add(acc, sq.values[pos++]);
      out.rows[i][j] = acc;
      out.rows[j][i] = acc;
    }
  }
  party.net.declare("sed.mul", diff.size());
  return out;
}

std::size_t median_rank(std::size_t clients) { return clients / 2; }

QualificationVector neighbor_and_qualify(Party& party, const SharedMatrix& sed,
                                         const ShuffleKeys& keys) {
  const std::size_t m = sed.rows.size();
  if (m < 2) throw ShapeError("neighbor_and_qualify: need at least two clients");
  for (const auto& r : sed.rows) {
    if (r.size() != m) throw ShapeError("neighbor_and_qualify: SED matrix is not square");
  }
  const Ring ring = sed.ring;

  PermutationSet perms = random_permutations(sed.shape(), party.rng);
  SharedMatrix shuffled = matrix_shared_shuffle(party, sed, perms, keys);

  SelectionTask task{std::move(shuffled), std::vector<std::size_t>(m, median_rank(m)),
                     std::vector<std::size_t>(m)};
  std::iota(task.source.begin(), task.source.end(), std::size_t{0});
  SelectionResult sel = mul_row_quick_select(party, task);

  QualificationVector out;
  out.medians = {party.id(), ring, sed.scale, RingVector(m)};
  for (std::size_t i = 0; i < m; ++i) out.medians.values[i] = sel.values.at(i).values.at(0);

  ArithmeticShare alpha = flatten(sed);
  ArithmeticShare beta{party.id(), ring, sed.scale, {}};
  beta.values.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) beta.values.push_back(out.medians.values[i]);
  }
  BooleanShare nb = packed_compare(party, alpha, beta);
  ArithmeticShare n = b2a(party, nb, ring);

  out.counts = {party.id(), ring, 0, RingVector(m, 0)};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out.counts.values[j] = ring.add(out.counts.values[j], n.values[i * m + j]);
    }
  }
  const std::int64_t threshold = static_cast<std::int64_t>(median_rank(m)) - 1;
  std::vector<std::uint64_t> thr(m, ring.from_signed(threshold));
  ArithmeticShare thr_share = share_public(party.id(), ring, 0, thr);
  BooleanShare qb = packed_compare(party, thr_share, out.counts);
  out.q = open(party, qb, "qualify.reveal");
  return out;
}

std::vector<std::uint64_t> aggregation_weights(std::span<const double> sizes,
                                               std::span<const std::uint8_t> q,
                                               unsigned frac_bits) {
  if (sizes.size() != q.size()) throw ShapeError("aggregation_weights: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i]) total += sizes[i];
  }
  if (total <= 0.0) throw NoQualifiedClientsError("aggregate: no qualified clients this round");
  const std::int64_t one = std::int64_t{1} << frac_bits;
  std::vector<std::int64_t> w(q.size(), 0);
  std::int64_t acc = 0;
  std::size_t heaviest = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!q[i]) continue;
    w[i] = std::llround(sizes[i] / total * static_cast<double>(one));
    acc += w[i];
    if (!q[heaviest] || w[i] > w[heaviest]) heaviest = i;
  }
  // Rounding slack lands on the heaviest client so the weights sum to one.
  w[heaviest] += one - acc;
  std::vector<std::uint64_t> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = static_cast<std::uint64_t>(w[i]);
  return out;
}

std::vector<double> aggregate(Party& party, const std::vector<ArithmeticShare>& updates,
                              std::span<const std::uint8_t> q,
                              std::span<const double> sizes, unsigned frac_bits) {
  if (updates.size() != q.size()) throw ShapeError("aggregate: update/q length mismatch");
  auto w = aggregation_weights(sizes, q, frac_bits);
  const std::size_t n = updates[0].size();
  const Ring ring = updates[0].ring;
  ArithmeticShare acc{party.id(), ring, updates[0].scale + frac_bits, RingVector(n, 0)};
  for (std::size_t i = 0; i < updates.size(); ++i) {
    if (!q[i]) continue;
    if (updates[i].size() != n) throw ShapeError("aggregate: update length mismatch");
    for (std::size_t k = 0; k < n; ++k) {
      acc.values[k] = ring.add(acc.values[k], ring.mul(w[i], updates[i].values[k]));
    }
  }
  RingVector g = open(party, acc, "aggregate.reveal");
  FixedPointCodec codec{frac_bits, ring};
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = codec.decode_at(g[k], acc.scale);
  return out;
}

EncodedRound encode_round(const std::vector<std::vector<double>>& updates,
                          const DefenseConfig& cfg) {
  FixedPointCodec codec{cfg.frac_bits, cfg.ring};
  EncodedRound out;
  for (const auto& g : updates) {
    out.lurs.push_back(codec.encode(linf_sample(g, cfg.window).values));
    out.updates.push_back(codec.encode(g));
  }
  return out;
}

std::vector<RingVector> plain_sed_matrix(const std::vector<RingVector>& lurs, Ring ring) {
  const std::size_t m = lurs.size();
  std::vector<RingVector> out(m, RingVector(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < lurs[i].size(); ++k) {
        std::uint64_t d = ring.sub(lurs[i][k], lurs[j][k]);
        acc = ring.add(acc, ring.mul(d, d));
      }
      out[i][j] = out[j][i] = acc;
    }
  }
  return out;
}

std::vector<std::uint8_t> plain_qualify(const std::vector<RingVector>& sed, Ring ring,
                                        std::vector<std::int64_t>* counts) {
  const std::size_t m = sed.size();
  if (m < 2) throw ShapeError("plain_qualify: need at least two clients");
  const std::size_t t = median_rank(m);
  auto less = [&](std::uint64_t a, std::uint64_t b) { return ring.msb(ring.sub(a, b)); };
  std::vector<std::int64_t> s(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    RingVector row = sed[i];
    std::sort(row.begin(), row.end(), [&](auto a, auto b) { return less(b, a); });
    const std::uint64_t mu = row[t - 1];
    for (std::size_t j = 0; j < m; ++j) s[j] += less(sed[i][j], mu) ? 1 : 0;
  }
  std::vector<std::uint8_t> q(m);
  const std::int64_t threshold = static_cast<std::int64_t>(t) - 1;
  for (std::size_t j = 0; j < m; ++j) q[j] = threshold < s[j] ? 1 : 0;
  if (counts) *counts = s;
  return q;
}

RoundOutcome plaintext_defense(const std::vector<std::vector<double>>& updates,
                               std::span<const double> sizes, const DefenseConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  EncodedRound enc = encode_round(updates, cfg);
  const Ring ring = cfg.ring;
  RoundOutcome out;
  out.qualified = plain_qualify(plain_sed_matrix(enc.lurs, ring), ring, &out.counts);
  if (std::none_of(out.qualified.begin(), out.qualified.end(), [](auto b) { return b != 0; })) {
    out.skipped = true;
  } else {
    auto w = aggregation_weights(sizes, out.qualified, cfg.frac_bits);
    const std::size_t n = enc.updates[0].size();
    FixedPointCodec codec{cfg.frac_bits, ring};
    out.global_update.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::uint64_t acc = 0;
      for (std::size_t i = 0; i < updates.size(); ++i) {
        if (out.qualified[i]) acc = ring.add(acc, ring.mul(w[i], enc.updates[i][k]));
      }
      out.global_update[k] = codec.decode_at(acc, 2 * cfg.frac_bits);
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RoundOutcome secure_defense_party(Party& party,
                                  const std::vector<std::vector<double>>& updates,
                                  std::span<const double> sizes, const DefenseConfig& cfg,
                                  std::uint64_t seed) {
  auto start = std::chrono::steady_clock::now();
  EncodedRound enc = encode_round(updates, cfg);
  const std::size_t m = updates.size();
  // Client-side Split; each client uses its own seed.
  std::vector<ArithmeticShare> lurs, ups;
  for (std::size_t i = 0; i < m; ++i) {
    auto l = split(enc.lurs[i], cfg.ring, cfg.frac_bits, seed * 1315423911ULL + 2 * i);
    auto u = split(enc.updates[i], cfg.ring, cfg.frac_bits, seed * 1315423911ULL + 2 * i + 1);
    lurs.push_back(party.id() == 0 ? std::move(l.first) : std::move(l.second));
    ups.push_back(party.id() == 0 ? std::move(u.first) : std::move(u.second));
  }
  const TranscriptCounters before = party.net.counters();
  SharedMatrix sed = shared_sed_matrix(party, lurs);
  ShuffleKeys keys = exchange_shuffle_keys(party, cfg.key_bits, seed);
  QualificationVector qv = neighbor_and_qualify(party, sed, keys);
  RoundOutcome out;
  out.qualified = qv.q;
  if (std::any_of(out.qualified.begin(), out.qualified.end(), [](auto b) { return b != 0; })) {
    out.global_update = aggregate(party, ups, out.qualified, sizes, cfg.frac_bits);
  } else {
    out.skipped = true;
  }
  out.counters = party.net.counters();
  out.counters.bytes_sent -= before.bytes_sent;
  out.counters.bytes_received -= before.bytes_received;
  out.counters.messages_sent -= before.messages_sent;
  out.counters.messages_received -= before.messages_received;
  out.counters.rounds -= before.rounds;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RoundOutcome secure_defense(const std::vector<std::vector<double>>& updates,
                            std::span<const double> sizes, const DefenseConfig& cfg,
                            std::uint64_t seed) {
  auto [r0, r1] = run_two_party(seed, [&](Party& party) {
    return secure_defense_party(party, updates, sizes, cfg, seed);
  });
  (void)r1;
  return r0;
}

}  // namespace flurp
