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

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "flurp/session.h"

namespace flurp {
namespace {

const Ring k32(32);

TEST(Lur, WindowedMaxAbs) {
  std::vector<double> g{1, -3, 2, 0.5, -4};
  EXPECT_EQ(linf_sample(g, 2).values, (std::vector<double>{3, 2, 4}));
  EXPECT_EQ(linf_sample(g, 1).values, (std::vector<double>{1, 3, 2, 0.5, 4}));
  EXPECT_EQ(linf_sample(g, 8).values, (std::vector<double>{4}));
  EXPECT_EQ(lur_length(1 << 16, 1 << 8), 256u);
  EXPECT_THROW(linf_sample(g, 0), RangeError);
}

TEST(Lur, SedCostScalesWithWindow) {
  for (auto [n, s] : {std::pair<std::size_t, std::size_t>{1 << 16, 1 << 8}, {1 << 14, 1 << 6}}) {
    const double ratio = static_cast<double>(sed_multiplications(10, n)) /
                         static_cast<double>(sed_multiplications(10, lur_length(n, s)));
    EXPECT_NEAR(ratio, static_cast<double>(s), 0.1 * static_cast<double>(s));
  }
}

std::vector<RingVector> secure_sed(const std::vector<RingVector>& lurs, unsigned scale,
                                   TranscriptCounters* tc = nullptr) {
  auto r = run_two_party_counted(5, [&](Party& p) {
    std::vector<ArithmeticShare> mine;
    for (std::size_t i = 0; i < lurs.size(); ++i) {
      auto s = split(lurs[i], k32, scale, 900 + i);
      mine.push_back(p.id() == 0 ? s.first : s.second);
    }
    return shared_sed_matrix(p, mine);
  });
  if (tc) *tc = r.first.second;
  EXPECT_EQ(r.first.first.scale, 2 * scale);
  return reveal(r.first.first, r.second.first);
}

TEST(Sed, ThreeClientExample) {
  auto m = secure_sed({{0}, {3}, {4}}, 0);
  EXPECT_EQ(m, (std::vector<RingVector>{{0, 9, 16}, {9, 0, 1}, {16, 1, 0}}));
}

TEST(Sed, RandomMatchesPlain) {
  std::mt19937_64 rng(6);
  std::vector<RingVector> lurs(10, RingVector(16));
  for (auto& l : lurs) {
    for (auto& v : l) v = rng() % 5000;
  }
  TranscriptCounters tc;
  EXPECT_EQ(secure_sed(lurs, 8, &tc), plain_sed_matrix(lurs, k32));
  EXPECT_EQ(tc.declared_value("sed.mul"), sed_multiplications(10, 16));
  EXPECT_EQ(tc.rounds, 1u);
}

TEST(Sed, RejectsMismatchedLurs) {
  EXPECT_THROW(secure_sed({{1, 2}, {3}}, 0), ShapeError);
}

struct QualifyRun {
  std::vector<std::uint8_t> q;
  std::vector<std::int64_t> counts;
};

QualifyRun secure_qualify(const std::vector<RingVector>& sed, std::uint64_t seed) {
  auto sh = split(flatten(SharedMatrix{0, k32, 0, sed}).values, k32, 0, seed);
  const std::size_t m = sed.size();
  auto r = run_two_party(seed, [&](Party& p) {
    auto keys = exchange_shuffle_keys(p, 512, seed);
    return neighbor_and_qualify(p, matrix_from_share(p.id() == 0 ? sh.first : sh.second, m, m),
                                keys);
  });
  QualifyRun out{r.first.q, {}};
  EXPECT_EQ(r.first.q, r.second.q);
  for (auto v : reveal(r.first.counts, r.second.counts)) out.counts.push_back(k32.to_signed(v));
  return out;
}

std::vector<RingVector> crafted_four() {
  std::vector<RingVector> m(4, RingVector(4, 0));
  auto set = [&](int i, int j, std::uint64_t v) { m[i][j] = m[j][i] = v; };
  set(0, 1, 1);
  set(0, 2, 2);
  set(1, 2, 3);
  set(3, 0, 101);
  set(3, 1, 102);
  set(3, 2, 100);
  return m;
}

TEST(Qualify, CraftedOutlier) {
  auto sed = crafted_four();
  std::vector<std::int64_t> counts;
  EXPECT_EQ(plain_qualify(sed, k32, &counts), (std::vector<std::uint8_t>{1, 1, 1, 0}));
  EXPECT_EQ(counts, (std::vector<std::int64_t>{3, 2, 2, 1}));
  auto r = secure_qualify(sed, 7);
  EXPECT_EQ(r.q, (std::vector<std::uint8_t>{1, 1, 1, 0}));
  EXPECT_EQ(r.counts, counts);
}

TEST(Qualify, AllIdenticalQualifiesNoOne) {
  std::vector<RingVector> sed(5, RingVector(5, 0));
  EXPECT_EQ(plain_qualify(sed, k32), std::vector<std::uint8_t>(5, 0));
  EXPECT_EQ(secure_qualify(sed, 8).q, std::vector<std::uint8_t>(5, 0));
}

TEST(Qualify, TooFewClients) {
  EXPECT_THROW(plain_qualify({{0}}, k32), ShapeError);
  EXPECT_THROW(secure_qualify({{0}}, 9), ShapeError);
}

TEST(Qualify, CountsSumWhenDistancesDistinct) {
  // Each row has exactly m - floor(m/2) entries below its median.
  std::mt19937_64 rng(10);
  for (std::size_t m : {5u, 10u, 11u}) {
    std::vector<RingVector> lurs(m, RingVector(4));
    for (auto& l : lurs) {
      for (auto& v : l) v = rng() % 1000;
    }
    std::vector<std::int64_t> counts;
    plain_qualify(plain_sed_matrix(lurs, k32), k32, &counts);
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}),
              static_cast<std::int64_t>(m * (m - median_rank(m))));
  }
}

std::vector<std::vector<double>> gaussian_updates(std::size_t m, std::size_t n, double sd,
                                                  std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, sd);
  std::vector<std::vector<double>> u(m, std::vector<double>(n));
  for (auto& v : u) {
    for (auto& x : v) x = nd(rng);
  }
  return u;
}

TEST(Defense, SecureMatchesOracle) {
  std::mt19937_64 rng(12);
  for (int seed = 0; seed < 12; ++seed) {
    const std::size_t m = seed % 3 == 0 ? 6 : 10;
    auto ups = gaussian_updates(m, 24, 0.5, rng);
    if (seed % 2) {
      for (std::size_t i = 0; i < m / 3; ++i) {
        for (auto& x : ups[i]) x += 2.0;
      }
    }
    std::vector<double> sizes(m);
    for (auto& s : sizes) s = 10 + static_cast<double>(rng() % 50);
    DefenseConfig cfg{k32, 8, 4, 512};
    auto plain = plaintext_defense(ups, sizes, cfg);
    auto sec = secure_defense(ups, sizes, cfg, 100 + seed);
    ASSERT_EQ(sec.qualified, plain.qualified) << seed;
    ASSERT_EQ(sec.skipped, plain.skipped);
    ASSERT_EQ(sec.global_update, plain.global_update) << seed;
    EXPECT_GT(sec.counters.bytes_sent, 0u);
  }
}

TEST(Defense, IpmOutliersExcluded) {
  std::mt19937_64 rng(13);
  const std::size_t m = 10, n = 64;
  auto ups = gaussian_updates(m, n, 0.1, rng);
  std::vector<double> mu(n, 0.0);
  for (std::size_t i = 4; i < m; ++i) {
    for (std::size_t k = 0; k < n; ++k) mu[k] += ups[i][k] / 6.0;
  }
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < n; ++k) ups[i][k] = -100.0 * mu[k];
  }
  DefenseConfig cfg{Ring(64), 16, 4, 512};
  auto out = plaintext_defense(ups, std::vector<double>(m, 1.0), cfg);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(out.qualified[i], 0) << i;
  std::size_t benign = 0;
  for (std::size_t i = 4; i < m; ++i) benign += out.qualified[i];
  EXPECT_GE(benign, 3u);
}

TEST(Defense, AllEqualRoundIsSkipped) {
  std::vector<std::vector<double>> ups(4, std::vector<double>(8, 0.25));
  DefenseConfig cfg{k32, 8, 2, 512};
  EXPECT_TRUE(plaintext_defense(ups, std::vector<double>(4, 1.0), cfg).skipped);
  EXPECT_TRUE(secure_defense(ups, std::vector<double>(4, 1.0), cfg, 3).skipped);
}

TEST(AggregationWeights, SumToOneAndProportional) {
  std::vector<double> sizes{3, 1, 1, 2};
  std::vector<std::uint8_t> q{1, 1, 0, 1};
  auto w = aggregation_weights(sizes, q, 8);
  EXPECT_EQ(std::accumulate(w.begin(), w.end(), std::uint64_t{0}), 256u);
  EXPECT_EQ(w[2], 0u);
  EXPECT_NEAR(static_cast<double>(w[0]) / 256.0, 0.5, 1.0 / 256);
  EXPECT_THROW(aggregation_weights(sizes, std::vector<std::uint8_t>(4, 0), 8),
               NoQualifiedClientsError);
  EXPECT_THROW(aggregation_weights(sizes, std::vector<std::uint8_t>(3, 1), 8), ShapeError);
}

std::vector<double> run_aggregate(const std::vector<std::vector<double>>& ups,
                                  const std::vector<std::uint8_t>& q,
                                  const std::vector<double>& sizes) {
  FixedPointCodec codec{8, k32};
  auto r = run_two_party(4, [&](Party& p) {
    std::vector<ArithmeticShare> mine;
    for (std::size_t i = 0; i < ups.size(); ++i) {
      auto s = split(codec.encode(ups[i]), k32, 8, 40 + i);
      mine.push_back(p.id() == 0 ? s.first : s.second);
    }
    return aggregate(p, mine, q, sizes, 8);
  });
  EXPECT_EQ(r.first, r.second);
  return r.first;
}

TEST(Aggregate, SingletonReturnsItsUpdate) {
  std::vector<std::vector<double>> ups{{1.5, -2.25}, {7, 7}};
  auto g = run_aggregate(ups, {1, 0}, {5, 5});
  EXPECT_EQ(g, (std::vector<double>{1.5, -2.25}));
}

TEST(Aggregate, OppositeUpdatesCancel) {
  std::vector<std::vector<double>> ups{{0.5, -1.75, 3}, {-0.5, 1.75, -3}};
  auto g = run_aggregate(ups, {1, 1}, {4, 4});
  EXPECT_EQ(g, (std::vector<double>{0, 0, 0}));
}

TEST(Aggregate, RandomSubsetsMatchWeightedMean) {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 10; ++rep) {
    auto ups = gaussian_updates(6, 5, 1.0, rng);
    std::vector<std::uint8_t> q(6);
    std::vector<double> sizes(6);
    for (std::size_t i = 0; i < 6; ++i) {
      q[i] = rng() & 1U;
      sizes[i] = 1 + static_cast<double>(rng() % 9);
    }
    q[rep % 6] = 1;
    auto g = run_aggregate(ups, q, sizes);
    double total = 0;
    for (std::size_t i = 0; i < 6; ++i) total += q[i] ? sizes[i] : 0;
    for (std::size_t k = 0; k < 5; ++k) {
      double want = 0;
      for (std::size_t i = 0; i < 6; ++i) want += q[i] ? sizes[i] / total * ups[i][k] : 0;
      // encoding and weight rounding
      EXPECT_NEAR(g[k], want, 0.03);
    }
  }
}

}  // namespace
}  // namespace flurp
