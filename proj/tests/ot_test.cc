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

#include "flurp/ot.h"

#include <gtest/gtest.h>

#include <random>

#include "flurp/error.h"
#include "flurp/session.h"

namespace flurp {
namespace {

std::vector<std::uint8_t> run_ot(OtShape shape, const std::vector<std::uint8_t>& msgs,
                                 const std::vector<std::uint8_t>& choices,
                                 TranscriptCounters* counters = nullptr, std::uint64_t seed = 1) {
  auto r = run_two_party_counted(seed, [&](Party& p) {
    return ot_batch(p, 0, shape, p.id() == 0 ? std::span<const std::uint8_t>(msgs)
                                              : std::span<const std::uint8_t>(),
                    p.id() == 1 ? std::span<const std::uint8_t>(choices)
                                : std::span<const std::uint8_t>());
  });
  if (counters) *counters = r.second.second;
  return r.second.first;
}

TEST(Ot, SelectsChosenMessage) {
  EXPECT_EQ(run_ot({4, 2}, {0, 1, 2, 3}, {2}), std::vector<std::uint8_t>{2});
}

TEST(Ot, AllEqualMessages) {
  EXPECT_EQ(run_ot({4, 2}, {3, 3, 3, 3}, {0}), std::vector<std::uint8_t>{3});
}

TEST(Ot, RandomBatchAndConstantRounds) {
  std::mt19937_64 rng(4);
  for (std::size_t n : {1u, 1000u}) {
    std::vector<std::uint8_t> msgs(n * 16), ch(n);
    for (auto& m : msgs) m = rng() & 3U;
    for (auto& c : ch) c = rng() & 15U;
    TranscriptCounters tc;
    auto out = run_ot({16, 2}, msgs, ch, &tc);
    for (std::size_t j = 0; j < n; ++j) ASSERT_EQ(out[j], msgs[j * 16 + ch[j]]);
    // choice offset out, masked messages back
    EXPECT_EQ(tc.rounds, 2u);
    EXPECT_EQ(tc.declared_value("ot.bits"), n * 16 * 2);
    EXPECT_EQ(tc.declared_value("ot.instances"), n);
  }
}

TEST(Ot, WiderPayloadsAndOtherSizes) {
  std::mt19937_64 rng(5);
  for (OtShape s : {OtShape{2, 1}, OtShape{8, 3}, OtShape{256, 8}}) {
    std::vector<std::uint8_t> msgs(50 * s.choices), ch(50);
    for (auto& m : msgs) m = static_cast<std::uint8_t>(rng() & ((1U << s.payload_bits) - 1));
    for (auto& c : ch) c = static_cast<std::uint8_t>(rng() % s.choices);
    auto out = run_ot(s, msgs, ch);
    for (std::size_t j = 0; j < 50; ++j) ASSERT_EQ(out[j], msgs[j * s.choices + ch[j]]);
  }
}

TEST(Ot, ReceiverViewIgnoresUnchosenMessages) {
  // Changing messages the receiver did not pick leaves its output alone and
  // changes only reply positions it cannot unmask.
  std::vector<std::uint8_t> a{0, 1, 2, 3}, b{3, 1, 0, 0};
  auto x = run_ot({4, 2}, a, {1}, nullptr, 9);
  auto y = run_ot({4, 2}, b, {1}, nullptr, 9);
  EXPECT_EQ(x, y);
}

TEST(Ot, ShapeErrors) {
  EXPECT_THROW(run_ot({3, 2}, {0, 0, 0}, {0}), ShapeError);
  EXPECT_THROW(run_ot({4, 9}, {0, 0, 0, 0}, {0}), ShapeError);
  EXPECT_THROW(run_ot({4, 2}, {0, 0, 0, 0}, {4}), ShapeError);
}

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> run_and(
    const std::vector<std::uint8_t>& lt, const std::vector<std::uint8_t>& el,
    const std::vector<std::uint8_t>& er, TranscriptCounters* tc = nullptr) {
  const std::size_t n = lt.size();
  std::mt19937_64 rng(n);
  std::vector<std::uint8_t> m[3];
  const std::vector<std::uint8_t>* in[3] = {&lt, &el, &er};
  for (int k = 0; k < 3; ++k) {
    m[k].resize(in[k]->size());
    for (auto& b : m[k]) b = rng() & 1U;
  }
  auto r = run_two_party_counted(3, [&](Party& p) {
    auto sh = [&](const std::vector<std::uint8_t>& s, int k) {
      BooleanShare out{p.id(), m[k]};
      if (p.id() == 1) {
        for (std::size_t j = 0; j < s.size(); ++j) out.bits[j] ^= s[j];
      }
      return out;
    };
    return correlated_and(p, sh(lt, 0), sh(el, 1), sh(er, 2));
  });
  if (tc) *tc = r.first.second;
  return {reveal(r.first.first.first, r.second.first.first),
          reveal(r.first.first.second, r.second.first.second)};
}

TEST(CorrelatedAnd, TruthTableExamples) {
  auto [e, f] = run_and({1}, {0}, {1});
  EXPECT_EQ(e[0], 1);
  EXPECT_EQ(f[0], 0);
  auto [e2, f2] = run_and({1, 0, 1}, {1, 1, 0}, {0, 0, 0});
  EXPECT_EQ(e2, (std::vector<std::uint8_t>{0, 0, 0}));
  EXPECT_EQ(f2, (std::vector<std::uint8_t>{0, 0, 0}));
}

TEST(CorrelatedAnd, RandomBatchOneRound) {
  std::mt19937_64 rng(12);
  const std::size_t n = 10000;
  std::vector<std::uint8_t> lt(n), el(n), er(n);
  for (std::size_t j = 0; j < n; ++j) {
    lt[j] = rng() & 1U;
    el[j] = rng() & 1U;
    er[j] = rng() & 1U;
  }
  TranscriptCounters tc;
  auto [e, f] = run_and(lt, el, er, &tc);
  for (std::size_t j = 0; j < n; ++j) {
    ASSERT_EQ(e[j], lt[j] & er[j]);
    ASSERT_EQ(f[j], el[j] & er[j]);
  }
  EXPECT_EQ(tc.rounds, 1u);
  EXPECT_EQ(tc.declared_value("and.bits"), 6 * n);
}

TEST(CorrelatedAnd, ShapeMismatch) {
  EXPECT_THROW(run_and({1, 0}, {1}, {1, 1}), ShapeError);
}

}  // namespace
}  // namespace flurp
