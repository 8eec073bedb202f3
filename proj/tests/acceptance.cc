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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "flurp/ahe.h"
#include "flurp/bench.h"
#include "flurp/compare.h"
#include "flurp/defense.h"
#include "flurp/experiment.h"
#include "flurp/fltoy.h"
#include "flurp/select.h"
#include "flurp/session.h"
#include "flurp/sharing.h"
#include "flurp/shuffle.h"

namespace flurp {
namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1
Verdict comparison_correctness() {
  auto b = bench_compare(100000, 32, 4, 1);
  return {b.mismatches == 0 && b.seconds < 30.0,
          fmt("%zu pairs, %zu mismatches, %.1f s", b.pairs, b.mismatches, b.seconds)};
}

// 2
Verdict cost_formula() {
  bool ok = true;
  std::string d;
  for (std::size_t n : {1u, 10u, 1000u}) {
    auto b = bench_compare(n, 32, 4, 2);
    const std::uint64_t want = n * (32 / 4 * ((1u << 5) + 6) - 6);
    ok = ok && b.accounted_bits == want && b.accounted_bits == 298 * n && b.mismatches == 0;
    d += fmt("n=%zu:%llu bits ", n, static_cast<unsigned long long>(b.accounted_bits));
  }
  auto r1 = bench_compare(1, 32, 4, 3);
  auto r1024 = bench_compare(1024, 32, 4, 3);
  ok = ok && r1.measured_rounds == r1024.measured_rounds;
  d += fmt("rounds n=1:%llu n=1024:%llu", static_cast<unsigned long long>(r1.measured_rounds),
           static_cast<unsigned long long>(r1024.measured_rounds));
  return {ok, d};
}

struct ShuffleTrial {
  bool correct = false;
  std::uint64_t ciphertexts = 0;
  std::uint64_t legs = 0;
};

ShuffleTrial shuffle_trial(std::size_t m, std::uint64_t seed) {
  const Ring ring(32);
  std::mt19937_64 rng(seed);
  std::vector<RingVector> plain(m, RingVector(m));
  std::vector<RingVector> s0(m, RingVector(m)), s1(m, RingVector(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      plain[i][j] = ring.reduce(rng());
      s0[i][j] = ring.reduce(rng());
      s1[i][j] = ring.sub(plain[i][j], s0[i][j]);
    }
  }
  auto p0 = random_permutations(std::vector<std::size_t>(m, m), rng);
  auto p1 = random_permutations(std::vector<std::size_t>(m, m), rng);
  auto r = run_two_party_counted(seed, [&](Party& p) {
    auto keys = exchange_shuffle_keys(p, 512, seed);
    SharedMatrix d{p.id(), ring, 0, p.id() == 0 ? s0 : s1};
    return matrix_shared_shuffle(p, d, p.id() == 0 ? p0 : p1, keys);
  });
  ShuffleTrial t;
  t.correct = reveal(r.first.first, r.second.first) ==
              matrix_shuffle_plain(matrix_shuffle_plain(plain, p0), p1);
  t.ciphertexts = r.first.second.declared_value("shuffle.ciphertexts");
  t.legs = r.first.second.by_protocol.at("shuffle").messages_sent +
           r.second.second.by_protocol.at("shuffle").messages_sent;
  return t;
}

// 3
Verdict shuffle_correctness() {
  std::size_t good = 0;
  bool legs_ok = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto t = shuffle_trial(8, 1000 + s);
    good += t.correct;
    legs_ok = legs_ok && t.legs == 3;
  }
  bool ct_ok = true;
  std::string d = fmt("%zu/100 correct; ", good);
  for (std::size_t m : {4u, 8u, 16u}) {
    auto t = shuffle_trial(m, 7 + m);
    ct_ok = ct_ok && t.ciphertexts == 4 * m * m && t.legs == 3;
    d += fmt("m=%zu:%llu ct ", m, static_cast<unsigned long long>(t.ciphertexts));
  }
  d += legs_ok ? "3 legs" : "leg count off";
  return {good == 100 && ct_ok && legs_ok, d};
}

// 4
Verdict selection_correctness() {
  const Ring ring(32);
  std::size_t mismatches = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(trial);
    const std::uint64_t spread = trial % 2 == 0 ? 3 : 1u << 20;
    std::vector<std::vector<std::int64_t>> rows(20, std::vector<std::int64_t>(20));
    SharedMatrix a{0, ring, 0, {}}, b{1, ring, 0, {}};
    for (auto& row : rows) {
      RingVector x, y;
      for (auto& v : row) {
        v = static_cast<std::int64_t>(rng() % spread);
        std::uint64_t s = ring.reduce(rng());
        x.push_back(s);
        y.push_back(ring.sub(ring.from_signed(v), s));
      }
      a.rows.push_back(x);
      b.rows.push_back(y);
    }
    std::vector<std::size_t> src(20);
    std::iota(src.begin(), src.end(), std::size_t{0});
    auto r = run_two_party(trial, [&](Party& p) {
      return mul_row_quick_select(p, {p.id() == 0 ? a : b, std::vector<std::size_t>(20, 10), src});
    });
    for (std::size_t i = 0; i < 20; ++i) {
      auto got = ring.to_signed(reveal(r.first.values.at(i), r.second.values.at(i))[0]);
      mismatches += got != kth_largest_plain(rows[i], 10);
    }
  }
  return {mismatches == 0, fmt("100 matrices 20x20, t=10, half duplicate-heavy: %zu mismatches", mismatches)};
}

// 5
Verdict secure_oracle_equivalence() {
  std::size_t equal = 0, nontrivial = 0;
  const std::size_t sizes[3] = {6, 10, 20};
  for (std::uint64_t run = 0; run < 50; ++run) {
    const std::size_t m = sizes[run % 3];
    std::mt19937_64 rng(500 + run);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<std::vector<double>> lurs(m, std::vector<double>(16));
    for (std::size_t i = 0; i < m; ++i) {
      const double shift = i < m / 3 && run % 2 ? 3.0 : 0.0;
      for (auto& v : lurs[i]) v = std::fabs(nd(rng) + shift);
    }
    std::vector<double> w(m, 1.0);
    DefenseConfig cfg{Ring(32), 8, 1, 512};
    auto plain = plaintext_defense(lurs, w, cfg);
    auto sec = secure_defense(lurs, w, cfg, run);
    equal += sec.qualified == plain.qualified;
    nontrivial += std::count(plain.qualified.begin(), plain.qualified.end(), 0) > 0;
  }
  return {equal == 50, fmt("%zu/50 runs equal (m in {6,10,20}; %zu with exclusions)", equal, nontrivial)};
}

std::uint64_t measured_sed_mul(std::size_t clients, std::size_t dims) {
  auto r = run_two_party_counted(9, [&](Party& p) {
    std::vector<ArithmeticShare> v;
    for (std::size_t i = 0; i < clients; ++i) {
      v.push_back({p.id(), Ring(32), 0, RingVector(dims, i)});
    }
    return shared_sed_matrix(p, v).rows.size();
  });
  return r.first.second.declared_value("sed.mul");
}

// 6
Verdict lur_cost_reduction() {
  bool ok = true;
  std::string d;
  for (auto [n, s] : {std::pair<std::size_t, std::size_t>{1u << 16, 1u << 8}, {1u << 14, 1u << 6}}) {
    const double full = static_cast<double>(measured_sed_mul(4, n));
    const double lur = static_cast<double>(measured_sed_mul(4, lur_length(n, s)));
    const double ratio = full / lur;
    ok = ok && ratio >= 0.9 * static_cast<double>(s) && ratio <= 1.1 * static_cast<double>(s);
    d += fmt("n=%zu s=%zu ratio=%.1f ", n, s, ratio);
  }
  return {ok, d};
}

struct Summary {
  double ma = 0.0;
  double asr = 0.0;
  double clean_rounds = 0.0;  // fraction of rounds with no malicious client qualified
};

Summary run_seeds(AttackKind attack, DefenseKind defense, Mode mode, double malicious) {
  Summary s;
  const int seeds = 5;
  std::size_t rounds = 0;
  for (int seed = 1; seed <= seeds; ++seed) {
    ExperimentConfig c;
    c.seed = static_cast<std::uint64_t>(seed);
    c.attack = attack;
    c.defense = defense;
    c.mode = mode;
    c.malicious = malicious;
    auto r = run_experiment(c);
    s.ma += r.back().ma / seeds;
    s.asr += r.back().asr / seeds;
    for (const auto& m : r) s.clean_rounds += m.malicious_accepted == 0;
    rounds += r.size();
  }
  s.clean_rounds /= static_cast<double>(rounds);
  return s;
}

// 7
Verdict robustness() {
  const auto fedavg_free = run_seeds(AttackKind::kNone, DefenseKind::kFedAvg, Mode::kOracle, 0.0);
  bool ok_a = true, ok_b, ok_c = true;
  std::string d = fmt("clean FedAvg MA %.3f; ", fedavg_free.ma);
  for (AttackKind a : {AttackKind::kIpm, AttackKind::kSignFlip, AttackKind::kNoise}) {
    auto f = run_seeds(a, DefenseKind::kFlurp, Mode::kSecure, 0.4);
    ok_a = ok_a && f.clean_rounds >= 0.9 && f.ma >= fedavg_free.ma - 0.02;
    d += fmt("%s clean %.2f MA %.3f; ", to_string(a).c_str(), f.clean_rounds, f.ma);
  }
  auto bd_f = run_seeds(AttackKind::kBackdoor, DefenseKind::kFlurp, Mode::kSecure, 0.4);
  auto bd_a = run_seeds(AttackKind::kBackdoor, DefenseKind::kFedAvg, Mode::kOracle, 0.4);
  ok_b = bd_f.asr < 0.10 && bd_a.asr > 0.80;
  d += fmt("backdoor ASR flurp %.3f fedavg %.3f; ", bd_f.asr, bd_a.asr);
  for (AttackKind a : {AttackKind::kAlie, AttackKind::kMinMax}) {
    auto f = run_seeds(a, DefenseKind::kFlurp, Mode::kSecure, 0.4);
    auto g = run_seeds(a, DefenseKind::kFedAvg, Mode::kOracle, 0.4);
    ok_c = ok_c && f.ma >= g.ma + 0.05;
    d += fmt("%s MA flurp %.3f fedavg %.3f; ", to_string(a).c_str(), f.ma, g.ma);
  }
  d += fmt("(a) %s (b) %s (c) %s", ok_a ? "ok" : "FAIL", ok_b ? "ok" : "FAIL", ok_c ? "ok" : "FAIL");
  return {ok_a && ok_b && ok_c, d};
}

// 8
Verdict adaptive_attack() {
  bool maximal = true;
  std::vector<double> eps;
  double ma_attack = 0.0, ma_free = 0.0;
  for (int seed = 1; seed <= 5; ++seed) {
    ExperimentConfig c;
    c.seed = static_cast<std::uint64_t>(seed);
    c.attack = AttackKind::kAdaptive;
    c.malicious = 0.4;
    auto r = run_experiment(c);
    for (const auto& m : r) {
      maximal = maximal && m.adaptive_accepted >= m.probe_max;
      eps.push_back(m.epsilon);
    }
    ma_attack += r.back().ma / 5;
    c.attack = AttackKind::kNone;
    c.malicious = 0.0;
    c.defense = DefenseKind::kFedAvg;
    ma_free += run_experiment(c).back().ma / 5;
  }
  std::sort(eps.begin(), eps.end());
  const double eps_max = eps.back(), eps_med = eps[eps.size() / 2];
  const auto below = static_cast<std::size_t>(
      std::count_if(eps.begin(), eps.end(), [](double e) { return e < 0.5; }));
  const bool ok_eps = eps_max < 0.5;
  const bool ok_ma = ma_free - ma_attack <= 0.03;
  return {maximal && ok_eps && ok_ma,
          fmt("argmax %s; eps median %.2f max %.2f (%zu/%zu rounds < 0.5) %s; MA adaptive %.3f vs clean %.3f %s",
              maximal ? "ok" : "FAIL", eps_med, eps_max, below, eps.size(), ok_eps ? "ok" : "FAIL",
              ma_attack, ma_free, ok_ma ? "ok" : "FAIL")};
}

// 9
Verdict primitive_suites() {
  std::string d;
  // Paillier
  auto kp = ahe_keygen(512, 11);
  std::mt19937_64 rng(12);
  bool ahe_ok = true;
  mpz_class total = 0;
  AheCiphertext acc = ahe_enc(kp.pk, mpz_class(0), rng);
  for (int i = 0; i < 1000; ++i) {
    mpz_class v = random_below(mpz_class(1) << 200, rng);
    auto c = ahe_enc(kp.pk, v, rng);
    ahe_ok = ahe_ok && ahe_dec(kp.sk, c) == v;
    acc = ahe_add(kp.pk, acc, c);
    total += v;
  }
  ahe_ok = ahe_ok && ahe_dec(kp.sk, acc) == total % kp.pk.n;
  d += ahe_ok ? "paillier ok; " : "paillier FAIL; ";

  // Beaver multiplication and B2A
  bool mul_ok = true, b2a_ok = true;
  for (unsigned bits : {32u, 64u}) {
    const Ring ring(bits);
    RingVector x(10000), y(10000);
    std::vector<std::uint8_t> bitsv(10000);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = ring.reduce(rng());
      y[i] = ring.reduce(rng());
      bitsv[i] = rng() & 1U;
    }
    auto xs = split(x, ring, 0, 21), ys = split(y, ring, 0, 22);
    std::vector<std::uint8_t> b0(bitsv.size());
    for (auto& b : b0) b = rng() & 1U;
    auto r = run_two_party(23, [&](Party& p) {
      const bool z = p.id() == 0;
      BooleanShare bs{p.id(), b0};
      if (!z) {
        for (std::size_t i = 0; i < bs.bits.size(); ++i) bs.bits[i] ^= bitsv[i];
      }
      return std::make_pair(mul(p, z ? xs.first : xs.second, z ? ys.first : ys.second),
                            b2a(p, bs, ring));
    });
    auto prod = reveal(r.first.first, r.second.first);
    auto conv = reveal(r.first.second, r.second.second);
    for (std::size_t i = 0; i < x.size(); ++i) {
      mul_ok = mul_ok && prod[i] == ring.mul(x[i], y[i]);
      b2a_ok = b2a_ok && conv[i] == bitsv[i];
    }
  }
  d += mul_ok ? "beaver ok; " : "beaver FAIL; ";
  d += b2a_ok ? "b2a ok; " : "b2a FAIL; ";

  // Fixed point
  double worst = 0.0;
  FixedPointCodec codec{16, Ring(64)};
  std::uniform_real_distribution<double> ud(-1000.0, 1000.0);
  for (int i = 0; i < 10000; ++i) {
    double v = ud(rng);
    worst = std::max(worst, std::fabs(codec.decode(codec.encode(v)) - v));
  }
  const bool fx_ok = worst <= std::ldexp(1.0, -16);
  d += fmt("fixed-point max err %.2e; ", worst);

  // Gradient check on 100 random parameter probes
  auto ds = make_blobs(4, 8, 10, 3.0, 31);
  auto model = make_model(Arch::kMlp, 8, 12, 4, 32);
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> grad;
  loss_and_grad(model, ds, idx, &grad);
  double worst_rel = 0.0;
  std::uniform_int_distribution<std::size_t> pick(0, model.param_count() - 1);
  for (int probe = 0; probe < 100; ++probe) {
    const std::size_t k = pick(rng);
    const double h = 1e-5;
    ToyModel up = model, dn = model;
    up.params[k] += h;
    dn.params[k] -= h;
    const double fd = (loss_and_grad(up, ds, idx, nullptr) - loss_and_grad(dn, ds, idx, nullptr)) / (2 * h);
    const double rel = std::fabs(fd - grad[k]) / std::max(1e-3, std::fabs(fd) + std::fabs(grad[k]));
    worst_rel = std::max(worst_rel, rel);
  }
  const bool gc_ok = worst_rel < 1e-4;
  d += fmt("grad check max rel err %.2e", worst_rel);
  return {ahe_ok && mul_ok && b2a_ok && fx_ok && gc_ok, d};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / static_cast<double>(x.size());
    my += std::log(y[i]) / static_cast<double>(x.size());
  }
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return num / den;
}

// 10
Verdict scalability() {
  std::vector<double> ms, bytes, secs;
  bool medians_ok = true;
  double last = 0.0;
  for (std::size_t m : {20u, 40u, 60u, 80u, 100u}) {
    auto b = bench_median(m, 512, 32, 5);
    ms.push_back(static_cast<double>(m));
    bytes.push_back(static_cast<double>(b.bytes));
    secs.push_back(b.seconds);
    medians_ok = medians_ok && b.medians_ok;
    last = b.seconds;
  }
  const double sb = loglog_slope(ms, bytes), st = loglog_slope(ms, secs);
  return {medians_ok && last < 600.0 && sb <= 2.2 && st <= 2.2,
          fmt("m=100 in %.1f s; log-log slope bytes %.2f time %.2f; medians %s", last, sb, st,
              medians_ok ? "ok" : "wrong")};
}

}  // namespace
}  // namespace flurp

int main() {
  using namespace flurp;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"comparison correctness", comparison_correctness},
      {"comparison cost formula", cost_formula},
      {"shuffle correctness and cost", shuffle_correctness},
      {"selection correctness", selection_correctness},
      {"secure/oracle equivalence", secure_oracle_equivalence},
      {"LUR cost reduction", lur_cost_reduction},
      {"robustness at desk scale", robustness},
      {"adaptive attack behavior", adaptive_attack},
      {"primitive suites", primitive_suites},
      {"scalability smoke", scalability},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %2zu %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
