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

#include "flurp/attacks.h"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "flurp/error.h"

namespace flurp {

void AttackContext::validate() const {
  if (malicious.size() >= clients) throw RangeError("attack: malicious count must be below client count");
  if (benign.size() + malicious.size() != clients) throw ShapeError("attack: benign update count mismatch");
  if (benign.empty()) throw ShapeError("attack: no benign updates");
}

Update AttackContext::mean() const {
  validate();
  Update mu(benign[0].size(), 0.0);
  for (const auto& g : benign) {
    for (std::size_t k = 0; k < mu.size(); ++k) mu[k] += g[k];
  }
  for (auto& v : mu) v /= static_cast<double>(benign.size());
  return mu;
}

Update AttackContext::stddev() const {
  Update mu = mean();
  Update sd(mu.size(), 0.0);
  for (const auto& g : benign) {
    for (std::size_t k = 0; k < sd.size(); ++k) sd[k] += (g[k] - mu[k]) * (g[k] - mu[k]);
  }
  for (auto& v : sd) v = std::sqrt(v / static_cast<double>(benign.size()));
  return sd;
}

std::vector<Update> AttackContext::assemble(const Update& poisoned) const {
  std::vector<Update> out;
  out.reserve(clients);
  std::size_t b = 0;
  for (std::size_t i = 0; i < clients; ++i) {
    if (std::binary_search(malicious.begin(), malicious.end(), i)) {
      out.push_back(poisoned);
    } else {
      out.push_back(benign.at(b++));
    }
  }
  return out;
}

int flip_label(int y, int classes) { return classes - 1 - y; }

ToyDataset label_flipping(const ToyDataset& ds) {
  ToyDataset out = ds;
  for (auto& y : out.labels) y = flip_label(y, ds.classes);
  return out;
}

Update noise_attack(std::size_t n, double mu, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(mu, sigma);
  Update out(n);
  for (auto& v : out) v = normal(rng);
  return out;
}

double alie_alpha(std::size_t clients, std::size_t malicious) {
  if (malicious >= clients) throw RangeError("alie: malicious count must be below client count");
  const double s = static_cast<double>(clients / 2 + 1);
  const double p = (static_cast<double>(clients) - s) / static_cast<double>(clients - malicious);
  boost::math::normal_distribution<double> phi;
  return boost::math::quantile(phi, std::clamp(p, 1e-12, 1.0 - 1e-12));
}

Update alie(const AttackContext& ctx, double alpha) {
  Update mu = ctx.mean();
  Update sd = ctx.stddev();
  for (std::size_t k = 0; k < mu.size(); ++k) mu[k] += sd[k] * alpha;
  return mu;
}

Update alie(const AttackContext& ctx) {
  return alie(ctx, alie_alpha(ctx.clients, ctx.malicious.size()));
}

double l2_norm(const Update& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double l2_distance(const Update& a, const Update& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

double min_max_alpha(const AttackContext& ctx) {
  Update mu = ctx.mean();
  Update sd = ctx.stddev();
  double diameter = 0.0;
  for (std::size_t j = 0; j < ctx.benign.size(); ++j) {
    for (std::size_t k = j + 1; k < ctx.benign.size(); ++k) {
      diameter = std::max(diameter, l2_distance(ctx.benign[j], ctx.benign[k]));
    }
  }
  if (diameter == 0.0) return 0.0;
  auto fits = [&](double a) {
    Update p = mu;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= a * sd[k];
    for (const auto& g : ctx.benign) {
      if (l2_distance(p, g) > diameter) return false;
    }
    return true;
  };
  double lo = 0.0, hi = 50.0;
  if (fits(hi)) return hi;
  for (int it = 0; it < 20; ++it) {
    double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

Update min_max(const AttackContext& ctx) {
  const double a = min_max_alpha(ctx);
  Update mu = ctx.mean();
  Update sd = ctx.stddev();
  for (std::size_t k = 0; k < mu.size(); ++k) mu[k] -= a * sd[k];
  return mu;
}

Update ipm(const AttackContext& ctx, double alpha) {
  Update mu = ctx.mean();
  for (auto& v : mu) v *= -alpha;
  return mu;
}

void stamp_trigger(std::span<double> x, const TriggerSpec& spec) {
  for (std::size_t k = 0; k < std::min(spec.features, x.size()); ++k) x[k] = spec.value;
}

ToyDataset backdoor(const ToyDataset& ds, const TriggerSpec& spec, std::uint64_t seed) {
  ToyDataset out = ds;
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto count = static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(ds.size())));
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = idx[k];
    stamp_trigger(std::span(out.features).subspan(i * ds.dims, ds.dims), spec);
    out.labels[i] = spec.target;
  }
  return out;
}

ToyDataset triggered_test_set(const ToyDataset& ds, const TriggerSpec& spec) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] != spec.target) keep.push_back(i);
  }
  ToyDataset out = subset(ds, keep);
  for (std::size_t i = 0; i < out.size(); ++i) {
    stamp_trigger(std::span(out.features).subspan(i * out.dims, out.dims), spec);
  }
  return out;
}

AdaptiveResult adaptive_flurp(const AttackContext& ctx, const DefenseOracle& oracle) {
  const Update mu = ctx.mean();
  const Update sd = ctx.stddev();
  AdaptiveResult res;
  auto poisoned_at = [&](double gamma) {
    Update p = mu;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] += gamma * sd[k];
    return p;
  };
  auto accepted = [&](double gamma) {
    auto q = oracle(ctx.assemble(poisoned_at(gamma)));
    std::size_t n = 0;
    for (auto i : ctx.malicious) n += q.at(i) ? 1 : 0;
    res.probes.emplace_back(gamma, n);
    return n;
  };
  // Ties go to the larger gamma.
  auto consider = [&](double gamma, std::size_t n) {
    if (n > res.accepted || (n == res.accepted && gamma > res.gamma)) {
      res.accepted = n;
      res.gamma = gamma;
    }
  };
  res.accepted = accepted(0.0);
  res.gamma = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double g = 0.25 * k;
    consider(g, accepted(g));
  }
  // Golden-section refinement in the bracket around the grid winner.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::max(0.0, res.gamma - 0.25), b = std::min(5.0, res.gamma + 0.25);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  std::size_t fc = accepted(c), fd = accepted(d);
  consider(c, fc);
  consider(d, fd);
  for (int it = 0; it < 10; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = accepted(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = accepted(d);
      consider(d, fd);
    }
  }
  res.poisoned = poisoned_at(res.gamma);
  Update shift(sd.size());
  for (std::size_t k = 0; k < sd.size(); ++k) shift[k] = res.gamma * sd[k];
  const double mn = l2_norm(mu);
  res.epsilon = mn > 0.0 ? l2_norm(shift) / mn : 0.0;
  return res;
}

}  // namespace flurp
