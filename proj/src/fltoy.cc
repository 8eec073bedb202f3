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

#include "flurp/fltoy.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flurp/error.h"

namespace flurp {

void ToyDataset::validate() const {
  if (features.size() != labels.size() * dims) throw ShapeError("dataset: feature/label row mismatch");
  for (int y : labels) {
    if (y < 0 || y >= classes) throw RangeError("dataset: label out of range");
  }
}

ToyDataset make_blobs(int classes, std::size_t dims, std::size_t per_class,
                      double separation, std::uint64_t seed) {
  if (classes < 2 || dims == 0) throw ShapeError("make_blobs: need >= 2 classes and >= 1 dim");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Random unit directions scaled so centre-to-centre distance is about
  // `separation` noise standard deviations.
  std::vector<std::vector<double>> centres(classes, std::vector<double>(dims));
  for (auto& c : centres) {
    double norm = 0.0;
    for (auto& v : c) {
      v = normal(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : c) v *= separation / std::sqrt(2.0) / norm;
  }
  ToyDataset ds;
  ds.dims = dims;
  ds.classes = classes;
  ds.features.reserve(per_class * classes * dims);
  for (std::size_t k = 0; k < per_class; ++k) {
    for (int c = 0; c < classes; ++c) {
      for (std::size_t d = 0; d < dims; ++d) ds.features.push_back(centres[c][d] + normal(rng));
      ds.labels.push_back(c);
    }
  }
  return ds;
}

ToyDataset subset(const ToyDataset& ds, std::span<const std::size_t> idx) {
  ToyDataset out;
  out.dims = ds.dims;
  out.classes = ds.classes;
  out.features.reserve(idx.size() * ds.dims);
  for (auto i : idx) {
    auto r = ds.row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

std::vector<ToyDataset> partition(const ToyDataset& ds, std::size_t clients,
                                  PartitionMode mode, double alpha, std::uint64_t seed) {
  if (clients == 0 || clients > ds.size()) {
    throw ShapeError("partition: client count exceeds sample count");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> parts(clients);
  if (mode == PartitionMode::kIid) {
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < idx.size(); ++k) parts[k % clients].push_back(idx[k]);
  } else {
    if (alpha <= 0.0) throw RangeError("partition: dirichlet alpha must be positive");
    std::gamma_distribution<double> gamma(alpha, 1.0);
    for (int c = 0; c < ds.classes; ++c) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.labels[i] == c) idx.push_back(i);
      }
      std::shuffle(idx.begin(), idx.end(), rng);
      std::vector<double> p(clients);
      double total = 0.0;
      for (auto& v : p) total += (v = gamma(rng));
      // Cumulative rounding keeps the cover exact.
      double cum = 0.0;
      std::size_t from = 0;
      for (std::size_t k = 0; k < clients; ++k) {
        cum += p[k] / total;
        std::size_t to = k + 1 == clients
                             ? idx.size()
                             : std::min(idx.size(), static_cast<std::size_t>(
                                                        std::llround(cum * static_cast<double>(idx.size()))));
        for (std::size_t j = from; j < to; ++j) parts[k].push_back(idx[j]);
        from = std::max(from, to);
      }
    }
  }
  std::vector<ToyDataset> out;
  out.reserve(clients);
  for (auto& p : parts) {
    std::sort(p.begin(), p.end());
    out.push_back(subset(ds, p));
  }
  return out;
}

std::string to_string(Arch a) { return a == Arch::kSoftmax ? "softmax" : "mlp"; }

Arch parse_arch(const std::string& s) {
  if (s == "softmax") return Arch::kSoftmax;
  if (s == "mlp") return Arch::kMlp;
  throw RangeError("unknown architecture: " + s);
}

std::size_t param_count(Arch arch, std::size_t dims, std::size_t hidden, int classes) {
  const std::size_t c = static_cast<std::size_t>(classes);
  if (arch == Arch::kSoftmax) return (dims + 1) * c;
  return (dims + 1) * hidden + (hidden + 1) * c;
}

ToyModel make_model(Arch arch, std::size_t dims, std::size_t hidden, int classes,
                    std::uint64_t seed) {
  ToyModel m{arch, dims, arch == Arch::kMlp ? hidden : 0, classes, {}};
  m.params.assign(param_count(arch, dims, m.hidden, classes), 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  if (arch == Arch::kMlp) {
    const double s1 = 1.0 / std::sqrt(static_cast<double>(dims));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    std::size_t k = 0;
    for (std::size_t h = 0; h < hidden; ++h) {
      for (std::size_t d = 0; d < dims; ++d) m.params[k++] = normal(rng) * s1;
    }
    k += hidden;  // biases start at zero
    for (int c = 0; c < classes; ++c) {
      for (std::size_t h = 0; h < hidden; ++h) m.params[k++] = normal(rng) * s2;
    }
  }
  return m;
}

namespace {

// Parameter layout.
//   softmax: W[c][d] then b[c]
//   mlp:     W1[h][d], b1[h], W2[c][h], b2[c]; tanh hidden layer
struct Forward {
  std::vector<double> hidden;
  std::vector<double> probs;
};

void softmax_inplace(std::vector<double>& z) {
  double mx = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (auto& v : z) s += (v = std::exp(v - mx));
  for (auto& v : z) v /= s;
}

Forward forward(const ToyModel& m, std::span<const double> x) {
  const std::size_t c = static_cast<std::size_t>(m.classes);
  const double* p = m.params.data();
  Forward f;
  std::span<const double> in = x;
  std::size_t in_dim = m.dims;
  if (m.arch == Arch::kMlp) {
    f.hidden.resize(m.hidden);
    const double* b1 = p + m.hidden * m.dims;
    for (std::size_t h = 0; h < m.hidden; ++h) {
      double z = b1[h];
      const double* w = p + h * m.dims;
      for (std::size_t d = 0; d < m.dims; ++d) z += w[d] * x[d];
      f.hidden[h] = std::tanh(z);
    }
    p = b1 + m.hidden;
    in = f.hidden;
    in_dim = m.hidden;
  }
  f.probs.resize(c);
  const double* b = p + c * in_dim;
  for (std::size_t k = 0; k < c; ++k) {
    double z = b[k];
    const double* w = p + k * in_dim;
    for (std::size_t d = 0; d < in_dim; ++d) z += w[d] * in[d];
    f.probs[k] = z;
  }
  softmax_inplace(f.probs);
  return f;
}

}  // namespace

double loss_and_grad(const ToyModel& m, const ToyDataset& ds,
                     std::span<const std::size_t> idx, std::vector<double>* grad) {
  if (grad) grad->assign(m.params.size(), 0.0);
  if (idx.empty()) return 0.0;
  const std::size_t c = static_cast<std::size_t>(m.classes);
  double total = 0.0;
  const double inv = 1.0 / static_cast<double>(idx.size());
  std::vector<double> delta(c), dh;
  for (auto i : idx) {
    auto x = ds.row(i);
    Forward f = forward(m, x);
    const int y = ds.labels[i];
    total -= std::log(std::max(f.probs[y], 1e-300));
    if (!grad) continue;
    for (std::size_t k = 0; k < c; ++k) delta[k] = (f.probs[k] - (static_cast<int>(k) == y ? 1.0 : 0.0)) * inv;
    double* g = grad->data();
    if (m.arch == Arch::kSoftmax) {
      double* gb = g + c * m.dims;
      for (std::size_t k = 0; k < c; ++k) {
        for (std::size_t d = 0; d < m.dims; ++d) g[k * m.dims + d] += delta[k] * x[d];
        gb[k] += delta[k];
      }
      continue;
    }
    const std::size_t H = m.hidden;
    const double* w2 = m.params.data() + H * m.dims + H;
    double* g1 = g;
    double* gb1 = g + H * m.dims;
    double* g2 = gb1 + H;
    double* gb2 = g2 + c * H;
    dh.assign(H, 0.0);
    for (std::size_t k = 0; k < c; ++k) {
      for (std::size_t h = 0; h < H; ++h) {
        g2[k * H + h] += delta[k] * f.hidden[h];
        dh[h] += delta[k] * w2[k * H + h];
      }
      gb2[k] += delta[k];
    }
    for (std::size_t h = 0; h < H; ++h) {
      const double dz = dh[h] * (1.0 - f.hidden[h] * f.hidden[h]);
      for (std::size_t d = 0; d < m.dims; ++d) g1[h * m.dims + d] += dz * x[d];
      gb1[h] += dz;
    }
  }
  return total * inv;
}

double loss(const ToyModel& model, const ToyDataset& ds) {
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return loss_and_grad(model, ds, idx, nullptr);
}

int predict(const ToyModel& model, std::span<const double> x) {
  Forward f = forward(model, x);
  return static_cast<int>(std::max_element(f.probs.begin(), f.probs.end()) - f.probs.begin());
}

double accuracy(const ToyModel& model, const ToyDataset& ds) {
  if (ds.size() == 0) return 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) ok += predict(model, ds.row(i)) == ds.labels[i];
  return static_cast<double>(ok) / static_cast<double>(ds.size());
}

std::vector<double> local_train(const ToyModel& global, const ToyDataset& ds,
                                const TrainConfig& cfg, std::mt19937_64& rng) {
  ToyModel local = global;
  std::vector<double> velocity(local.params.size(), 0.0), grad;
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = std::max<std::size_t>(1, cfg.batch);
  const double sign = cfg.ascent ? -1.0 : 1.0;
  for (std::size_t e = 0; e < cfg.epochs && !order.empty(); ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t from = 0; from < order.size(); from += batch) {
      std::size_t to = std::min(order.size(), from + batch);
      loss_and_grad(local, ds, std::span(order).subspan(from, to - from), &grad);
      for (std::size_t k = 0; k < grad.size(); ++k) {
        velocity[k] = cfg.momentum * velocity[k] + grad[k];
        local.params[k] -= sign * cfg.lr * velocity[k];
      }
    }
  }
  std::vector<double> g(local.params.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = global.params[k] - local.params[k];
  return g;
}

}  // namespace flurp
