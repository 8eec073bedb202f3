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
#include <span>
#include <string>
#include <vector>

namespace flurp {

struct ToyDataset {
  std::vector<double> features;  // row-major, size() x dims
  std::size_t dims = 0;
  std::vector<int> labels;
  int classes = 0;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dims, dims};
  }
  void validate() const;
};

ToyDataset make_blobs(int classes, std::size_t dims, std::size_t per_class,
                      double separation, std::uint64_t seed);
ToyDataset subset(const ToyDataset& ds, std::span<const std::size_t> idx);

enum class PartitionMode { kIid, kDirichlet };

std::vector<ToyDataset> partition(const ToyDataset& ds, std::size_t clients,
                                  PartitionMode mode, double alpha, std::uint64_t seed);

enum class Arch { kSoftmax, kMlp };

std::string to_string(Arch a);
Arch parse_arch(const std::string& s);

struct ToyModel {
  Arch arch = Arch::kMlp;
  std::size_t dims = 0;
  std::size_t hidden = 0;
  int classes = 0;
  std::vector<double> params;

  std::size_t param_count() const { return params.size(); }
};

std::size_t param_count(Arch arch, std::size_t dims, std::size_t hidden, int classes);
ToyModel make_model(Arch arch, std::size_t dims, std::size_t hidden, int classes,
                    std::uint64_t seed);

// Mean cross-entropy over `idx`; fills `grad` (same length as params) if given.
double loss_and_grad(const ToyModel& model, const ToyDataset& ds,
                     std::span<const std::size_t> idx, std::vector<double>* grad);
double loss(const ToyModel& model, const ToyDataset& ds);
int predict(const ToyModel& model, std::span<const double> x);
double accuracy(const ToyModel& model, const ToyDataset& ds);

struct TrainConfig {
  std::size_t epochs = 1;
  std::size_t batch = 32;
  double lr = 0.05;
  double momentum = 0.9;
  bool ascent = false;  // sign flipping: step along +grad
};

// Returns g = w_global - w_local after local SGD, so the server applies w - g.
std::vector<double> local_train(const ToyModel& global, const ToyDataset& ds,
                                const TrainConfig& cfg, std::mt19937_64& rng);

}  // namespace flurp
