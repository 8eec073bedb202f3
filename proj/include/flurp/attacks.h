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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "flurp/fltoy.h"

namespace flurp {

using Update = std::vector<double>;

struct AttackContext {
  std::size_t clients = 0;
  std::vector<std::size_t> malicious;  // sorted client ids
  std::vector<Update> benign;          // in client-id order, malicious skipped
  std::uint64_t seed = 0;

  void validate() const;
  Update mean() const;
  Update stddev() const;  // population std per coordinate
  // Full client-ordered update list with `poisoned` at every malicious slot.
  std::vector<Update> assemble(const Update& poisoned) const;
};

int flip_label(int y, int classes);
ToyDataset label_flipping(const ToyDataset& ds);

Update noise_attack(std::size_t n, double mu, double sigma, std::uint64_t seed);

double alie_alpha(std::size_t clients, std::size_t malicious);
Update alie(const AttackContext& ctx);
Update alie(const AttackContext& ctx, double alpha);

double min_max_alpha(const AttackContext& ctx);
Update min_max(const AttackContext& ctx);

Update ipm(const AttackContext& ctx, double alpha);

struct TriggerSpec {
  std::size_t features = 6;
  double value = 2.5;
  int target = 0;
  double fraction = 0.5;
};

void stamp_trigger(std::span<double> x, const TriggerSpec& spec);
// round(fraction * N) randomly chosen samples get the trigger and the target label.
ToyDataset backdoor(const ToyDataset& ds, const TriggerSpec& spec, std::uint64_t seed);
// Every non-target sample, triggered; labels kept (for ASR).
ToyDataset triggered_test_set(const ToyDataset& ds, const TriggerSpec& spec);

// Returns the qualified bits for a full client-ordered update list.
using DefenseOracle = std::function<std::vector<std::uint8_t>(const std::vector<Update>&)>;

struct AdaptiveResult {
  Update poisoned;
  double gamma = 0.0;
  std::size_t accepted = 0;
  double epsilon = 0.0;  // ||gamma sigma|| / ||mu||
  std::vector<std::pair<double, std::size_t>> probes;
};

AdaptiveResult adaptive_flurp(const AttackContext& ctx, const DefenseOracle& oracle);

double l2_norm(const Update& v);
double l2_distance(const Update& a, const Update& b);

}  // namespace flurp
