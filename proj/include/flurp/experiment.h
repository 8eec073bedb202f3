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
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "flurp/attacks.h"
#include "flurp/defense.h"
#include "flurp/fltoy.h"
#include "flurp/transport.h"

namespace flurp {

enum class AttackKind { kNone, kLabelFlip, kSignFlip, kNoise, kAlie, kMinMax, kIpm, kBackdoor, kAdaptive };
enum class DefenseKind { kFlurp, kFedAvg };
enum class Mode { kSecure, kOracle };

std::string to_string(AttackKind a);
std::string to_string(DefenseKind d);
std::string to_string(Mode m);
AttackKind parse_attack(const std::string& s);
DefenseKind parse_defense(const std::string& s);
Mode parse_mode(const std::string& s);

struct ExperimentConfig {
  std::size_t clients = 10;
  double malicious = 0.0;
  AttackKind attack = AttackKind::kNone;
  double ipm_alpha = 100.0;
  double alie_z = 0.0;  // 0: derived from client counts
  double noise_mu = 0.0;
  double noise_sigma = 1.0;
  std::size_t window = 32;  // 0: param_count / 256 rounded to a power of two
  unsigned bits = 64;
  unsigned fixed_bits = 16;
  std::size_t rounds = 20;
  std::size_t epochs = 2;
  std::uint64_t seed = 1;
  Mode mode = Mode::kOracle;
  DefenseKind defense = DefenseKind::kFlurp;
  unsigned key_bits = 512;

  // task
  int classes = 4;
  std::size_t dims = 32;
  std::size_t hidden = 48;
  Arch arch = Arch::kMlp;
  std::size_t train_per_class = 250;
  std::size_t test_per_class = 250;
  double separation = 4.0;
  PartitionMode partition = PartitionMode::kIid;
  double dirichlet_alpha = 1.0;
  std::size_t batch = 16;
  double lr = 0.05;
  double momentum = 0.9;
  TriggerSpec trigger;

  void validate() const;
};

void from_json(const nlohmann::json& j, ExperimentConfig& c);
void to_json(nlohmann::json& j, const ExperimentConfig& c);

struct RoundMetrics {
  std::size_t round = 0;
  double ma = 0.0;
  double asr = 0.0;
  double loss = 0.0;
  std::vector<std::uint8_t> qualified;
  std::vector<std::size_t> malicious;
  std::size_t malicious_accepted = 0;
  bool skipped = false;
  TranscriptCounters counters;
  double seconds = 0.0;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  std::size_t adaptive_accepted = 0;  // predicted by the attacker's oracle
  std::size_t probe_max = 0;          // best acceptance over all probes
};

nlohmann::json to_json(const RoundMetrics& m);

std::vector<std::size_t> pick_malicious(std::size_t clients, double fraction, std::uint64_t seed);
std::size_t default_window(std::size_t params);
DefenseConfig defense_config(const ExperimentConfig& c, std::size_t params);

// With `net` set (secure mode only) this process plays a single party over
// that endpoint; the peer must run the same config.
std::vector<RoundMetrics> run_experiment(const ExperimentConfig& config,
                                         Endpoint* net = nullptr);

}  // namespace flurp
