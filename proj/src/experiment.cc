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

#include "flurp/experiment.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "flurp/error.h"
#include "flurp/sharing.h"

namespace flurp {

namespace {

struct Named {
  AttackKind kind;
  const char* name;
};

constexpr Named kAttacks[] = {
    {AttackKind::kNone, "none"},         {AttackKind::kLabelFlip, "labelflip"},
    {AttackKind::kSignFlip, "signflip"}, {AttackKind::kNoise, "noise"},
    {AttackKind::kAlie, "alie"},         {AttackKind::kMinMax, "minmax"},
    {AttackKind::kIpm, "ipm"},           {AttackKind::kBackdoor, "backdoor"},
    {AttackKind::kAdaptive, "adaptive"},
};

std::mt19937_64 seeded(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  for (auto p : parts) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

std::string to_string(AttackKind a) {
  for (const auto& n : kAttacks) {
    if (n.kind == a) return n.name;
  }
  return "unknown";
}

AttackKind parse_attack(const std::string& s) {
  for (const auto& n : kAttacks) {
    if (s == n.name) return n.kind;
  }
  throw RangeError("unknown attack: " + s);
}

std::string to_string(DefenseKind d) { return d == DefenseKind::kFlurp ? "flurp" : "fedavg"; }
std::string to_string(Mode m) { return m == Mode::kSecure ? "secure" : "oracle"; }

DefenseKind parse_defense(const std::string& s) {
  if (s == "flurp") return DefenseKind::kFlurp;
  if (s == "fedavg") return DefenseKind::kFedAvg;
  throw RangeError("unknown defense: " + s);
}

Mode parse_mode(const std::string& s) {
  if (s == "secure") return Mode::kSecure;
  if (s == "oracle") return Mode::kOracle;
  throw RangeError("unknown mode: " + s);
}

void ExperimentConfig::validate() const {
  if (clients < 2) throw RangeError("config: need at least two clients");
  if (malicious < 0.0 || malicious >= 0.5) throw RangeError("config: malicious fraction must be in [0, 0.5)");
  if (bits != 32 && bits != 64) throw RangeError("config: ring width must be 32 or 64");
  if (fixed_bits == 0 || 2 * fixed_bits >= bits) throw RangeError("config: fixed-point bits too large for ring");
  if (classes < 2) throw RangeError("config: need at least two classes");
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("clients", c.clients);
  get("malicious", c.malicious);
  if (j.contains("attack")) c.attack = parse_attack(j.at("attack").get<std::string>());
  get("ipm_alpha", c.ipm_alpha);
  get("alie_z", c.alie_z);
  get("noise_mu", c.noise_mu);
  get("noise_sigma", c.noise_sigma);
  get("window", c.window);
  get("bits", c.bits);
  get("fixed_bits", c.fixed_bits);
  get("rounds", c.rounds);
  get("epochs", c.epochs);
  get("seed", c.seed);
  if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
  if (j.contains("defense")) c.defense = parse_defense(j.at("defense").get<std::string>());
  get("key_bits", c.key_bits);
  get("classes", c.classes);
  get("dims", c.dims);
  get("hidden", c.hidden);
  if (j.contains("arch")) c.arch = parse_arch(j.at("arch").get<std::string>());
  get("train_per_class", c.train_per_class);
  get("test_per_class", c.test_per_class);
  get("separation", c.separation);
  if (j.contains("dirichlet_alpha")) {
    j.at("dirichlet_alpha").get_to(c.dirichlet_alpha);
    c.partition = PartitionMode::kDirichlet;
  }
  get("batch", c.batch);
  get("lr", c.lr);
  get("momentum", c.momentum);
  get("trigger_features", c.trigger.features);
  get("trigger_value", c.trigger.value);
  get("poison_fraction", c.trigger.fraction);
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = {{"clients", c.clients},
       {"malicious", c.malicious},
       {"attack", to_string(c.attack)},
       {"ipm_alpha", c.ipm_alpha},
       {"alie_z", c.alie_z},
       {"noise_mu", c.noise_mu},
       {"noise_sigma", c.noise_sigma},
       {"window", c.window},
       {"bits", c.bits},
       {"fixed_bits", c.fixed_bits},
       {"rounds", c.rounds},
       {"epochs", c.epochs},
       {"seed", c.seed},
       {"mode", to_string(c.mode)},
       {"defense", to_string(c.defense)},
       {"key_bits", c.key_bits},
       {"classes", c.classes},
       {"dims", c.dims},
       {"hidden", c.hidden},
       {"arch", to_string(c.arch)},
       {"train_per_class", c.train_per_class},
       {"test_per_class", c.test_per_class},
       {"separation", c.separation},
       {"batch", c.batch},
       {"lr", c.lr},
       {"momentum", c.momentum},
       {"trigger_features", c.trigger.features},
       {"trigger_value", c.trigger.value},
       {"poison_fraction", c.trigger.fraction}};
  if (c.partition == PartitionMode::kDirichlet) j["dirichlet_alpha"] = c.dirichlet_alpha;
}

nlohmann::json to_json(const RoundMetrics& m) {
  nlohmann::json j = {{"round", m.round},
                      {"ma", m.ma},
                      {"asr", m.asr},
                      {"loss", m.loss},
                      {"qualified", m.qualified},
                      {"malicious", m.malicious},
                      {"malicious_accepted", m.malicious_accepted},
                      {"skipped", m.skipped},
                      {"bytes_sent", m.counters.bytes_sent},
                      {"rounds_comm", m.counters.rounds}};
  if (!std::isnan(m.gamma)) {
    j["gamma"] = m.gamma;
    j["epsilon"] = m.epsilon;
    j["adaptive_accepted"] = m.adaptive_accepted;
  }
  return j;
}

std::vector<std::size_t> pick_malicious(std::size_t clients, double fraction, std::uint64_t seed) {
  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(clients) + 1e-9));
  std::vector<std::size_t> ids(clients);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  auto rng = seeded({seed, 0x6d616c});
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(count);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::size_t default_window(std::size_t params) {
  const double target = std::max(1.0, static_cast<double>(params) / 256.0);
  const double lg = std::round(std::log2(target));
  return std::size_t{1} << static_cast<unsigned>(lg);
}

DefenseConfig defense_config(const ExperimentConfig& c, std::size_t params) {
  DefenseConfig d;
  d.ring = Ring(c.bits);
  d.frac_bits = c.fixed_bits;
  d.window = c.window ? c.window : default_window(params);
  d.key_bits = c.key_bits;
  return d;
}

std::vector<RoundMetrics> run_experiment(const ExperimentConfig& cfg, Endpoint* net) {
  cfg.validate();
  const std::size_t m = cfg.clients;
  ToyDataset train = make_blobs(cfg.classes, cfg.dims, cfg.train_per_class, cfg.separation, cfg.seed);
  // Same centres, fresh noise: regenerate with the same seed and a larger
  // count, then keep the tail.
  ToyDataset test_full = make_blobs(cfg.classes, cfg.dims, cfg.train_per_class + cfg.test_per_class,
                                    cfg.separation, cfg.seed);
  std::vector<std::size_t> tail;
  for (std::size_t i = cfg.train_per_class * cfg.classes; i < test_full.size(); ++i) tail.push_back(i);
  ToyDataset test = subset(test_full, tail);
  ToyDataset test_triggered = triggered_test_set(test, cfg.trigger);

  auto parts = partition(train, m, cfg.partition, cfg.dirichlet_alpha, cfg.seed + 17);
  const auto mal = cfg.attack == AttackKind::kNone ? std::vector<std::size_t>{}
                                                   : pick_malicious(m, cfg.malicious, cfg.seed);
  auto is_mal = [&](std::size_t i) { return std::binary_search(mal.begin(), mal.end(), i); };

  for (auto i : mal) {
    if (cfg.attack == AttackKind::kLabelFlip) parts[i] = label_flipping(parts[i]);
    if (cfg.attack == AttackKind::kBackdoor) parts[i] = backdoor(parts[i], cfg.trigger, cfg.seed * 31 + i);
  }
  std::vector<double> sizes(m);
  for (std::size_t i = 0; i < m; ++i) sizes[i] = static_cast<double>(parts[i].size());

  ToyModel model = make_model(cfg.arch, cfg.dims, cfg.hidden, cfg.classes, cfg.seed + 5);
  const std::size_t n = model.param_count();
  const DefenseConfig dcfg = defense_config(cfg, n);
  const TrainConfig benign_tc{cfg.epochs, cfg.batch, cfg.lr, cfg.momentum, false};

  std::vector<RoundMetrics> out;
  for (std::size_t t = 0; t < cfg.rounds; ++t) {
    RoundMetrics rm;
    rm.round = t;
    rm.malicious = mal;
    std::vector<Update> updates(m);
    for (std::size_t i = 0; i < m; ++i) {
      auto rng = seeded({cfg.seed, t, i});
      TrainConfig tc = benign_tc;
      if (is_mal(i)) {
        if (cfg.attack == AttackKind::kNoise) {
          updates[i] = noise_attack(n, cfg.noise_mu, cfg.noise_sigma, rng());
          continue;
        }
        if (cfg.attack == AttackKind::kSignFlip) tc.ascent = true;
      }
      updates[i] = local_train(model, parts[i], tc, rng);
    }

    const bool omniscient = cfg.attack == AttackKind::kAlie || cfg.attack == AttackKind::kMinMax ||
                            cfg.attack == AttackKind::kIpm || cfg.attack == AttackKind::kAdaptive;
    if (omniscient && !mal.empty()) {
      AttackContext ctx{m, mal, {}, cfg.seed + t};
      for (std::size_t i = 0; i < m; ++i) {
        if (!is_mal(i)) ctx.benign.push_back(updates[i]);
      }
      Update poisoned;
      switch (cfg.attack) {
        case AttackKind::kAlie: poisoned = cfg.alie_z > 0.0 ? alie(ctx, cfg.alie_z) : alie(ctx); break;
        case AttackKind::kMinMax: poisoned = min_max(ctx); break;
        case AttackKind::kIpm: poisoned = ipm(ctx, cfg.ipm_alpha); break;
        default: {
          auto oracle = [&](const std::vector<Update>& all) {
            return plaintext_defense(all, sizes, dcfg).qualified;
          };
          AdaptiveResult ar = adaptive_flurp(ctx, oracle);
          poisoned = ar.poisoned;
          rm.gamma = ar.gamma;
          rm.epsilon = ar.epsilon;
          rm.adaptive_accepted = ar.accepted;
          for (const auto& pr : ar.probes) rm.probe_max = std::max(rm.probe_max, pr.second);
        }
      }
      updates = ctx.assemble(poisoned);
    }

    std::vector<double> g;
    if (cfg.defense == DefenseKind::kFedAvg) {
      const double total = std::accumulate(sizes.begin(), sizes.end(), 0.0);
      g.assign(n, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < n; ++k) g[k] += sizes[i] / total * updates[i][k];
      }
      rm.qualified.assign(m, 1);
    } else {
      const std::uint64_t round_seed = cfg.seed * 1000003ULL + t;
      RoundOutcome ro;
      if (cfg.mode == Mode::kOracle) {
        ro = plaintext_defense(updates, sizes, dcfg);
      } else if (net) {
        Party party(*net, round_seed);
        ro = secure_defense_party(party, updates, sizes, dcfg, round_seed);
      } else {
        ro = secure_defense(updates, sizes, dcfg, round_seed);
      }
      rm.qualified = ro.qualified;
      rm.skipped = ro.skipped;
      rm.counters = ro.counters;
      rm.seconds = ro.seconds;
      g = ro.global_update;
    }
    if (!rm.skipped) {
      for (std::size_t k = 0; k < n; ++k) model.params[k] -= g[k];
    }
    for (auto i : mal) rm.malicious_accepted += rm.qualified[i] ? 1 : 0;
    rm.ma = accuracy(model, test);
    rm.loss = loss(model, test);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < test_triggered.size(); ++i) {
      hit += predict(model, test_triggered.row(i)) == cfg.trigger.target;
    }
    rm.asr = test_triggered.size() ? static_cast<double>(hit) / static_cast<double>(test_triggered.size()) : 0.0;
    out.push_back(std::move(rm));
  }
  return out;
}

}  // namespace flurp
