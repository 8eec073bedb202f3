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

#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flurp/bench.h"
#include "flurp/error.h"
#include "flurp/experiment.h"
#include "flurp/transport.h"
#include "json.hpp"

namespace {

using namespace flurp;

struct NetOptions {
  std::string transport = "inproc";
  std::optional<std::uint16_t> listen;
  std::string connect;
  int timeout_ms = 30000;
};

void add_net_flags(CLI::App* app, NetOptions& net) {
  app->add_option("--transport", net.transport, "inproc or tcp")
      ->check(CLI::IsMember({"inproc", "tcp"}));
  app->add_option("--listen", net.listen, "tcp: act as party 0 on this port");
  app->add_option("--connect", net.connect, "tcp: act as party 1, host:port");
  app->add_option("--timeout-ms", net.timeout_ms, "tcp read/connect timeout");
}

// Returns nullopt for in-process runs.
std::optional<Endpoint> open_endpoint(const NetOptions& net) {
  if (net.transport == "inproc") return std::nullopt;
  const std::chrono::milliseconds timeout(net.timeout_ms);
  if (net.listen) {
    spdlog::info("listening on port {}", *net.listen);
    return Endpoint(0, tcp_listen(*net.listen, timeout));
  }
  auto colon = net.connect.rfind(':');
  if (colon == std::string::npos) throw RangeError("--connect expects host:port");
  const std::string host = net.connect.substr(0, colon);
  const auto port = static_cast<std::uint16_t>(std::stoi(net.connect.substr(colon + 1)));
  spdlog::info("connecting to {}:{}", host, port);
  return Endpoint(1, tcp_connect(host, port, timeout));
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string());
  return os;
}

void set_log_level() {
  if (const char* lv = std::getenv("FLURP_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(lv));
  } else {
    spdlog::set_level(spdlog::level::warn);
  }
}

}  // namespace

int main(int argc, char** argv) {
  set_log_level();
  CLI::App app{"flurp: two-server robust secure aggregation toolkit"};
  app.require_subcommand(1);

  // run
  ExperimentConfig cfg;
  std::string config_file, attack = "none", mode = "oracle", defense = "flurp", arch = "mlp";
  std::string out_dir = "out";
  std::optional<double> dirichlet;
  NetOptions run_net;
  auto* run = app.add_subcommand("run", "run a federated-learning experiment");
  run->add_option("--config", config_file, "JSON config; flags override it");
  run->add_option("--clients", cfg.clients);
  run->add_option("--malicious", cfg.malicious, "malicious client fraction");
  run->add_option("--attack", attack)
      ->check(CLI::IsMember({"none", "labelflip", "signflip", "noise", "alie", "minmax", "ipm",
                             "backdoor", "adaptive"}));
  run->add_option("--ipm-alpha", cfg.ipm_alpha);
  run->add_option("--window", cfg.window, "LinfSample window (0 = auto)");
  run->add_option("--bits", cfg.bits, "ring width")->check(CLI::IsMember({32u, 64u}));
  run->add_option("--fixed-bits", cfg.fixed_bits);
  run->add_option("--rounds", cfg.rounds);
  run->add_option("--epochs", cfg.epochs);
  run->add_option("--seed", cfg.seed);
  run->add_option("--mode", mode)->check(CLI::IsMember({"secure", "oracle"}));
  run->add_option("--defense", defense)->check(CLI::IsMember({"flurp", "fedavg"}));
  run->add_option("--key-bits", cfg.key_bits)->check(CLI::IsMember({512u, 1024u, 2048u}));
  run->add_option("--arch", arch)->check(CLI::IsMember({"mlp", "softmax"}));
  run->add_option("--dirichlet", dirichlet, "non-IID partition with this alpha");
  run->add_option("--lr", cfg.lr);
  run->add_option("--batch", cfg.batch);
  run->add_option("--separation", cfg.separation);
  run->add_option("--out", out_dir, "output directory");
  add_net_flags(run, run_net);

  // bench-compare
  std::vector<std::size_t> pairs{1, 10, 1000};
  unsigned cmp_bits = 32, cmp_chunk = 4;
  std::uint64_t bench_seed = 1;
  std::string cmp_out;
  NetOptions cmp_net;
  auto* bc = app.add_subcommand("bench-compare", "packed comparison cost and rounds");
  bc->add_option("--pairs", pairs, "pair counts to sweep");
  bc->add_option("--bits", cmp_bits)->check(CLI::IsMember({32u, 64u}));
  bc->add_option("--chunk-bits", cmp_chunk);
  bc->add_option("--seed", bench_seed);
  bc->add_option("--out", cmp_out, "CSV file (default stdout)");
  add_net_flags(bc, cmp_net);

  // bench-median
  std::vector<std::size_t> sizes{20, 40, 60, 80, 100};
  unsigned med_key_bits = 512, med_bits = 32;
  std::string med_out;
  NetOptions med_net;
  auto* bm = app.add_subcommand("bench-median", "shuffle + quickselect on m x m matrices");
  bm->add_option("--clients", sizes, "client counts to sweep");
  bm->add_option("--key-bits", med_key_bits)->check(CLI::IsMember({512u, 1024u, 2048u}));
  bm->add_option("--bits", med_bits)->check(CLI::IsMember({32u, 64u}));
  bm->add_option("--seed", bench_seed);
  bm->add_option("--out", med_out, "CSV file (default stdout)");
  add_net_flags(bm, med_net);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (!config_file.empty()) {
        // Config file first, then re-apply explicit flags on top.
        std::ifstream is(config_file);
        if (!is) throw Error("cannot read " + config_file);
        ExperimentConfig base;
        nlohmann::json j = nlohmann::json::parse(is);
        from_json(j, base);
        ExperimentConfig flags = cfg;
        cfg = base;
        auto given = [&](const char* name) { return run->count(name) > 0; };
        if (given("--clients")) cfg.clients = flags.clients;
        if (given("--malicious")) cfg.malicious = flags.malicious;
        if (given("--ipm-alpha")) cfg.ipm_alpha = flags.ipm_alpha;
        if (given("--window")) cfg.window = flags.window;
        if (given("--bits")) cfg.bits = flags.bits;
        if (given("--fixed-bits")) cfg.fixed_bits = flags.fixed_bits;
        if (given("--rounds")) cfg.rounds = flags.rounds;
        if (given("--epochs")) cfg.epochs = flags.epochs;
        if (given("--seed")) cfg.seed = flags.seed;
        if (given("--key-bits")) cfg.key_bits = flags.key_bits;
        if (given("--lr")) cfg.lr = flags.lr;
        if (given("--batch")) cfg.batch = flags.batch;
        if (given("--separation")) cfg.separation = flags.separation;
        if (given("--attack")) cfg.attack = parse_attack(attack);
        if (given("--mode")) cfg.mode = parse_mode(mode);
        if (given("--defense")) cfg.defense = parse_defense(defense);
        if (given("--arch")) cfg.arch = parse_arch(arch);
      } else {
        cfg.attack = parse_attack(attack);
        cfg.mode = parse_mode(mode);
        cfg.defense = parse_defense(defense);
        cfg.arch = parse_arch(arch);
      }
      if (dirichlet) {
        cfg.partition = PartitionMode::kDirichlet;
        cfg.dirichlet_alpha = *dirichlet;
      }
      auto ep = open_endpoint(run_net);
      if (ep && cfg.mode != Mode::kSecure) throw RangeError("tcp transport needs --mode secure");
      spdlog::info("run: attack={} mode={} clients={} rounds={}", to_string(cfg.attack),
                   to_string(cfg.mode), cfg.clients, cfg.rounds);
      auto metrics = run_experiment(cfg, ep ? &*ep : nullptr);

      const std::filesystem::path dir(out_dir);
      auto jl = open_out(dir / "rounds.jsonl");
      for (const auto& m : metrics) {
        jl << to_json(m).dump() << '\n';
        spdlog::info("round {} took {:.3f}s", m.round, m.seconds);
      }
      auto csv = open_out(dir / "summary.csv");
      csv << "attack,defense,mode,clients,malicious,rounds,seed,final_ma,final_asr,"
             "rounds_skipped,malicious_accepted_total\n";
      std::size_t skipped = 0, accepted = 0;
      for (const auto& m : metrics) {
        skipped += m.skipped;
        accepted += m.malicious_accepted;
      }
      csv << to_string(cfg.attack) << ',' << to_string(cfg.defense) << ',' << to_string(cfg.mode)
          << ',' << cfg.clients << ',' << cfg.malicious << ',' << cfg.rounds << ',' << cfg.seed
          << ',' << (metrics.empty() ? 0.0 : metrics.back().ma) << ','
          << (metrics.empty() ? 0.0 : metrics.back().asr) << ',' << skipped << ',' << accepted
          << '\n';
      nlohmann::json cj;
      to_json(cj, cfg);
      open_out(dir / "config.json") << cj.dump(2) << '\n';
      if (ep) ep->close();
      return 0;
    }
    if (*bc) {
      auto ep = open_endpoint(cmp_net);
      std::ofstream file;
      if (!cmp_out.empty()) file = open_out(cmp_out);
      std::ostream& os = cmp_out.empty() ? std::cout : file;
      os << compare_csv_header() << '\n';
      for (auto n : pairs) {
        os << to_csv(bench_compare(n, cmp_bits, cmp_chunk, bench_seed + n, ep ? &*ep : nullptr))
           << '\n';
      }
      if (ep) ep->close();
      return 0;
    }
    if (*bm) {
      auto ep = open_endpoint(med_net);
      std::ofstream file;
      if (!med_out.empty()) file = open_out(med_out);
      std::ostream& os = med_out.empty() ? std::cout : file;
      os << median_csv_header() << '\n';
      for (auto m : sizes) {
        auto row = bench_median(m, med_key_bits, med_bits, bench_seed + m, ep ? &*ep : nullptr);
        spdlog::info("bench-median m={} {:.2f}s", m, row.seconds);
        os << to_csv(row) << '\n' << std::flush;
      }
      if (ep) ep->close();
      return 0;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
