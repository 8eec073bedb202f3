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

#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <utility>

#include "flurp/error.h"
#include "flurp/sharing.h"
#include "flurp/transport.h"

namespace flurp {

// Runs `fn(Party&)` for both parties of a fresh in-process session, each on
// its own thread, and returns both results (party 0 first). If either side
// throws, its endpoint is closed so the peer unblocks; the first error that
// is not a secondary ClosedChannelError is rethrown.
template <typename Fn>
auto run_two_party(std::uint64_t seed, Fn&& fn) {
  using R = std::invoke_result_t<Fn&, Party&>;
  auto [e0, e1] = make_inproc_session();
  Endpoint* eps[2] = {&e0, &e1};
  std::optional<R> out[2];
  std::exception_ptr err[2];
  auto body = [&](int b) {
    try {
      Party party(*eps[b], seed);
      out[b].emplace(fn(party));
    } catch (...) {
      err[b] = std::current_exception();
      eps[b]->close();
    }
  };
  std::thread t1(body, 1);
  body(0);
  t1.join();
  for (int pass = 0; pass < 2; ++pass) {
    for (int b = 0; b < 2; ++b) {
      if (!err[b]) continue;
      if (pass == 1) std::rethrow_exception(err[b]);
      try {
        std::rethrow_exception(err[b]);
      } catch (const ClosedChannelError&) {
      } catch (...) {
        throw;
      }
    }
  }
  return std::pair<R, R>(std::move(*out[0]), std::move(*out[1]));
}

// Variant that also hands back the final transcript counters of each side.
template <typename Fn>
auto run_two_party_counted(std::uint64_t seed, Fn&& fn) {
  using R = std::invoke_result_t<Fn&, Party&>;
  auto res = run_two_party(seed, [&](Party& p) {
    R r = fn(p);
    return std::pair<R, TranscriptCounters>(std::move(r), p.net.counters());
  });
  return res;
}

}  // namespace flurp
