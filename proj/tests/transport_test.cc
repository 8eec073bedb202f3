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

#include "flurp/transport.h"

#include <gtest/gtest.h>
#include <unistd.h>

#include <thread>

#include "flurp/compare.h"
#include "flurp/error.h"
#include "flurp/session.h"
#include "flurp/sharing.h"

namespace flurp {
namespace {

Bytes bytes_of(std::initializer_list<int> v) {
  Bytes b;
  for (int x : v) b.push_back(static_cast<std::uint8_t>(x));
  return b;
}

TEST(Transport, SendReceiveCountsPayloadBytes) {
  auto [a, b] = make_inproc_session();
  Bytes ten(10, 0xab);
  a.send(ten, "echo");
  EXPECT_EQ(b.receive("echo"), ten);
  EXPECT_EQ(a.counters().bytes_sent, 10u);
  EXPECT_EQ(b.counters().bytes_received, 10u);
}

TEST(Transport, ReceiveReturnsPeerPayload) {
  auto [a, b] = make_inproc_session();
  a.send(bytes_of({1, 2, 3}), "x");
  EXPECT_EQ(b.receive("x"), bytes_of({1, 2, 3}));
}

TEST(Transport, EmptyPayloadRoundTrips) {
  auto [a, b] = make_inproc_session();
  a.send(Bytes{}, "empty");
  EXPECT_TRUE(b.receive("empty").empty());
}

TEST(Transport, SendReceiveSendIsThreeRounds) {
  auto [a, b] = make_inproc_session();
  a.send(bytes_of({1}), "t");
  b.receive("t");
  b.send(bytes_of({2}), "t");
  a.receive("t");
  a.send(bytes_of({3}), "t");
  b.receive("t");
  EXPECT_EQ(a.counters().rounds, 3u);
  EXPECT_EQ(b.counters().rounds, 3u);
}

TEST(Transport, TwoSendsThenReceiveIsTwoRounds) {
  auto [a, b] = make_inproc_session();
  a.send(bytes_of({1}), "t");
  a.send(bytes_of({2}), "t");
  b.send(bytes_of({9}), "t");
  a.receive("t");
  EXPECT_EQ(a.counters().rounds, 2u);
}

TEST(Transport, ExchangeIsOneRoundEach) {
  auto [a, b] = make_inproc_session();
  std::thread t([&] { EXPECT_EQ(b.exchange(bytes_of({7}), "x"), bytes_of({5})); });
  EXPECT_EQ(a.exchange(bytes_of({5}), "x"), bytes_of({7}));
  t.join();
  EXPECT_EQ(a.counters().rounds, 1u);
  EXPECT_EQ(b.counters().rounds, 1u);
}

TEST(Transport, BarrierStartsNewRound) {
  auto [a, b] = make_inproc_session();
  a.send(bytes_of({1}), "t");
  a.barrier();
  a.send(bytes_of({2}), "t");
  EXPECT_EQ(a.counters().rounds, 2u);
}

TEST(Transport, TagMismatchThrows) {
  auto [a, b] = make_inproc_session();
  a.send(bytes_of({1}), "compare");
  EXPECT_THROW(b.receive("shuffle"), TagMismatchError);
}

TEST(Transport, ClosedPeerThrows) {
  auto [a, b] = make_inproc_session();
  b.close();
  EXPECT_THROW(a.send(bytes_of({1}), "t"), ClosedChannelError);
  EXPECT_THROW(a.receive("t"), ClosedChannelError);
}

TEST(Transport, ByProtocolUsesTagPrefix) {
  auto [a, b] = make_inproc_session();
  a.send(Bytes(4), "compare.leaf");
  a.send(Bytes(6), "compare.merge");
  a.send(Bytes(3), "mul.open");
  EXPECT_EQ(a.counters().by_protocol.at("compare").bytes_sent, 10u);
  EXPECT_EQ(a.counters().by_protocol.at("mul").bytes_sent, 3u);
}

TEST(Transport, FrameLayout) {
  Bytes f = encode_frame("ab", bytes_of({9, 8}));
  ASSERT_EQ(f.size(), 8u + 2u + 2u + 2u);
  EXPECT_EQ(f[0], 2);  // LE length
  for (int i = 1; i < 8; ++i) EXPECT_EQ(f[i], 0);
  EXPECT_EQ(f[8], 2);
  EXPECT_EQ(f[9], 0);
  EXPECT_EQ(f[10], 'a');
  EXPECT_EQ(f[13], 8);
}

TEST(Transport, PackBitsRoundTrip) {
  std::vector<std::uint8_t> v{3, 0, 1, 2, 3, 3, 1};
  Bytes p = pack_bits(v, 2);
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(unpack_bits(p, v.size(), 2), v);
  EXPECT_THROW(unpack_bits(p, 9, 2), ShapeError);
}

// A small seeded protocol used to compare transports.
std::pair<std::uint64_t, TranscriptCounters> compare_party(Party& party) {
  Ring ring(32);
  RingVector x{1, 5, ring.from_signed(-3), 100}, y{2, 5, 4, ring.from_signed(-100)};
  auto xs = split(x, ring, 0, 11);
  auto ys = split(y, ring, 0, 12);
  BooleanShare r = packed_compare(party, party.id() == 0 ? xs.first : xs.second,
                                  party.id() == 0 ? ys.first : ys.second);
  RingVector id = open(party, party.id() == 0 ? xs.first : xs.second, "t.open");
  (void)r;
  (void)id;
  return {party.net.transcript_digest(), party.net.counters()};
}

TEST(Transport, TcpAndInprocTranscriptsMatch) {
  auto inproc = run_two_party(77, [](Party& p) { return compare_party(p); });

  const auto port = static_cast<std::uint16_t>(21000 + (::getpid() % 20000));
  std::pair<std::uint64_t, TranscriptCounters> tcp0, tcp1;
  std::thread server([&] {
    Endpoint e(0, tcp_listen(port, std::chrono::milliseconds(10000)));
    Party p(e, 77);
    tcp0 = compare_party(p);
  });
  {
    Endpoint e(1, tcp_connect("127.0.0.1", port, std::chrono::milliseconds(10000)));
    Party p(e, 77);
    tcp1 = compare_party(p);
  }
  server.join();
  EXPECT_EQ(inproc.first.first, tcp0.first);
  EXPECT_EQ(inproc.second.first, tcp1.first);
  EXPECT_EQ(tcp0.second.bytes_sent, tcp1.second.bytes_received);
  EXPECT_EQ(tcp1.second.bytes_sent, tcp0.second.bytes_received);
  EXPECT_EQ(tcp0.second.rounds, tcp1.second.rounds);
}

TEST(Transport, TcpReadTimesOut) {
  const auto port = static_cast<std::uint16_t>(22000 + (::getpid() % 20000));
  std::thread server([&] {
    Endpoint e(0, tcp_listen(port, std::chrono::milliseconds(5000)));
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
  });
  Endpoint e(1, tcp_connect("127.0.0.1", port, std::chrono::milliseconds(100)));
  EXPECT_THROW(e.receive("never"), TimeoutError);
  server.join();
}

TEST(Transport, TcpListenTimesOutWithoutPeer) {
  const auto port = static_cast<std::uint16_t>(23000 + (::getpid() % 20000));
  EXPECT_THROW(tcp_listen(port, std::chrono::milliseconds(100)), TimeoutError);
}

TEST(Transport, ByteConservationAndSymmetricRounds) {
  auto r = run_two_party(5, [](Party& p) { return compare_party(p); });
  EXPECT_EQ(r.first.second.bytes_sent, r.second.second.bytes_received);
  EXPECT_EQ(r.second.second.bytes_sent, r.first.second.bytes_received);
  EXPECT_EQ(r.first.second.rounds, r.second.second.rounds);
}

TEST(Transport, ReplayIsByteIdentical) {
  auto r1 = run_two_party(5, [](Party& p) { return compare_party(p); });
  auto r2 = run_two_party(5, [](Party& p) { return compare_party(p); });
  EXPECT_EQ(r1.first.first, r2.first.first);
  EXPECT_EQ(r1.second.first, r2.second.first);
}

}  // namespace
}  // namespace flurp
