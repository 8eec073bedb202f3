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

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flurp {

using Bytes = std::vector<std::uint8_t>;

// Ordered, reliable byte channel to the peer. Implementations throw
// ClosedChannelError once the peer is gone and TimeoutError when a read does
// not complete in time.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void write(std::span<const std::uint8_t> data) = 0;
  virtual void read(std::span<std::uint8_t> out) = 0;
  virtual void close() = 0;
};

// Two connected in-memory streams. Writes never block.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>>
make_inproc_pipe();

// Blocking TCP helpers. `timeout` bounds every subsequent read.
std::unique_ptr<ByteStream> tcp_listen(std::uint16_t port,
                                       std::chrono::milliseconds timeout);
std::unique_ptr<ByteStream> tcp_connect(const std::string& host,
                                        std::uint16_t port,
                                        std::chrono::milliseconds timeout);

struct ProtocolCounters {
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t messages_sent = 0;
};

// Byte and round accounting for one endpoint of a session.
//
// A round is one maximal run of same-direction operations: it increments when
// the endpoint switches between sending and receiving. An exchange
// (simultaneous send and receive) is a barrier and always counts as a single
// round of its own.
struct TranscriptCounters {
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_received = 0;
  std::uint64_t rounds = 0;
  // Keyed by the tag prefix before the first '.', e.g. "compare".
  std::map<std::string, ProtocolCounters> by_protocol;
  // Formula-level costs declared by protocol code, independent of framing
  // (e.g. "compare.bits", "shuffle.ciphertexts").
  std::map<std::string, std::uint64_t> declared;

  std::uint64_t declared_value(const std::string& key) const;
};

// Frame layout on the wire (all integers little-endian):
//   u64 payload length | u16 tag length | tag bytes | payload bytes
Bytes encode_frame(std::string_view tag, std::span<const std::uint8_t> payload);

class Endpoint {
 public:
  Endpoint(int party_id, std::unique_ptr<ByteStream> stream);
  ~Endpoint();
  Endpoint(const Endpoint&) = delete;
  Endpoint& operator=(const Endpoint&) = delete;
  Endpoint(Endpoint&&) noexcept;
  Endpoint& operator=(Endpoint&&) noexcept;

  int party() const { return party_; }

  void send(std::span<const std::uint8_t> payload, std::string_view tag);
  Bytes receive(std::string_view tag);
  // Both parties send `payload` and receive the peer's payload under `tag`.
  Bytes exchange(std::span<const std::uint8_t> payload, std::string_view tag);
  // Forces the next operation to open a new round.
  void barrier();

  void declare(const std::string& metric, std::uint64_t amount);

  const TranscriptCounters& counters() const { return counters_; }
  // FNV-1a digest over every frame sent and received, in order.
  std::uint64_t transcript_digest() const { return digest_; }

  void close();

 private:
  enum class Direction { kNone, kSend, kReceive, kExchange };

  void write_frame(std::span<const std::uint8_t> payload, std::string_view tag);
  Bytes read_frame(std::string_view tag);
  void enter(Direction d);
  void absorb(std::uint8_t direction, std::string_view tag,
              std::span<const std::uint8_t> payload);

  int party_ = 0;
  std::unique_ptr<ByteStream> stream_;
  TranscriptCounters counters_;
  Direction last_ = Direction::kNone;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
};

// Two endpoints of one in-process session, party 0 first.
std::pair<Endpoint, Endpoint> make_inproc_session();

// Little-endian helpers shared by the wire formats.
void put_u64(Bytes& out, std::uint64_t v);
void put_u32(Bytes& out, std::uint32_t v);
void put_u16(Bytes& out, std::uint16_t v);
std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t& pos);
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t& pos);
std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t& pos);

// Packs a sequence of small values (each below 2^width) densely, LSB first.
Bytes pack_bits(std::span<const std::uint8_t> values, unsigned width);
std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> packed,
                                      std::size_t count, unsigned width);

}  // namespace flurp
