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

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include "flurp/error.h"

namespace flurp {

namespace {

struct PipeState {
  struct Queue {
    std::deque<std::uint8_t> data;
    bool writer_closed = false;
    bool reader_closed = false;
  };
  std::mutex mu;
  std::condition_variable cv;
  Queue queues[2];
};

class InprocStream final : public ByteStream {
 public:
  InprocStream(std::shared_ptr<PipeState> state, int side)
      : state_(std::move(state)), side_(side) {}
  ~InprocStream() override { close(); }

  void write(std::span<const std::uint8_t> data) override {
    std::lock_guard<std::mutex> lock(state_->mu);
    auto& q = state_->queues[1 - side_];
    if (q.reader_closed || q.writer_closed) {
      throw ClosedChannelError("inproc: peer has closed the channel");
    }
    q.data.insert(q.data.end(), data.begin(), data.end());
    state_->cv.notify_all();
  }

  void read(std::span<std::uint8_t> out) override {
    std::unique_lock<std::mutex> lock(state_->mu);
    auto& q = state_->queues[side_];
    state_->cv.wait(lock, [&] {
      return q.data.size() >= out.size() || q.writer_closed;
    });
    if (q.data.size() < out.size()) {
      throw ClosedChannelError("inproc: peer closed before message completed");
    }
    std::copy_n(q.data.begin(), out.size(), out.begin());
    q.data.erase(q.data.begin(),
                 q.data.begin() + static_cast<std::ptrdiff_t>(out.size()));
  }

  void close() override {
    if (!state_) return;
    std::lock_guard<std::mutex> lock(state_->mu);
    state_->queues[1 - side_].writer_closed = true;
    state_->queues[side_].reader_closed = true;
    state_->cv.notify_all();
  }

 private:
  std::shared_ptr<PipeState> state_;
  int side_;
};

class TcpStream final : public ByteStream {
 public:
  TcpStream(int fd, std::chrono::milliseconds timeout) : fd_(fd) {
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpStream() override { close(); }

  void write(std::span<const std::uint8_t> data) override {
    std::size_t done = 0;
    while (done < data.size()) {
      ssize_t n = ::send(fd_, data.data() + done, data.size() - done,
                         MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ClosedChannelError(std::string("tcp send: ") +
                                 std::strerror(errno));
      }
      done += static_cast<std::size_t>(n);
    }
  }

  void read(std::span<std::uint8_t> out) override {
    std::size_t done = 0;
    while (done < out.size()) {
      ssize_t n = ::recv(fd_, out.data() + done, out.size() - done, 0);
      if (n == 0) throw ClosedChannelError("tcp: peer closed the connection");
      if (n < 0) {
        if (errno == EINTR) continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK) {
          throw TimeoutError("tcp: receive timed out");
        }
        throw ClosedChannelError(std::string("tcp recv: ") +
                                 std::strerror(errno));
      }
      done += static_cast<std::size_t>(n);
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
};

std::string prefix_of(std::string_view tag) {
  auto dot = tag.find('.');
  return std::string(dot == std::string_view::npos ? tag : tag.substr(0, dot));
}

}  // namespace

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>>
make_inproc_pipe() {
  auto state = std::make_shared<PipeState>();
  return {std::make_unique<InprocStream>(state, 0),
          std::make_unique<InprocStream>(state, 1)};
}

std::unique_ptr<ByteStream> tcp_listen(std::uint16_t port,
                                       std::chrono::milliseconds timeout) {
  int lfd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (lfd < 0) throw Error("tcp: socket() failed");
  int one = 1;
  ::setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    ::close(lfd);
    throw Error("tcp: bind failed on port " + std::to_string(port));
  }
  if (::listen(lfd, 1) < 0) {
    ::close(lfd);
    throw Error("tcp: listen failed");
  }
  pollfd pfd{lfd, POLLIN, 0};
  int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (ready <= 0) {
    ::close(lfd);
    throw TimeoutError("tcp: no peer connected to port " + std::to_string(port));
  }
  int fd = ::accept(lfd, nullptr, nullptr);
  ::close(lfd);
  if (fd < 0) throw Error("tcp: accept failed");
  return std::make_unique<TcpStream>(fd, timeout);
}

std::unique_ptr<ByteStream> tcp_connect(const std::string& host,
                                        std::uint16_t port,
                                        std::chrono::milliseconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints,
                    &res) != 0 ||
      res == nullptr) {
    throw Error("tcp: cannot resolve " + host);
  }
  // The listener may not be up yet; retry until the timeout elapses.
  auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd < 0) {
      ::freeaddrinfo(res);
      throw Error("tcp: socket() failed");
    }
    if (::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
      ::freeaddrinfo(res);
      return std::make_unique<TcpStream>(fd, timeout);
    }
    ::close(fd);
    if (std::chrono::steady_clock::now() > deadline) {
      ::freeaddrinfo(res);
      throw TimeoutError("tcp: connect to " + host + ":" +
                         std::to_string(port) + " timed out");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

std::uint64_t TranscriptCounters::declared_value(const std::string& key) const {
  auto it = declared.find(key);
  return it == declared.end() ? 0 : it->second;
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

namespace {
std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t& pos,
                     int width) {
  if (pos + static_cast<std::size_t>(width) > in.size()) {
    throw ShapeError("wire: truncated integer");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(in[pos + static_cast<std::size_t>(i)]) << (8 * i);
  }
  pos += static_cast<std::size_t>(width);
  return v;
}
}  // namespace

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t& pos) {
  return get_le(in, pos, 8);
}
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t& pos) {
  return static_cast<std::uint32_t>(get_le(in, pos, 4));
}
std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t& pos) {
  return static_cast<std::uint16_t>(get_le(in, pos, 2));
}

Bytes pack_bits(std::span<const std::uint8_t> values, unsigned width) {
  Bytes out((values.size() * width + 7) / 8, 0);
  std::size_t bit = 0;
  for (std::uint8_t v : values) {
    for (unsigned k = 0; k < width; ++k, ++bit) {
      if ((v >> k) & 1U) out[bit / 8] |= static_cast<std::uint8_t>(1U << (bit % 8));
    }
  }
  return out;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> packed,
                                      std::size_t count, unsigned width) {
  if (packed.size() * 8 < count * width) {
    throw ShapeError("unpack_bits: buffer too short");
  }
  std::vector<std::uint8_t> out(count, 0);
  std::size_t bit = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint8_t v = 0;
    for (unsigned k = 0; k < width; ++k, ++bit) {
      if ((packed[bit / 8] >> (bit % 8)) & 1U) v |= static_cast<std::uint8_t>(1U << k);
    }
    out[i] = v;
  }
  return out;
}

Bytes encode_frame(std::string_view tag, std::span<const std::uint8_t> payload) {
  if (tag.size() > 0xffff) throw ShapeError("frame: tag too long");
  Bytes frame;
  frame.reserve(10 + tag.size() + payload.size());
  put_u64(frame, payload.size());
  put_u16(frame, static_cast<std::uint16_t>(tag.size()));
  frame.insert(frame.end(), tag.begin(), tag.end());
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

Endpoint::Endpoint(int party_id, std::unique_ptr<ByteStream> stream)
    : party_(party_id), stream_(std::move(stream)) {
  if (party_id != 0 && party_id != 1) throw Error("party id must be 0 or 1");
}

Endpoint::~Endpoint() { close(); }
Endpoint::Endpoint(Endpoint&&) noexcept = default;
Endpoint& Endpoint::operator=(Endpoint&&) noexcept = default;

void Endpoint::close() {
  if (stream_) stream_->close();
}

void Endpoint::enter(Direction d) {
  if (d == Direction::kExchange || d != last_) ++counters_.rounds;
  last_ = d;
}

void Endpoint::barrier() { last_ = Direction::kNone; }

void Endpoint::absorb(std::uint8_t direction, std::string_view tag,
                      std::span<const std::uint8_t> payload) {
  constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  auto mix = [&](std::uint8_t b) { digest_ = (digest_ ^ b) * kPrime; };
  mix(direction);
  for (char c : tag) mix(static_cast<std::uint8_t>(c));
  mix(0);
  for (std::uint8_t b : payload) mix(b);
}

void Endpoint::write_frame(std::span<const std::uint8_t> payload,
                           std::string_view tag) {
  if (!stream_) throw ClosedChannelError("endpoint is closed");
  stream_->write(encode_frame(tag, payload));
  counters_.bytes_sent += payload.size();
  counters_.messages_sent += 1;
  auto& p = counters_.by_protocol[prefix_of(tag)];
  p.bytes_sent += payload.size();
  p.messages_sent += 1;
  absorb('S', tag, payload);
}

Bytes Endpoint::read_frame(std::string_view tag) {
  if (!stream_) throw ClosedChannelError("endpoint is closed");
  std::uint8_t header[10];
  stream_->read(header);
  std::size_t pos = 0;
  std::uint64_t len = get_u64(header, pos);
  std::uint16_t tag_len = get_u16(header, pos);
  std::string got(tag_len, '\0');
  stream_->read(std::span<std::uint8_t>(
      reinterpret_cast<std::uint8_t*>(got.data()), got.size()));
  Bytes payload(len);
  stream_->read(payload);
  if (got != tag) {
    throw TagMismatchError("expected frame '" + std::string(tag) +
                           "' but peer sent '" + got + "'");
  }
  counters_.bytes_received += payload.size();
  counters_.messages_received += 1;
  counters_.by_protocol[prefix_of(tag)].bytes_received += payload.size();
  absorb('R', tag, payload);
  return payload;
}

void Endpoint::send(std::span<const std::uint8_t> payload, std::string_view tag) {
  enter(Direction::kSend);
  write_frame(payload, tag);
}

Bytes Endpoint::receive(std::string_view tag) {
  enter(Direction::kReceive);
  return read_frame(tag);
}

Bytes Endpoint::exchange(std::span<const std::uint8_t> payload,
                         std::string_view tag) {
  enter(Direction::kExchange);
  // Party 1 reads first so that two blocking TCP writers can never deadlock
  // on full kernel buffers.
  if (party_ == 0) {
    write_frame(payload, tag);
    return read_frame(tag);
  }
  Bytes in = read_frame(tag);
  write_frame(payload, tag);
  return in;
}

void Endpoint::declare(const std::string& metric, std::uint64_t amount) {
  counters_.declared[metric] += amount;
}

std::pair<Endpoint, Endpoint> make_inproc_session() {
  auto [a, b] = make_inproc_pipe();
  return {Endpoint(0, std::move(a)), Endpoint(1, std::move(b))};
}

}  // namespace flurp
