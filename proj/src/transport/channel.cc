/*
 * Copyright 2026 The MQFL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mqfl/transport/channel.h"

#include <arpa/inet.h>
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
#include <vector>

#include "mqfl/errors.h"

namespace mqfl::transport {

namespace {

using Clock = std::chrono::steady_clock;
using TReason = TransportError::Reason;

// ---- in-process ----

struct Pipe {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::vector<uint8_t>> frames;
  bool closed = false;
};

class LocalEndpoint : public Endpoint {
 public:
  LocalEndpoint(std::shared_ptr<Pipe> out, std::shared_ptr<Pipe> in)
      : out_(std::move(out)), in_(std::move(in)) {}
  ~LocalEndpoint() override { Close(); }

  void Send(const Envelope& env) override {
    auto bytes = Frame(env);
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw TransportError(TReason::kClosed, "channel closed");
    sent_ += bytes.size();
    out_->frames.push_back(std::move(bytes));
    out_->cv.notify_one();
  }

  Envelope Recv(Millis timeout) override {
    std::unique_lock lock(in_->mu);
    if (!in_->cv.wait_for(lock, timeout, [&] { return !in_->frames.empty() || in_->closed; })) {
      throw TransportError(TReason::kTimeout, "receive timed out");
    }
    if (in_->frames.empty()) throw TransportError(TReason::kClosed, "channel closed by peer");
    auto bytes = std::move(in_->frames.front());
    in_->frames.pop_front();
    lock.unlock();
    received_ += bytes.size();
    return Parse(bytes);
  }

  void Close() override {
    for (auto* p : {out_.get(), in_.get()}) {
      std::lock_guard lock(p->mu);
      p->closed = true;
      p->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<Pipe> out_, in_;
};

// ---- TCP ----

int PollFor(int fd, short events, Clock::time_point deadline) {
  for (;;) {
    const auto left = std::chrono::duration_cast<Millis>(deadline - Clock::now()).count();
    if (left <= 0) return 0;
    pollfd p{fd, events, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(std::min<int64_t>(left, 1 << 30)));
    if (rc < 0 && errno == EINTR) continue;
    if (rc < 0) throw TransportError(TReason::kIo, std::string("poll: ") + std::strerror(errno));
    return rc;
  }
}

sockaddr_in Resolve(const std::string& host, uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  const std::string h = host == "localhost" ? "127.0.0.1" : host;
  if (::inet_pton(AF_INET, h.c_str(), &addr.sin_addr) != 1) {
    throw TransportError(TReason::kConnect, "not an IPv4 address: " + host);
  }
  return addr;
}

class TcpEndpoint : public Endpoint {
 public:
  explicit TcpEndpoint(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpEndpoint() override {
    Close();
    ::close(fd_);
  }

  void Send(const Envelope& env) override {
    const auto bytes = Frame(env);
    if (closed_) throw TransportError(TReason::kClosed, "endpoint closed");
    size_t off = 0;
    while (off < bytes.size()) {
      const ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n < 0) {
        if (errno == EPIPE || errno == ECONNRESET) throw TransportError(TReason::kClosed, "peer closed");
        throw TransportError(TReason::kIo, std::string("send: ") + std::strerror(errno));
      }
      off += static_cast<size_t>(n);
    }
    sent_ += bytes.size();
  }

  Envelope Recv(Millis timeout) override {
    if (closed_) throw TransportError(TReason::kClosed, "endpoint closed");
    const auto deadline = Clock::now() + timeout;
    std::vector<uint8_t> buf(kHeaderSize);
    if (!ReadExact(buf.data(), kHeaderSize, deadline, true)) {
      throw TransportError(TReason::kClosed, "peer closed");
    }
    const Header h = ParseHeader(buf);
    buf.resize(kHeaderSize + h.length + kTrailerSize);
    ReadExact(buf.data() + kHeaderSize, h.length + kTrailerSize, deadline, false);
    received_ += buf.size();
    return Parse(buf);
  }

  void Close() override {
    if (!closed_.exchange(true)) ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  // False on a clean EOF before the first byte when `at_boundary`.
  bool ReadExact(uint8_t* dst, size_t count, Clock::time_point deadline, bool at_boundary) {
    size_t got = 0;
    while (got < count) {
      if (PollFor(fd_, POLLIN, deadline) == 0) {
        throw TransportError(TReason::kTimeout, "receive timed out");
      }
      const ssize_t n = ::recv(fd_, dst + got, count - got, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n < 0) {
        if (errno == ECONNRESET) throw TransportError(TReason::kClosed, "connection reset");
        throw TransportError(TReason::kIo, std::string("recv: ") + std::strerror(errno));
      }
      if (n == 0) {
        if (at_boundary && got == 0) return false;
        throw ParseError(ParseError::Reason::kTruncated, "connection closed mid-frame");
      }
      got += static_cast<size_t>(n);
    }
    return true;
  }

  int fd_;
  std::atomic<bool> closed_{false};
};

}  // namespace

std::pair<std::unique_ptr<Endpoint>, std::unique_ptr<Endpoint>> ChannelPair() {
  auto ab = std::make_shared<Pipe>(), ba = std::make_shared<Pipe>();
  return {std::make_unique<LocalEndpoint>(ab, ba), std::make_unique<LocalEndpoint>(ba, ab)};
}

TcpListener::TcpListener(const std::string& host, uint16_t port) {
  sockaddr_in addr = Resolve(host, port);
  fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw TransportError(TReason::kConnect, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(fd_, 128) != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    throw TransportError(TReason::kConnect, "cannot listen on " + host + ":" + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() { Close(); }

void TcpListener::Close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

std::unique_ptr<Endpoint> TcpListener::Accept(Millis timeout) {
  if (fd_ < 0) throw TransportError(TReason::kClosed, "listener closed");
  if (PollFor(fd_, POLLIN, Clock::now() + timeout) == 0) {
    throw TransportError(TReason::kTimeout, "no connection within the accept timeout");
  }
  const int c = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
  if (c < 0) throw TransportError(TReason::kIo, std::string("accept: ") + std::strerror(errno));
  return std::make_unique<TcpEndpoint>(c);
}

std::unique_ptr<Endpoint> TcpDial(const std::string& host, uint16_t port, Millis timeout) {
  const sockaddr_in addr = Resolve(host, port);
  const auto deadline = Clock::now() + timeout;
  std::string last = "timed out";
  // The listener may still be starting; retry until the deadline.
  do {
    const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) throw TransportError(TReason::kConnect, std::string("socket: ") + std::strerror(errno));
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) {
      return std::make_unique<TcpEndpoint>(fd);
    }
    last = std::strerror(errno);
    ::close(fd);
    std::this_thread::sleep_for(Millis(20));
  } while (Clock::now() < deadline);
  throw TransportError(TReason::kConnect, "cannot connect to " + host + ":" + std::to_string(port) + ": " + last);
}

}  // namespace mqfl::transport
