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

#ifndef MQFL_TRANSPORT_CHANNEL_H_
#define MQFL_TRANSPORT_CHANNEL_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "mqfl/transport/envelope.h"

namespace mqfl::transport {

using Millis = std::chrono::milliseconds;
inline constexpr Millis kDefaultTimeout{30000};

// One side of a reliable, ordered connection. Send and Recv may run on
// different threads; each on its own is single-caller.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  // Throws TransportError(kClosed) once either side has closed.
  virtual void Send(const Envelope& env) = 0;
  // Throws TransportError(kTimeout) after `timeout`, kClosed when the peer
  // has gone away with nothing left to read, ParseError on a bad frame.
  virtual Envelope Recv(Millis timeout) = 0;
  Envelope Recv() { return Recv(timeout_); }
  virtual void Close() = 0;

  void set_timeout(Millis t) { timeout_ = t; }
  // Framed bytes moved through this endpoint.
  uint64_t bytes_sent() const { return sent_; }
  uint64_t bytes_received() const { return received_; }

 protected:
  std::atomic<uint64_t> sent_{0};
  std::atomic<uint64_t> received_{0};
  Millis timeout_ = kDefaultTimeout;
};

// Connected in-process pair. Frames go through the same byte encoding as
// TCP.
std::pair<std::unique_ptr<Endpoint>, std::unique_ptr<Endpoint>> ChannelPair();

// Loopback TCP. Port 0 picks a free port.
class TcpListener {
 public:
  explicit TcpListener(const std::string& host = "127.0.0.1", uint16_t port = 0);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  uint16_t port() const { return port_; }
  // Throws TransportError(kTimeout) if no peer connects in time.
  std::unique_ptr<Endpoint> Accept(Millis timeout = kDefaultTimeout);
  void Close();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

// Throws TransportError(kConnect) when the connection cannot be made.
std::unique_ptr<Endpoint> TcpDial(const std::string& host, uint16_t port,
                                  Millis timeout = kDefaultTimeout);

}  // namespace mqfl::transport

#endif  // MQFL_TRANSPORT_CHANNEL_H_
