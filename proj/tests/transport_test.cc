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

#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "mqfl/errors.h"
#include "mqfl/transport/channel.h"
#include "mqfl/transport/envelope.h"

namespace mqfl::transport {
namespace {

using Reason = ParseError::Reason;

Envelope RandomEnvelope(std::mt19937_64& g, size_t max_payload = 2000) {
  Envelope e;
  e.kind = static_cast<Kind>(1 + g() % 7);
  e.round = static_cast<uint32_t>(g());
  e.sender = static_cast<uint32_t>(g());
  e.payload.resize(g() % (max_payload + 1));
  for (auto& b : e.payload) b = static_cast<uint8_t>(g());
  return e;
}

Reason ParseReason(const std::vector<uint8_t>& bytes) {
  try {
    Parse(bytes);
  } catch (const ParseError& e) {
    return e.reason();
  }
  ADD_FAILURE() << "parse unexpectedly succeeded";
  return Reason::kMalformed;
}

TEST(EnvelopeTest, RoundtripRandom) {
  std::mt19937_64 g(1);
  for (int t = 0; t < 1000; ++t) {
    Envelope e = RandomEnvelope(g);
    auto bytes = Frame(e);
    EXPECT_EQ(bytes.size(), kHeaderSize + e.payload.size() + kTrailerSize);
    EXPECT_EQ(Parse(bytes), e);
  }
}

TEST(EnvelopeTest, ShutdownIsHeaderPlusCrc) {
  auto bytes = Frame({Kind::kShutdown, 3, 0, {}});
  EXPECT_EQ(bytes.size(), 19u);
  // version 1, kind 7, round 3, sender 0, length 0.
  const std::vector<uint8_t> head = {1, 0, 7, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_TRUE(std::equal(head.begin(), head.end(), bytes.begin()));
}

TEST(EnvelopeTest, DistinctRejections) {
  std::mt19937_64 g(2);
  Envelope e = RandomEnvelope(g);
  e.payload.resize(64, 0xAB);
  const auto good = Frame(e);
  for (size_t i = kHeaderSize; i < kHeaderSize + e.payload.size(); ++i) {
    auto bad = good;
    bad[i] ^= 0x01;
    EXPECT_EQ(ParseReason(bad), Reason::kBadChecksum);
  }
  auto bad = good;
  bad[2] = 0;
  EXPECT_EQ(ParseReason(bad), Reason::kUnknownKind);
  bad[2] = 8;
  EXPECT_EQ(ParseReason(bad), Reason::kUnknownKind);
  bad = good;
  bad[0] = 2;
  EXPECT_EQ(ParseReason(bad), Reason::kBadVersion);
  for (size_t cut : {size_t{0}, size_t{5}, kHeaderSize, good.size() - 1}) {
    EXPECT_EQ(ParseReason({good.begin(), good.begin() + cut}), Reason::kTruncated);
  }
  bad = good;
  bad.push_back(0);
  EXPECT_EQ(ParseReason(bad), Reason::kMalformed);
  bad = good;
  bad[11] = 0xff, bad[12] = 0xff, bad[13] = 0xff, bad[14] = 0xff;
  EXPECT_EQ(ParseReason(bad), Reason::kTooLarge);
  Envelope huge{Kind::kPlainUpdate, 0, 0, std::vector<uint8_t>(kMaxPayload + 1)};
  EXPECT_THROW(Frame(huge), ParseError);
}

// Same suite over both backends.
struct Pair {
  std::unique_ptr<Endpoint> a, b;
};

Pair MakeLocal() {
  auto [a, b] = ChannelPair();
  return {std::move(a), std::move(b)};
}

Pair MakeTcp() {
  TcpListener listener;
  std::unique_ptr<Endpoint> server;
  std::thread t([&] { server = listener.Accept(Millis(5000)); });
  auto client = TcpDial("127.0.0.1", listener.port(), Millis(5000));
  t.join();
  return {std::move(client), std::move(server)};
}

class BackendTest : public ::testing::TestWithParam<bool> {
 protected:
  Pair Make() { return GetParam() ? MakeTcp() : MakeLocal(); }
};

TEST_P(BackendTest, SendRecvIdentity) {
  auto p = Make();
  std::mt19937_64 g(3);
  for (int t = 0; t < 50; ++t) {
    Envelope e = RandomEnvelope(g);
    p.a->Send(e);
    EXPECT_EQ(p.b->Recv(Millis(5000)), e);
    p.b->Send(e);
    EXPECT_EQ(p.a->Recv(Millis(5000)), e);
  }
}

TEST_P(BackendTest, FifoAndByteCounts) {
  auto p = Make();
  std::mt19937_64 g(4);
  std::vector<Envelope> sent;
  uint64_t framed = 0;
  std::thread writer([&] {
    for (uint32_t seq = 0; seq < 500; ++seq) {
      Envelope e = RandomEnvelope(g, 4000);
      e.round = seq;
      framed += Frame(e).size();
      sent.push_back(e);
      p.a->Send(e);
    }
  });
  std::vector<Envelope> got;
  for (int i = 0; i < 500; ++i) got.push_back(p.b->Recv(Millis(10000)));
  writer.join();
  for (uint32_t i = 0; i < 500; ++i) EXPECT_EQ(got[i].round, i);
  EXPECT_EQ(got, sent);
  EXPECT_EQ(p.a->bytes_sent(), framed);
  EXPECT_EQ(p.b->bytes_received(), framed);
}

TEST_P(BackendTest, LargePayload) {
  auto p = Make();
  Envelope e{Kind::kEncryptedUpdate, 1, 2, std::vector<uint8_t>(6 << 20)};
  for (size_t i = 0; i < e.payload.size(); ++i) e.payload[i] = static_cast<uint8_t>(i * 31);
  std::thread writer([&] { p.a->Send(e); });
  EXPECT_EQ(p.b->Recv(Millis(20000)), e);
  writer.join();
}

TEST_P(BackendTest, TimeoutAndClosure) {
  auto p = Make();
  try {
    p.b->Recv(Millis(50));
    ADD_FAILURE() << "expected timeout";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.reason(), TransportError::Reason::kTimeout);
  }
  // Already-queued frames survive the peer's close.
  p.a->Send({Kind::kShutdown, 0, 0, {}});
  p.a->Close();
  EXPECT_EQ(p.b->Recv(Millis(5000)).kind, Kind::kShutdown);
  const auto start = std::chrono::steady_clock::now();
  try {
    p.b->Recv(Millis(5000));
    ADD_FAILURE() << "expected closed";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.reason(), TransportError::Reason::kClosed);
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(2));
  EXPECT_THROW(p.a->Send({Kind::kJoin, 0, 0, {}}), TransportError);
}

TEST_P(BackendTest, SendToClosedPeerFails) {
  auto p = Make();
  p.b->Close();
  p.b.reset();
  // TCP may accept a write or two into kernel buffers before reporting.
  bool failed = false;
  for (int i = 0; i < 200 && !failed; ++i) {
    try {
      p.a->Send({Kind::kPlainUpdate, 0, 0, std::vector<uint8_t>(1 << 16)});
    } catch (const TransportError& e) {
      EXPECT_EQ(e.reason(), TransportError::Reason::kClosed);
      failed = true;
    }
    std::this_thread::sleep_for(Millis(1));
  }
  EXPECT_TRUE(failed);
}

INSTANTIATE_TEST_SUITE_P(Backends, BackendTest, ::testing::Values(false, true),
                         [](const auto& info) { return info.param ? "Tcp" : "InProcess"; });

TEST(TcpTest, ManyClientsManyRounds) {
  TcpListener listener;
  constexpr int kClients = 10, kRounds = 20;
  std::vector<std::thread> clients;
  for (int c = 0; c < kClients; ++c) {
    clients.emplace_back([&, c] {
      auto ep = TcpDial("127.0.0.1", listener.port(), Millis(5000));
      ep->Send({Kind::kJoin, 0, static_cast<uint32_t>(c), {}});
      for (int r = 0; r < kRounds; ++r) {
        Envelope m = ep->Recv(Millis(10000));
        ASSERT_EQ(m.kind, Kind::kGlobalModel);
        ASSERT_EQ(m.round, static_cast<uint32_t>(r));
        m.kind = Kind::kPlainUpdate;
        m.sender = c;
        for (auto& b : m.payload) b ^= static_cast<uint8_t>(c);
        ep->Send(m);
      }
      EXPECT_EQ(ep->Recv(Millis(10000)).kind, Kind::kShutdown);
    });
  }
  std::vector<std::unique_ptr<Endpoint>> peers(kClients);
  for (int i = 0; i < kClients; ++i) {
    auto ep = listener.Accept(Millis(5000));
    const auto join = ep->Recv(Millis(5000));
    ASSERT_EQ(join.kind, Kind::kJoin);
    peers[join.sender] = std::move(ep);
  }
  std::mt19937_64 g(5);
  int parse_errors = 0;
  for (int r = 0; r < kRounds; ++r) {
    std::vector<uint8_t> payload(10000);
    for (auto& b : payload) b = static_cast<uint8_t>(g());
    for (auto& p : peers) p->Send({Kind::kGlobalModel, static_cast<uint32_t>(r), 0, payload});
    for (int c = 0; c < kClients; ++c) {
      try {
        auto m = peers[c]->Recv(Millis(10000));
        EXPECT_EQ(m.sender, static_cast<uint32_t>(c));
        EXPECT_EQ(m.round, static_cast<uint32_t>(r));
        for (size_t i = 0; i < payload.size(); ++i) ASSERT_EQ(m.payload[i], payload[i] ^ c);
      } catch (const ParseError&) {
        ++parse_errors;
      }
    }
  }
  for (auto& p : peers) p->Send({Kind::kShutdown, kRounds, 0, {}});
  for (auto& t : clients) t.join();
  EXPECT_EQ(parse_errors, 0);
}

TEST(TcpTest, DialFailureSurfaces) {
  TcpListener l;
  const uint16_t port = l.port();
  l.Close();
  EXPECT_THROW(TcpDial("127.0.0.1", port, Millis(100)), TransportError);
  EXPECT_THROW(TcpDial("not-an-ip", 1, Millis(100)), TransportError);
  TcpListener quiet;
  EXPECT_THROW(quiet.Accept(Millis(50)), TransportError);
}

}  // namespace
}  // namespace mqfl::transport
