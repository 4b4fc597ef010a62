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

#include "mqfl/transport/envelope.h"

#include "mqfl/errors.h"
#include "mqfl/util/bytes.h"

namespace mqfl::transport {

using Reason = ParseError::Reason;

std::string KindName(Kind kind) {
  switch (kind) {
    case Kind::kJoin: return "join";
    case Kind::kGlobalModel: return "global-model";
    case Kind::kEncryptedUpdate: return "encrypted-update";
    case Kind::kPlainUpdate: return "plain-update";
    case Kind::kDecryptRequest: return "decrypt-request";
    case Kind::kRoundReport: return "round-report";
    case Kind::kShutdown: return "shutdown";
  }
  return "unknown";
}

std::vector<uint8_t> Frame(const Envelope& env) {
  if (env.payload.size() > kMaxPayload) {
    throw ParseError(Reason::kTooLarge, "payload of " + std::to_string(env.payload.size()) +
                                            " bytes exceeds the 256 MiB cap");
  }
  util::ByteWriter w;
  w.bytes().reserve(kHeaderSize + env.payload.size() + kTrailerSize);
  w.Put<uint16_t>(kProtocolVersion);
  w.Put<uint8_t>(static_cast<uint8_t>(env.kind));
  w.Put<uint32_t>(env.round);
  w.Put<uint32_t>(env.sender);
  w.Put<uint32_t>(static_cast<uint32_t>(env.payload.size()));
  w.PutBytes(env.payload);
  w.Put<uint32_t>(util::Crc32(w.bytes()));
  return std::move(w.bytes());
}

Header ParseHeader(std::span<const uint8_t> header) {
  util::ByteReader r(header);
  if (header.size() < kHeaderSize) throw ParseError(Reason::kTruncated, "envelope header truncated");
  const uint16_t version = r.Get<uint16_t>();
  if (version != kProtocolVersion) {
    throw ParseError(Reason::kBadVersion, "unsupported protocol version " + std::to_string(version));
  }
  const uint8_t kind = r.Get<uint8_t>();
  if (kind < static_cast<uint8_t>(Kind::kJoin) || kind > static_cast<uint8_t>(Kind::kShutdown)) {
    throw ParseError(Reason::kUnknownKind, "unknown message kind " + std::to_string(kind));
  }
  Header h{static_cast<Kind>(kind), 0, 0, 0};
  h.round = r.Get<uint32_t>();
  h.sender = r.Get<uint32_t>();
  h.length = r.Get<uint32_t>();
  if (h.length > kMaxPayload) throw ParseError(Reason::kTooLarge, "declared payload exceeds the cap");
  return h;
}

Envelope Parse(std::span<const uint8_t> bytes) {
  const Header h = ParseHeader(bytes);
  const size_t total = kHeaderSize + size_t{h.length} + kTrailerSize;
  if (bytes.size() < total) throw ParseError(Reason::kTruncated, "envelope truncated");
  util::ByteReader crc(bytes.subspan(total - kTrailerSize, kTrailerSize));
  if (crc.Get<uint32_t>() != util::Crc32(bytes.first(total - kTrailerSize))) {
    throw ParseError(Reason::kBadChecksum, "envelope checksum mismatch");
  }
  if (bytes.size() != total) throw ParseError(Reason::kMalformed, "trailing bytes after envelope");
  auto payload = bytes.subspan(kHeaderSize, h.length);
  return {h.kind, h.round, h.sender, {payload.begin(), payload.end()}};
}

}  // namespace mqfl::transport
