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

#ifndef MQFL_TRANSPORT_ENVELOPE_H_
#define MQFL_TRANSPORT_ENVELOPE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mqfl::transport {

enum class Kind : uint8_t {
  kJoin = 1,
  kGlobalModel = 2,
  kEncryptedUpdate = 3,
  kPlainUpdate = 4,
  kDecryptRequest = 5,
  kRoundReport = 6,
  kShutdown = 7,
};
std::string KindName(Kind kind);

struct Envelope {
  Kind kind = Kind::kJoin;
  uint32_t round = 0;
  uint32_t sender = 0;
  std::vector<uint8_t> payload;

  bool operator==(const Envelope&) const = default;
};

inline constexpr uint16_t kProtocolVersion = 1;
// version u16 | kind u8 | round u32 | sender u32 | length u32
inline constexpr size_t kHeaderSize = 15;
inline constexpr size_t kTrailerSize = 4;  // CRC32 over header and payload
inline constexpr size_t kMaxPayload = size_t{256} << 20;

// Little-endian frame. Throws ParseError(kTooLarge) over the payload cap.
std::vector<uint8_t> Frame(const Envelope& env);
// Exact inverse of Frame. Throws ParseError with kTruncated, kBadVersion,
// kUnknownKind, kTooLarge, kBadChecksum or kMalformed (trailing bytes).
Envelope Parse(std::span<const uint8_t> bytes);

// Header fields needed to read the rest of a frame from a stream.
struct Header {
  Kind kind;
  uint32_t round;
  uint32_t sender;
  uint32_t length;
};
Header ParseHeader(std::span<const uint8_t> header);

}  // namespace mqfl::transport

#endif  // MQFL_TRANSPORT_ENVELOPE_H_
