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

#include "mqfl/util/bytes.h"

#include <zlib.h>

#include <algorithm>

namespace mqfl::util {

uint32_t Crc32(std::span<const uint8_t> data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large inputs in pieces.
  size_t off = 0;
  while (off < data.size()) {
    uInt chunk = static_cast<uInt>(std::min<size_t>(data.size() - off, 1u << 30));
    crc = crc32(crc, data.data() + off, chunk);
    off += chunk;
  }
  return static_cast<uint32_t>(crc);
}

std::vector<uint8_t> Deflate(std::span<const uint8_t> data) {
  uLongf out_len = compressBound(data.size());
  std::vector<uint8_t> out(out_len);
  int rc = compress2(out.data(), &out_len, data.data(), data.size(), Z_BEST_SPEED);
  if (rc != Z_OK) throw Error("deflate failed");
  out.resize(out_len);
  return out;
}

std::vector<uint8_t> Inflate(std::span<const uint8_t> data, size_t expected_size) {
  std::vector<uint8_t> out(expected_size);
  uLongf out_len = expected_size;
  int rc = uncompress(out.data(), &out_len, data.data(), data.size());
  if (rc != Z_OK || out_len != expected_size) {
    throw ParseError(ParseError::Reason::kMalformed, "compressed body is corrupt");
  }
  return out;
}

}  // namespace mqfl::util
