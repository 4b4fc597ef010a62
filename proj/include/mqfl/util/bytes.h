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

#ifndef MQFL_UTIL_BYTES_H_
#define MQFL_UTIL_BYTES_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "mqfl/errors.h"

namespace mqfl::util {

// zlib CRC-32 of `data`.
uint32_t Crc32(std::span<const uint8_t> data);

// zlib deflate / inflate. Inflate throws ParseError when the stream is bad
// or does not expand to exactly `expected_size` bytes.
std::vector<uint8_t> Deflate(std::span<const uint8_t> data);
std::vector<uint8_t> Inflate(std::span<const uint8_t> data, size_t expected_size);

// Appends little-endian integers and raw bytes.
class ByteWriter {
 public:
  template <typename T>
  void Put(T v) {
    static_assert(std::is_integral_v<T>);
    using U = std::make_unsigned_t<T>;
    U u = static_cast<U>(v);
    for (size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<uint8_t>(u >> (8 * i)));
  }
  void PutDouble(double d) { Put(std::bit_cast<uint64_t>(d)); }
  void PutBytes(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void PutString(const std::string& s) {
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  std::vector<uint8_t>& bytes() { return buf_; }
  size_t size() const { return buf_.size(); }

 private:
  std::vector<uint8_t> buf_;
};

// Bounds-checked little-endian reader; running past the end throws
// ParseError(kTruncated).
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  template <typename T>
  T Get() {
    static_assert(std::is_integral_v<T>);
    Need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<std::make_unsigned_t<T>>(data_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  double GetDouble() { return std::bit_cast<double>(Get<uint64_t>()); }
  std::span<const uint8_t> GetBytes(size_t count) {
    Need(count);
    auto out = data_.subspan(pos_, count);
    pos_ += count;
    return out;
  }

  size_t position() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  void Need(size_t count) const {
    if (count > data_.size() - pos_) {
      throw ParseError(ParseError::Reason::kTruncated, "input truncated");
    }
  }

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

}  // namespace mqfl::util

#endif  // MQFL_UTIL_BYTES_H_
