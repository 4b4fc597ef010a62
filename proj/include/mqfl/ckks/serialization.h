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

#ifndef MQFL_CKKS_SERIALIZATION_H_
#define MQFL_CKKS_SERIALIZATION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mqfl/ckks/ciphertext.h"
#include "mqfl/ckks/context.h"
#include "mqfl/ckks/keys.h"

namespace mqfl::ckks {

// Wire layout (little endian):
//   "CKT1" | version u16 | level u8 | parts u8 | round(log2 scale) i16 |
//   flags u8 | reserved u8 | context fingerprint u64 | scale f64 |
//   body length u32 | body | CRC32 of everything before it.
// The body is parts x (level + 1) x n residues as u64, deflated when
// flags bit 0 is set.
inline constexpr uint16_t kCiphertextVersion = 1;
inline constexpr uint8_t kFlagDeflate = 0x01;

std::vector<uint8_t> SerializeCiphertext(const Context& context,
                                         const Ciphertext& ct,
                                         bool compress = false);

// Throws ParseError on any malformed input: wrong magic or version,
// truncation, CRC mismatch, a fingerprint from another context, an invalid
// level or part count, or residues out of range.
Ciphertext DeserializeCiphertext(const Context& context,
                                 std::span<const uint8_t> bytes);

// Galois keys: "GKY1" | version u16 | fingerprint u64 | key count u32 |
// per key: galois element u64 then (b_j, a_j) residues for every data
// prime j over the full key chain | CRC32.
std::vector<uint8_t> SerializeGaloisKeys(const Context& context,
                                         const GaloisKeys& keys);
GaloisKeys DeserializeGaloisKeys(const Context& context,
                                 std::span<const uint8_t> bytes);

// Secret key: "SKY1" | version u16 | fingerprint u64 | residues over the
// key chain | CRC32. Public key: "PKY1", same header, then b and a over the
// data primes.
std::vector<uint8_t> SerializeSecretKey(const Context& context, const SecretKey& key);
SecretKey DeserializeSecretKey(const Context& context, std::span<const uint8_t> bytes);
std::vector<uint8_t> SerializePublicKey(const Context& context, const PublicKey& key);
PublicKey DeserializePublicKey(const Context& context, std::span<const uint8_t> bytes);

}  // namespace mqfl::ckks

#endif  // MQFL_CKKS_SERIALIZATION_H_
