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

#include "mqfl/ckks/serialization.h"

#include <cmath>
#include <cstring>

#include "mqfl/errors.h"
#include "mqfl/util/bytes.h"

namespace mqfl::ckks {

namespace {

constexpr char kMagic[4] = {'C', 'K', 'T', '1'};
constexpr char kKeyMagic[4] = {'G', 'K', 'Y', '1'};
constexpr char kSecretMagic[4] = {'S', 'K', 'Y', '1'};
constexpr char kPublicMagic[4] = {'P', 'K', 'Y', '1'};
using Reason = ParseError::Reason;

// Splits off and verifies the trailing CRC32; returns the covered prefix.
std::span<const uint8_t> CheckedPrefix(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4) throw ParseError(Reason::kTruncated, "input truncated");
  auto prefix = bytes.first(bytes.size() - 4);
  util::ByteReader tail(bytes.last(4));
  if (util::Crc32(prefix) != tail.Get<uint32_t>()) {
    throw ParseError(Reason::kBadChecksum, "checksum mismatch");
  }
  return prefix;
}

void ReadRows(util::ByteReader& r, ring::RnsPoly& poly) {
  for (size_t i = 0; i < poly.num_primes(); ++i) {
    const uint64_t q = poly.modulus(i).value();
    for (auto& x : poly.mutable_row(i)) {
      x = r.Get<uint64_t>();
      if (x >= q) throw ParseError(Reason::kMalformed, "residue out of range");
    }
  }
}

void PutHeader(util::ByteWriter& w, const char* magic, const Context& context) {
  w.PutBytes({reinterpret_cast<const uint8_t*>(magic), 4});
  w.Put<uint16_t>(kCiphertextVersion);
  w.Put<uint64_t>(context.fingerprint());
}

void PutRows(util::ByteWriter& w, const ring::RnsPoly& poly) {
  for (uint64_t v : poly.data()) w.Put(v);
}

// Checks magic, CRC, version and fingerprint; leaves `r` at the body.
util::ByteReader OpenKeyFile(const Context& context, std::span<const uint8_t> bytes,
                             const char* magic) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), magic, 4) != 0) {
    throw ParseError(Reason::kBadMagic, "wrong key file magic");
  }
  util::ByteReader r(CheckedPrefix(bytes));
  r.GetBytes(4);
  if (r.Get<uint16_t>() != kCiphertextVersion) {
    throw ParseError(Reason::kBadVersion, "unsupported key format version");
  }
  if (r.Get<uint64_t>() != context.fingerprint()) {
    throw ParseError(Reason::kContextMismatch, "key was produced under different parameters");
  }
  return r;
}

}  // namespace

std::vector<uint8_t> SerializeSecretKey(const Context& context, const SecretKey& key) {
  if (key.poly.chain() != context.key_chain()) {
    throw ContractViolation("secret key does not match the context");
  }
  util::ByteWriter w;
  PutHeader(w, kSecretMagic, context);
  PutRows(w, key.poly);
  w.Put<uint32_t>(util::Crc32(w.bytes()));
  return std::move(w.bytes());
}

SecretKey DeserializeSecretKey(const Context& context, std::span<const uint8_t> bytes) {
  auto r = OpenKeyFile(context, bytes, kSecretMagic);
  SecretKey key{ring::RnsPoly::Zero(context.degree(), context.key_chain(), ring::Domain::kEvaluation)};
  ReadRows(r, key.poly);
  if (r.remaining() != 0) throw ParseError(Reason::kMalformed, "trailing bytes");
  return key;
}

std::vector<uint8_t> SerializePublicKey(const Context& context, const PublicKey& key) {
  const auto& chain = context.ChainAt(context.max_level());
  if (key.b.chain() != chain || key.a.chain() != chain) {
    throw ContractViolation("public key does not match the context");
  }
  util::ByteWriter w;
  PutHeader(w, kPublicMagic, context);
  PutRows(w, key.b);
  PutRows(w, key.a);
  w.Put<uint32_t>(util::Crc32(w.bytes()));
  return std::move(w.bytes());
}

PublicKey DeserializePublicKey(const Context& context, std::span<const uint8_t> bytes) {
  auto r = OpenKeyFile(context, bytes, kPublicMagic);
  const auto& chain = context.ChainAt(context.max_level());
  PublicKey key{ring::RnsPoly::Zero(context.degree(), chain, ring::Domain::kEvaluation),
                ring::RnsPoly::Zero(context.degree(), chain, ring::Domain::kEvaluation)};
  ReadRows(r, key.b);
  ReadRows(r, key.a);
  if (r.remaining() != 0) throw ParseError(Reason::kMalformed, "trailing bytes");
  return key;
}

std::vector<uint8_t> SerializeCiphertext(const Context& context,
                                         const Ciphertext& ct, bool compress) {
  if (ct.parts.size() < 2 || ct.parts.size() > 3) {
    throw ContractViolation("ciphertext must have two or three parts");
  }
  const ring::Chain& chain = context.ChainAt(ct.level);
  for (const auto& p : ct.parts) {
    if (!ring::SameChain(p.chain(), chain) || p.degree() != context.degree()) {
      throw ContractViolation("ciphertext does not belong to this context");
    }
  }

  util::ByteWriter body;
  for (const auto& p : ct.parts) {
    for (uint64_t v : p.data()) body.Put(v);
  }
  std::vector<uint8_t> stored =
      compress ? util::Deflate(body.bytes()) : std::move(body.bytes());

  util::ByteWriter w;
  w.PutBytes({reinterpret_cast<const uint8_t*>(kMagic), 4});
  w.Put<uint16_t>(kCiphertextVersion);
  w.Put<uint8_t>(static_cast<uint8_t>(ct.level));
  w.Put<uint8_t>(static_cast<uint8_t>(ct.parts.size()));
  w.Put<int16_t>(static_cast<int16_t>(std::lround(std::log2(ct.scale))));
  w.Put<uint8_t>(compress ? kFlagDeflate : 0);
  w.Put<uint8_t>(0);
  w.Put<uint64_t>(context.fingerprint());
  w.PutDouble(ct.scale);
  w.Put<uint32_t>(static_cast<uint32_t>(stored.size()));
  w.PutBytes(stored);
  w.Put<uint32_t>(util::Crc32(w.bytes()));
  return std::move(w.bytes());
}

Ciphertext DeserializeCiphertext(const Context& context,
                                 std::span<const uint8_t> bytes) {
  if (bytes.size() < 4) throw ParseError(Reason::kTruncated, "ciphertext truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ParseError(Reason::kBadMagic, "not a serialized ciphertext");
  }
  util::ByteReader r(bytes);
  r.GetBytes(4);
  const uint16_t version = r.Get<uint16_t>();
  if (version != kCiphertextVersion) {
    throw ParseError(Reason::kBadVersion,
                     "unsupported ciphertext version " + std::to_string(version));
  }
  const int level = r.Get<uint8_t>();
  const size_t part_count = r.Get<uint8_t>();
  const int16_t scale_exp = r.Get<int16_t>();
  const uint8_t flags = r.Get<uint8_t>();
  r.Get<uint8_t>();
  const uint64_t fingerprint = r.Get<uint64_t>();
  const double scale = r.GetDouble();
  const uint32_t body_len = r.Get<uint32_t>();
  auto stored = r.GetBytes(body_len);
  const size_t crc_at = r.position();
  const uint32_t crc = r.Get<uint32_t>();
  if (r.remaining() != 0) {
    throw ParseError(Reason::kMalformed, "trailing bytes after ciphertext");
  }
  if (util::Crc32(bytes.first(crc_at)) != crc) {
    throw ParseError(Reason::kBadChecksum, "ciphertext checksum mismatch");
  }
  if (fingerprint != context.fingerprint()) {
    throw ParseError(Reason::kContextMismatch,
                     "ciphertext was produced under different parameters");
  }
  if (level > context.max_level()) {
    throw ParseError(Reason::kMalformed, "ciphertext level out of range");
  }
  if (part_count < 2 || part_count > 3) {
    throw ParseError(Reason::kMalformed, "ciphertext part count out of range");
  }
  if ((flags & ~kFlagDeflate) != 0) {
    throw ParseError(Reason::kMalformed, "unknown ciphertext flags");
  }
  if (!(scale > 0.0) || !std::isfinite(scale) ||
      std::lround(std::log2(scale)) != scale_exp) {
    throw ParseError(Reason::kMalformed, "ciphertext scale is inconsistent");
  }

  const ring::Chain& chain = context.ChainAt(level);
  const size_t n = context.degree();
  const size_t expected = part_count * chain.size() * n * sizeof(uint64_t);
  std::vector<uint8_t> inflated;
  std::span<const uint8_t> body = stored;
  if (flags & kFlagDeflate) {
    inflated = util::Inflate(stored, expected);
    body = inflated;
  } else if (stored.size() != expected) {
    throw ParseError(Reason::kMalformed, "ciphertext body has the wrong length");
  }

  util::ByteReader br(body);
  Ciphertext ct;
  ct.level = level;
  ct.scale = scale;
  for (size_t p = 0; p < part_count; ++p) {
    ring::RnsPoly poly = ring::RnsPoly::Zero(n, chain, ring::Domain::kEvaluation);
    ReadRows(br, poly);
    ct.parts.push_back(std::move(poly));
  }
  // Headroom is not carried on the wire; assume a fresh ciphertext.
  ct.noise_budget_bits = context.LogModulus(level) - 1.0 - std::log2(scale) -
                         std::log2(6.0 * context.params().error_sigma *
                                   std::sqrt(static_cast<double>(n)));
  return ct;
}

std::vector<uint8_t> SerializeGaloisKeys(const Context& context,
                                         const GaloisKeys& keys) {
  const size_t data_primes = context.key_chain().size() - 1;
  util::ByteWriter w;
  w.PutBytes({reinterpret_cast<const uint8_t*>(kKeyMagic), 4});
  w.Put<uint16_t>(kCiphertextVersion);
  w.Put<uint64_t>(context.fingerprint());
  w.Put<uint32_t>(static_cast<uint32_t>(keys.keys.size()));
  for (const auto& [g, key] : keys.keys) {
    if (key.b.size() != data_primes || key.a.size() != data_primes) {
      throw ContractViolation("Galois key does not match the context");
    }
    w.Put<uint64_t>(g);
    for (size_t j = 0; j < data_primes; ++j) {
      for (uint64_t v : key.b[j].data()) w.Put(v);
      for (uint64_t v : key.a[j].data()) w.Put(v);
    }
  }
  w.Put<uint32_t>(util::Crc32(w.bytes()));
  return std::move(w.bytes());
}

GaloisKeys DeserializeGaloisKeys(const Context& context,
                                 std::span<const uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kKeyMagic, 4) != 0) {
    throw ParseError(Reason::kBadMagic, "not a serialized Galois key set");
  }
  util::ByteReader r(CheckedPrefix(bytes));
  r.GetBytes(4);
  if (r.Get<uint16_t>() != kCiphertextVersion) {
    throw ParseError(Reason::kBadVersion, "unsupported key format version");
  }
  if (r.Get<uint64_t>() != context.fingerprint()) {
    throw ParseError(Reason::kContextMismatch,
                     "keys were produced under different parameters");
  }
  const uint32_t count = r.Get<uint32_t>();
  const size_t data_primes = context.key_chain().size() - 1;
  const uint64_t two_n = 2 * static_cast<uint64_t>(context.degree());
  GaloisKeys out;
  for (uint32_t k = 0; k < count; ++k) {
    const uint64_t g = r.Get<uint64_t>();
    if (g % 2 == 0 || g >= two_n) {
      throw ParseError(Reason::kMalformed, "invalid Galois element");
    }
    KeySwitchKey key;
    for (size_t j = 0; j < data_primes; ++j) {
      auto b = ring::RnsPoly::Zero(context.degree(), context.key_chain(),
                                   ring::Domain::kEvaluation);
      auto a = b;
      ReadRows(r, b);
      ReadRows(r, a);
      key.b.push_back(std::move(b));
      key.a.push_back(std::move(a));
    }
    out.keys.emplace(g, std::move(key));
  }
  if (r.remaining() != 0) throw ParseError(Reason::kMalformed, "trailing bytes");
  return out;
}

}  // namespace mqfl::ckks
