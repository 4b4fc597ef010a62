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

#ifndef MQFL_RING_MODULAR_H_
#define MQFL_RING_MODULAR_H_

#include <cstdint>

namespace mqfl::ring {

using u128 = unsigned __int128;

// Word-sized modular arithmetic. All inputs are assumed reduced mod q and
// q < 2^62 so that a + b never overflows.

inline uint64_t AddMod(uint64_t a, uint64_t b, uint64_t q) {
  uint64_t r = a + b;
  return r >= q ? r - q : r;
}

inline uint64_t SubMod(uint64_t a, uint64_t b, uint64_t q) {
  return a >= b ? a - b : a + q - b;
}

inline uint64_t NegateMod(uint64_t a, uint64_t q) { return a == 0 ? 0 : q - a; }

inline uint64_t MulMod(uint64_t a, uint64_t b, uint64_t q) {
  return static_cast<uint64_t>(static_cast<u128>(a) * b % q);
}

// floor(w * 2^64 / q), the companion constant for MulShoup.
inline uint64_t ShoupPrecompute(uint64_t w, uint64_t q) {
  return static_cast<uint64_t>((static_cast<u128>(w) << 64) / q);
}

// a * w mod q using the precomputed w_shoup; result in [0, q).
inline uint64_t MulShoup(uint64_t a, uint64_t w, uint64_t w_shoup,
                         uint64_t q) {
  uint64_t hi = static_cast<uint64_t>((static_cast<u128>(a) * w_shoup) >> 64);
  uint64_t r = a * w - hi * q;
  return r >= q ? r - q : r;
}

uint64_t PowMod(uint64_t base, uint64_t exp, uint64_t q);

// Inverse of a modulo prime q (a != 0).
uint64_t InvMod(uint64_t a, uint64_t q);

// Deterministic Miller-Rabin for all 64-bit inputs.
bool IsPrime(uint64_t n);

// Reduces a signed integer into [0, q).
inline uint64_t ReduceSigned(int64_t v, uint64_t q) {
  if (v >= 0) return static_cast<uint64_t>(v) % q;
  uint64_t m = static_cast<uint64_t>(-(v + 1)) % q;  // avoids INT64_MIN UB
  return q - 1 - m;
}

// Maps x in [0, q) to the centered representative in (-q/2, q/2].
inline int64_t Centered(uint64_t x, uint64_t q) {
  return x > q / 2 ? -static_cast<int64_t>(q - x) : static_cast<int64_t>(x);
}

}  // namespace mqfl::ring

#endif  // MQFL_RING_MODULAR_H_
