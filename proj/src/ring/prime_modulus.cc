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

#include "mqfl/ring/prime_modulus.h"

#include <algorithm>
#include <bit>
#include <string>

#include "mqfl/errors.h"
#include "mqfl/ring/modular.h"

namespace mqfl::ring {

uint64_t PowMod(uint64_t base, uint64_t exp, uint64_t q) {
  uint64_t result = 1 % q;
  base %= q;
  while (exp > 0) {
    if (exp & 1) result = MulMod(result, base, q);
    base = MulMod(base, base, q);
    exp >>= 1;
  }
  return result;
}

uint64_t InvMod(uint64_t a, uint64_t q) { return PowMod(a, q - 2, q); }

bool IsPrime(uint64_t n) {
  if (n < 2) return false;
  static constexpr uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (uint64_t p : kBases) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (uint64_t a : kBases) {
    uint64_t x = PowMod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = MulMod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

bool IsPowerOfTwo(size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

uint32_t BitReverse(uint32_t x, int bits) {
  uint32_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

// Primitive 2n-th root of unity mod q: an element whose n-th power is -1.
uint64_t FindPsi(uint64_t q, size_t n) {
  const uint64_t two_n = 2 * static_cast<uint64_t>(n);
  for (uint64_t g = 2; g < q; ++g) {
    uint64_t c = PowMod(g, (q - 1) / two_n, q);
    if (PowMod(c, n, q) == q - 1) return c;
  }
  throw ParameterError("no primitive 2n-th root of unity found");
}

}  // namespace

std::shared_ptr<const PrimeModulus> PrimeModulus::Create(uint64_t q, size_t n) {
  if (!IsPowerOfTwo(n)) {
    throw ParameterError("ring degree must be a power of two >= 2, got " +
                         std::to_string(n));
  }
  if (q >= (uint64_t{1} << 62)) {
    throw ParameterError("modulus must be below 2^62");
  }
  if (!IsPrime(q)) {
    throw ParameterError("modulus " + std::to_string(q) + " is not prime");
  }
  if ((q - 1) % (2 * n) != 0) {
    throw ParameterError("modulus " + std::to_string(q) +
                         " is not 1 mod 2n for n=" + std::to_string(n));
  }
  return std::shared_ptr<const PrimeModulus>(new PrimeModulus(q, n));
}

uint64_t PrimeModulus::FindPrimeBelow(int bits, size_t n,
                                      std::span<const uint64_t> exclude) {
  if (bits < 2 || bits > 62) {
    throw ParameterError("prime width must be in [2, 62], got " +
                         std::to_string(bits));
  }
  if (!IsPowerOfTwo(n)) {
    throw ParameterError("ring degree must be a power of two");
  }
  const uint64_t two_n = 2 * static_cast<uint64_t>(n);
  const uint64_t upper = (uint64_t{1} << bits) - 1;
  const uint64_t lower = uint64_t{1} << (bits - 1);
  if (upper < two_n + 1) {
    throw ParameterError("no " + std::to_string(bits) +
                         "-bit prime is 1 mod " + std::to_string(two_n));
  }
  for (uint64_t q = (upper - 1) / two_n * two_n + 1; q >= lower && q > two_n;
       q -= two_n) {
    if (std::find(exclude.begin(), exclude.end(), q) != exclude.end()) continue;
    if (IsPrime(q)) return q;
  }
  throw ParameterError("no " + std::to_string(bits) + "-bit prime is 1 mod " +
                       std::to_string(two_n));
}

uint64_t PrimeModulus::SmallestPrime(size_t n) {
  const uint64_t two_n = 2 * static_cast<uint64_t>(n);
  for (uint64_t q = two_n + 1;; q += two_n) {
    if (IsPrime(q)) return q;
  }
}

PrimeModulus::PrimeModulus(uint64_t q, size_t n)
    : q_(q), n_(n), log_n_(std::countr_zero(n)), psi_(FindPsi(q, n)) {
  psi_rev_.resize(n);
  psi_inv_rev_.resize(n);
  psi_rev_shoup_.resize(n);
  psi_inv_rev_shoup_.resize(n);
  const uint64_t psi_inv = InvMod(psi_, q);
  uint64_t power = 1;
  uint64_t inv_power = 1;
  for (size_t i = 0; i < n; ++i) {
    uint32_t r = BitReverse(static_cast<uint32_t>(i), log_n_);
    psi_rev_[r] = power;
    psi_inv_rev_[r] = inv_power;
    power = MulMod(power, psi_, q);
    inv_power = MulMod(inv_power, psi_inv, q);
  }
  for (size_t i = 0; i < n; ++i) {
    psi_rev_shoup_[i] = ShoupPrecompute(psi_rev_[i], q);
    psi_inv_rev_shoup_[i] = ShoupPrecompute(psi_inv_rev_[i], q);
  }
  n_inv_ = InvMod(static_cast<uint64_t>(n) % q, q);
  n_inv_shoup_ = ShoupPrecompute(n_inv_, q);
}

int PrimeModulus::bit_length() const { return std::bit_width(q_); }

void PrimeModulus::ForwardNtt(std::span<uint64_t> a) const {
  const uint64_t q = q_;
  size_t t = n_;
  for (size_t m = 1; m < n_; m <<= 1) {
    t >>= 1;
    for (size_t i = 0; i < m; ++i) {
      const size_t j1 = 2 * i * t;
      const uint64_t w = psi_rev_[m + i];
      const uint64_t ws = psi_rev_shoup_[m + i];
      for (size_t j = j1; j < j1 + t; ++j) {
        uint64_t u = a[j];
        uint64_t v = MulShoup(a[j + t], w, ws, q);
        a[j] = AddMod(u, v, q);
        a[j + t] = SubMod(u, v, q);
      }
    }
  }
}

void PrimeModulus::InverseNtt(std::span<uint64_t> a) const {
  const uint64_t q = q_;
  size_t t = 1;
  for (size_t m = n_; m > 1; m >>= 1) {
    const size_t h = m >> 1;
    size_t j1 = 0;
    for (size_t i = 0; i < h; ++i) {
      const uint64_t w = psi_inv_rev_[h + i];
      const uint64_t ws = psi_inv_rev_shoup_[h + i];
      for (size_t j = j1; j < j1 + t; ++j) {
        uint64_t u = a[j];
        uint64_t v = a[j + t];
        a[j] = AddMod(u, v, q);
        a[j + t] = MulShoup(SubMod(u, v, q), w, ws, q);
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
  for (auto& x : a) x = MulShoup(x, n_inv_, n_inv_shoup_, q);
}

}  // namespace mqfl::ring
