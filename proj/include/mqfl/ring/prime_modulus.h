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

#ifndef MQFL_RING_PRIME_MODULUS_H_
#define MQFL_RING_PRIME_MODULUS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace mqfl::ring {

// An NTT-friendly prime q = 1 (mod 2n) together with the twiddle tables for
// the negacyclic transform over Z_q[X]/(X^n + 1).
//
// The forward transform takes coefficients in natural order and produces
// evaluations at the odd powers of psi in bit-reversed order; the inverse
// undoes it, including the n^{-1} scaling. Pointwise products of two
// transformed vectors correspond to negacyclic convolution.
class PrimeModulus {
 public:
  // Validates q (prime, q = 1 mod 2n, q < 2^62) and n (power of two >= 2).
  // Throws ParameterError otherwise.
  static std::shared_ptr<const PrimeModulus> Create(uint64_t q, size_t n);

  // Largest prime q in [2^(bits-1), 2^bits) with q = 1 (mod 2n) that is not
  // listed in `exclude`. Throws ParameterError when none exists.
  static uint64_t FindPrimeBelow(int bits, size_t n,
                                 std::span<const uint64_t> exclude = {});

  // Smallest prime q = 1 (mod 2n). Used for small-degree test rings.
  static uint64_t SmallestPrime(size_t n);

  uint64_t value() const { return q_; }
  size_t degree() const { return n_; }
  int log_degree() const { return log_n_; }
  // Primitive 2n-th root of unity.
  uint64_t psi() const { return psi_; }
  int bit_length() const;

  void ForwardNtt(std::span<uint64_t> a) const;
  void InverseNtt(std::span<uint64_t> a) const;

 private:
  PrimeModulus(uint64_t q, size_t n);

  uint64_t q_;
  size_t n_;
  int log_n_;
  uint64_t psi_;
  // psi^{bitrev(i)} and psi^{-bitrev(i)} with their Shoup companions.
  std::vector<uint64_t> psi_rev_;
  std::vector<uint64_t> psi_rev_shoup_;
  std::vector<uint64_t> psi_inv_rev_;
  std::vector<uint64_t> psi_inv_rev_shoup_;
  uint64_t n_inv_;
  uint64_t n_inv_shoup_;
};

using ModulusPtr = std::shared_ptr<const PrimeModulus>;

}  // namespace mqfl::ring

#endif  // MQFL_RING_PRIME_MODULUS_H_
