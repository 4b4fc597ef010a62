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

#ifndef MQFL_RING_RNS_POLY_H_
#define MQFL_RING_RNS_POLY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mqfl/ring/prime_modulus.h"

namespace mqfl::ring {

// Ordered list of primes q_0, ..., q_{L-1} sharing one ring degree.
using Chain = std::vector<ModulusPtr>;

// Builds a chain from explicit primes. Throws ParameterError on bad primes.
Chain MakeChain(std::span<const uint64_t> primes, size_t n);

// True when both chains have the same primes in the same order.
bool SameChain(const Chain& a, const Chain& b);

enum class Domain { kCoefficient, kEvaluation };

// Element of Z_Q[X]/(X^n + 1) with Q = prod(q_i), stored as one residue row
// of n entries per prime. Rows are contiguous in a single buffer.
class RnsPoly {
 public:
  RnsPoly() = default;

  static RnsPoly Zero(size_t n, Chain chain, Domain domain);
  // Coefficient-domain polynomial from small signed coefficients.
  static RnsPoly FromSigned(std::span<const int64_t> coeffs, Chain chain);

  size_t degree() const { return n_; }
  size_t num_primes() const { return chain_.size(); }
  const Chain& chain() const { return chain_; }
  const PrimeModulus& modulus(size_t i) const { return *chain_[i]; }
  Domain domain() const { return domain_; }

  std::span<const uint64_t> row(size_t i) const {
    return {data_.data() + i * n_, n_};
  }
  std::span<uint64_t> mutable_row(size_t i) {
    return {data_.data() + i * n_, n_};
  }
  std::span<const uint64_t> data() const { return data_; }

  // In-place domain conversion; the source domain must be the opposite one.
  void ToEvaluation();
  void ToCoefficient();

  // Drops trailing primes without rescaling (the value mod the remaining
  // primes is unchanged).
  RnsPoly KeepPrimes(size_t count) const;

  bool operator==(const RnsPoly& other) const;

 private:
  RnsPoly(size_t n, Chain chain, Domain domain);

  size_t n_ = 0;
  Chain chain_;
  Domain domain_ = Domain::kCoefficient;
  std::vector<uint64_t> data_;
};

// Throws ContractViolation unless degree, chain, and domain all match.
void CheckCompatible(const RnsPoly& a, const RnsPoly& b);

RnsPoly NttForward(RnsPoly p);
RnsPoly NttInverse(RnsPoly p);

RnsPoly Add(const RnsPoly& a, const RnsPoly& b);
RnsPoly Sub(const RnsPoly& a, const RnsPoly& b);
RnsPoly Negate(const RnsPoly& a);
void AddInPlace(RnsPoly& a, const RnsPoly& b);

// Negacyclic product. Inputs in the evaluation domain are multiplied
// pointwise; coefficient-domain inputs are transformed internally and the
// result is returned in the coefficient domain.
RnsPoly Mul(const RnsPoly& a, const RnsPoly& b);

// Multiplies every coefficient by a signed integer scalar.
RnsPoly MulScalar(const RnsPoly& a, int64_t scalar);

// Divides by the last prime with rounding and drops it: the result over
// q_0..q_{L-2} holds round(a / q_{L-1}). The domain is preserved.
// Throws LevelExhausted when only one prime remains.
RnsPoly RescaleDropPrime(const RnsPoly& a);

// Applies X -> X^galois_elt (galois_elt odd, in [1, 2n)). The domain is
// preserved.
RnsPoly ApplyAutomorphism(const RnsPoly& a, uint64_t galois_elt);

// CRT reconstruction of one coefficient from its residues, returned as the
// centered representative in (-Q/2, Q/2] rounded to long double. Uses
// Garner's mixed-radix form so no multi-word integers are needed.
class CrtComposer {
 public:
  static constexpr size_t kMaxPrimes = 16;

  explicit CrtComposer(const Chain& chain);

  long double ComposeCentered(std::span<const uint64_t> residues) const;
  size_t num_primes() const { return q_.size(); }

 private:
  // Mixed-radix digits of the value with the given residues.
  void Digits(std::span<const uint64_t> residues,
              std::span<uint64_t> digits) const;
  long double Evaluate(std::span<const uint64_t> digits) const;

  std::vector<uint64_t> q_;
  // inv_[i][j] = q_j^{-1} mod q_i for j < i.
  std::vector<std::vector<uint64_t>> inv_;
  // Digits of (Q - 1) / 2.
  std::vector<uint64_t> half_digits_;
};

}  // namespace mqfl::ring

#endif  // MQFL_RING_RNS_POLY_H_
