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

#ifndef MQFL_CKKS_ENCODER_H_
#define MQFL_CKKS_ENCODER_H_

#include <complex>
#include <span>
#include <vector>

#include "mqfl/ckks/ciphertext.h"
#include "mqfl/ckks/context.h"

namespace mqfl::ckks {

// Canonical-embedding encoder. Slot j holds the value of the message
// polynomial at zeta^(5^j), zeta = e^{i pi / n}, for j < n/2.
class Encoder {
 public:
  explicit Encoder(ContextPtr context);

  // Encodes up to n/2 reals (missing slots are zero) at `scale` on `level`.
  // Throws CapacityError when more than n/2 values are given and
  // ContractViolation for non-finite inputs or a scaled value that does not
  // fit under the level modulus.
  Plaintext Encode(std::span<const double> values, double scale,
                   int level) const;
  Plaintext Encode(std::span<const double> values) const;

  // Returns all n/2 slot values (real parts).
  std::vector<double> Decode(const Plaintext& pt) const;
  std::vector<std::complex<double>> DecodeComplex(const Plaintext& pt) const;

  const ContextPtr& context() const { return context_; }

 private:
  void SpecialFft(std::vector<std::complex<double>>& v) const;
  void SpecialFftInverse(std::vector<std::complex<double>>& v) const;

  ContextPtr context_;
};

}  // namespace mqfl::ckks

#endif  // MQFL_CKKS_ENCODER_H_
