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

#ifndef MQFL_CKKS_EVALUATOR_H_
#define MQFL_CKKS_EVALUATOR_H_

#include "mqfl/ckks/ciphertext.h"
#include "mqfl/ckks/context.h"
#include "mqfl/ckks/keys.h"
#include "mqfl/ring/sampling.h"

namespace mqfl::ckks {

// Relative tolerance when two scales must agree.
inline constexpr double kScaleTolerance = 1e-9;
// How far a scale may sit from the context scale and still count as "at
// base scale" (rescaling by a prime near the scale leaves a small drift).
inline constexpr double kBaseScaleTolerance = 1.0 / 256;

// Randomness drawn by one encryption, exposed so tests can subtract the
// exact error.
struct EncryptionTrace {
  ring::RnsPoly u;
  ring::RnsPoly e0;
  ring::RnsPoly e1;
};

// Stateless homomorphic operations. Ciphertexts combined by one call must
// share level and (within kScaleTolerance) scale; mismatches throw
// ContractViolation. Products need operands at base scale, and a rescale
// must land back on base scale, so ciphertexts only ever carry the base
// scale or a single product of it.
class Evaluator {
 public:
  explicit Evaluator(ContextPtr context);

  Ciphertext Encrypt(const PublicKey& pk, const Plaintext& pt,
                     ring::Prng& prng, EncryptionTrace* trace = nullptr) const;
  Plaintext Decrypt(const SecretKey& sk, const Ciphertext& ct) const;

  Ciphertext Add(const Ciphertext& a, const Ciphertext& b) const;
  void AddInPlace(Ciphertext& a, const Ciphertext& b) const;
  Ciphertext Sub(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext Negate(const Ciphertext& a) const;
  Ciphertext AddPlain(const Ciphertext& a, const Plaintext& p) const;
  // Result scale is a.scale * p.scale. Throws LevelExhausted when that
  // product no longer fits under the level modulus.
  Ciphertext MulPlain(const Ciphertext& a, const Plaintext& p) const;
  // Three-part product; relinearize afterwards.
  Ciphertext Multiply(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext Relinearize(const Ciphertext& a, const RelinKey& rk) const;
  // Divides by the top data prime and drops it. Throws LevelExhausted at
  // level 0.
  Ciphertext Rescale(const Ciphertext& a) const;
  // Drops primes down to `level` without changing the scale.
  Ciphertext ModSwitchTo(const Ciphertext& a, int level) const;
  // Rotates slots left by `step`; needs the matching Galois key.
  Ciphertext Rotate(const Ciphertext& a, int step, const GaloisKeys& gk) const;

  const ContextPtr& context() const { return context_; }

 private:
  void CheckCiphertext(const Ciphertext& ct) const;
  void CheckPair(const Ciphertext& a, const Ciphertext& b) const;
  void CheckBaseScale(const Ciphertext& a) const;
  double NoiseBits(const Ciphertext& ct) const;
  void SetNoiseBits(Ciphertext& ct, double bits) const;
  // Returns (d0, d1) with d0 + d1*s ~= d*s' at d's level.
  std::pair<ring::RnsPoly, ring::RnsPoly> KeySwitch(const ring::RnsPoly& d,
                                                    const KeySwitchKey& key) const;

  ContextPtr context_;
};

}  // namespace mqfl::ckks

#endif  // MQFL_CKKS_EVALUATOR_H_
