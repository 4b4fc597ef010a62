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

#ifndef MQFL_CKKS_KEYS_H_
#define MQFL_CKKS_KEYS_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "mqfl/ckks/context.h"
#include "mqfl/ring/rns_poly.h"
#include "mqfl/ring/sampling.h"

namespace mqfl::ckks {

// Ternary secret over the data primes and the special prime, evaluation
// domain.
struct SecretKey {
  ring::RnsPoly poly;
};

// (b, a) = (-a*s + e, a) over the data primes at the top level.
struct PublicKey {
  ring::RnsPoly b;
  ring::RnsPoly a;
};

// Hybrid key-switching key from a source secret s' to s. Entry j encrypts
// P * s' in row j only, over the data primes plus the special prime P.
struct KeySwitchKey {
  std::vector<ring::RnsPoly> b;
  std::vector<ring::RnsPoly> a;
};

struct RelinKey {
  KeySwitchKey key;
};

// Keyed by Galois element 5^step mod 2n.
struct GaloisKeys {
  std::map<uint64_t, KeySwitchKey> keys;
  bool Has(uint64_t galois_elt) const { return keys.count(galois_elt) != 0; }
};

struct KeySet {
  SecretKey secret;
  PublicKey public_key;
  RelinKey relin;
  GaloisKeys galois;
};

// Galois element that rotates slots left by `step` (negative: right).
uint64_t GaloisElementForStep(const Context& context, int step);

class KeyGenerator {
 public:
  KeyGenerator(ContextPtr context, uint64_t seed);

  const SecretKey& secret_key() const { return secret_; }
  PublicKey CreatePublicKey();
  RelinKey CreateRelinKey();
  GaloisKeys CreateGaloisKeys(std::span<const int> steps);

 private:
  KeySwitchKey CreateSwitchKey(const ring::RnsPoly& source);

  ContextPtr context_;
  ring::Prng prng_;
  SecretKey secret_;
};

// Secret, public, and relinearization keys plus Galois keys for `steps`,
// all derived deterministically from `seed`.
KeySet GenerateKeys(const ContextPtr& context, uint64_t seed,
                    std::span<const int> rotation_steps = {});

}  // namespace mqfl::ckks

#endif  // MQFL_CKKS_KEYS_H_
