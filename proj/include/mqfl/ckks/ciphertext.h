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

#ifndef MQFL_CKKS_CIPHERTEXT_H_
#define MQFL_CKKS_CIPHERTEXT_H_

#include <vector>

#include "mqfl/ring/rns_poly.h"

namespace mqfl::ckks {

// Encoded message: one polynomial in the evaluation domain over the data
// primes active at `level`.
struct Plaintext {
  ring::RnsPoly poly;
  double scale = 0.0;
  int level = 0;
};

// Two parts (c0, c1) after encryption or relinearization, three right after
// a ciphertext-ciphertext product. All parts are in the evaluation domain.
struct Ciphertext {
  std::vector<ring::RnsPoly> parts;
  double scale = 0.0;
  int level = 0;
  // Rough bits of headroom left before decryption stops being meaningful.
  // Informational only.
  double noise_budget_bits = 0.0;

  size_t size() const { return parts.size(); }
};

}  // namespace mqfl::ckks

#endif  // MQFL_CKKS_CIPHERTEXT_H_
