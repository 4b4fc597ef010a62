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

#include "mqfl/ring/sampling.h"

#include <cmath>

#include "mqfl/errors.h"

namespace mqfl::ring {

RnsPoly SampleUniform(const Chain& chain, size_t n, Prng& prng, Domain domain) {
  RnsPoly p = RnsPoly::Zero(n, chain, domain);
  for (size_t i = 0; i < p.num_primes(); ++i) {
    std::uniform_int_distribution<uint64_t> dist(0, p.modulus(i).value() - 1);
    for (auto& x : p.mutable_row(i)) x = dist(prng);
  }
  return p;
}

std::vector<int64_t> SampleTernaryCoeffs(size_t n, Prng& prng) {
  std::uniform_int_distribution<int> dist(-1, 1);
  std::vector<int64_t> coeffs(n);
  for (auto& c : coeffs) c = dist(prng);
  return coeffs;
}

RnsPoly SampleTernary(const Chain& chain, size_t n, Prng& prng) {
  return RnsPoly::FromSigned(SampleTernaryCoeffs(n, prng), chain);
}

std::vector<int64_t> SampleGaussianCoeffs(size_t n, double sigma, Prng& prng) {
  if (!(sigma > 0.0)) throw ContractViolation("gaussian sigma must be positive");
  std::normal_distribution<double> dist(0.0, sigma);
  std::vector<int64_t> coeffs(n);
  for (auto& c : coeffs) c = static_cast<int64_t>(std::llround(dist(prng)));
  return coeffs;
}

RnsPoly SampleGaussian(const Chain& chain, size_t n, double sigma, Prng& prng) {
  return RnsPoly::FromSigned(SampleGaussianCoeffs(n, sigma, prng), chain);
}

}  // namespace mqfl::ring
