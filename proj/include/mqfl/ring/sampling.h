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

#ifndef MQFL_RING_SAMPLING_H_
#define MQFL_RING_SAMPLING_H_

#include <cstdint>
#include <random>
#include <vector>

#include "mqfl/ring/rns_poly.h"

namespace mqfl::ring {

// Every random draw in the library comes from an explicitly seeded engine.
using Prng = std::mt19937_64;

// Default RLWE error width.
inline constexpr double kDefaultSigma = 3.2;

// Uniform residues in [0, q_i) per row; the result is uniform mod Q and is
// tagged with `domain` (uniformity holds in either domain).
RnsPoly SampleUniform(const Chain& chain, size_t n, Prng& prng,
                      Domain domain = Domain::kCoefficient);

// Coefficients uniform over {-1, 0, 1}.
std::vector<int64_t> SampleTernaryCoeffs(size_t n, Prng& prng);
RnsPoly SampleTernary(const Chain& chain, size_t n, Prng& prng);

// Rounded continuous Gaussian with standard deviation sigma > 0.
std::vector<int64_t> SampleGaussianCoeffs(size_t n, double sigma, Prng& prng);
RnsPoly SampleGaussian(const Chain& chain, size_t n, double sigma, Prng& prng);

}  // namespace mqfl::ring

#endif  // MQFL_RING_SAMPLING_H_
