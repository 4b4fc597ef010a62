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

#ifndef MQFL_DATA_SPLIT_H_
#define MQFL_DATA_SPLIT_H_

#include <cstdint>
#include <vector>

namespace mqfl::data {

// Stratified, seed-deterministic split of sample indices 0..labels.size()-1.
// Split sizes follow the fractions by largest remainder; every class's
// count in every split is the floor or ceiling of its proportional share.
// Each returned index list is sorted. Throws ConfigError when the fractions
// do not sum to 1 within 1e-9 or any is negative.
std::vector<std::vector<size_t>> StratifiedSplit(const std::vector<int>& labels,
                                                 const std::vector<double>& fractions,
                                                 uint64_t seed);

// Largest-remainder apportionment of `total` units by `weights`.
std::vector<size_t> Apportion(size_t total, const std::vector<double>& weights);

}  // namespace mqfl::data

#endif  // MQFL_DATA_SPLIT_H_
