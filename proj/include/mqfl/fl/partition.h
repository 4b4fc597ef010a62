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

#ifndef MQFL_FL_PARTITION_H_
#define MQFL_FL_PARTITION_H_

#include <cstdint>
#include <string>
#include <vector>

namespace mqfl::fl {

enum class PartitionScheme { kIid, kLabelSkew };
PartitionScheme ParsePartitionScheme(const std::string& name);

struct PartitionConfig {
  PartitionScheme scheme = PartitionScheme::kIid;
  double alpha = 0.5;  // Dirichlet concentration for label skew
};

// Disjoint cover of 0..labels.size()-1 by `clients` non-empty, sorted index
// lists. iid: shuffled, near-equal sizes. Label skew: each class is spread
// by Dirichlet(alpha) proportions; a client left empty takes one sample
// from the largest client. Throws InputError when clients > samples or
// clients == 0.
std::vector<std::vector<size_t>> PartitionDataset(const std::vector<int>& labels, size_t clients,
                                                  const PartitionConfig& config, uint64_t seed);

// Mean over clients of max class count / max(1, min class count), with
// counts taken over all `classes`.
double MeanClientImbalance(const std::vector<int>& labels,
                           const std::vector<std::vector<size_t>>& parts, size_t classes);

// Splits into ceil(size / slots) chunks of exactly `slots` values, the last
// zero-padded. Throws ContractViolation when slots == 0.
std::vector<std::vector<double>> ChunkWeights(const std::vector<double>& flat, size_t slots);
// First `count` values of the concatenated chunks.
std::vector<double> Unchunk(const std::vector<std::vector<double>>& chunks, size_t count);

}  // namespace mqfl::fl

#endif  // MQFL_FL_PARTITION_H_
