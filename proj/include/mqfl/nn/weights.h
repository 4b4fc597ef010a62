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

#ifndef MQFL_NN_WEIGHTS_H_
#define MQFL_NN_WEIGHTS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mqfl/nn/model.h"

namespace mqfl::nn {

struct ManifestEntry {
  std::string name;
  Shape shape;
  bool operator==(const ManifestEntry&) const = default;
};

// All parameters of a model in Params() order, concatenated.
struct FlatWeights {
  std::vector<double> values;
  std::vector<ManifestEntry> manifest;

  bool SameLayout(const FlatWeights& other) const { return manifest == other.manifest; }
  // FNV-1a over names and shapes; quick layout identity check.
  uint64_t LayoutHash() const;
};

FlatWeights FlattenWeights(Trainable& model);
// Throws ContractViolation when the manifest does not match the model.
void LoadWeights(Trainable& model, const FlatWeights& weights);

struct CheckpointInfo {
  uint64_t seed = 0;
  int round = 0;
};

// "MQW1" | header length u32 | JSON header (manifest, seed, round, count) |
// little-endian f64 values.
void SaveCheckpoint(const std::string& path, const FlatWeights& weights,
                    const CheckpointInfo& info);
// Throws ParseError for malformed files and InputError when unreadable.
FlatWeights LoadCheckpoint(const std::string& path, CheckpointInfo* info = nullptr);

}  // namespace mqfl::nn

#endif  // MQFL_NN_WEIGHTS_H_
