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

#ifndef MQFL_DATA_SYNTHETIC_H_
#define MQFL_DATA_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mqfl/data/text.h"
#include "mqfl/nn/model.h"

namespace mqfl::data {

struct ModalitySpec {
  size_t classes = 4;
  // Largest over smallest class count; 1 = balanced.
  double imbalance_factor = 1.0;
};

struct SyntheticSpec {
  size_t samples = 800;
  ModalitySpec sequence;
  ModalitySpec image;
  size_t sequence_length = 32;
  size_t motif_length = 10;
  size_t k = 3;
  size_t image_side = 16;
  // Per-base substitution probability inside the planted motif.
  double motif_noise = 0.0;
  // Std-dev of additive pixel noise.
  double pixel_noise = 0.3;
  uint64_t seed = 0;

  void Validate() const;
  uint64_t Hash() const;
};

struct LabeledSequence {
  std::string text;
  int label = 0;
};

struct LabeledImage {
  nn::Tensor pixels;  // [1, side, side]
  int label = 0;
};

struct MultimodalSample {
  std::string sequence;
  nn::Tensor image;
  int sequence_label = 0;
  int image_label = 0;
};

// Per-class counts summing to `total` with counts decaying geometrically
// from the first class to the last at the requested imbalance factor.
std::vector<size_t> ClassCounts(size_t total, const ModalitySpec& m);
double ImbalanceFactor(const std::vector<int>& labels, size_t classes);

// Class motif table, one distinct motif per class.
std::vector<std::string> Motifs(const SyntheticSpec& spec);

std::vector<LabeledSequence> GenerateSequences(const SyntheticSpec& spec);
std::vector<LabeledImage> GenerateImages(const SyntheticSpec& spec);
// Pairs the i-th sequence with a seed-shuffled image; labels stay independent.
std::vector<MultimodalSample> PairModalities(const std::vector<LabeledSequence>& seqs,
                                             const std::vector<LabeledImage>& imgs,
                                             uint64_t seed);
std::vector<MultimodalSample> GenerateDataset(const SyntheticSpec& spec);

// inputs = {tf-idf vector, image}, labels = {sequence, image}.
std::vector<nn::Example> ToExamples(const std::vector<MultimodalSample>& samples,
                                    const TfidfVocab& vocab);

// Binary cache: "MQD1" | u64 spec hash | u32 count | records | CRC32.
void SaveDataset(const std::string& path, const std::vector<MultimodalSample>& samples,
                 uint64_t spec_hash);
std::vector<MultimodalSample> LoadDataset(const std::string& path, uint64_t* spec_hash = nullptr);

// CSV with a `label` column plus numeric feature columns; one single-input
// example per row.
std::vector<nn::Example> LoadFeatureCsv(const std::string& path);

}  // namespace mqfl::data

#endif  // MQFL_DATA_SYNTHETIC_H_
