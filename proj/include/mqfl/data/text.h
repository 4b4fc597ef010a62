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

#ifndef MQFL_DATA_TEXT_H_
#define MQFL_DATA_TEXT_H_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace mqfl::data {

// Sliding window of width k, stride 1. Throws InputError when the sequence
// is shorter than k or k == 0.
std::vector<std::string> Kmerize(const std::string& seq, size_t k);

// k-mer vocabulary with document frequencies. Tokens are indexed in
// lexicographic order.
struct TfidfVocab {
  size_t k = 3;
  std::map<std::string, size_t> index;
  std::vector<size_t> doc_freq;  // by index
  size_t num_docs = 0;

  size_t size() const { return index.size(); }
  // ln((1 + N) / (1 + df)) + 1
  double Idf(size_t i) const;

  // Throws InputError on an empty corpus.
  static TfidfVocab Fit(const std::vector<std::string>& corpus, size_t k);
  // Raw term frequency times idf, L2-normalized. Unseen tokens are dropped;
  // a document with no known tokens maps to the zero vector.
  std::vector<double> Transform(const std::string& seq) const;
};

}  // namespace mqfl::data

#endif  // MQFL_DATA_TEXT_H_
