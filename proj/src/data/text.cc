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

#include "mqfl/data/text.h"

#include <cmath>
#include <set>

#include "mqfl/errors.h"

namespace mqfl::data {

std::vector<std::string> Kmerize(const std::string& seq, size_t k) {
  if (k == 0) throw InputError("k must be at least 1");
  if (seq.size() < k) {
    throw InputError("sequence of length " + std::to_string(seq.size()) +
                     " is shorter than k = " + std::to_string(k));
  }
  std::vector<std::string> out;
  out.reserve(seq.size() - k + 1);
  for (size_t i = 0; i + k <= seq.size(); ++i) out.push_back(seq.substr(i, k));
  return out;
}

double TfidfVocab::Idf(size_t i) const {
  return std::log((1.0 + num_docs) / (1.0 + doc_freq.at(i))) + 1.0;
}

TfidfVocab TfidfVocab::Fit(const std::vector<std::string>& corpus, size_t k) {
  if (corpus.empty()) throw InputError("cannot fit TF-IDF on an empty corpus");
  TfidfVocab v;
  v.k = k;
  v.num_docs = corpus.size();
  std::map<std::string, size_t> df;
  for (const auto& doc : corpus) {
    auto toks = Kmerize(doc, k);
    for (const auto& t : std::set<std::string>(toks.begin(), toks.end())) ++df[t];
  }
  for (const auto& [tok, count] : df) {
    v.index.emplace(tok, v.doc_freq.size());
    v.doc_freq.push_back(count);
  }
  return v;
}

std::vector<double> TfidfVocab::Transform(const std::string& seq) const {
  std::vector<double> x(size(), 0.0);
  auto toks = Kmerize(seq, k);
  for (const auto& t : toks) {
    auto it = index.find(t);
    if (it != index.end()) x[it->second] += 1.0;
  }
  double norm = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = x[i] / static_cast<double>(toks.size()) * Idf(i);
    norm += x[i] * x[i];
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& v : x) v /= norm;
  }
  return x;
}

}  // namespace mqfl::data
