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

#include "mqfl/fl/partition.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "mqfl/data/split.h"
#include "mqfl/errors.h"

namespace mqfl::fl {

PartitionScheme ParsePartitionScheme(const std::string& name) {
  if (name == "iid") return PartitionScheme::kIid;
  if (name == "label-skew") return PartitionScheme::kLabelSkew;
  throw ConfigError("unknown partition scheme '" + name + "'", "fl.partition");
}

std::vector<std::vector<size_t>> PartitionDataset(const std::vector<int>& labels, size_t clients,
                                                  const PartitionConfig& config, uint64_t seed) {
  if (clients == 0) throw InputError("need at least one client");
  if (clients > labels.size()) {
    throw InputError(std::to_string(clients) + " clients for " + std::to_string(labels.size()) +
                     " samples");
  }
  std::mt19937_64 prng(seed);
  std::vector<std::vector<size_t>> parts(clients);
  if (config.scheme == PartitionScheme::kIid) {
    std::vector<size_t> order(labels.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::shuffle(order.begin(), order.end(), prng);
    const auto sizes = data::Apportion(labels.size(), std::vector<double>(clients, 1.0));
    size_t at = 0;
    for (size_t c = 0; c < clients; ++c) {
      parts[c].assign(order.begin() + at, order.begin() + at + sizes[c]);
      at += sizes[c];
    }
  } else {
    if (!(config.alpha > 0)) throw ConfigError("Dirichlet alpha must be positive", "fl.alpha");
    std::map<int, std::vector<size_t>> by_class;
    for (size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    std::gamma_distribution<double> gamma(config.alpha, 1.0);
    for (auto& [label, idx] : by_class) {
      std::shuffle(idx.begin(), idx.end(), prng);
      std::vector<double> p(clients);
      for (auto& v : p) v = gamma(prng);
      if (std::accumulate(p.begin(), p.end(), 0.0) <= 0) p.assign(clients, 1.0);
      const auto sizes = data::Apportion(idx.size(), p);
      size_t at = 0;
      for (size_t c = 0; c < clients; ++c) {
        parts[c].insert(parts[c].end(), idx.begin() + at, idx.begin() + at + sizes[c]);
        at += sizes[c];
      }
    }
    for (auto& part : parts) {
      if (!part.empty()) continue;
      auto largest = std::max_element(parts.begin(), parts.end(),
                                      [](const auto& a, const auto& b) { return a.size() < b.size(); });
      part.push_back(largest->back());
      largest->pop_back();
    }
  }
  for (auto& part : parts) std::sort(part.begin(), part.end());
  return parts;
}

double MeanClientImbalance(const std::vector<int>& labels,
                           const std::vector<std::vector<size_t>>& parts, size_t classes) {
  if (parts.empty()) throw InputError("no partitions");
  double sum = 0;
  for (const auto& part : parts) {
    std::vector<size_t> counts(classes, 0);
    for (size_t i : part) ++counts.at(labels.at(i));
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    sum += static_cast<double>(*hi) / static_cast<double>(std::max<size_t>(1, *lo));
  }
  return sum / parts.size();
}

std::vector<std::vector<double>> ChunkWeights(const std::vector<double>& flat, size_t slots) {
  if (slots == 0) throw ContractViolation("chunk size must be positive");
  const size_t count = (flat.size() + slots - 1) / slots;
  std::vector<std::vector<double>> chunks(count, std::vector<double>(slots, 0.0));
  for (size_t i = 0; i < flat.size(); ++i) chunks[i / slots][i % slots] = flat[i];
  return chunks;
}

std::vector<double> Unchunk(const std::vector<std::vector<double>>& chunks, size_t count) {
  std::vector<double> out;
  out.reserve(count);
  for (const auto& c : chunks) {
    for (double v : c) {
      if (out.size() == count) return out;
      out.push_back(v);
    }
  }
  if (out.size() != count) throw ContractViolation("chunks hold fewer values than requested");
  return out;
}

}  // namespace mqfl::fl
