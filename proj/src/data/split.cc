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

#include "mqfl/data/split.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "mqfl/errors.h"

namespace mqfl::data {

std::vector<size_t> Apportion(size_t total, const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<size_t> out(weights.size(), 0);
  if (weights.empty() || !(sum > 0)) return out;
  std::vector<std::pair<double, size_t>> rem;
  size_t assigned = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    const double q = total * weights[i] / sum;
    out[i] = static_cast<size_t>(std::floor(q + 1e-9));
    assigned += out[i];
    rem.emplace_back(q - out[i], i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (size_t i = 0; assigned < total; ++i, ++assigned) ++out[rem[i % rem.size()].second];
  return out;
}

std::vector<std::vector<size_t>> StratifiedSplit(const std::vector<int>& labels,
                                                 const std::vector<double>& fractions,
                                                 uint64_t seed) {
  if (fractions.empty()) throw ConfigError("no split fractions given", "fractions");
  double sum = 0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw ConfigError("split fractions must be non-negative", "fractions");
    sum += f;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw ConfigError("split fractions sum to " + std::to_string(sum) + ", not 1", "fractions");
  }
  const size_t s = fractions.size();
  std::map<int, std::vector<size_t>> by_class;
  for (size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  // Floors of each class's share, then hand the leftovers to the splits
  // furthest below their overall targets.
  const auto target = Apportion(labels.size(), fractions);
  std::vector<size_t> filled(s, 0);
  std::vector<std::vector<size_t>> cell;
  std::vector<std::vector<double>> frac;
  for (const auto& [c, idx] : by_class) {
    std::vector<size_t> row(s);
    std::vector<double> fr(s);
    for (size_t j = 0; j < s; ++j) {
      const double q = idx.size() * fractions[j];
      row[j] = static_cast<size_t>(std::floor(q + 1e-9));
      fr[j] = q - row[j];
      filled[j] += row[j];
    }
    cell.push_back(row);
    frac.push_back(fr);
  }
  size_t r = 0;
  for (const auto& [c, idx] : by_class) {
    size_t left = idx.size() - std::accumulate(cell[r].begin(), cell[r].end(), size_t{0});
    while (left > 0) {
      size_t best = s;
      double best_key = -1e300;
      for (size_t j = 0; j < s; ++j) {
        if (frac[r][j] <= 1e-12) continue;  // already at the ceiling
        const double key = static_cast<double>(target[j]) - static_cast<double>(filled[j]) + frac[r][j] * 1e-6;
        if (key > best_key) {
          best_key = key;
          best = j;
        }
      }
      if (best == s) break;
      ++cell[r][best];
      ++filled[best];
      frac[r][best] = 0.0;
      --left;
    }
    ++r;
  }

  std::vector<std::vector<size_t>> out(s);
  std::mt19937_64 prng(seed);
  r = 0;
  for (auto& [c, idx] : by_class) {
    std::vector<size_t> order = idx;
    std::shuffle(order.begin(), order.end(), prng);
    size_t at = 0;
    for (size_t j = 0; j < s; ++j) {
      out[j].insert(out[j].end(), order.begin() + at, order.begin() + at + cell[r][j]);
      at += cell[r][j];
    }
    ++r;
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

}  // namespace mqfl::data
