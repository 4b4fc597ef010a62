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

#include "mqfl/nn/loss.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mqfl/errors.h"

namespace mqfl::nn {

std::vector<double> Softmax(std::span<const double> z) {
  if (z.empty()) throw ContractViolation("softmax of an empty vector");
  double m = -std::numeric_limits<double>::infinity();
  for (double v : z) {
    if (!std::isfinite(v)) throw ContractViolation("softmax input is not finite");
    m = std::max(m, v);
  }
  std::vector<double> p(z.size());
  double s = 0;
  for (size_t i = 0; i < z.size(); ++i) s += (p[i] = std::exp(z[i] - m));
  for (auto& v : p) v /= s;
  return p;
}

std::vector<double> SoftmaxBackward(std::span<const double> p,
                                    std::span<const double> gp) {
  if (p.size() != gp.size()) throw ContractViolation("softmax grad size mismatch");
  double dot = 0;
  for (size_t i = 0; i < p.size(); ++i) dot += p[i] * gp[i];
  std::vector<double> gz(p.size());
  for (size_t i = 0; i < p.size(); ++i) gz[i] = p[i] * (gp[i] - dot);
  return gz;
}

double CrossEntropy(std::span<const double> p, int label) {
  if (label < 0 || static_cast<size_t>(label) >= p.size()) {
    throw ContractViolation("label " + std::to_string(label) + " out of range");
  }
  return -std::log(std::max(p[label], std::numeric_limits<double>::min()));
}

double SoftmaxCrossEntropy(std::span<const double> logits, int label,
                           std::vector<double>* grad) {
  auto p = Softmax(logits);
  const double loss = CrossEntropy(p, label);
  if (grad) {
    *grad = p;
    (*grad)[label] -= 1.0;
  }
  return loss;
}

size_t Argmax(std::span<const double> v) {
  return static_cast<size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace mqfl::nn
