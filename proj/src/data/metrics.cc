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

#include "mqfl/data/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mqfl/errors.h"

namespace mqfl::data {

std::vector<RocPoint> RocCurve(const std::vector<double>& scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw ContractViolation("scores and labels differ in length");
  size_t pos = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw InputError("non-finite score");
    pos += positive[i];
  }
  const size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) throw UndefinedResult("ROC needs both positive and negative samples");

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  std::vector<RocPoint> curve = {{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  size_t tp = 0, fp = 0;
  for (size_t i = 0; i < order.size(); ++i) {
    if (positive[order[i]]) {
      ++tp;
    } else {
      ++fp;
    }
    if (i + 1 == order.size() || scores[order[i + 1]] != scores[order[i]]) {
      curve.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos, scores[order[i]]});
    }
  }
  return curve;
}

double Auc(const std::vector<RocPoint>& curve) {
  double a = 0.0;
  for (size_t i = 1; i < curve.size(); ++i) {
    a += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  }
  return a;
}

std::vector<RocPoint> MicroRocCurve(const std::vector<std::vector<double>>& probs,
                                    const std::vector<int>& labels) {
  if (probs.size() != labels.size()) throw ContractViolation("probs and labels differ in length");
  std::vector<double> s;
  std::vector<bool> p;
  for (size_t i = 0; i < probs.size(); ++i) {
    for (size_t c = 0; c < probs[i].size(); ++c) {
      s.push_back(probs[i][c]);
      p.push_back(static_cast<int>(c) == labels[i]);
    }
  }
  return RocCurve(s, p);
}

AveragedAuc MicroMacroAuc(const std::vector<std::vector<double>>& probs, const std::vector<int>& labels) {
  if (probs.empty()) throw UndefinedResult("AUC of an empty set");
  const size_t classes = probs[0].size();
  for (size_t i = 0; i < probs.size(); ++i) {
    if (probs[i].size() != classes) throw ContractViolation("ragged probability rows");
    if (labels[i] < 0 || static_cast<size_t>(labels[i]) >= classes) throw InputError("label out of range");
  }
  AveragedAuc out;
  out.micro = Auc(MicroRocCurve(probs, labels));
  double sum = 0;
  size_t defined = 0;
  for (size_t c = 0; c < classes; ++c) {
    std::vector<double> s(probs.size());
    std::vector<bool> p(probs.size());
    bool any_pos = false, any_neg = false;
    for (size_t i = 0; i < probs.size(); ++i) {
      s[i] = probs[i][c];
      p[i] = labels[i] == static_cast<int>(c);
      (p[i] ? any_pos : any_neg) = true;
    }
    if (!any_pos || !any_neg) {
      out.per_class.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    out.per_class.push_back(Auc(RocCurve(s, p)));
    sum += out.per_class.back();
    ++defined;
  }
  if (defined == 0) throw UndefinedResult("no class has both positives and negatives");
  out.macro = sum / defined;
  return out;
}

std::vector<std::vector<double>> ConfusionMatrix(const std::vector<int>& predictions,
                                                 const std::vector<int>& labels, size_t classes,
                                                 bool normalize) {
  if (predictions.size() != labels.size()) throw ContractViolation("predictions and labels differ in length");
  std::vector<std::vector<double>> m(classes, std::vector<double>(classes, 0.0));
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || predictions[i] < 0 || static_cast<size_t>(labels[i]) >= classes ||
        static_cast<size_t>(predictions[i]) >= classes) {
      throw InputError("class index out of range");
    }
    m[labels[i]][predictions[i]] += 1.0;
  }
  if (normalize) {
    for (auto& row : m) {
      const double n = std::accumulate(row.begin(), row.end(), 0.0);
      if (n > 0)
        for (auto& v : row) v /= n;
    }
  }
  return m;
}

}  // namespace mqfl::data
