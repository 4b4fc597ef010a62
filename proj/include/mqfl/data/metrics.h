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

#ifndef MQFL_DATA_METRICS_H_
#define MQFL_DATA_METRICS_H_

#include <vector>

namespace mqfl::data {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

// One point per distinct score, from (0,0) to (1,1). Tied scores move
// together. Throws UndefinedResult unless both classes are present.
std::vector<RocPoint> RocCurve(const std::vector<double>& scores, const std::vector<bool>& positive);
// Trapezoidal area under the curve.
double Auc(const std::vector<RocPoint>& curve);

struct AveragedAuc {
  double micro = 0.0;
  double macro = 0.0;
  std::vector<double> per_class;  // NaN for classes absent from `labels`
};
// probs[sample][class]. Micro pools every (sample, class) one-vs-rest pair;
// macro is the unweighted mean over classes whose AUC is defined.
AveragedAuc MicroMacroAuc(const std::vector<std::vector<double>>& probs, const std::vector<int>& labels);
// Pooled one-vs-rest curve used for the micro average.
std::vector<RocPoint> MicroRocCurve(const std::vector<std::vector<double>>& probs,
                                    const std::vector<int>& labels);

// Rows are true labels, columns predictions. With `normalize`, each row is
// divided by its count; rows of absent classes stay zero.
std::vector<std::vector<double>> ConfusionMatrix(const std::vector<int>& predictions,
                                                 const std::vector<int>& labels, size_t classes,
                                                 bool normalize);

}  // namespace mqfl::data

#endif  // MQFL_DATA_METRICS_H_
