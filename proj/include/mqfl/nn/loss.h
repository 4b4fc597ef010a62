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

#ifndef MQFL_NN_LOSS_H_
#define MQFL_NN_LOSS_H_

#include <span>
#include <vector>

namespace mqfl::nn {

// Max-subtracted softmax. Throws ContractViolation on empty or non-finite
// input.
std::vector<double> Softmax(std::span<const double> logits);

// Jacobian-vector product: given p = softmax(z) and dL/dp, returns dL/dz.
std::vector<double> SoftmaxBackward(std::span<const double> probs,
                                    std::span<const double> grad_probs);

// -log p[label]. Throws ContractViolation for a label out of range.
double CrossEntropy(std::span<const double> probs, int label);

// Loss of softmax(logits) against `label`; writes dL/dlogits = p - onehot.
double SoftmaxCrossEntropy(std::span<const double> logits, int label,
                           std::vector<double>* grad);

size_t Argmax(std::span<const double> v);

}  // namespace mqfl::nn

#endif  // MQFL_NN_LOSS_H_
