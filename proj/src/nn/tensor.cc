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

#include "mqfl/nn/tensor.h"

#include <algorithm>
#include <cmath>

#include "mqfl/errors.h"

namespace mqfl::nn {

std::string ShapeString(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

size_t ShapeSize(const Shape& shape) {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  if (shape_.size() > 4) throw ContractViolation("tensors have at most 4 dims");
  data_.assign(ShapeSize(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (shape_.size() > 4) throw ContractViolation("tensors have at most 4 dims");
  if (data_.size() != ShapeSize(shape_)) {
    throw ContractViolation("value count does not match shape " + ShapeString(shape_));
  }
}

Tensor Tensor::Vector(std::vector<double> values) {
  const size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::Reshaped(Shape shape) const {
  return Tensor(std::move(shape), data_);
}

void Tensor::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void CheckShape(const Tensor& t, const Shape& expected, const char* what) {
  if (t.shape() != expected) {
    throw ContractViolation(std::string(what) + ": expected shape " +
                            ShapeString(expected) + ", got " + ShapeString(t.shape()));
  }
}

}  // namespace mqfl::nn
