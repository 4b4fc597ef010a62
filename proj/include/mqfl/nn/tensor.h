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

#ifndef MQFL_NN_TENSOR_H_
#define MQFL_NN_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mqfl::nn {

using Shape = std::vector<size_t>;

std::string ShapeString(const Shape& shape);
size_t ShapeSize(const Shape& shape);

// Row-major dense array of up to four dimensions.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  // Throws ContractViolation when values.size() != product(shape).
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Vector(std::vector<double> values);

  const Shape& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t dim(size_t i) const { return shape_[i]; }
  size_t size() const { return data_.size(); }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& vec() const { return data_; }

  // Same values, new shape with equal element count.
  Tensor Reshaped(Shape shape) const;
  void Fill(double v);
  bool AllFinite() const;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Throws ContractViolation with `what` unless shapes are equal.
void CheckShape(const Tensor& t, const Shape& expected, const char* what);

}  // namespace mqfl::nn

#endif  // MQFL_NN_TENSOR_H_
