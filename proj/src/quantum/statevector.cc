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

#include "mqfl/quantum/statevector.h"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "mqfl/errors.h"

namespace mqfl::quantum {

StateVector::StateVector(int qubits) : qubits_(qubits) {
  if (qubits < 1) throw ContractViolation("need at least one qubit");
  if (qubits > kMaxQubits) {
    throw CapacityError("at most " + std::to_string(kMaxQubits) + " qubits");
  }
  amp_.assign(size_t{1} << qubits, Amplitude(0.0, 0.0));
  amp_[0] = 1.0;
}

void StateVector::CheckWire(int wire) const {
  if (wire < 0 || wire >= qubits_) {
    throw ContractViolation("wire " + std::to_string(wire) + " out of range");
  }
}

void StateVector::ApplyRx(int wire, double theta) {
  CheckWire(wire);
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  const size_t mask = Mask(wire);
  for (size_t i = 0; i < amp_.size(); ++i) {
    if (i & mask) continue;
    const Amplitude a = amp_[i];
    const Amplitude b = amp_[i | mask];
    // [[c, -is], [-is, c]]
    amp_[i] = Amplitude(c * a.real() + s * b.imag(), c * a.imag() - s * b.real());
    amp_[i | mask] = Amplitude(s * a.imag() + c * b.real(), -s * a.real() + c * b.imag());
  }
}

void StateVector::ApplyCnot(int control, int target) {
  CheckWire(control);
  CheckWire(target);
  if (control == target) throw ContractViolation("CNOT control equals target");
  const size_t cm = Mask(control);
  const size_t tm = Mask(target);
  for (size_t i = 0; i < amp_.size(); ++i) {
    if ((i & cm) && !(i & tm)) std::swap(amp_[i], amp_[i | tm]);
  }
}

double StateVector::ExpvalZ(int wire) const {
  CheckWire(wire);
  const size_t mask = Mask(wire);
  double z = 0.0;
  for (size_t i = 0; i < amp_.size(); ++i) {
    const double p = std::norm(amp_[i]);
    z += (i & mask) ? -p : p;
  }
  return z;
}

double StateVector::Norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

StateVector AngleEncode(std::span<const double> x) {
  if (x.size() > static_cast<size_t>(kMaxQubits)) {
    throw CapacityError("cannot encode " + std::to_string(x.size()) +
                        " features; at most " + std::to_string(kMaxQubits));
  }
  StateVector state(static_cast<int>(x.size()));
  // Product state built directly: each wire holds (cos(x/2), i sin(x/2)).
  auto amp = state.mutable_amplitudes();
  const int d = static_cast<int>(x.size());
  std::vector<Amplitude> one(d), zero(d);
  for (int j = 0; j < d; ++j) {
    zero[j] = std::cos(x[j] / 2);
    one[j] = Amplitude(0.0, std::sin(x[j] / 2));
  }
  for (size_t i = 0; i < amp.size(); ++i) {
    Amplitude a = 1.0;
    for (int j = 0; j < d; ++j) a *= (i >> (d - 1 - j)) & 1 ? one[j] : zero[j];
    amp[i] = a;
  }
  return state;
}

void PqcConfig::Validate() const {
  if (qubits < 1 || layers < 0 ||
      angles.size() != static_cast<size_t>(layers) * static_cast<size_t>(qubits)) {
    throw ContractViolation("circuit angles must be layers x qubits");
  }
}

void RunPqc(StateVector& state, const PqcConfig& config) {
  config.Validate();
  if (config.qubits != state.qubits()) {
    throw ContractViolation("circuit and state qubit counts differ");
  }
  for (int l = 0; l < config.layers; ++l) {
    for (int i = 0; i < config.qubits; ++i) state.ApplyRx(i, config.angle(l, i));
    for (int i = 0; i + 1 < config.qubits; ++i) state.ApplyCnot(i, i + 1);
  }
}

std::vector<double> QuantumLayerForward(std::span<const double> x,
                                        const PqcConfig& config) {
  if (x.size() != static_cast<size_t>(config.qubits)) {
    throw ContractViolation("input size differs from qubit count");
  }
  StateVector state = AngleEncode(x);
  RunPqc(state, config);
  std::vector<double> z(config.qubits);
  for (int j = 0; j < config.qubits; ++j) z[j] = state.ExpvalZ(j);
  return z;
}

namespace {

double Contract(const std::vector<double>& z, std::span<const double> upstream) {
  double s = 0.0;
  for (size_t j = 0; j < z.size(); ++j) s += upstream[j] * z[j];
  return s;
}

}  // namespace

QuantumGradient ParamShiftGrad(std::span<const double> x, const PqcConfig& config,
                               std::span<const double> upstream) {
  config.Validate();
  const size_t d = static_cast<size_t>(config.qubits);
  if (x.size() != d || upstream.size() != d) {
    throw ContractViolation("input or upstream size differs from qubit count");
  }
  constexpr double kShift = std::numbers::pi / 2;
  QuantumGradient g;
  g.angles.assign(config.angles.size(), 0.0);
  g.inputs.assign(d, 0.0);
  bool any = false;
  for (double u : upstream) any |= (u != 0.0);
  if (!any) return g;

  PqcConfig shifted = config;
  for (size_t k = 0; k < config.angles.size(); ++k) {
    shifted.angles[k] = config.angles[k] + kShift;
    const double plus = Contract(QuantumLayerForward(x, shifted), upstream);
    shifted.angles[k] = config.angles[k] - kShift;
    const double minus = Contract(QuantumLayerForward(x, shifted), upstream);
    shifted.angles[k] = config.angles[k];
    g.angles[k] = 0.5 * (plus - minus);
  }
  // Inputs enter through RX(-x); the sign flips twice, so the same rule holds.
  std::vector<double> xs(x.begin(), x.end());
  for (size_t j = 0; j < d; ++j) {
    xs[j] = x[j] + kShift;
    const double plus = Contract(QuantumLayerForward(xs, config), upstream);
    xs[j] = x[j] - kShift;
    const double minus = Contract(QuantumLayerForward(xs, config), upstream);
    xs[j] = x[j];
    g.inputs[j] = 0.5 * (plus - minus);
  }
  return g;
}

}  // namespace mqfl::quantum
