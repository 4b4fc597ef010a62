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

#ifndef MQFL_QUANTUM_STATEVECTOR_H_
#define MQFL_QUANTUM_STATEVECTOR_H_

#include <complex>
#include <span>
#include <vector>

namespace mqfl::quantum {

using Amplitude = std::complex<double>;

// Desk-scale cap on simulated qubits.
inline constexpr int kMaxQubits = 12;

// Dense state of `qubits` wires. Wire 0 is the most significant bit of the
// amplitude index, so |10> (wire 0 set) is index 2 for two qubits.
class StateVector {
 public:
  // |0...0>. Throws CapacityError above kMaxQubits, ContractViolation below 1.
  explicit StateVector(int qubits);

  int qubits() const { return qubits_; }
  size_t dimension() const { return amp_.size(); }
  std::span<const Amplitude> amplitudes() const { return amp_; }
  std::span<Amplitude> mutable_amplitudes() { return amp_; }

  // exp(-i theta X / 2) on `wire`.
  void ApplyRx(int wire, double theta);
  void ApplyCnot(int control, int target);

  // <psi| Z_wire |psi>.
  double ExpvalZ(int wire) const;
  double Norm() const;

 private:
  void CheckWire(int wire) const;
  size_t Mask(int wire) const { return size_t{1} << (qubits_ - 1 - wire); }

  int qubits_;
  std::vector<Amplitude> amp_;
};

// Tensor product of RX(-x_j)|0> over the wires.
StateVector AngleEncode(std::span<const double> x);

// Layered circuit: per layer, RX(theta[l][i]) on every wire, then CNOT(i, i+1)
// for i = 0..d-2 (no wraparound). Angles are row-major L x d.
struct PqcConfig {
  int qubits = 0;
  int layers = 0;
  std::vector<double> angles;

  double angle(int layer, int wire) const { return angles[layer * qubits + wire]; }
  // Throws ContractViolation unless angles.size() == layers * qubits.
  void Validate() const;
};

void RunPqc(StateVector& state, const PqcConfig& config);

// z_j = <Z_j> after encoding x and running the circuit.
std::vector<double> QuantumLayerForward(std::span<const double> x,
                                        const PqcConfig& config);

struct QuantumGradient {
  std::vector<double> angles;  // L x d, matches PqcConfig::angles
  std::vector<double> inputs;  // d
};

// Parameter-shift gradient of sum_j upstream[j] * z_j with respect to every
// circuit angle and every input feature.
QuantumGradient ParamShiftGrad(std::span<const double> x, const PqcConfig& config,
                               std::span<const double> upstream);

}  // namespace mqfl::quantum

#endif  // MQFL_QUANTUM_STATEVECTOR_H_
