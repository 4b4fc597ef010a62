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

#ifndef MQFL_CKKS_CONTEXT_H_
#define MQFL_CKKS_CONTEXT_H_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mqfl/ring/rns_poly.h"

namespace mqfl::ckks {

// Scheme parameters. `coeff_modulus_bits` lists the prime widths in order;
// every entry but the last is a data prime, the last is the special prime
// used only during key switching. [60, 40, 40, 60] therefore yields three
// data primes (two rescales) plus one 60-bit special prime.
struct CkksParams {
  size_t poly_degree = 0;
  std::vector<int> coeff_modulus_bits;
  double scale = 0.0;
  double error_sigma = 3.2;

  size_t slot_count() const { return poly_degree / 2; }

  // n = 8192, [60, 40, 40, 60], scale 2^40 (128-bit security estimate).
  static CkksParams Paper();
  // n = 16, [40, 30, 40], scale 2^20. Insecure; for exact small-scale checks.
  static CkksParams Toy();
  // Looks up "paper" or "toy"; throws ConfigError for anything else.
  static CkksParams FromProfile(const std::string& name);
};

// Immutable, thread-shareable bundle of primes, NTT tables, and encoder
// tables derived from CkksParams.
class Context {
 public:
  // Throws ParameterError on invalid parameters or when no prime of a
  // requested width exists.
  static std::shared_ptr<const Context> Create(const CkksParams& params);

  const CkksParams& params() const { return params_; }
  size_t degree() const { return params_.poly_degree; }
  size_t slot_count() const { return params_.poly_degree / 2; }
  double default_scale() const { return params_.scale; }
  int max_level() const { return static_cast<int>(data_chain_.size()) - 1; }

  // Data primes active at `level` (the first level + 1 data primes).
  const ring::Chain& ChainAt(int level) const;
  // All data primes followed by the special prime.
  const ring::Chain& key_chain() const { return key_chain_; }
  const ring::ModulusPtr& special_prime() const { return key_chain_.back(); }
  uint64_t data_prime(int index) const { return data_chain_[index]->value(); }

  // log2 of the product of the data primes active at `level`.
  double LogModulus(int level) const;

  const ring::CrtComposer& composer(int level) const { return composers_[level]; }

  // 64-bit hash of (degree, primes, scale); embedded in serialized data.
  uint64_t fingerprint() const { return fingerprint_; }

  // Encoder tables: rot_group[j] = 5^j mod 2n, root_powers[k] = e^{2 pi i k / 2n}.
  const std::vector<uint64_t>& rot_group() const { return rot_group_; }
  const std::vector<std::complex<double>>& root_powers() const {
    return root_powers_;
  }

 private:
  explicit Context(const CkksParams& params);

  CkksParams params_;
  ring::Chain data_chain_;
  ring::Chain key_chain_;
  std::vector<ring::Chain> level_chains_;
  std::vector<ring::CrtComposer> composers_;
  uint64_t fingerprint_ = 0;
  std::vector<uint64_t> rot_group_;
  std::vector<std::complex<double>> root_powers_;
};

using ContextPtr = std::shared_ptr<const Context>;

}  // namespace mqfl::ckks

#endif  // MQFL_CKKS_CONTEXT_H_
