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

#ifndef MQFL_NOISE_BENCH_H_
#define MQFL_NOISE_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mqfl::noise {

struct BenchPoint {
  int bit_scale = 40;
  size_t poly_degree = 8192;
  int extrema_count = 1;  // carried as metadata only
};

// The ten (bit scale, degree, extrema) combinations of the reference table.
std::vector<BenchPoint> ReferenceGrid();

struct BenchOptions {
  // Ciphertext storage budget in bits of residue material; each
  // ciphertext costs 2 * n * log2(Q) bits and carries n / 2 values.
  double budget_bits = 1u << 30;
  size_t sample_ciphertexts = 3;  // ciphertexts actually encrypted per point
  bool compress = true;
  uint64_t seed = 1;
};

struct BenchRow {
  BenchPoint point;
  bool ok = false;
  std::string error;
  uint64_t encrypted_param_count = 0;
  double seconds = 0.0;  // projected encrypt + serialize time for the full count
  uint64_t serialized_bytes = 0;  // per ciphertext
  double encrypt_seconds = 0.0;    // per ciphertext, encode + encrypt
  double serialize_seconds = 0.0;  // per ciphertext
  std::vector<int> modulus_bits;
};

// Data primes s+20, s, s then a special prime s+20.
std::vector<int> BenchModulusBits(int bit_scale);
uint64_t EncryptableCount(size_t poly_degree, const std::vector<int>& modulus_bits, double budget_bits);

// Failures (e.g. no prime of a width for a degree) become rows with ok=false.
BenchRow RunBenchPoint(const BenchPoint& point, const BenchOptions& options);
std::vector<BenchRow> BenchSweep(const std::vector<BenchPoint>& grid, const BenchOptions& options);

struct BenchSummary {
  // Count at the smallest scale beats the count at the largest, per degree
  // where both were measured. False when no degree has two scales.
  bool smaller_scale_encrypts_more = false;
  // Minimum R^2 of bytes vs degree over scale groups with >= 3 degrees.
  double bytes_r2 = 0.0;
  size_t largest_degree = 0;
  double largest_encrypt_seconds = 0.0;
  double largest_serialize_seconds = 0.0;
  bool serialization_dominates = false;
};
BenchSummary Summarize(const std::vector<BenchRow>& rows, size_t trend_degree = 8192);

// bit_scale,poly_degree,extrema_count,encrypted_param_count,seconds, then
// serialized_bytes,encrypt_seconds,serialize_seconds,ok,error.
std::string BenchCsv(const std::vector<BenchRow>& rows);

}  // namespace mqfl::noise

#endif  // MQFL_NOISE_BENCH_H_
