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

#include "mqfl/noise/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "mqfl/ckks/context.h"
#include "mqfl/ckks/encoder.h"
#include "mqfl/ckks/evaluator.h"
#include "mqfl/ckks/keys.h"
#include "mqfl/ckks/serialization.h"
#include "mqfl/errors.h"

namespace mqfl::noise {

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

// Ordinary least squares R^2 of y on x.
double RSquared(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return 0.0;
  if (syy == 0.0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

}  // namespace

std::vector<BenchPoint> ReferenceGrid() {
  return {{40, 32768, 8}, {30, 16384, 8}, {20, 8192, 8}, {20, 8192, 1}, {30, 8192, 1},
          {40, 4096, 1},  {40, 8192, 1},  {30, 8192, 1}, {20, 4096, 1}, {20, 32768, 1}};
}

std::vector<int> BenchModulusBits(int bit_scale) {
  return {bit_scale + 20, bit_scale, bit_scale, bit_scale + 20};
}

uint64_t EncryptableCount(size_t poly_degree, const std::vector<int>& modulus_bits, double budget_bits) {
  if (modulus_bits.size() < 2) throw ParameterError("need data primes and a special prime");
  double log_q = 0.0;
  for (size_t i = 0; i + 1 < modulus_bits.size(); ++i) log_q += modulus_bits[i];
  const double per_ct = 2.0 * static_cast<double>(poly_degree) * log_q;
  const auto cts = static_cast<uint64_t>(std::floor(budget_bits / per_ct));
  return cts * (poly_degree / 2);
}

BenchRow RunBenchPoint(const BenchPoint& point, const BenchOptions& options) {
  BenchRow row;
  row.point = point;
  row.modulus_bits = BenchModulusBits(point.bit_scale);
  try {
    if (point.bit_scale <= 0) throw ParameterError("bit scale must be positive");
    auto ctx = ckks::Context::Create(
        ckks::CkksParams{point.poly_degree, row.modulus_bits, std::ldexp(1.0, point.bit_scale)});
    row.encrypted_param_count = EncryptableCount(point.poly_degree, row.modulus_bits, options.budget_bits);

    ckks::KeyGenerator keygen(ctx, options.seed);
    const auto pk = keygen.CreatePublicKey();
    ckks::Encoder encoder(ctx);
    ckks::Evaluator evaluator(ctx);
    ring::Prng prng(options.seed + 1);
    std::mt19937_64 values_rng(options.seed + 2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    const size_t samples = std::max<size_t>(1, options.sample_ciphertexts);
    double enc = 0.0, ser = 0.0;
    uint64_t bytes = 0;
    std::vector<double> values(ctx->slot_count());
    for (size_t s = 0; s < samples; ++s) {
      for (auto& v : values) v = u(values_rng);
      auto t0 = Clock::now();
      auto ct = evaluator.Encrypt(pk, encoder.Encode(values), prng);
      auto t1 = Clock::now();
      auto blob = ckks::SerializeCiphertext(*ctx, ct, options.compress);
      auto t2 = Clock::now();
      enc += Seconds(t0, t1);
      ser += Seconds(t1, t2);
      bytes += blob.size();
    }
    row.encrypt_seconds = enc / static_cast<double>(samples);
    row.serialize_seconds = ser / static_cast<double>(samples);
    row.serialized_bytes = bytes / samples;
    const double cts = static_cast<double>(row.encrypted_param_count) / static_cast<double>(ctx->slot_count());
    row.seconds = cts * (row.encrypt_seconds + row.serialize_seconds);
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

std::vector<BenchRow> BenchSweep(const std::vector<BenchPoint>& grid, const BenchOptions& options) {
  std::vector<BenchRow> rows;
  rows.reserve(grid.size());
  for (const auto& p : grid) rows.push_back(RunBenchPoint(p, options));
  return rows;
}

BenchSummary Summarize(const std::vector<BenchRow>& rows, size_t trend_degree) {
  BenchSummary s;
  // Scale trend at the requested degree.
  int lo_scale = 1 << 30, hi_scale = -1;
  uint64_t lo_count = 0, hi_count = 0;
  for (const auto& r : rows) {
    if (!r.ok || r.point.poly_degree != trend_degree) continue;
    if (r.point.bit_scale < lo_scale) {
      lo_scale = r.point.bit_scale;
      lo_count = r.encrypted_param_count;
    }
    if (r.point.bit_scale > hi_scale) {
      hi_scale = r.point.bit_scale;
      hi_count = r.encrypted_param_count;
    }
  }
  s.smaller_scale_encrypts_more = hi_scale > lo_scale && lo_count > hi_count;

  std::map<int, std::map<size_t, std::vector<double>>> by_scale;
  for (const auto& r : rows) {
    if (r.ok) by_scale[r.point.bit_scale][r.point.poly_degree].push_back(static_cast<double>(r.serialized_bytes));
  }
  double min_r2 = 1.0;
  bool any = false;
  for (const auto& [scale, degrees] : by_scale) {
    if (degrees.size() < 3) continue;
    std::vector<double> x, y;
    for (const auto& [n, sizes] : degrees) {
      for (double b : sizes) {
        x.push_back(static_cast<double>(n));
        y.push_back(b);
      }
    }
    min_r2 = std::min(min_r2, RSquared(x, y));
    any = true;
  }
  s.bytes_r2 = any ? min_r2 : 0.0;

  for (const auto& r : rows)
    if (r.ok) s.largest_degree = std::max(s.largest_degree, r.point.poly_degree);
  size_t count = 0;
  for (const auto& r : rows) {
    if (!r.ok || r.point.poly_degree != s.largest_degree) continue;
    s.largest_encrypt_seconds += r.encrypt_seconds;
    s.largest_serialize_seconds += r.serialize_seconds;
    ++count;
  }
  if (count) {
    s.largest_encrypt_seconds /= static_cast<double>(count);
    s.largest_serialize_seconds /= static_cast<double>(count);
    s.serialization_dominates = s.largest_serialize_seconds >= s.largest_encrypt_seconds;
  }
  return s;
}

std::string BenchCsv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "bit_scale,poly_degree,extrema_count,encrypted_param_count,seconds,serialized_bytes,"
         "encrypt_seconds,serialize_seconds,ok,error\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.point.bit_scale << "," << r.point.poly_degree << "," << r.point.extrema_count << ","
        << r.encrypted_param_count << ",";
    std::snprintf(buf, sizeof(buf), "%.6g", r.seconds);
    out << buf << "," << r.serialized_bytes << ",";
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g", r.encrypt_seconds, r.serialize_seconds);
    out << buf << "," << (r.ok ? 1 : 0) << ",";
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << err << "\n";
  }
  return out.str();
}

}  // namespace mqfl::noise
