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

#include "mqfl/noise/rotation.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mqfl/errors.h"

namespace mqfl::noise {

namespace {

constexpr double kPi = std::numbers::pi;
// Taylor terms after scaling to norm <= 1/2; 0.5^19 / 19! is far below 1e-16.
constexpr int kTaylorTerms = 18;

double InfNorm(const Mat3& m) {
  double best = 0.0;
  for (const auto& row : m) best = std::max(best, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
  return best;
}

double Norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

// Sample of x at fractional index `pos` by linear interpolation.
double At(const std::vector<double>& x, double pos) {
  const auto i = static_cast<size_t>(pos);
  if (i + 1 >= x.size()) return x.back();
  const double f = pos - static_cast<double>(i);
  return x[i] * (1.0 - f) + x[i + 1] * f;
}

// Mean squared difference between x and x shifted by `lag` samples.
double LaggedMsd(const std::vector<double>& x, double lag) {
  const auto n = static_cast<double>(x.size());
  double sum = 0.0;
  size_t count = 0;
  for (size_t i = 0; static_cast<double>(i) + lag <= n - 1.0; ++i) {
    const double d = At(x, static_cast<double>(i) + lag) - x[i];
    sum += d * d;
    ++count;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

std::optional<double> ZeroCrossingPeriod(const std::vector<double>& x) {
  std::vector<double> ups;
  for (size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i] < 0.0 && x[i + 1] >= 0.0) ups.push_back(static_cast<double>(i) + x[i] / (x[i] - x[i + 1]));
  }
  if (ups.size() < 2) return std::nullopt;
  return (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1);
}

}  // namespace

Mat3 Identity3() { return Mat3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

Mat3 Multiply(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Mat3 Transpose(const Mat3& a) {
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = a[j][i];
  return t;
}

double MaxAbsDiff(const Mat3& a, const Mat3& b) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

Vec3 RowTimes(const Vec3& v, const Mat3& m) {
  Vec3 out{};
  for (int j = 0; j < 3; ++j) out[j] = v[0] * m[0][j] + v[1] * m[1][j] + v[2] * m[2][j];
  return out;
}

Mat3 BuildGenerator(const EulerAngles& a) {
  const double s = a.phi + a.psi;
  return Mat3{{{0.0, -s, a.theta}, {s, 0.0, 0.0}, {-a.theta, 0.0, 0.0}}};
}

Mat3 ExpGenerator(const Mat3& j, double t) {
  Mat3 a{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a[r][c] = t * j[r][c];
  const double norm = InfNorm(a);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const double shrink = std::ldexp(1.0, -squarings);
  for (auto& row : a)
    for (auto& x : row) x *= shrink;

  Mat3 result = Identity3();
  Mat3 term = Identity3();
  for (int k = 1; k <= kTaylorTerms; ++k) {
    term = Multiply(term, a);
    for (auto& row : term)
      for (auto& x : row) x /= k;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) result[r][c] += term[r][c];
  }
  for (int s = 0; s < squarings; ++s) result = Multiply(result, result);
  return result;
}

double FundamentalPeriod(const EulerAngles& a) {
  const double s = a.phi + a.psi;
  const double root = std::sqrt(a.theta * a.theta + s * s);
  if (!(root > 0.0) || !std::isfinite(root)) {
    throw UndefinedResult("rotation has no period: theta and phi + psi are both zero");
  }
  return 2.0 * kPi / root;
}

double Azimuth(const Vec3& v) { return std::atan2(v[1], v[0]); }

double Elevation(const Vec3& v) { return std::asin(std::clamp(v[2] / Norm(v), -1.0, 1.0)); }

double WrapAngle(double a) {
  double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

ErrorTrace AngularErrors(const Vec3& v, const Vec3& v_err, const std::vector<double>& t_grid,
                         const Mat3& j) {
  if (!(Norm(v) > 0.0) || !(Norm(v_err) > 0.0)) throw InputError("reference and perturbed vectors must be nonzero");
  ErrorTrace tr;
  tr.v = v;
  tr.v_err = v_err;
  tr.t = t_grid;
  tr.delta_az.reserve(t_grid.size());
  tr.delta_el.reserve(t_grid.size());
  for (double t : t_grid) {
    const Mat3 sp = ExpGenerator(j, t);
    const Vec3 a = RowTimes(v, sp);
    const Vec3 b = RowTimes(v_err, sp);
    tr.delta_az.push_back(WrapAngle(Azimuth(b) - Azimuth(a)));
    tr.delta_el.push_back(WrapAngle(Elevation(b) - Elevation(a)));
  }
  return tr;
}

std::vector<double> UniformGrid(double start, double stop, size_t count) {
  if (count == 0) return {};
  if (count == 1) return {start};
  std::vector<double> g(count);
  for (size_t i = 0; i < count; ++i) {
    g[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return g;
}

std::optional<double> EstimatePeriod(const std::vector<double>& values, double dt) {
  const size_t n = values.size();
  if (n < 8 || !(dt > 0.0)) return std::nullopt;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> x(n);
  double energy = 0.0, scale = 0.0;
  for (size_t i = 0; i < n; ++i) {
    x[i] = values[i] - mean;
    energy += x[i] * x[i];
    scale = std::max(scale, std::abs(values[i]));
  }
  if (energy <= 1e-24 * static_cast<double>(n) * std::max(1.0, scale * scale)) return std::nullopt;

  // Normalized lagged difference diff[k] ~ 1 - autocorrelation(k); an exact
  // repeat drives it to zero.
  const double var = energy / static_cast<double>(n);
  const size_t max_lag = n / 2;
  std::vector<double> diff(max_lag + 1);
  for (size_t k = 0; k <= max_lag; ++k) diff[k] = LaggedMsd(x, static_cast<double>(k)) / (2.0 * var);

  // Skip the central lobe, then take the earliest dip close to the deepest
  // one so multiples and strong harmonics lose to the period itself.
  size_t k = 1;
  while (k < max_lag && diff[k] < 0.5) ++k;
  std::vector<size_t> dips;
  double best = 2.0;
  for (size_t i = std::max<size_t>(k, 1); i < max_lag; ++i) {
    if (diff[i] <= diff[i - 1] && diff[i] < diff[i + 1]) {
      dips.push_back(i);
      best = std::min(best, diff[i]);
    }
  }
  double lag = 0.0;
  if (!dips.empty() && best < 0.5) {
    for (size_t p : dips) {
      if (diff[p] <= best + 0.01) {
        lag = static_cast<double>(p);
        break;
      }
    }
  } else {
    auto zc = ZeroCrossingPeriod(x);
    if (!zc) return std::nullopt;
    lag = *zc;
  }

  // Golden-section refinement of the lag on [lag - 1, lag + 1].
  double lo = std::max(1.0, lag - 1.0), hi = lag + 1.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = LaggedMsd(x, c), fd = LaggedMsd(x, d);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = LaggedMsd(x, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = LaggedMsd(x, d);
    }
  }
  return 0.5 * (lo + hi) * dt;
}

}  // namespace mqfl::noise
