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

#ifndef MQFL_NOISE_ROTATION_H_
#define MQFL_NOISE_ROTATION_H_

#include <array>
#include <optional>
#include <vector>

namespace mqfl::noise {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

struct EulerAngles {
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;
};

Mat3 Identity3();
Mat3 Multiply(const Mat3& a, const Mat3& b);
Mat3 Transpose(const Mat3& a);
double MaxAbsDiff(const Mat3& a, const Mat3& b);
// Row vector times matrix.
Vec3 RowTimes(const Vec3& v, const Mat3& m);

// Rows [0, -(phi+psi), theta], [phi+psi, 0, 0], [-theta, 0, 0].
Mat3 BuildGenerator(const EulerAngles& a);

// exp(t J) by scaling and squaring over a truncated Taylor series.
Mat3 ExpGenerator(const Mat3& j, double t);

// 2 pi / sqrt(theta^2 + (phi+psi)^2): the time after which exp(tJ) returns
// to the identity. UndefinedResult when that root is zero.
double FundamentalPeriod(const EulerAngles& a);

struct ErrorTrace {
  std::vector<double> t;
  std::vector<double> delta_az;  // wrapped to (-pi, pi]
  std::vector<double> delta_el;
  Vec3 v{};
  Vec3 v_err{};
};

// Rotates both vectors by exp(tJ) (row convention) and records the
// azimuth/elevation gap of v_err relative to v. InputError on zero vectors.
ErrorTrace AngularErrors(const Vec3& v, const Vec3& v_err, const std::vector<double>& t_grid,
                         const Mat3& j);

double Azimuth(const Vec3& v);    // atan2(y, x)
double Elevation(const Vec3& v);  // arcsin(z / |v|)
double WrapAngle(double a);       // into (-pi, pi]

std::vector<double> UniformGrid(double start, double stop, size_t count);

// Dominant period of a uniformly sampled trace (spacing dt): earliest
// near-deepest dip of the normalized lagged difference (1 - autocorrelation),
// refined to a fractional lag; zero-crossing spacing as a fallback. Empty for a constant
// trace or one too short to show a repeat.
std::optional<double> EstimatePeriod(const std::vector<double>& values, double dt);

}  // namespace mqfl::noise

#endif  // MQFL_NOISE_ROTATION_H_
