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

// Acceptance gate: one PASS/FAIL line per criterion. Arguments select
// criteria by number (default: all). Exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mqfl/ckks/context.h"
#include "mqfl/ckks/encoder.h"
#include "mqfl/ckks/evaluator.h"
#include "mqfl/ckks/keys.h"
#include "mqfl/data/metrics.h"
#include "mqfl/fl/aggregate.h"
#include "mqfl/fl/experiment.h"
#include "mqfl/mqmoe/model.h"
#include "mqfl/nn/loss.h"
#include "mqfl/nn/train.h"
#include "mqfl/nn/weights.h"
#include "mqfl/noise/bench.h"
#include "mqfl/noise/rotation.h"
#include "mqfl/quantum/statevector.h"
#include "mqfl/util/file.h"
#include "mqfl/util/seed.h"

namespace {

using namespace mqfl;
constexpr double kPi = std::numbers::pi;

// ---- pinned tolerances and budgets ------------------------------------------
// 1: CKKS at the paper profile
constexpr size_t kC1Values = 1024;
constexpr double kC1RoundtripTol = 1e-5;
constexpr size_t kC1SumTerms = 10;
constexpr double kC1SumTol = 1e-3;
constexpr double kC1Seconds = 30.0;
// 2: aggregation equivalence
constexpr size_t kC2Clients = 10;
constexpr size_t kC2Weights = 10000;
constexpr uint32_t kC2Rounds = 20;
constexpr double kC2Tol = 1e-3;
constexpr double kC2ArgmaxAgreement = 0.999;
// 3: quantum engine
constexpr size_t kC3Gates = 10000;
constexpr double kC3NormTol = 1e-10;
constexpr double kC3DenseTol = 1e-12;
constexpr int kC3ShiftCases = 100;
constexpr double kC3ShiftRelTol = 1e-5;
constexpr double kC3FdStep = 1e-5;
constexpr double kC3Seconds = 10.0;
// 4: end-to-end run
constexpr double kC4Accuracy = 0.90;
constexpr double kC4WeightGap = 1e-3;
constexpr double kC4Seconds = 300.0;
// 5: noise lab
constexpr int kC5Cases = 50;
constexpr double kC5ReturnTol = 1e-9;
constexpr double kC5PeriodRelTol = 0.01;
constexpr double kC5OrthoTol = 1e-12;
constexpr double kC5Seconds = 5.0;
constexpr size_t kC5SamplesPerPeriod = 128;
constexpr double kC5Periods = 4.0;
// 6: bench sweep
constexpr double kC6MinR2 = 0.99;
constexpr size_t kC6TrendDegree = 8192;
// 7: MQMoE properties
constexpr int kC7GateSamples = 1000;
constexpr double kC7SimplexTol = 1e-9;
constexpr double kC7GradRelTol = 1e-5;
constexpr double kC7FdStep = 1e-5;
constexpr double kC7Seconds = 30.0;
// 8: metrics
constexpr double kC8OracleTol = 1e-12;
// 9: soak
constexpr uint32_t kC9Clients = 10;
constexpr uint32_t kC9Rounds = 20;

struct Outcome {
  bool pass = true;
  std::string detail;
  void Check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string Fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

fl::ExperimentConfig LoadConfig(const std::string& name) {
  return fl::ExperimentConfig::FromJson(
      nlohmann::json::parse(util::ReadFileText(std::string(MQFL_CONFIG_DIR) + "/" + name)));
}

// ---- 1 ------------------------------------------------------------------------
Outcome CkksCorrectness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  auto ctx = ckks::Context::Create(ckks::CkksParams::Paper());
  o.Check(ctx->degree() == 8192 && ctx->key_chain().size() == 4 && ctx->default_scale() == std::ldexp(1.0, 40),
          "paper parameters n=8192, 4 primes, scale 2^40");
  auto keys = ckks::GenerateKeys(ctx, 101);
  ckks::Encoder enc(ctx);
  ckks::Evaluator ev(ctx);
  ring::Prng prng(102);
  std::mt19937_64 g(103);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  std::vector<double> x(kC1Values);
  for (auto& v : x) v = u(g);
  auto back = enc.Decode(ev.Decrypt(keys.secret, ev.Encrypt(keys.public_key, enc.Encode(x), prng)));
  back.resize(kC1Values);
  const double rt = MaxAbsDiff(x, back);
  o.Check(rt <= kC1RoundtripTol, "roundtrip max err " + Fmt("%.2e", rt));

  std::vector<double> sum(kC1Values, 0.0);
  ckks::Ciphertext acc;
  for (size_t k = 0; k < kC1SumTerms; ++k) {
    std::vector<double> y(kC1Values);
    for (size_t i = 0; i < kC1Values; ++i) {
      y[i] = u(g);
      sum[i] += y[i];
    }
    auto ct = ev.Encrypt(keys.public_key, enc.Encode(y), prng);
    if (k == 0) acc = ct;
    else ev.AddInPlace(acc, ct);
  }
  auto dec = enc.Decode(ev.Decrypt(keys.secret, acc));
  dec.resize(kC1Values);
  const double se = MaxAbsDiff(sum, dec);
  o.Check(se <= kC1SumTol, "10-ciphertext sum L_inf " + Fmt("%.2e", se));
  const double secs = Seconds(t0);
  o.Check(secs < kC1Seconds, Fmt("%.2fs", secs));
  return o;
}

// ---- 2 ------------------------------------------------------------------------
Outcome AggregationEquivalence() {
  Outcome o;
  auto ctx = ckks::Context::Create(ckks::CkksParams::Paper());
  auto keys = ckks::GenerateKeys(ctx, 201);
  std::mt19937_64 g(202);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<uint64_t> n(1, 1000);
  constexpr uint64_t kHash = 0x5eed;

  double worst = 0.0;
  for (uint32_t round = 1; round <= kC2Rounds; ++round) {
    std::map<uint32_t, uint64_t> samples;
    std::vector<fl::PlainUpdate> plain;
    for (uint32_t c = 0; c < kC2Clients; ++c) {
      fl::PlainUpdate p{c, round, n(g), kHash, std::vector<double>(kC2Weights)};
      for (auto& w : p.weights) w = u(g);
      samples[c] = p.samples;
      plain.push_back(std::move(p));
    }
    fl::Aggregator agg(ctx, samples, kHash);
    agg.BeginRound(round);
    for (const auto& p : plain) agg.Add(fl::EncryptUpdate(ctx, keys.public_key, p, util::DeriveSeed(203, {round, p.client})));
    auto dec = fl::DecryptWeights(ctx, keys.secret, agg.FinishEncrypted(), kC2Weights);
    worst = std::max(worst, MaxAbsDiff(dec, fl::AggregatePlain(plain)));
  }
  o.Check(worst <= kC2Tol, std::to_string(kC2Rounds) + " rounds x " + std::to_string(kC2Clients) +
                               " clients x 1e4 weights, worst L_inf " + Fmt("%.2e", worst));

  // Predictions from the two aggregation paths on a shared test set.
  auto cfg = LoadConfig("paired_qfl_fhe.json");
  auto data = fl::PrepareData(cfg);
  auto model = fl::BuildModel(cfg, data);
  auto base = nn::FlattenWeights(*model);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::map<uint32_t, uint64_t> samples;
  std::vector<fl::PlainUpdate> plain;
  for (uint32_t c = 0; c < kC2Clients; ++c) {
    fl::PlainUpdate p{c, 1, n(g), base.LayoutHash(), base.values};
    for (auto& w : p.weights) w += noise(g);
    samples[c] = p.samples;
    plain.push_back(std::move(p));
  }
  fl::Aggregator agg(ctx, samples, base.LayoutHash());
  agg.BeginRound(1);
  for (const auto& p : plain) agg.Add(fl::EncryptUpdate(ctx, keys.public_key, p, util::DeriveSeed(204, {p.client})));
  auto enc_w = base, plain_w = base;
  enc_w.values = fl::DecryptWeights(ctx, keys.secret, agg.FinishEncrypted(), base.values.size());
  plain_w.values = fl::AggregatePlain(plain);
  nn::LoadWeights(*model, enc_w);
  auto ea = nn::Evaluate(*model, data.test);
  nn::LoadWeights(*model, plain_w);
  auto pa = nn::Evaluate(*model, data.test);
  size_t same = 0, total = 0;
  for (size_t h = 0; h < ea.predictions.size(); ++h) {
    for (size_t i = 0; i < ea.predictions[h].size(); ++i) {
      same += ea.predictions[h][i] == pa.predictions[h][i];
      ++total;
    }
  }
  const double agree = total ? static_cast<double>(same) / total : 0.0;
  o.Check(agree >= kC2ArgmaxAgreement, "argmax agreement " + std::to_string(same) + "/" + std::to_string(total));
  return o;
}

// ---- 3 ------------------------------------------------------------------------
using Cx = std::complex<double>;
using Mat4 = std::array<std::array<Cx, 4>, 4>;

Mat4 Mul(const Mat4& a, const Mat4& b) {
  Mat4 m{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j) m[i][j] += a[i][k] * b[k][j];
  return m;
}

// RX on each wire as a Kronecker product; wire 0 is the high bit.
Mat4 RxPair(double t0, double t1) {
  auto rx = [](double t) {
    return std::array<std::array<Cx, 2>, 2>{{{std::cos(t / 2), Cx(0, -std::sin(t / 2))},
                                            {Cx(0, -std::sin(t / 2)), std::cos(t / 2)}}};
  };
  auto a = rx(t0), b = rx(t1);
  Mat4 m{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m[i * 2 + k][j * 2 + l] = a[i][j] * b[k][l];
  return m;
}

Outcome QuantumEngine() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 g(301);
  std::uniform_real_distribution<double> ang(-kPi, kPi);

  double norm_dev = 0.0;
  for (int d : {2, 4, 6, 8}) {
    quantum::StateVector s(d);
    for (size_t k = 0; k < kC3Gates; ++k) {
      if (g() % 2) {
        s.ApplyRx(static_cast<int>(g() % d), ang(g));
      } else {
        const int c = static_cast<int>(g() % (d - 1));
        s.ApplyCnot(c, c + 1);
      }
    }
    norm_dev = std::max(norm_dev, std::abs(s.Norm() - 1.0));
  }
  o.Check(norm_dev <= kC3NormTol, "norm deviation after 1e4 gates " + Fmt("%.1e", norm_dev));

  Mat4 cnot{};
  cnot[0][0] = cnot[1][1] = cnot[2][3] = cnot[3][2] = 1.0;
  double dense = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int layers = 1 + static_cast<int>(g() % 3);
    quantum::PqcConfig cfg{2, layers, {}};
    for (int k = 0; k < 2 * layers; ++k) cfg.angles.push_back(ang(g));
    const double x0 = ang(g), x1 = ang(g);
    Mat4 u = RxPair(-x0, -x1);
    for (int l = 0; l < layers; ++l) u = Mul(cnot, Mul(RxPair(cfg.angle(l, 0), cfg.angle(l, 1)), u));
    auto s = quantum::AngleEncode(std::vector<double>{x0, x1});
    quantum::RunPqc(s, cfg);
    for (int i = 0; i < 4; ++i) dense = std::max(dense, std::abs(s.amplitudes()[i] - u[i][0]));
    const double z0 = std::norm(u[0][0]) + std::norm(u[1][0]) - std::norm(u[2][0]) - std::norm(u[3][0]);
    const double z1 = std::norm(u[0][0]) - std::norm(u[1][0]) + std::norm(u[2][0]) - std::norm(u[3][0]);
    dense = std::max({dense, std::abs(s.ExpvalZ(0) - z0), std::abs(s.ExpvalZ(1) - z1)});
  }
  o.Check(dense <= kC3DenseTol, "d=2 dense-matrix oracle " + Fmt("%.1e", dense));

  double shift = 0.0;
  for (int t = 0; t < kC3ShiftCases; ++t) {
    const int d = 1 + static_cast<int>(g() % 4), layers = 1 + static_cast<int>(g() % 2);
    quantum::PqcConfig cfg{d, layers, {}};
    for (int k = 0; k < d * layers; ++k) cfg.angles.push_back(ang(g));
    std::vector<double> x(d), up(d);
    for (auto& v : x) v = ang(g);
    for (auto& v : up) v = ang(g) / kPi;
    auto f = [&](const quantum::PqcConfig& c) {
      auto z = quantum::QuantumLayerForward(x, c);
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += up[j] * z[j];
      return s;
    };
    auto grad = quantum::ParamShiftGrad(x, cfg, up);
    for (size_t k = 0; k < cfg.angles.size(); ++k) {
      auto p = cfg, m = cfg;
      p.angles[k] += kC3FdStep;
      m.angles[k] -= kC3FdStep;
      const double fd = (f(p) - f(m)) / (2 * kC3FdStep);
      shift = std::max(shift, std::abs(fd - grad.angles[k]) / std::max(1.0, std::abs(fd)));
    }
  }
  o.Check(shift <= kC3ShiftRelTol, "parameter shift vs finite differences " + Fmt("%.1e", shift));
  const double secs = Seconds(t0);
  o.Check(secs < kC3Seconds, Fmt("%.2fs", secs));
  return o;
}

// ---- 4 ------------------------------------------------------------------------
Outcome EndToEnd() {
  Outcome o;
  auto cfg = LoadConfig("paired_qfl_fhe.json");
  o.Check(cfg.mode == fl::Mode::kQflFhe && cfg.fl.clients == 4 && cfg.fl.rounds == 5 && cfg.dataset.motif_noise == 0.05,
          "qfl-fhe, 4 clients, 5 rounds, " + std::to_string(cfg.dataset.samples) + " samples, motif noise 0.05");
  auto t0 = std::chrono::steady_clock::now();
  auto fhe = fl::RunExperiment(cfg);
  const double secs = Seconds(t0);
  auto plain_cfg = cfg;
  plain_cfg.mode = fl::Mode::kQfl;
  auto plain = fl::RunExperiment(plain_cfg);
  o.Check(fhe.ok() && plain.ok(), "runs complete" + (fhe.ok() ? std::string() : ": " + fhe.error) +
                                     (plain.ok() ? std::string() : ": " + plain.error));
  if (!fhe.ok() || !plain.ok()) return o;
  const auto& last = fhe.reports.back();
  for (size_t h = 0; h < last.test_accuracy.size(); ++h) {
    o.Check(last.test_accuracy[h] >= kC4Accuracy,
            fhe.head_names[h] + " accuracy " + Fmt("%.4f", last.test_accuracy[h]));
  }
  double gap = fhe.global_weights.size() == plain.global_weights.size() ? 0.0 : INFINITY;
  for (size_t r = 0; r < fhe.global_weights.size() && r < plain.global_weights.size(); ++r) {
    gap = std::max(gap, MaxAbsDiff(fhe.global_weights[r], plain.global_weights[r]));
  }
  o.Check(gap <= kC4WeightGap, "per-round weight gap vs qfl " + Fmt("%.2e", gap));
  o.Check(secs < kC4Seconds, "qfl-fhe run " + Fmt("%.1fs", secs));
  return o;
}

// ---- 5 ------------------------------------------------------------------------
double InfNorm(const noise::Mat3& a, const noise::Mat3& b) {
  double m = 0.0;
  for (int r = 0; r < 3; ++r) {
    double row = 0.0;
    for (int c = 0; c < 3; ++c) row += std::abs(a[r][c] - b[r][c]);
    m = std::max(m, row);
  }
  return m;
}

Outcome NoiseLab() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 g(501);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::normal_distribution<double> n(0.0, 1.0), jitter(0.0, 0.2);
  double ret = 0.0, per = 0.0, ortho = 0.0;
  int missing = 0;
  for (int t = 0; t < kC5Cases; ++t) {
    const noise::EulerAngles a{ang(g), ang(g), ang(g)};
    const auto j = noise::BuildGenerator(a);
    const double w = noise::FundamentalPeriod(a);
    ret = std::max(ret, InfNorm(noise::ExpGenerator(j, w), noise::Identity3()));
    const noise::Vec3 v{n(g), n(g), n(g)};
    const noise::Vec3 e{v[0] + jitter(g), v[1] + jitter(g), v[2] + jitter(g)};
    const auto grid = noise::UniformGrid(0.0, kC5Periods * w, static_cast<size_t>(kC5Periods * kC5SamplesPerPeriod) + 1);
    const auto trace = noise::AngularErrors(v, e, grid, j);
    auto est = noise::EstimatePeriod(trace.delta_az, w / kC5SamplesPerPeriod);
    if (!est) ++missing;
    else per = std::max(per, std::abs(*est - w) / w);
    for (double tt : grid) {
      const auto sp = noise::ExpGenerator(j, tt);
      ortho = std::max(ortho, InfNorm(noise::Multiply(sp, noise::Transpose(sp)), noise::Identity3()));
    }
  }
  o.Check(ret <= kC5ReturnTol, "||SP(w) - I||_inf " + Fmt("%.1e", ret));
  o.Check(missing == 0 && per <= kC5PeriodRelTol,
          "period estimate rel err " + Fmt("%.1e", per) + (missing ? " (" + std::to_string(missing) + " none)" : ""));
  o.Check(ortho <= kC5OrthoTol, "orthogonality " + Fmt("%.1e", ortho));
  const double secs = Seconds(t0);
  o.Check(secs < kC5Seconds, Fmt("%.2fs", secs));
  return o;
}

// ---- 6 ------------------------------------------------------------------------
double RSquared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
}

Outcome BenchSweep() {
  Outcome o;
  const auto rows = noise::BenchSweep(noise::ReferenceGrid(), noise::BenchOptions{});
  // Count per scale at the trend degree.
  std::map<int, uint64_t> count;
  for (const auto& r : rows) {
    if (r.ok && r.point.poly_degree == kC6TrendDegree) count[r.point.bit_scale] = r.encrypted_param_count;
  }
  bool strictly = count.count(20) && count.count(40);
  for (auto it = count.begin(); strictly && std::next(it) != count.end(); ++it) {
    strictly = it->second > std::next(it)->second;
  }
  std::string counts;
  for (auto [s, c] : count) counts += " " + std::to_string(s) + ":" + std::to_string(c);
  o.Check(strictly, "count at n=8192 falls with scale (" + counts.substr(1) + ")");

  std::map<int, std::map<size_t, double>> bytes;
  for (const auto& r : rows) {
    if (r.ok) bytes[r.point.bit_scale][r.point.poly_degree] = static_cast<double>(r.serialized_bytes);
  }
  double r2 = INFINITY;
  for (const auto& [s, by_n] : bytes) {
    if (by_n.size() < 3) continue;
    std::vector<double> x, y;
    for (auto [deg, b] : by_n) x.push_back(static_cast<double>(deg)), y.push_back(b);
    r2 = std::min(r2, RSquared(x, y));
  }
  o.Check(std::isfinite(r2) && r2 > kC6MinR2, "bytes vs n R^2 " + Fmt("%.6f", r2));

  const noise::BenchRow* big = nullptr;
  for (const auto& r : rows) {
    if (r.ok && (!big || r.point.poly_degree > big->point.poly_degree)) big = &r;
  }
  o.Check(big && big->serialize_seconds >= big->encrypt_seconds,
          big ? "at n=" + std::to_string(big->point.poly_degree) + " serialize " + Fmt("%.4fs", big->serialize_seconds) +
                    " vs encrypt " + Fmt("%.4fs", big->encrypt_seconds)
              : "no successful row");
  size_t failed = 0;
  for (const auto& r : rows) failed += !r.ok;
  if (failed) o.detail += "; " + std::to_string(failed) + " unconstructible point(s) recorded as failed rows";
  return o;
}

// ---- 7 ------------------------------------------------------------------------
nn::Tensor RandomTensor(const nn::Shape& s, nn::Prng& g, double lo = -1, double hi = 1) {
  nn::Tensor t(s);
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& v : t.values()) v = d(g);
  return t;
}

mqmoe::MqmoeConfig TinyMoe() {
  mqmoe::MqmoeConfig c;
  c.qubits = 3;
  c.pqc_layers = 1;
  c.attention_heads = 1;
  c.experts.push_back({"sequence", {5}, {{.type = "dense", .out = 3}}, 2});
  c.experts.push_back({"image",
                       {1, 4, 4},
                       {{.type = "conv2d", .channels = 2, .kernel = 3},
                        {.type = "relu"},
                        {.type = "maxpool", .k = 2},
                        {.type = "dense", .out = 3}},
                       3});
  return c;
}

nn::Example RandomSample(nn::Prng& g) {
  std::uniform_int_distribution<int> l2(0, 1), l3(0, 2);
  return {{RandomTensor({5}, g), RandomTensor({1, 4, 4}, g)}, {l2(g), l3(g)}};
}

Outcome MoeProperties() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  nn::Prng g(701);
  mqmoe::MqmoeModel m(TinyMoe(), 702);

  double simplex = 0.0;
  bool nonneg = true;
  for (int t = 0; t < kC7GateSamples; ++t) {
    m.Logits(RandomSample(g));
    double s = 0.0;
    for (double v : m.last_trace().gate) {
      nonneg = nonneg && v >= 0.0;
      s += v;
    }
    simplex = std::max(simplex, std::abs(s - 1.0));
  }
  o.Check(nonneg && simplex <= kC7SimplexTol, "gate simplex " + Fmt("%.1e", simplex));

  bool onehot = true;
  for (size_t j = 0; j < 2; ++j) {
    std::vector<double> gate(2, 0.0);
    gate[j] = 1.0;
    m.OverrideGate(gate);
    for (int t = 0; t < 20; ++t) {
      m.Logits(RandomSample(g));
      onehot = onehot && m.last_trace().combined == m.last_trace().expert_outputs[j];
    }
  }
  m.OverrideGate(std::nullopt);
  o.Check(onehot, "one-hot gate returns the expert exactly");

  // Dyadic operands keep every product and sum exact.
  bool linear = true;
  std::uniform_int_distribution<int> eighth(0, 8), sixty4(-64, 64), quarter(0, 4);
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::vector<double>> e(2, std::vector<double>(5));
    for (auto& row : e)
      for (auto& v : row) v = sixty4(g) / 64.0;
    const double a = eighth(g) / 8.0, b = eighth(g) / 8.0, alpha = quarter(g) / 4.0;
    const std::vector<double> g1 = {a, 1 - a}, g2 = {b, 1 - b};
    auto lhs = mqmoe::Combine({alpha * g1[0] + (1 - alpha) * g2[0], alpha * g1[1] + (1 - alpha) * g2[1]}, e);
    auto y1 = mqmoe::Combine(g1, e), y2 = mqmoe::Combine(g2, e);
    for (size_t i = 0; i < 5; ++i) linear = linear && lhs[i] == alpha * y1[i] + (1 - alpha) * y2[i];
  }
  o.Check(linear, "combination linear in the gate (exact)");

  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    mqmoe::MqmoeModel tiny(TinyMoe(), 710 + t);
    const auto ex = RandomSample(g);
    tiny.ZeroGrad();
    tiny.ForwardBackward(ex);
    auto loss = [&] {
      auto logits = tiny.Logits(ex);
      double s = 0.0;
      for (size_t h = 0; h < logits.size(); ++h) s += nn::SoftmaxCrossEntropy(logits[h], ex.labels[h], nullptr);
      return s;
    };
    for (nn::Param* p : tiny.Params()) {
      for (size_t i = 0; i < p->value.size(); ++i) {
        const double v = p->value[i];
        p->value[i] = v + kC7FdStep;
        const double fp = loss();
        p->value[i] = v - kC7FdStep;
        const double fm = loss();
        p->value[i] = v;
        const double fd = (fp - fm) / (2 * kC7FdStep);
        worst = std::max(worst, std::abs(fd - p->grad[i]) / std::max({1.0, std::abs(fd), std::abs(p->grad[i])}));
      }
    }
  }
  o.Check(worst <= kC7GradRelTol, "full-model gradient check " + Fmt("%.1e", worst));
  const double secs = Seconds(t0);
  o.Check(secs < kC7Seconds, Fmt("%.2fs", secs));
  return o;
}

// ---- 8 ------------------------------------------------------------------------
// Pair-counting AUC: P(score_pos > score_neg) + 0.5 P(tie).
double PairAuc(const std::vector<double>& s, const std::vector<bool>& pos) {
  double wins = 0, pairs = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (!pos[i]) continue;
    for (size_t j = 0; j < s.size(); ++j) {
      if (pos[j]) continue;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      pairs += 1;
    }
  }
  return wins / pairs;
}

Outcome MetricsFidelity() {
  Outcome o;
  // Hand cases.
  auto auc = [](std::vector<double> s, std::vector<bool> p) { return data::Auc(data::RocCurve(s, p)); };
  o.Check(auc({0.9, 0.8, 0.7, 0.6}, {true, true, false, false}) == 1.0, "separable AUC = 1");
  o.Check(auc({0.1, 0.4, 0.35, 0.8}, {false, false, true, true}) == 0.75, "four-point AUC = 0.75");
  o.Check(auc({0.5, 0.5}, {true, false}) == 0.5, "tied AUC = 0.5");
  o.Check(auc({0.1, 0.2, 0.3}, {true, false, false}) == 0.0, "inverted AUC = 0");
  auto curve = data::RocCurve({0.1, 0.4, 0.35, 0.8}, {false, false, true, true});
  const std::vector<std::pair<double, double>> want = {{0, 0}, {0, 0.5}, {0.5, 0.5}, {0.5, 1}, {1, 1}};
  bool pts = curve.size() == want.size();
  for (size_t i = 0; pts && i < want.size(); ++i) pts = curve[i].fpr == want[i].first && curve[i].tpr == want[i].second;
  o.Check(pts, "four-point ROC vertices");

  const std::vector<int> labels = {0, 0, 1, 1, 2, 2};
  const std::vector<int> preds = {0, 1, 1, 1, 2, 0};
  auto counts = data::ConfusionMatrix(preds, labels, 3, false);
  auto norm = data::ConfusionMatrix(preds, labels, 3, true);
  const std::vector<std::vector<double>> want_counts = {{1, 1, 0}, {0, 2, 0}, {1, 0, 1}};
  const std::vector<std::vector<double>> want_norm = {{0.5, 0.5, 0}, {0, 1, 0}, {0.5, 0, 0.5}};
  o.Check(counts == want_counts && norm == want_norm, "hand confusion matrix (counts and row-normalized)");

  // Micro (pooled one-vs-rest) and macro (mean per-class) against the
  // pair-counting oracle, plus row sums, over random cases.
  std::mt19937_64 g(801);
  double micro_err = 0, macro_err = 0, row_err = 0;
  for (int t = 0; t < 100; ++t) {
    const size_t c = 2 + g() % 4, n = 20 + g() % 40;
    std::vector<std::vector<double>> probs(n, std::vector<double>(c));
    std::vector<int> y(n);
    std::vector<int> yhat(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(i < c ? i : g() % c);  // every class present
      double s = 0;
      for (auto& p : probs[i]) s += (p = std::round(u(g) * 20) / 20 + 1e-3);  // coarse grid forces ties
      for (auto& p : probs[i]) p /= s;
      yhat[i] = static_cast<int>(std::max_element(probs[i].begin(), probs[i].end()) - probs[i].begin());
    }
    auto got = data::MicroMacroAuc(probs, y);
    std::vector<double> pooled;
    std::vector<bool> pooled_pos;
    double macro = 0;
    for (size_t k = 0; k < c; ++k) {
      std::vector<double> s(n);
      std::vector<bool> p(n);
      for (size_t i = 0; i < n; ++i) {
        s[i] = probs[i][k];
        p[i] = y[i] == static_cast<int>(k);
        pooled.push_back(s[i]);
        pooled_pos.push_back(p[i]);
      }
      macro += PairAuc(s, p) / static_cast<double>(c);
    }
    micro_err = std::max(micro_err, std::abs(got.micro - PairAuc(pooled, pooled_pos)));
    macro_err = std::max(macro_err, std::abs(got.macro - macro));
    for (const auto& row : data::ConfusionMatrix(yhat, y, c, true)) {
      double s = 0;
      for (double v : row) s += v;
      row_err = std::max(row_err, std::abs(s - 1.0));
    }
  }
  o.Check(micro_err <= kC8OracleTol, "micro AUC vs pooled pair count " + Fmt("%.1e", micro_err));
  o.Check(macro_err <= kC8OracleTol, "macro AUC vs mean per-class pair count " + Fmt("%.1e", macro_err));
  o.Check(row_err <= kC8OracleTol, "normalized rows sum to 1 " + Fmt("%.1e", row_err));
  return o;
}

// ---- 9 ------------------------------------------------------------------------
Outcome TransportSoak() {
  Outcome o;
  auto cfg = LoadConfig("soak_qfl_fhe.json");
  o.Check(cfg.transport == "tcp" && cfg.ckks_profile == "paper" && cfg.fl.clients == kC9Clients &&
              cfg.fl.rounds == kC9Rounds && cfg.timeout_ms > 0,
          "10 clients x 20 rounds, tcp, paper profile, " + std::to_string(cfg.timeout_ms) + "ms message timeout");
  const auto t0 = std::chrono::steady_clock::now();
  auto tcp = fl::RunExperiment(cfg);
  const double secs = Seconds(t0);
  auto inproc_cfg = cfg;
  inproc_cfg.transport = "inproc";
  auto inproc = fl::RunExperiment(inproc_cfg);
  o.Check(tcp.ok(), "tcp run completes without parse/transport errors" + (tcp.ok() ? "" : ": " + tcp.error));
  o.Check(inproc.ok(), "inproc run completes" + (inproc.ok() ? "" : ": " + inproc.error));
  if (!tcp.ok() || !inproc.ok()) return o;
  o.Check(tcp.reports.size() == kC9Rounds, std::to_string(tcp.reports.size()) + " round reports");
  o.Check(tcp.global_weights == inproc.global_weights, "every round's global weights equal inproc bit-for-bit");
  uint64_t bytes = 0;
  for (const auto& r : tcp.reports) bytes += r.bytes;
  o.detail += "; " + Fmt("%.1f MB framed", bytes / 1e6) + ", " + Fmt("%.1fs", secs);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "CKKS correctness, full-size profile", CkksCorrectness},
      {2, "aggregation equivalence", AggregationEquivalence},
      {3, "quantum engine", QuantumEngine},
      {4, "end-to-end qfl-fhe run", EndToEnd},
      {5, "noise lab", NoiseLab},
      {6, "bench sweep", BenchSweep},
      {7, "MQMoE properties", MoeProperties},
      {8, "metrics fidelity", MetricsFidelity},
      {9, "protocol/transport soak", TransportSoak},
  };
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!pick.empty() && std::find(pick.begin(), pick.end(), c.id) == pick.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail += std::string(out.detail.empty() ? "" : "; ") + "exception: " + e.what();
    }
    failed += !out.pass;
    std::printf("CRITERION %d %s: %s [%s] (%.1fs)\n", c.id, out.pass ? "PASS" : "FAIL", c.name, out.detail.c_str(),
                Seconds(t0));
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
