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

#include "mqfl/cli/commands.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mqfl/ckks/context.h"
#include "mqfl/ckks/keys.h"
#include "mqfl/ckks/serialization.h"
#include "mqfl/data/metrics.h"
#include "mqfl/errors.h"
#include "mqfl/nn/weights.h"
#include "mqfl/util/file.h"

namespace mqfl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string Join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void EnsureDir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("output directory is required", "out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir);
}

void WriteJson(const std::string& path, const json& j) { util::WriteFileText(path, j.dump(2) + "\n"); }

std::vector<std::string> Split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

// Whitespace-separated copy with a commented header, for gnuplot.
std::string CsvToDat(const std::string& csv) {
  std::string out = "# ";
  for (char c : csv) out += (c == ',') ? ' ' : c;
  return out;
}

void WriteGnuplot(const std::string& path, const std::string& body) {
  util::WriteFileText(path, "set terminal pngcairo size 900,600\n" + body);
}

std::string ErrorType(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const InputError*>(&e)) return "input";
  if (dynamic_cast<const ProtocolError*>(&e)) return "protocol";
  if (dynamic_cast<const TransportError*>(&e)) return "transport";
  if (dynamic_cast<const IntegrityError*>(&e)) return "integrity";
  if (dynamic_cast<const ParameterError*>(&e)) return "parameter";
  if (dynamic_cast<const UndefinedResult*>(&e)) return "undefined";
  if (dynamic_cast<const Error*>(&e)) return "runtime";
  return "internal";
}

}  // namespace

std::string ConfigHash(const json& config) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json BaseManifest(const std::string& command, uint64_t seed, const json& config) {
  return json{{"tool", "mqfl"},          {"version", kVersion}, {"command", command},
              {"seed", seed},            {"config", config},    {"config_hash", ConfigHash(config)},
              {"status", "running"},     {"outputs", json::array()}};
}

void WriteManifest(const std::string& out_dir, const json& manifest) {
  WriteJson(Join(out_dir, "manifest.json"), manifest);
}

int RecordFailure(const std::string& out_dir, const std::string& command, const std::exception& e) {
  const std::string type = ErrorType(e);
  json record{{"ok", false}, {"command", command}, {"type", type}, {"message", e.what()}};
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e); ce && !ce->field().empty()) {
    record["field"] = ce->field();
  }
  std::fprintf(stderr, "%s\n", record.dump().c_str());
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec) {
      try {
        WriteJson(Join(out_dir, "error.json"), record);
        util::WriteFileText(Join(out_dir, "FAILED"), std::string(e.what()) + "\n");
      } catch (const std::exception&) {
        // Nothing else to do; the record already went to stderr.
      }
    }
  }
  if (type == "config") return 2;
  if (type == "input" || type == "parse") return 3;
  return 4;
}

json Keygen(const std::string& profile, uint64_t seed, const std::string& out_dir) {
  EnsureDir(out_dir);
  auto context = ckks::Context::Create(ckks::CkksParams::FromProfile(profile));
  ckks::KeyGenerator gen(context, seed);
  auto pk = gen.CreatePublicKey();
  util::WriteFileBytes(Join(out_dir, "secret.key"), ckks::SerializeSecretKey(*context, gen.secret_key()));
  util::WriteFileBytes(Join(out_dir, "public.key"), ckks::SerializePublicKey(*context, pk));
  json primes = json::array();
  for (const auto& q : context->key_chain()) primes.push_back(q->value());
  char fp[17];
  std::snprintf(fp, sizeof(fp), "%016llx", static_cast<unsigned long long>(context->fingerprint()));
  json info{{"profile", profile},
            {"poly_degree", context->degree()},
            {"primes", primes},
            {"log2_scale", std::log2(context->default_scale())},
            {"fingerprint", fp}};
  WriteJson(Join(out_dir, "keys.json"), info);
  json manifest = BaseManifest("keygen", seed, json{{"profile", profile}});
  manifest["status"] = "ok";
  manifest["outputs"] = {"secret.key", "public.key", "keys.json"};
  WriteManifest(out_dir, manifest);
  return info;
}

std::vector<noise::BenchPoint> ReadBenchGrid(const std::string& path) {
  std::istringstream in(util::ReadFileText(path));
  std::string line;
  std::vector<noise::BenchPoint> grid;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("bit_scale", 0) == 0) continue;
    }
    auto cells = Split(line, ',');
    if (cells.size() < 2) throw InputError("grid row needs bit_scale,poly_degree[,extrema_count]: " + line);
    try {
      noise::BenchPoint p;
      p.bit_scale = std::stoi(cells[0]);
      p.poly_degree = std::stoul(cells[1]);
      p.extrema_count = cells.size() > 2 ? std::stoi(cells[2]) : 1;
      grid.push_back(p);
    } catch (const std::logic_error&) {
      throw InputError("unreadable grid row: " + line);
    }
  }
  if (grid.empty()) throw InputError("empty bench grid " + path);
  return grid;
}

noise::BenchSummary BenchFhe(const std::vector<noise::BenchPoint>& grid, const noise::BenchOptions& options,
                             const std::string& out_dir) {
  EnsureDir(out_dir);
  const auto rows = noise::BenchSweep(grid, options);
  const std::string csv = noise::BenchCsv(rows);
  util::WriteFileText(Join(out_dir, "bench_sweep.csv"), csv);
  // The .dat companion keeps numeric columns only (the error text can hold spaces).
  std::string dat = "# bit_scale poly_degree extrema_count encrypted_param_count seconds serialized_bytes "
                    "encrypt_seconds serialize_seconds ok\n";
  for (const auto& r : rows) {
    dat += std::to_string(r.point.bit_scale) + " " + std::to_string(r.point.poly_degree) + " " +
           std::to_string(r.point.extrema_count) + " " + std::to_string(r.encrypted_param_count) + " " +
           Num(r.seconds) + " " + std::to_string(r.serialized_bytes) + " " + Num(r.encrypt_seconds) + " " +
           Num(r.serialize_seconds) + " " + (r.ok ? "1" : "0") + "\n";
  }
  util::WriteFileText(Join(out_dir, "bench_sweep.dat"), dat);
  WriteGnuplot(Join(out_dir, "bench_sweep.gp"),
               "set output 'bench_sweep.png'\n"
               "set multiplot layout 1,2\n"
               "set logscale x 2\nset xlabel 'poly degree'\n"
               "set ylabel 'bytes per ciphertext'\n"
               "plot 'bench_sweep.dat' using ($9==1?$2:1/0):6 with points pt 7 title 'serialized size'\n"
               "set ylabel 'seconds per ciphertext'\n"
               "plot 'bench_sweep.dat' using ($9==1?$2:1/0):7 with points pt 7 title 'encrypt', \\\n"
               "     '' using ($9==1?$2:1/0):8 with points pt 5 title 'serialize'\n"
               "unset multiplot\n");
  const auto s = noise::Summarize(rows);
  json summary{{"smaller_scale_encrypts_more", s.smaller_scale_encrypts_more},
               {"bytes_r2", s.bytes_r2},
               {"largest_degree", s.largest_degree},
               {"largest_encrypt_seconds", s.largest_encrypt_seconds},
               {"largest_serialize_seconds", s.largest_serialize_seconds},
               {"serialization_dominates", s.serialization_dominates}};
  WriteJson(Join(out_dir, "bench_summary.json"), summary);
  json grid_json = json::array();
  for (const auto& p : grid) grid_json.push_back({p.bit_scale, p.poly_degree, p.extrema_count});
  json manifest = BaseManifest("bench-fhe", options.seed,
                               json{{"grid", grid_json},
                                    {"budget_bits", options.budget_bits},
                                    {"sample_ciphertexts", options.sample_ciphertexts},
                                    {"compress", options.compress}});
  manifest["status"] = "ok";
  manifest["outputs"] = {"bench_sweep.csv", "bench_sweep.dat", "bench_sweep.gp", "bench_summary.json"};
  WriteManifest(out_dir, manifest);
  return s;
}

NoiseLabSummary NoiseLab(const NoiseLabOptions& options, const std::string& out_dir) {
  if (!(options.periods > 0.0)) throw ConfigError("periods must be positive", "periods");
  if (options.samples_per_period < 4) throw ConfigError("need at least 4 samples per period", "samples_per_period");
  EnsureDir(out_dir);
  NoiseLabSummary s;
  s.period = noise::FundamentalPeriod(options.angles);
  const auto j = noise::BuildGenerator(options.angles);
  const size_t count = static_cast<size_t>(std::llround(options.periods * options.samples_per_period)) + 1;
  const auto grid = noise::UniformGrid(0.0, options.periods * s.period, count);
  const double dt = s.period / static_cast<double>(options.samples_per_period);
  const auto trace = noise::AngularErrors(options.vector, options.error_vector, grid, j);
  s.return_error = noise::MaxAbsDiff(noise::ExpGenerator(j, s.period), noise::Identity3());
  for (double t : grid) {
    const auto sp = noise::ExpGenerator(j, t);
    s.orthogonality_error =
        std::max(s.orthogonality_error, noise::MaxAbsDiff(noise::Multiply(sp, noise::Transpose(sp)), noise::Identity3()));
  }
  s.estimated_az = noise::EstimatePeriod(trace.delta_az, dt);
  s.estimated_el = noise::EstimatePeriod(trace.delta_el, dt);

  std::string csv = "t,delta_az,delta_el\n";
  for (size_t i = 0; i < trace.t.size(); ++i) {
    csv += Num(trace.t[i]) + "," + Num(trace.delta_az[i]) + "," + Num(trace.delta_el[i]) + "\n";
  }
  util::WriteFileText(Join(out_dir, "noise_trace.csv"), csv);
  util::WriteFileText(Join(out_dir, "noise_trace.dat"), CsvToDat(csv));
  WriteGnuplot(Join(out_dir, "noise_trace.gp"),
               "set output 'noise_trace.png'\n"
               "set xlabel 't'\nset ylabel 'angular error (rad)'\n"
               "plot 'noise_trace.dat' using 1:2 with lines title 'azimuth', \\\n"
               "     '' using 1:3 with lines title 'elevation'\n");
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  auto rel = [&](const std::optional<double>& v) {
    return v ? json(std::abs(*v - s.period) / s.period) : json(nullptr);
  };
  json summary{{"period", s.period},
               {"estimated_period_az", opt(s.estimated_az)},
               {"estimated_period_el", opt(s.estimated_el)},
               {"relative_error_az", rel(s.estimated_az)},
               {"relative_error_el", rel(s.estimated_el)},
               {"return_error", s.return_error},
               {"orthogonality_error", s.orthogonality_error}};
  WriteJson(Join(out_dir, "noise_summary.json"), summary);
  const auto& a = options.angles;
  json params{{"angles", {a.phi, a.theta, a.psi}},
              {"vector", options.vector},
              {"error_vector", options.error_vector},
              {"periods", options.periods},
              {"samples_per_period", options.samples_per_period}};
  json manifest = BaseManifest("noise-lab", 0, params);
  manifest["status"] = "ok";
  manifest["outputs"] = {"noise_trace.csv", "noise_trace.dat", "noise_trace.gp", "noise_summary.json"};
  WriteManifest(out_dir, manifest);
  return s;
}

json WriteHeadMetrics(const std::string& out_dir, const std::string& modality,
                      const std::vector<std::vector<double>>& probs, const std::vector<int>& labels) {
  if (probs.empty() || probs.size() != labels.size()) throw InputError("no predictions for " + modality);
  const size_t classes = probs[0].size();
  std::vector<int> predicted(probs.size());
  size_t correct = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (probs[i].size() != classes) throw InputError("ragged probability rows for " + modality);
    if (labels[i] < 0 || static_cast<size_t>(labels[i]) >= classes) {
      throw InputError("label out of range for " + modality);
    }
    predicted[i] = static_cast<int>(std::max_element(probs[i].begin(), probs[i].end()) - probs[i].begin());
    correct += predicted[i] == labels[i];
  }

  std::string roc = "curve,fpr,tpr,threshold\n";
  std::string dat = "# fpr tpr (micro)\n";
  json result{{"samples", probs.size()}, {"accuracy", static_cast<double>(correct) / probs.size()}};
  bool any_curve = false;
  try {
    const auto auc = data::MicroMacroAuc(probs, labels);
    for (const auto& p : data::MicroRocCurve(probs, labels)) {
      roc += "micro," + Num(p.fpr) + "," + Num(p.tpr) + "," + Num(p.threshold) + "\n";
      dat += Num(p.fpr) + " " + Num(p.tpr) + "\n";
    }
    any_curve = true;
    json per = json::array();
    for (double v : auc.per_class) per.push_back(std::isnan(v) ? json(nullptr) : json(v));
    result["micro_auc"] = auc.micro;
    result["macro_auc"] = std::isnan(auc.macro) ? json(nullptr) : json(auc.macro);
    result["per_class_auc"] = per;
  } catch (const UndefinedResult& e) {
    result["micro_auc"] = nullptr;
    result["macro_auc"] = nullptr;
    result["auc_note"] = e.what();
  }
  for (size_t c = 0; c < classes && any_curve; ++c) {
    std::vector<double> scores(probs.size());
    std::vector<bool> positive(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) {
      scores[i] = probs[i][c];
      positive[i] = labels[i] == static_cast<int>(c);
    }
    try {
      for (const auto& p : data::RocCurve(scores, positive)) {
        roc += "class_" + std::to_string(c) + "," + Num(p.fpr) + "," + Num(p.tpr) + "," + Num(p.threshold) + "\n";
      }
    } catch (const UndefinedResult&) {
      // Class absent (or universal) in this split: no curve.
    }
  }
  util::WriteFileText(Join(out_dir, "roc_" + modality + ".csv"), roc);
  util::WriteFileText(Join(out_dir, "roc_" + modality + ".dat"), dat);
  WriteGnuplot(Join(out_dir, "roc_" + modality + ".gp"),
               "set output 'roc_" + modality + ".png'\n"
               "set xlabel 'false positive rate'\nset ylabel 'true positive rate'\n"
               "set size square\nset xrange [0:1]\nset yrange [0:1]\n"
               "plot 'roc_" + modality + ".dat' using 1:2 with lines title 'micro average', x with lines dt 2 notitle\n");

  const auto norm = data::ConfusionMatrix(predicted, labels, classes, true);
  const auto counts = data::ConfusionMatrix(predicted, labels, classes, false);
  std::string cm = "true_label";
  for (size_t c = 0; c < classes; ++c) cm += ",pred_" + std::to_string(c);
  cm += "\n";
  for (size_t r = 0; r < classes; ++r) {
    cm += std::to_string(r);
    for (double v : norm[r]) cm += "," + Num(v);
    cm += "\n";
  }
  util::WriteFileText(Join(out_dir, "confusion_" + modality + ".csv"), cm);
  result["confusion_counts"] = counts;
  return result;
}

json Metrics(const std::string& predictions_csv, const std::string& modality, const std::string& out_dir) {
  std::istringstream in(util::ReadFileText(predictions_csv));
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty predictions file " + predictions_csv);
  const auto header = Split(line, ',');
  int label_col = -1;
  std::vector<size_t> prob_cols;
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "label") label_col = static_cast<int>(i);
    if (header[i].rfind("prob_", 0) == 0) prob_cols.push_back(i);
  }
  if (label_col < 0 || prob_cols.size() < 2) {
    throw InputError("predictions need a 'label' column and at least two 'prob_<k>' columns");
  }
  std::vector<std::vector<double>> probs;
  std::vector<int> labels;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = Split(line, ',');
    if (cells.size() != header.size()) throw InputError("row " + std::to_string(row) + " has the wrong width");
    try {
      labels.push_back(std::stoi(cells[label_col]));
      std::vector<double> p;
      for (size_t c : prob_cols) p.push_back(std::stod(cells[c]));
      probs.push_back(std::move(p));
    } catch (const std::logic_error&) {
      throw InputError("row " + std::to_string(row) + " is not numeric");
    }
  }
  EnsureDir(out_dir);
  json m = WriteHeadMetrics(out_dir, modality, probs, labels);
  json all{{modality, m}};
  WriteJson(Join(out_dir, "metrics.json"), all);
  json manifest = BaseManifest("metrics", 0, json{{"predictions", predictions_csv}, {"modality", modality}});
  manifest["status"] = "ok";
  manifest["outputs"] = {"roc_" + modality + ".csv", "roc_" + modality + ".dat", "roc_" + modality + ".gp",
                         "confusion_" + modality + ".csv", "metrics.json"};
  WriteManifest(out_dir, manifest);
  return all;
}

namespace {

std::string CheckpointName(uint32_t round) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "checkpoints/round_%04u.mqw", round);
  return buf;
}

// Rows of an earlier rounds.csv that precede `first_round`, header excluded.
std::string KeptRows(const std::string& path, uint32_t first_round) {
  if (!fs::exists(path)) return "";
  std::istringstream in(util::ReadFileText(path));
  std::string line, kept;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    if (std::stoul(line.substr(0, comma)) < first_round) kept += line + "\n";
  }
  return kept;
}

std::string RoundsDat(const fl::ExperimentResult& r) {
  std::string dat = "# round test_loss";
  for (const auto& h : r.head_names) dat += " accuracy_" + h;
  dat += " seconds bytes\n";
  for (const auto& rep : r.reports) {
    dat += std::to_string(rep.round) + " " + Num(rep.test_loss);
    for (double a : rep.test_accuracy) dat += " " + Num(a);
    dat += " " + Num(rep.seconds) + " " + std::to_string(rep.bytes) + "\n";
  }
  return dat;
}

}  // namespace

fl::ExperimentResult RunExperimentCommand(const std::string& command, const fl::ExperimentConfig& config,
                                          const std::string& out_dir, bool resume, const fl::RunHooks& extra) {
  config.Validate();
  EnsureDir(out_dir);
  const json config_json = config.ToJson();
  fs::remove(Join(out_dir, "FAILED"));
  fs::remove(Join(out_dir, "error.json"));

  fl::RunHooks hooks = extra;
  json manifest = BaseManifest(command, config.seed, config_json);
  manifest["mode"] = fl::ModeName(config.mode);
  manifest["checkpoints"] = json::array();
  std::string kept_rows;
  if (resume && fs::exists(Join(out_dir, "manifest.json"))) {
    const json old = json::parse(util::ReadFileText(Join(out_dir, "manifest.json")));
    if (old.value("config_hash", "") != manifest["config_hash"]) {
      throw ConfigError("cannot resume: the output directory holds a run of a different config", "config");
    }
    if (old.contains("last_round") && !old["checkpoints"].empty()) {
      const uint32_t last = old["last_round"].get<uint32_t>();
      nn::CheckpointInfo info;
      auto w = nn::LoadCheckpoint(Join(out_dir, old["checkpoints"].back().get<std::string>()), &info);
      if (info.round != static_cast<int>(last) || info.seed != config.seed) {
        throw InputError("checkpoint does not match the manifest");
      }
      hooks.first_round = last + 1;
      hooks.initial_weights = std::move(w.values);
      manifest["checkpoints"] = old["checkpoints"];
      manifest["last_round"] = last;
      manifest["resumed_from"] = last;
      kept_rows = KeptRows(Join(out_dir, "rounds.csv"), hooks.first_round);
    }
  }
  WriteJson(Join(out_dir, "config.json"), config_json);
  WriteManifest(out_dir, manifest);

  fs::create_directories(Join(out_dir, "checkpoints"));
  nn::FlatWeights layout;
  {
    auto model = fl::BuildModel(config, fl::PrepareData(config));
    layout = nn::FlattenWeights(*model);
  }
  hooks.on_report = [&, user = extra.on_report](const fl::RoundReport& rep, const std::vector<double>& w) {
    nn::FlatWeights fw{w, layout.manifest};
    const std::string name = CheckpointName(rep.round);
    nn::SaveCheckpoint(Join(out_dir, name), fw, {config.seed, static_cast<int>(rep.round)});
    manifest["checkpoints"].push_back(name);
    manifest["last_round"] = rep.round;
    WriteManifest(out_dir, manifest);
    if (user) user(rep, w);
  };

  fl::ExperimentResult result = fl::RunExperiment(config, hooks);

  std::string csv = fl::RoundsCsv(result);
  if (!kept_rows.empty()) {
    const auto nl = csv.find('\n');
    csv = csv.substr(0, nl + 1) + kept_rows + csv.substr(nl + 1);
  }
  util::WriteFileText(Join(out_dir, "rounds.csv"), csv);
  util::WriteFileText(Join(out_dir, "rounds.dat"), RoundsDat(result));
  std::string plot = "set output 'rounds.png'\nset xlabel 'round'\nset ylabel 'test accuracy'\nplot ";
  for (size_t h = 0; h < result.head_names.size(); ++h) {
    plot += (h ? ", \\\n     " : "") + std::string("'rounds.dat' using 1:") + std::to_string(3 + h) +
            " with linespoints title '" + result.head_names[h] + "'";
  }
  WriteGnuplot(Join(out_dir, "rounds.gp"), plot + "\n");
  json outputs = {"config.json", "rounds.csv", "rounds.dat", "rounds.gp"};

  const auto& ev = result.final_eval;
  if (result.ok() && !ev.probs.empty()) {
    json metrics;
    for (size_t h = 0; h < result.head_names.size() && h < ev.probs.size(); ++h) {
      const std::string& m = result.head_names[h];
      std::string pred = "label,prediction";
      const size_t classes = ev.probs[h].empty() ? 0 : ev.probs[h][0].size();
      for (size_t c = 0; c < classes; ++c) pred += ",prob_" + std::to_string(c);
      pred += "\n";
      for (size_t i = 0; i < ev.probs[h].size(); ++i) {
        pred += std::to_string(ev.labels[h][i]) + "," + std::to_string(ev.predictions[h][i]);
        for (double p : ev.probs[h][i]) pred += "," + Num(p);
        pred += "\n";
      }
      util::WriteFileText(Join(out_dir, "predictions_" + m + ".csv"), pred);
      metrics[m] = WriteHeadMetrics(out_dir, m, ev.probs[h], ev.labels[h]);
      for (const char* f : {"predictions_", "roc_", "confusion_"}) outputs.push_back(f + m + ".csv");
      outputs.push_back("roc_" + m + ".dat");
      outputs.push_back("roc_" + m + ".gp");
    }
    metrics["test_loss"] = ev.loss;
    WriteJson(Join(out_dir, "metrics.json"), metrics);
    outputs.push_back("metrics.json");
  }
  manifest["outputs"] = outputs;
  manifest["pqc_calls"] = result.pqc_calls;
  if (result.ok()) {
    manifest["status"] = "ok";
  } else {
    manifest["status"] = "failed";
    manifest["failed_round"] = result.failed_round;
    json record{{"ok", false},
                {"command", command},
                {"type", "run"},
                {"message", result.error},
                {"failed_round", result.failed_round}};
    WriteJson(Join(out_dir, "error.json"), record);
    util::WriteFileText(Join(out_dir, "FAILED"), result.error + "\n");
  }
  WriteManifest(out_dir, manifest);
  return result;
}

}  // namespace mqfl::cli
