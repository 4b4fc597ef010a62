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

// mqfl: operator surface over the library. Every subcommand writes its
// artifacts and a manifest.json under --out; failures exit nonzero with a
// JSON error record on stderr (and error.json + FAILED in --out).

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mqfl/cli/commands.h"
#include "mqfl/errors.h"
#include "mqfl/fl/experiment.h"
#include "mqfl/transport/channel.h"
#include "mqfl/util/file.h"

namespace {

using mqfl::fl::ExperimentConfig;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
  std::string transport;
  std::string mode;
  std::string profile;
  std::string spawn;
  bool resume = false;
};

ExperimentConfig LoadConfig(const Overrides& o) {
  if (o.config.empty()) throw mqfl::ConfigError("--config is required", "config");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(mqfl::util::ReadFileText(o.config));
  } catch (const nlohmann::json::parse_error& e) {
    throw mqfl::ConfigError(std::string("config is not valid JSON: ") + e.what(), "config");
  }
  if (!j.is_object()) throw mqfl::ConfigError("config must be a JSON object", "config");
  if (o.seed) j["seed"] = *o.seed;
  if (!o.mode.empty()) j["mode"] = o.mode;
  if (!o.transport.empty()) j["transport"] = o.transport;
  if (!o.profile.empty()) j["ckks_profile"] = o.profile;
  if (!o.spawn.empty()) j["spawn"] = o.spawn;
  return ExperimentConfig::FromJson(j);
}

// Clients as child processes: re-exec this binary's hidden `client`
// subcommand against the config the run wrote to its output directory.
mqfl::fl::RunHooks ProcessHooks(const std::string& out_dir) {
  mqfl::fl::RunHooks hooks;
  const std::string config_path = out_dir + "/config.json";
  hooks.launch_client = [config_path](uint32_t id, uint16_t port) -> std::function<void()> {
    const std::string id_s = std::to_string(id), port_s = std::to_string(port);
    const pid_t pid = fork();
    if (pid < 0) throw mqfl::Error("fork failed");
    if (pid == 0) {
      execl("/proc/self/exe", "mqfl", "client", "--config", config_path.c_str(), "--id", id_s.c_str(),
            "--port", port_s.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    return [pid, id] {
      int status = 0;
      waitpid(pid, &status, 0);
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        std::fprintf(stderr, "client %u exited with status %d\n", id, status);
      }
    };
  };
  return hooks;
}

int RunTraining(const std::string& command, const Overrides& o) {
  ExperimentConfig config = LoadConfig(o);
  if (command == "train" && mqfl::fl::IsFederated(config.mode)) {
    throw mqfl::ConfigError("train runs the centralized modes; use simulate for " +
                                mqfl::fl::ModeName(config.mode), "mode");
  }
  mqfl::fl::RunHooks hooks;
  if (config.spawn == "processes") hooks = ProcessHooks(o.out);
  auto result = mqfl::cli::RunExperimentCommand(command, config, o.out, o.resume, hooks);
  for (const auto& r : result.reports) {
    std::printf("round %u  test_loss %.6f ", r.round, r.test_loss);
    for (size_t h = 0; h < r.test_accuracy.size(); ++h) {
      std::printf(" acc_%s %.4f", result.head_names[h].c_str(), r.test_accuracy[h]);
    }
    std::printf("  %.2fs\n", r.seconds);
  }
  if (!result.ok()) {
    std::fprintf(stderr, "%s\n",
                 nlohmann::json{{"ok", false}, {"command", command}, {"type", "run"}, {"message", result.error},
                                {"failed_round", result.failed_round}}
                     .dump()
                     .c_str());
    return 4;
  }
  return 0;
}

template <size_t N>
std::array<double, N> ParseTriple(const std::vector<double>& v, const char* name) {
  if (v.size() != N) throw mqfl::ConfigError(std::string(name) + " needs " + std::to_string(N) + " values", name);
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal quantum federated learning with CKKS-encrypted aggregation"};
  app.require_subcommand(1);
  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory")->required();
  };
  auto add_run = [&](CLI::App* sub) {
    add_common(sub);
    sub->add_option("--config", o.config, "Experiment config (JSON)")->required();
    sub->add_option("--seed", o.seed, "Overrides the config seed");
    sub->add_option("--mode", o.mode, "Overrides the config mode")
        ->check(CLI::IsMember({"classical-centralized", "quantum-centralized", "classical-fl", "qfl", "fl-fhe",
                               "qfl-fhe"}));
    sub->add_option("--transport", o.transport, "inproc or tcp")->check(CLI::IsMember({"inproc", "tcp"}));
    sub->add_option("--profile", o.profile, "CKKS profile")->check(CLI::IsMember({"paper", "toy"}));
    sub->add_option("--spawn", o.spawn, "threads or processes (tcp only)")
        ->check(CLI::IsMember({"threads", "processes"}));
    sub->add_flag("--resume", o.resume, "Continue after the last checkpoint in --out");
  };

  auto* keygen = app.add_subcommand("keygen", "Generate a CKKS key pair");
  std::string profile = "paper";
  uint64_t key_seed = 0;
  add_common(keygen);
  keygen->add_option("--profile", profile, "paper or toy")->check(CLI::IsMember({"paper", "toy"}));
  keygen->add_option("--seed", key_seed, "Key seed");

  auto* bench = app.add_subcommand("bench-fhe", "Bit-scale / degree sweep of encryption and serialization");
  mqfl::noise::BenchOptions bench_opt;
  std::string grid_csv;
  bool no_compress = false;
  add_common(bench);
  bench->add_option("--grid", grid_csv, "CSV of bit_scale,poly_degree,extrema_count (default: reference grid)");
  bench->add_option("--budget-bits", bench_opt.budget_bits, "Ciphertext storage budget in bits");
  bench->add_option("--samples", bench_opt.sample_ciphertexts, "Ciphertexts timed per point");
  bench->add_option("--seed", bench_opt.seed, "Seed");
  bench->add_flag("--no-compress", no_compress, "Serialize without deflate");

  auto* noise = app.add_subcommand("noise-lab", "Angular error of rotated vectors under Euler-angle rotation");
  mqfl::cli::NoiseLabOptions noise_opt;
  std::vector<double> angles, vec, err_vec;
  add_common(noise);
  noise->add_option("--angles", angles, "phi,theta,psi")->delimiter(',');
  noise->add_option("--vector", vec, "x,y,z")->delimiter(',');
  noise->add_option("--error-vector", err_vec, "x,y,z")->delimiter(',');
  noise->add_option("--periods", noise_opt.periods, "Number of periods sampled");
  noise->add_option("--samples-per-period", noise_opt.samples_per_period, "Grid density");

  auto* train = app.add_subcommand("train", "Centralized training in one mode");
  add_run(train);
  auto* simulate = app.add_subcommand("simulate", "Federated simulation");
  add_run(simulate);

  auto* metrics = app.add_subcommand("metrics", "ROC/AUC and confusion matrices from a predictions CSV");
  std::string predictions, modality;
  add_common(metrics);
  metrics->add_option("--predictions", predictions, "CSV with label,prob_0,...")->required();
  metrics->add_option("--modality", modality, "Name used in output files (default: from the file name)");

  auto* client = app.add_subcommand("client", "Internal: one federated client over TCP");
  client->group("");  // hidden
  uint32_t client_id = 0;
  uint16_t port = 0;
  client->add_option("--config", o.config)->required();
  client->add_option("--id", client_id)->required();
  client->add_option("--port", port)->required();

  CLI11_PARSE(app, argc, argv);

  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "keygen") {
      auto info = mqfl::cli::Keygen(profile, key_seed, o.out);
      std::printf("%s\n", info.dump(2).c_str());
    } else if (command == "bench-fhe") {
      bench_opt.compress = !no_compress;
      auto grid = grid_csv.empty() ? mqfl::noise::ReferenceGrid() : mqfl::cli::ReadBenchGrid(grid_csv);
      auto s = mqfl::cli::BenchFhe(grid, bench_opt, o.out);
      std::printf("scale trend %s  bytes R^2 %.6f  serialization dominates at n=%zu: %s\n",
                  s.smaller_scale_encrypts_more ? "holds" : "broken", s.bytes_r2, s.largest_degree,
                  s.serialization_dominates ? "yes" : "no");
    } else if (command == "noise-lab") {
      if (!angles.empty()) {
        auto a = ParseTriple<3>(angles, "angles");
        noise_opt.angles = {a[0], a[1], a[2]};
      }
      if (!vec.empty()) noise_opt.vector = ParseTriple<3>(vec, "vector");
      if (!err_vec.empty()) noise_opt.error_vector = ParseTriple<3>(err_vec, "error_vector");
      auto s = mqfl::cli::NoiseLab(noise_opt, o.out);
      std::printf("period %.9g  estimated az %s  el %s\n", s.period,
                  s.estimated_az ? std::to_string(*s.estimated_az).c_str() : "none",
                  s.estimated_el ? std::to_string(*s.estimated_el).c_str() : "none");
    } else if (command == "train" || command == "simulate") {
      return RunTraining(command, o);
    } else if (command == "metrics") {
      if (modality.empty()) {
        modality = std::filesystem::path(predictions).stem().string();
        if (modality.rfind("predictions_", 0) == 0) modality = modality.substr(12);
      }
      auto m = mqfl::cli::Metrics(predictions, modality, o.out);
      std::printf("%s\n", m.dump(2).c_str());
    } else if (command == "client") {
      auto config = ExperimentConfig::FromJson(nlohmann::json::parse(mqfl::util::ReadFileText(o.config)));
      const mqfl::transport::Millis timeout{config.timeout_ms};
      auto ep = mqfl::transport::TcpDial("127.0.0.1", port, timeout);
      ep->set_timeout(timeout);
      mqfl::fl::RunClient(config, client_id, *ep);
    }
  } catch (const std::exception& e) {
    // A client child must not write into the run directory.
    return mqfl::cli::RecordFailure(command == "client" ? "" : o.out, command, e);
  }
  return 0;
}
