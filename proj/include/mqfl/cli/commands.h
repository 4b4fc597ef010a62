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

#ifndef MQFL_CLI_COMMANDS_H_
#define MQFL_CLI_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mqfl/fl/experiment.h"
#include "mqfl/noise/bench.h"
#include "mqfl/noise/rotation.h"

namespace mqfl::cli {

inline constexpr const char* kVersion = "0.1.0";

// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string ConfigHash(const nlohmann::json& config);

// Run manifest written next to every command's outputs.
nlohmann::json BaseManifest(const std::string& command, uint64_t seed, const nlohmann::json& config);
void WriteManifest(const std::string& out_dir, const nlohmann::json& manifest);

// Machine-readable record of a failed command: error.json plus a FAILED
// marker. Returns the process exit code for the error's class.
int RecordFailure(const std::string& out_dir, const std::string& command, const std::exception& e);

// keygen: secret.key, public.key, keys.json, manifest.json.
nlohmann::json Keygen(const std::string& profile, uint64_t seed, const std::string& out_dir);

// bench-fhe: bench_sweep.csv/.dat/.gp, bench_summary.json, manifest.json.
// `grid_csv` (bit_scale,poly_degree,extrema_count) replaces the reference
// grid when non-empty.
std::vector<noise::BenchPoint> ReadBenchGrid(const std::string& path);
noise::BenchSummary BenchFhe(const std::vector<noise::BenchPoint>& grid, const noise::BenchOptions& options,
                             const std::string& out_dir);

struct NoiseLabOptions {
  noise::EulerAngles angles{0.3, 0.5, 0.2};
  noise::Vec3 vector{1.0, 0.4, 0.3};
  noise::Vec3 error_vector{1.02, 0.37, 0.33};
  double periods = 4.0;
  size_t samples_per_period = 128;
};
struct NoiseLabSummary {
  double period = 0.0;  // closed form
  std::optional<double> estimated_az;
  std::optional<double> estimated_el;
  double return_error = 0.0;         // max |SP(period) - I|
  double orthogonality_error = 0.0;  // max over the grid of |SP SP^T - I|
};
NoiseLabSummary NoiseLab(const NoiseLabOptions& options, const std::string& out_dir);

// train / simulate. Writes rounds.csv (+ .dat/.gp), per-round weight
// checkpoints, predictions/roc/confusion per head, metrics.json,
// config.json and manifest.json. With `resume`, continues after the last
// checkpoint recorded in an existing manifest for the same config. Stage
// failures leave partial outputs, a FAILED marker and error.json.
fl::ExperimentResult RunExperimentCommand(const std::string& command, const fl::ExperimentConfig& config,
                                          const std::string& out_dir, bool resume = false,
                                          const fl::RunHooks& extra = {});

// metrics: reads label,prob_0..prob_{C-1} rows; writes roc_<modality>.csv,
// confusion_<modality>.csv, metrics.json and manifest.json.
nlohmann::json Metrics(const std::string& predictions_csv, const std::string& modality,
                       const std::string& out_dir);

// Shared by `train`, `simulate` and `metrics`: per-head ROC and confusion
// artifacts. Returns {accuracy, micro_auc, macro_auc, per_class_auc}.
nlohmann::json WriteHeadMetrics(const std::string& out_dir, const std::string& modality,
                                const std::vector<std::vector<double>>& probs, const std::vector<int>& labels);

}  // namespace mqfl::cli

#endif  // MQFL_CLI_COMMANDS_H_
