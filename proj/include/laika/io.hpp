// Copyright 2026 The Laika Spine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LAIKA_IO_HPP
#define LAIKA_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "laika/experiment.hpp"

namespace laika {

/// Everything needed to reproduce a run or a sweep.
struct RunConfig {
  LaikaConfig robot;
  SimParams sim;
  ProtocolOptions protocol;
  MotionSpec motion;
  std::string tension = "high";
  std::string outputDir = "laika-out";
  double comparisonTolerance = 0.15;  // rad
  std::uint64_t seed = 0;             // reserved; the pipeline is deterministic
};

/// Invalid configuration. `line` is 1-based and 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string key, std::size_t line);
  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

/// Parses a flat JSON object of SI-valued keys (see README). Unknown or
/// duplicated keys, malformed syntax and out-of-range values throw
/// ConfigError naming the key and line.
RunConfig loadConfig(const std::string& text);
RunConfig loadConfigFile(const std::filesystem::path& path);

/// Effective configuration with every key present; loadConfig accepts it.
nlohmann::ordered_json configToJson(const RunConfig& config);

/// Names of every accepted configuration key, in documentation order.
std::vector<std::string> configKeys();

/// Parses "A".."D" (the motion lifting that foot) or "<bend>/<rotation>",
/// e.g. "pull-right/ccw", on top of `base`. Throws ConfigError.
MotionSpec parseMotion(const std::string& text, const MotionSpec& base = {});

inline constexpr const char* kTraceHeader =
    "t_s,theta_rad,footA_z_m,footB_z_m,footC_z_m,footD_z_m,contactA,contactB,contactC,contactD";

std::string formatTrace(const FootLiftTrace& trace);
/// Parses the CSV written by formatTrace (columns only; spine data is not kept).
FootLiftTrace parseTrace(const std::string& text);
void writeTrace(const FootLiftTrace& trace, const std::filesystem::path& path);
FootLiftTrace readTrace(const std::filesystem::path& path);

/// Deterministic file stem for one run, e.g. "pull-right_ccw_high".
std::string runStem(const FootLiftResult& result);

/// JSON report, schema 1: effective config, runs, per-foot summaries and,
/// when given, the hardware comparison with the tension ranking.
nlohmann::ordered_json reportJson(const RunConfig& config, const std::vector<FootLiftResult>& results,
                                  const std::optional<ComparisonReport>& comparison,
                                  const std::vector<std::string>& traceFiles = {});
void writeReport(const nlohmann::ordered_json& report, const std::filesystem::path& path);

/// Rebuilds run results (without traces) from a report's "runs" array.
std::vector<FootLiftResult> resultsFromReport(const nlohmann::json& report);

void writeText(const std::string& text, const std::filesystem::path& path);
std::string readText(const std::filesystem::path& path);

}  // namespace laika

#endif  // LAIKA_IO_HPP
