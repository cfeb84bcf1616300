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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "laika/io.hpp"

namespace fs = std::filesystem;
using namespace laika;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunError = 1;
constexpr int kExitConfigError = 2;

struct Options {
  std::string config;
  std::string motion;
  std::string tension;
  std::string out;
  std::string results;
  bool fullTrace = false;
  std::optional<double> dt;
};

void addCommon(CLI::App* cmd, Options& o, bool withMotion) {
  cmd->add_option("--config", o.config, "JSON configuration file");
  if (withMotion) {
    cmd->add_option("--motion", o.motion, "target foot A-D or <bend>/<rotation>, e.g. pull-right/ccw");
    cmd->add_option("--tension", o.tension, "low, medlow, mean, medhigh or high");
  }
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_flag("--full-trace", o.fullTrace, "keep rotating to the maximum angle after lift-off");
  cmd->add_option("--dt", o.dt, "integration step in seconds");
}

RunConfig effectiveConfig(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : loadConfigFile(o.config);
  if (o.dt) c.sim.dt = *o.dt;
  if (!o.tension.empty()) c.tension = o.tension;
  if (!o.out.empty()) c.outputDir = o.out;
  if (o.fullTrace) c.protocol.fullTrace = true;
  try {
    c.sim.validate();
    tensionPointByName(c.tension);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("command line: ") + e.what(), "", 0);
  }
  if (!o.motion.empty()) c.motion = parseMotion(o.motion, c.motion);
  return c;
}

std::string describe(const FootLiftResult& r) {
  char angle[32] = "-";
  if (r.liftOffAngle) std::snprintf(angle, sizeof angle, "%.4f", *r.liftOffAngle);
  std::string line = to_string(r.motion.bend) + "/" + to_string(r.motion.rotation) + " " +
                     r.tension.name + ": ";
  if (r.error) return line + "error: " + *r.error;
  line += "lifted " + (r.liftedFoot ? to_string(*r.liftedFoot) : std::string("none"));
  line += " at " + std::string(angle) + " rad (expected " + to_string(expectedFoot(r.motion)) + ")";
  return line;
}

std::vector<std::string> writeTraces(const fs::path& dir, const std::vector<FootLiftResult>& results) {
  std::vector<std::string> files;
  for (const auto& r : results) {
    if (r.error) {
      files.emplace_back();
      continue;
    }
    const std::string name = runStem(r) + ".csv";
    writeTrace(r.trace, dir / name);
    files.push_back(name);
  }
  return files;
}

void printComparison(const ComparisonReport& cmp) {
  for (const FootComparison& fc : cmp.feet) {
    std::printf("foot %s: hardware [%.2f, %.2f], best %s %.4f rad, distance %.4f, %s\n",
                to_string(fc.foot).c_str(), fc.hardware.min, fc.hardware.max, fc.bestTension.c_str(),
                fc.bestAngle, fc.distance, fc.pass ? "pass" : "fail");
  }
  std::printf("tension ranking:");
  for (const TensionRank& r : cmp.ranking) {
    std::printf(" %s(%.4f%s)", r.tension.c_str(), r.totalDistance,
                r.missingFeet ? (", missing " + std::to_string(r.missingFeet)).c_str() : "");
  }
  std::printf("\n");
}

bool anyError(const std::vector<FootLiftResult>& results) {
  for (const auto& r : results) {
    if (r.error) return true;
  }
  return false;
}

int cmdRun(const RunConfig& c) {
  const fs::path dir = c.outputDir;
  fs::create_directories(dir);
  std::vector<FootLiftResult> results{
      runFootLiftTest(c.robot, c.motion, tensionPointByName(c.tension), c.sim, c.protocol)};
  const auto files = writeTraces(dir, results);
  writeReport(reportJson(c, results, std::nullopt, files), dir / "report.json");
  std::cout << describe(results.front()) << "\n";
  return kExitOk;
}

std::vector<FootLiftResult> sweepAndWrite(const RunConfig& c, std::vector<std::string>& files) {
  auto results = calibrationSweep(c.robot, c.sim, c.protocol, c.motion);
  files = writeTraces(c.outputDir, results);
  for (const auto& r : results) std::cout << describe(r) << "\n";
  return results;
}

int cmdSweep(const RunConfig& c) {
  fs::create_directories(c.outputDir);
  std::vector<std::string> files;
  const auto results = sweepAndWrite(c, files);
  writeReport(reportJson(c, results, std::nullopt, files), fs::path(c.outputDir) / "report.json");
  return anyError(results) ? kExitRunError : kExitOk;
}

int cmdCompare(const RunConfig& c, const std::string& from) {
  fs::create_directories(c.outputDir);
  std::vector<FootLiftResult> results;
  std::vector<std::string> files;
  if (from.empty()) {
    results = sweepAndWrite(c, files);
  } else {
    const auto doc = nlohmann::json::parse(readText(from));
    results = resultsFromReport(doc);
    for (const auto& run : doc.at("runs")) {
      files.push_back(run.at("trace").is_string() ? run.at("trace").get<std::string>() : "");
    }
  }
  const ComparisonReport cmp = compareToHardware(results, defaultHardwareReference(), c.comparisonTolerance);
  writeReport(reportJson(c, results, cmp, files), fs::path(c.outputDir) / "report.json");
  printComparison(cmp);
  return anyError(results) ? kExitRunError : kExitOk;
}

int cmdObstacle(const RunConfig& c, const std::string& motion) {
  const fs::path dir = c.outputDir;
  fs::create_directories(dir);
  Foot foot = Foot::A;
  if (!motion.empty()) {
    if (motion.size() != 1) throw ConfigError("--motion for scenario-obstacle takes a foot A-D", "motion", 0);
    try {
      foot = parseFoot(motion);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), "motion", 0);
    }
  }
  const ObstacleScenarioResult s =
      runObstacleScenario(c.robot, foot, tensionPointByName(c.tension), c.sim, c.protocol, c.motion);
  std::vector<FootLiftResult> results{s.run};
  const auto files = writeTraces(dir, results);
  auto report = reportJson(c, results, std::nullopt, files);
  report["obstacleScenario"] = {{"supportedFoot", to_string(s.supportedFoot)},
                                {"obstacleHeightM", s.obstacleHeight},
                                {"othersGrounded", s.othersGrounded}};
  writeReport(report, dir / "report.json");
  std::cout << "foot " << to_string(foot) << " on a " << s.obstacleHeight << " m box: "
            << describe(s.run) << ", other feet " << (s.othersGrounded ? "grounded" : "not grounded")
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Foot-lift experiments on a tensegrity-spine quadruped"};
  app.require_subcommand(1);
  Options o;
  auto* run = app.add_subcommand("run", "one motion at one tension point");
  addCommon(run, o, true);
  auto* sweep = app.add_subcommand("sweep", "four motions at five tension points");
  addCommon(sweep, o, false);
  auto* compare = app.add_subcommand("compare", "sweep plus comparison with hardware angles");
  addCommon(compare, o, false);
  compare->add_option("--results", o.results, "reuse the report.json of an earlier sweep");
  auto* obstacle = app.add_subcommand("scenario-obstacle", "lift a foot standing on a box");
  addCommon(obstacle, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    std::string scenarioFoot;
    if (obstacle->parsed()) std::swap(scenarioFoot, o.motion);
    const RunConfig c = effectiveConfig(o);
    if (run->parsed()) return cmdRun(c);
    if (sweep->parsed()) return cmdSweep(c);
    if (compare->parsed()) return cmdCompare(c, o.results);
    return cmdObstacle(c, scenarioFoot);
  } catch (const ConfigError& e) {
    std::cerr << "laika: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "laika: " << e.what() << "\n";
    return kExitRunError;
  }
}
