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

#ifndef LAIKA_EXPERIMENT_HPP
#define LAIKA_EXPERIMENT_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "laika/actuation.hpp"
#include "laika/dynamics.hpp"
#include "laika/model.hpp"

namespace laika {

enum class Foot { A, B, C, D };

inline constexpr std::array<Foot, 4> kFeet{Foot::A, Foot::B, Foot::C, Foot::D};

std::string to_string(Foot foot);          // "A".."D"
std::string footLabel(Foot foot);          // "footA".."footD"
std::string footDescription(Foot foot);    // "front right", ...
/// Parses "A".."D" (case-insensitive) or "footA".."footD". Throws
/// std::invalid_argument otherwise.
Foot parseFoot(const std::string& text);
std::size_t footIndex(Foot foot);

enum class Phase { Bend, Settle, Rotate };

struct TraceSample {
  double time = 0.0;                  // s since the bend started
  double theta = 0.0;                 // rad
  std::array<double, 4> footZ{};      // m, feet A..D above the surface below them
  std::array<bool, 4> contact{};      // foot presses on the ground
  Vector3d spineCom = Vector3d::Zero();
  double bendScale = 1.0;             // current r / r(0) of the pulled set
  Phase phase = Phase::Bend;
};

struct FootLiftTrace {
  double samplePeriod = 0.05;  // s
  std::vector<TraceSample> samples;
};

struct ProtocolOptions {
  double bendRampDuration = 5.0;  // s, linear ramp from r(0) to P r(0)
  double liftThreshold = 0.002;   // m
  double holdWindow = 0.5;        // s
  double samplePeriod = 0.05;     // s
  bool fullTrace = false;         // keep rotating to maxAngle after lift-off
  bool rotate = true;             // false holds theta = 0 for the ramp time
};

struct FootLiftResult {
  MotionSpec motion;
  TensionTestPoint tension;
  std::optional<Foot> liftedFoot;
  std::optional<double> liftOffAngle;  // rad, absolute value
  FootLiftTrace trace;
  std::optional<std::string> error;    // set when the run failed
};

/// The four bend/rotation combinations in table order together with the
/// foot each one lifts on the hardware.
struct CanonicalMotion {
  MotionSpec motion;
  Foot expectedFoot;
};
std::array<CanonicalMotion, 4> canonicalMotions(const MotionSpec& base = {});
/// Motion whose expected foot is `foot`.
MotionSpec motionForFoot(Foot foot, const MotionSpec& base = {});
Foot expectedFoot(const MotionSpec& motion);

/// Smallest |theta| at which `foot` rises above `threshold` and stays above it
/// for `holdWindow` seconds of trace; nullopt when that never happens.
std::optional<double> detectLiftOff(const FootLiftTrace& trace, Foot foot, double threshold,
                                    double holdWindow);
/// Label form ("A" or "footA"); throws std::invalid_argument for unknown labels.
std::optional<double> detectLiftOff(const FootLiftTrace& trace, const std::string& foot,
                                    double threshold, double holdWindow);

/// Settle standing, bend (rest lengths ramped to P r(0)), settle, then ramp
/// the center vertebra until the first foot lifts (or maxAngle).
/// Throws SimulationError subclasses on divergence or settle timeout.
FootLiftResult runFootLiftTest(const LaikaConfig& config, const MotionSpec& motion,
                               const TensionTestPoint& tension, const SimParams& params,
                               const ProtocolOptions& options = {});

/// Four motions x five canonical tension points, motion-major with tension
/// ascending. Per-run failures are recorded in FootLiftResult::error.
std::vector<FootLiftResult> calibrationSweep(const LaikaConfig& config, const SimParams& params,
                                             const ProtocolOptions& options = {},
                                             const MotionSpec& base = {});

struct ObstacleScenarioResult {
  Foot supportedFoot = Foot::A;  // foot standing on the box
  double obstacleHeight = 0.0;   // m
  FootLiftResult run;            // protocol run that tries to lift that foot
  bool othersGrounded = false;   // remaining feet in contact at the end
};

/// Balance demo: a box of config.obstacleHeight rises under `foot` while the
/// robot settles, then the motion that lifts that foot is run.
ObstacleScenarioResult runObstacleScenario(const LaikaConfig& config, Foot foot,
                                           const TensionTestPoint& tension, const SimParams& params,
                                           const ProtocolOptions& options = {},
                                           const MotionSpec& base = {});

struct AngleInterval {
  double min = 0.0;
  double max = 0.0;
  double distance(double angle) const;
};

struct HardwareReference {
  std::array<AngleInterval, 4> hardware;    // feet A..D
  std::array<AngleInterval, 4> simulation;  // previously reported simulator range
};

const HardwareReference& defaultHardwareReference();

struct FootComparison {
  Foot foot = Foot::A;
  AngleInterval hardware;
  std::string bestTension;
  double bestAngle = 0.0;
  double distance = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> anglesByTension;  // lifted runs only
};

struct TensionRank {
  std::string tension;
  double totalDistance = 0.0;
  int missingFeet = 0;
};

struct ComparisonReport {
  double tolerance = 0.15;
  std::array<FootComparison, 4> feet;
  std::vector<TensionRank> ranking;  // best first
};

/// Throws std::invalid_argument when some foot never lifted in `results`.
ComparisonReport compareToHardware(const std::vector<FootLiftResult>& results,
                                   const HardwareReference& reference = defaultHardwareReference(),
                                   double tolerance = 0.15);

}  // namespace laika

#endif  // LAIKA_EXPERIMENT_HPP
