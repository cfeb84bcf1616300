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

#ifndef LAIKA_ACTUATION_HPP
#define LAIKA_ACTUATION_HPP

#include <array>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "laika/structure.hpp"

namespace laika {

/// Which horizontal set is retracted. Pulling the right set is the motion
/// called "Left Bend" and vice versa.
enum class BendSide { PullRight, PullLeft };
enum class RotationDirection { CCW, CW };

std::string to_string(BendSide side);
std::string bendName(BendSide side);  // "left-bend" / "right-bend"
std::string to_string(RotationDirection dir);
Side pulledSide(BendSide side);
double directionSign(RotationDirection dir);

struct MotionSpec {
  BendSide bend = BendSide::PullRight;
  RotationDirection rotation = RotationDirection::CCW;
  double retraction = 0.8;                     // P, fraction of r(0) kept
  double rampDuration = 40.0;                  // s
  double maxAngle = std::numbers::pi / 3.0;    // rad

  void validate() const;
  /// Same motion with bend side and rotation direction both flipped.
  MotionSpec mirrored() const;
};

/// r_i = P r_i(0) for every cable, clamped at zero. Throws
/// std::invalid_argument unless 0 < P <= 1.
std::vector<double> bendRestLengths(std::span<const double> original, double retraction);

struct SpoolCommand {
  Side set = Side::Right;
  std::array<double, 4> grooveRatios{1.0, 1.0, 2.0, 3.0};
  double drumRetraction = 0.0;  // m, length taken in by a ratio-1 groove
};

struct SpoolDeltas {
  std::array<double, 4> deltas{};  // m, indexed by groove - 1
};

/// Length taken in by each groove: drumRetraction * ratio. Throws
/// std::invalid_argument for negative retraction or nonpositive ratios.
SpoolDeltas spoolDeltas(const SpoolCommand& cmd);

struct SpoolApplication {
  std::vector<double> restLengths;  // one per cable of the graph
  bool saturated = false;           // some rest length was clamped at zero
};

/// Applies spoolDeltas to the cables of `cmd.set` (by groove) starting from
/// `restLengths`.
SpoolApplication applySpool(const StructureGraph& graph, std::span<const double> restLengths,
                            const SpoolCommand& cmd);

/// Ramp angle: sign * (t / rampDuration) * maxAngle, saturated at maxAngle.
/// Throws std::invalid_argument for negative t.
double rotationAngle(double t, RotationDirection direction, const MotionSpec& spec);

/// Places the driven half of the rotating vertebra at its reference pose
/// turned by `theta` about the hinge, expressed in the driving half's current
/// frame. Throws std::invalid_argument when the graph has no rotary joint.
SimState applyRotation(const StructureGraph& graph, const SimState& state, double theta);

/// Current angle of the driven half relative to the driving half.
double relativeAngle(const StructureGraph& graph, const SimState& state);

/// Cable indices of one horizontal set ordered by groove.
std::array<std::size_t, 4> horizontalSet(const StructureGraph& graph, Side side);

}  // namespace laika

#endif  // LAIKA_ACTUATION_HPP
