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

#ifndef LAIKA_MODEL_HPP
#define LAIKA_MODEL_HPP

#include <array>
#include <string>
#include <vector>

#include "laika/structure.hpp"

namespace laika {

/// Geometry, masses and cable assignment of the robot. World frame: +x points
/// from the hips to the shoulders, +y to the robot's left, +z up; the ground
/// is z = 0. Vertebra 1 is rigidly part of the hip frame, vertebra 5 of the
/// shoulder frame. The spine axis sits at spineAxisHeight(), so the top end
/// caps reach the standing height.
struct LaikaConfig {
  double overallLength = 0.528;   // m, descriptive (representative model)
  double standingHeight = 0.414;  // m, height of the highest end cap
  double hipHeight = 0.185;       // m, height of the shoulder and hip frames
  double totalMass = 1.62;        // kg

  double vertebraSpacing = 0.10;  // m, center to center
  // End-cap offsets from a vertebra center. Top/bottom lean forward and
  // left/right lean backward so neighbouring vertebrae interleave.
  Vector3d endCapTop{0.09, 0.0, 0.15};
  Vector3d endCapBottom{0.09, 0.0, -0.15};
  Vector3d endCapLeft{-0.09, 0.15, 0.0};
  Vector3d endCapRight{-0.09, -0.15, 0.0};
  double hubOffset = 0.01;  // m, axial offset of the two rotating-vertebra hubs

  double footLongitudinal = 0.22;  // m, |x| of the feet
  double trackHalfWidth = 0.14;    // m, |y| of the feet
  double frameLongitudinal = 0.19; // m, |x| of the shoulder/hip mass nodes
  double frameHalfWidth = 0.06;    // m

  double spineMassFraction = 0.45;
  double shoulderMassFraction = 0.20;
  double hipMassFraction = 0.15;
  double legMassFraction = 0.20;

  std::string topMaterial = "silicone";
  std::string bottomMaterial = "buna-n";
  std::string leftMaterial = "silicone";
  std::string rightMaterial = "silicone";
  std::string saddleMaterial = "silicone";

  // Vertebra carrying the spool of each horizontal set (2 or 4).
  int topSpool = 4;
  int bottomSpool = 4;
  int leftSpool = 2;
  int rightSpool = 2;

  // Nominal pretension k * prestrain * built length, adjusted to the nearest
  // self-equilibrated set of tensions not below minimumPretension; r(0)
  // follows as built length - tension / k.
  double horizontalPrestrain = 0.05;
  double saddlePrestrain = 0.05;
  double minimumPretension = 0.5;     // N; cables that cannot carry load stay at 0
  bool balancePrestress = true;
  double slackMargin = 0.02;          // extra rest length of cables left without pretension
  double cableDampingRatio = 0.1;     // fraction of critical for one vertebra on the cable

  double obstacleHeight = 0.075;  // m, optional balance scenario

  double spineAxisHeight() const { return standingHeight - endCapTop.z(); }

  /// Throws std::invalid_argument on any invalid field.
  void validate() const;
};

enum class VertebraKind { Passive, Active, Rotating };

std::string to_string(VertebraKind kind);

/// Node ids created for one vertebra. Rotating vertebrae create two groups.
struct VertebraNodes {
  int index = 0;
  VertebraKind kind = VertebraKind::Passive;
  std::vector<NodeId> nodes;
  std::array<NodeId, 4> caps{};  // top, bottom, left, right
  std::vector<std::size_t> groups;
};

/// Adds the nodes of vertebra `index` (1..5) to `graph`. Passive and active
/// vertebrae become one five-node rigid group; the rotating vertebra becomes a
/// driving half (hub + left/right caps) and a driven half (hub + top/bottom
/// caps) joined by a rotary joint along the spine axis. With `makeGroups`
/// false the caller takes ownership of grouping (used for the end vertebrae,
/// which merge into the hip and shoulder frames).
/// Throws std::invalid_argument when `kind` does not match the vertebra slot
/// (1 and 5 passive, 2 and 4 active, 3 rotating).
VertebraNodes buildVertebra(StructureGraph& graph, int index, VertebraKind kind,
                            const LaikaConfig& config, bool makeGroups = true);

VertebraKind vertebraKindFor(int index);

/// Five vertebrae plus the horizontal and saddle cable lattice. The end
/// vertebrae are left ungrouped so buildLaika can merge them with the frames.
struct SpineFragment {
  StructureGraph graph;
  std::array<VertebraNodes, 5> vertebrae;
};

SpineFragment buildSpine(const LaikaConfig& config);

/// Closest cable tension vector (least squares) to `nominal` that keeps every
/// body in `bodies` in force and torque balance with tensions >= `minimum`
/// wherever feasible. Cables whose endpoints share a body are ignored.
VectorXd balancedPretension(const StructureGraph& graph,
                            const std::vector<std::vector<NodeId>>& bodies,
                            const VectorXd& nominal, double minimum);

/// Complete robot standing on the ground with feet labelled footA (front
/// right), footB (front left), footC (back left), footD (back right).
StructureGraph buildLaika(const LaikaConfig& config);

struct TensionTestPoint {
  std::string name;
  double silicone = 0.0;  // N/m
  double bunaN = 0.0;     // N/m
};

/// The five lattice stiffness points spanning -2 to +2 standard deviations.
const std::array<TensionTestPoint, 5>& canonicalTensionPoints();
/// Looks up a canonical point by case-insensitive name (low, medlow, mean,
/// medhigh, high). Throws std::invalid_argument for unknown names.
TensionTestPoint tensionPointByName(const std::string& name);

/// Sets the stiffness of every silicone and Buna-N cable; spring cables keep
/// 187 N/m. Damping is rescaled to keep each cable's damping ratio. Rest
/// lengths are untouched.
StructureGraph applyTensionTestPoint(const StructureGraph& graph, const TensionTestPoint& point);

/// Node sets for analysis.
std::vector<NodeId> spineNodes(const StructureGraph& graph);
std::array<NodeId, 4> feet(const StructureGraph& graph);

}  // namespace laika

#endif  // LAIKA_MODEL_HPP
