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

#include "laika/actuation.hpp"

#include <algorithm>
#include <stdexcept>

#include "laika/rigid.hpp"

namespace laika {

std::string to_string(BendSide side) {
  return side == BendSide::PullRight ? "pull-right" : "pull-left";
}

std::string bendName(BendSide side) {
  return side == BendSide::PullRight ? "left-bend" : "right-bend";
}

std::string to_string(RotationDirection dir) { return dir == RotationDirection::CCW ? "ccw" : "cw"; }

Side pulledSide(BendSide side) { return side == BendSide::PullRight ? Side::Right : Side::Left; }

double directionSign(RotationDirection dir) { return dir == RotationDirection::CCW ? 1.0 : -1.0; }

void MotionSpec::validate() const {
  if (!(retraction > 0.0 && retraction <= 1.0)) {
    throw std::invalid_argument("retraction fraction P must be in (0, 1]");
  }
  if (!(rampDuration > 0.0)) throw std::invalid_argument("rampDuration must be > 0");
  if (!(maxAngle > 0.0)) throw std::invalid_argument("maxAngle must be > 0");
}

MotionSpec MotionSpec::mirrored() const {
  MotionSpec m = *this;
  m.bend = bend == BendSide::PullRight ? BendSide::PullLeft : BendSide::PullRight;
  m.rotation = rotation == RotationDirection::CCW ? RotationDirection::CW : RotationDirection::CCW;
  return m;
}

std::vector<double> bendRestLengths(std::span<const double> original, double retraction) {
  if (!(retraction > 0.0 && retraction <= 1.0)) {
    throw std::invalid_argument("retraction fraction P must be in (0, 1]");
  }
  std::vector<double> out(original.size());
  std::transform(original.begin(), original.end(), out.begin(),
                 [retraction](double r) { return std::max(0.0, retraction * r); });
  return out;
}

SpoolDeltas spoolDeltas(const SpoolCommand& cmd) {
  if (!(cmd.drumRetraction >= 0.0)) throw std::invalid_argument("drum retraction must be >= 0");
  SpoolDeltas out;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(cmd.grooveRatios[i] > 0.0)) throw std::invalid_argument("groove ratios must be > 0");
    out.deltas[i] = cmd.drumRetraction * cmd.grooveRatios[i];
  }
  return out;
}

std::array<std::size_t, 4> horizontalSet(const StructureGraph& graph, Side side) {
  std::array<std::size_t, 4> out{};
  std::array<bool, 4> seen{};
  for (std::size_t c = 0; c < graph.cables.size(); ++c) {
    const CableRole& role = graph.cables[c].role;
    if (role.kind != CableKind::Horizontal || role.side != side) continue;
    if (role.groove < 1 || role.groove > 4) continue;
    const auto g = static_cast<std::size_t>(role.groove - 1);
    out[g] = c;
    seen[g] = true;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw std::invalid_argument("graph lacks a complete " + to_string(side) + " horizontal set");
  }
  return out;
}

SpoolApplication applySpool(const StructureGraph& graph, std::span<const double> restLengths,
                            const SpoolCommand& cmd) {
  const SpoolDeltas d = spoolDeltas(cmd);
  SpoolApplication out;
  out.restLengths.assign(restLengths.begin(), restLengths.end());
  const auto set = horizontalSet(graph, cmd.set);
  for (std::size_t g = 0; g < 4; ++g) {
    double& r = out.restLengths.at(set[g]);
    r -= d.deltas[g];
    if (r < 0.0) {
      r = 0.0;
      out.saturated = true;
    }
  }
  return out;
}

double rotationAngle(double t, RotationDirection direction, const MotionSpec& spec) {
  if (!(t >= 0.0)) throw std::invalid_argument("rotationAngle: t must be >= 0");
  const double progress = std::min(t / spec.rampDuration, 1.0);
  return directionSign(direction) * progress * spec.maxAngle;
}

namespace {

struct HalfFrames {
  RigidTransform<double> driving;
  RigidTransform<double> driven;
};

RigidTransform<double> fitGroup(const StructureGraph& graph, const RigidGroup& group,
                                const SimState& state) {
  const auto n = static_cast<Eigen::Index>(group.members.size());
  Matrix3Xd current(3, n);
  VectorXd weights(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const NodeId id = group.members[static_cast<std::size_t>(k)];
    current.col(k) = state.position(id);
    weights(k) = graph.node(id).mass;
  }
  return bestFitTransform<double>(group.reference, current, weights);
}

const RotaryJoint& requireJoint(const StructureGraph& graph) {
  if (!graph.joint) throw std::invalid_argument("graph has no rotating vertebra");
  return *graph.joint;
}

}  // namespace

SimState applyRotation(const StructureGraph& graph, const SimState& state, double theta) {
  const RotaryJoint& joint = requireJoint(graph);
  const RigidGroup& driving = graph.groups.at(joint.drivingGroup);
  const RigidGroup& driven = graph.groups.at(joint.drivenGroup);
  const RigidTransform<double> frame = fitGroup(graph, driving, state);
  SimState out = state;
  for (std::size_t k = 0; k < driven.members.size(); ++k) {
    const Vector3d ref = driven.reference.col(static_cast<Eigen::Index>(k));
    out.positions.col(driven.members[k].value) =
        frame(rotateAbout<double>(ref, joint.pivot, joint.axis, theta));
  }
  out.theta = theta;
  return out;
}

double relativeAngle(const StructureGraph& graph, const SimState& state) {
  const RotaryJoint& joint = requireJoint(graph);
  const RigidTransform<double> a = fitGroup(graph, graph.groups.at(joint.drivingGroup), state);
  const RigidTransform<double> b = fitGroup(graph, graph.groups.at(joint.drivenGroup), state);
  const Matrix3d relative = a.rotation.transpose() * b.rotation;
  return angleAbout<double>(relative, joint.axis);
}

}  // namespace laika
