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

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "laika/actuation.hpp"
#include "laika/model.hpp"

namespace laika {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(BendRestLengths, IdentityAtFullLength) {
  const std::vector<double> r{0.05, 0.10, 0.15, 0.20};
  EXPECT_EQ(bendRestLengths(r, 1.0), r);
}

TEST(BendRestLengths, EightyPercent) {
  const std::vector<double> one{0.10};
  EXPECT_DOUBLE_EQ(bendRestLengths(one, 0.8)[0], 0.08);
  const std::vector<double> r{0.05, 0.10, 0.15, 0.20};
  const auto out = bendRestLengths(r, 0.8);
  const std::vector<double> expected{0.04, 0.08, 0.12, 0.16};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(out[i], expected[i]);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(out[i], 0.8 * r[i]);
}

TEST(BendRestLengths, RejectsInvalidFraction) {
  const std::vector<double> r{0.1};
  EXPECT_THROW(bendRestLengths(r, 0.0), std::invalid_argument);
  EXPECT_THROW(bendRestLengths(r, 1.01), std::invalid_argument);
  EXPECT_THROW(bendRestLengths(r, -0.5), std::invalid_argument);
}

TEST(SpoolDeltas, OneOneTwoThree) {
  SpoolCommand cmd;
  cmd.drumRetraction = 0.01;
  const auto d = spoolDeltas(cmd).deltas;
  EXPECT_DOUBLE_EQ(d[0], 0.01);
  EXPECT_DOUBLE_EQ(d[1], 0.01);
  EXPECT_DOUBLE_EQ(d[2], 0.02);
  EXPECT_DOUBLE_EQ(d[3], 0.03);
  cmd.drumRetraction = 0.0;
  for (double x : spoolDeltas(cmd).deltas) EXPECT_EQ(x, 0.0);
  cmd.drumRetraction = 0.005;
  const auto h = spoolDeltas(cmd).deltas;
  EXPECT_DOUBLE_EQ(h[2], 0.010);
  EXPECT_DOUBLE_EQ(h[3], 0.015);
}

TEST(SpoolDeltas, ExactlyProportionalForAnyDrum) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> drum(0.0, 0.05);
  for (int i = 0; i < 100; ++i) {
    SpoolCommand cmd;
    cmd.drumRetraction = drum(rng);
    const auto d = spoolDeltas(cmd).deltas;
    for (std::size_t g = 0; g < 4; ++g) EXPECT_EQ(d[g], cmd.drumRetraction * cmd.grooveRatios[g]);
  }
}

TEST(SpoolDeltas, RejectsBadInput) {
  SpoolCommand cmd;
  cmd.drumRetraction = -0.01;
  EXPECT_THROW(spoolDeltas(cmd), std::invalid_argument);
  cmd.drumRetraction = 0.01;
  cmd.grooveRatios[2] = 0.0;
  EXPECT_THROW(spoolDeltas(cmd), std::invalid_argument);
}

TEST(ApplySpool, ShortensByGrooveAndFlagsSaturation) {
  const StructureGraph g = buildLaika(LaikaConfig{});
  std::vector<double> rest;
  for (const Cable& c : g.cables) rest.push_back(c.restLength);
  SpoolCommand cmd;
  cmd.set = Side::Right;
  cmd.drumRetraction = 0.01;
  const SpoolApplication out = applySpool(g, rest, cmd);
  EXPECT_FALSE(out.saturated);
  const auto set = horizontalSet(g, Side::Right);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(rest[set[k]] - out.restLengths[set[k]], 0.01 * cmd.grooveRatios[k], 1e-15);
  }
  cmd.drumRetraction = 1.0;
  EXPECT_TRUE(applySpool(g, rest, cmd).saturated);
  for (double r : applySpool(g, rest, cmd).restLengths) EXPECT_GE(r, 0.0);
}

TEST(RotationAngle, RampEndpointsAndLinearity) {
  const MotionSpec spec;
  EXPECT_EQ(rotationAngle(0.0, RotationDirection::CCW, spec), 0.0);
  EXPECT_EQ(rotationAngle(40.0, RotationDirection::CCW, spec), kPi / 3.0);
  EXPECT_EQ(rotationAngle(40.0, RotationDirection::CW, spec), -kPi / 3.0);
  EXPECT_NEAR(rotationAngle(20.0, RotationDirection::CW, spec), -kPi / 6.0, 1e-15);
  EXPECT_EQ(rotationAngle(90.0, RotationDirection::CCW, spec), kPi / 3.0);
  EXPECT_THROW(rotationAngle(-1.0, RotationDirection::CCW, spec), std::invalid_argument);
}

TEST(RotationAngle, MonotoneAndOdd) {
  const MotionSpec spec;
  double previous = 0.0;
  for (double t = 0.0; t <= 50.0; t += 0.25) {
    const double up = rotationAngle(t, RotationDirection::CCW, spec);
    EXPECT_GE(up, previous);
    EXPECT_EQ(rotationAngle(t, RotationDirection::CW, spec), -up);
    previous = up;
  }
}

TEST(MotionSpec, ValidationAndMirror) {
  MotionSpec m;
  EXPECT_NO_THROW(m.validate());
  EXPECT_EQ(m.retraction, 0.8);
  EXPECT_EQ(m.rampDuration, 40.0);
  const MotionSpec mirrored = m.mirrored();
  EXPECT_EQ(mirrored.bend, BendSide::PullLeft);
  EXPECT_EQ(mirrored.rotation, RotationDirection::CW);
  EXPECT_EQ(mirrored.mirrored().bend, m.bend);
  m.retraction = 0.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = MotionSpec{};
  m.rampDuration = 0.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(MotionSpec, BendNamesFollowPulledSet) {
  EXPECT_EQ(bendName(BendSide::PullRight), "left-bend");
  EXPECT_EQ(pulledSide(BendSide::PullRight), Side::Right);
  EXPECT_EQ(pulledSide(BendSide::PullLeft), Side::Left);
}

struct IsolatedRotatingVertebra : ::testing::Test {
  void SetUp() override { buildVertebra(graph, 3, VertebraKind::Rotating, LaikaConfig{}); }
  StructureGraph graph;
};

TEST_F(IsolatedRotatingVertebra, ZeroAngleIsReferencePose) {
  const SimState s = applyRotation(graph, initialState(graph), 0.0);
  EXPECT_LT((s.positions - initialState(graph).positions).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(relativeAngle(graph, s), 0.0, 1e-9);
}

TEST_F(IsolatedRotatingVertebra, SixtyDegreesRotatesDrivenCaps) {
  const SimState s0 = initialState(graph);
  const SimState s = applyRotation(graph, s0, kPi / 3.0);
  const RotaryJoint& j = *graph.joint;
  const Vector3d axis = j.axis.normalized();
  for (NodeId id : graph.groups[j.drivenGroup].members) {
    Vector3d before = s0.position(id) - j.pivot;
    Vector3d after = s.position(id) - j.pivot;
    before -= before.dot(axis) * axis;
    after -= after.dot(axis) * axis;
    if (before.norm() < 1e-9) continue;  // hub on the axis
    EXPECT_NEAR(before.normalized().dot(after.normalized()), 0.5, 1e-12);
    EXPECT_NEAR(before.normalized().cross(after.normalized()).dot(axis), std::sqrt(3.0) / 2.0, 1e-12);
  }
  for (NodeId id : graph.groups[j.drivingGroup].members) {
    EXPECT_LT((s.position(id) - s0.position(id)).norm(), 1e-12);
  }
  EXPECT_NEAR(relativeAngle(graph, s), kPi / 3.0, 1e-9);
}

TEST_F(IsolatedRotatingVertebra, RotationIsReversible) {
  const SimState s0 = initialState(graph);
  const SimState there = applyRotation(graph, s0, kPi / 6.0);
  const SimState back = applyRotation(graph, there, 0.0);
  EXPECT_LT((back.positions - s0.positions).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApplyRotation, FollowsDrivingHalfFrame) {
  StructureGraph g;
  buildVertebra(g, 3, VertebraKind::Rotating, LaikaConfig{});
  SimState s = initialState(g);
  const Eigen::AngleAxisd tilt(0.3, Vector3d::UnitZ());
  for (Eigen::Index i = 0; i < s.positions.cols(); ++i) {
    s.positions.col(i) = tilt * Vector3d(s.positions.col(i)) + Vector3d(0.1, 0.2, 0.0);
  }
  const SimState r = applyRotation(g, s, -0.4);
  EXPECT_NEAR(relativeAngle(g, r), -0.4, 1e-9);
}

TEST(ApplyRotation, MissingJointThrows) {
  StructureGraph g;
  buildVertebra(g, 1, VertebraKind::Passive, LaikaConfig{});
  EXPECT_THROW(applyRotation(g, initialState(g), 0.1), std::invalid_argument);
}

TEST(Commands, BendAndRotationCommute) {
  const StructureGraph g = buildLaika(LaikaConfig{});
  const MotionSpec spec;
  const auto set = horizontalSet(g, Side::Right);
  std::vector<double> original;
  for (std::size_t c : set) original.push_back(g.cables[c].originalRestLength);
  auto bend = [&](SimState& s) {
    const auto r = bendRestLengths(original, spec.retraction);
    for (std::size_t k = 0; k < 4; ++k) s.restLengths(static_cast<Eigen::Index>(set[k])) = r[k];
  };
  auto rotate = [&](SimState& s) { s.theta = rotationAngle(25.0, RotationDirection::CCW, spec); };
  SimState a = initialState(g), b = initialState(g);
  bend(a);
  rotate(a);
  rotate(b);
  bend(b);
  EXPECT_TRUE((a.restLengths.array() == b.restLengths.array()).all());
  EXPECT_EQ(a.theta, b.theta);
}

}  // namespace
}  // namespace laika
