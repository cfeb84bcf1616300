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

#include <cmath>
#include <limits>
#include <random>

#include "laika/dynamics.hpp"
#include "laika/experiment.hpp"
#include "laika/model.hpp"

namespace laika {
namespace {

Cable makeCable(NodeId a, NodeId b, double k, double c, double rest) {
  Cable cable;
  cable.first = a;
  cable.second = b;
  cable.stiffness = k;
  cable.damping = c;
  cable.restLength = cable.originalRestLength = rest;
  cable.material = "silicone";
  return cable;
}

SimParams noGravityNoGround() {
  SimParams p;
  p.gravity = 0.0;
  p.groundEnabled = false;
  return p;
}

TEST(CableTension, ZeroExtension) { EXPECT_EQ(cableTension(0.1, 0.1, 0.0, 237.0, 0.0), 0.0); }

TEST(CableTension, SiliconeOneCentimetre) {
  EXPECT_NEAR(cableTension(0.11, 0.10, 0.0, 237.0, 0.0), 2.37, 1e-12);
}

TEST(CableTension, SlackCableCannotPush) {
  EXPECT_EQ(cableTension(0.09, 0.10, 0.0, 237.0, 5.0), 0.0);
  EXPECT_EQ(cableTension(0.09, 0.10, -3.0, 237.0, 5.0), 0.0);
}

TEST(CableTension, DampingOpposesClosingAndClampsAtZero) {
  EXPECT_NEAR(cableTension(0.11, 0.10, 0.1, 237.0, 2.0), 2.37 - 0.2, 1e-12);
  EXPECT_NEAR(cableTension(0.11, 0.10, -0.1, 237.0, 2.0), 2.37 + 0.2, 1e-12);
  EXPECT_EQ(cableTension(0.11, 0.10, 10.0, 237.0, 2.0), 0.0);
}

TEST(CableTension, WorksWithFloat) {
  EXPECT_NEAR(cableTension<float>(0.11f, 0.10f, 0.0f, 237.0f, 0.0f), 2.37f, 1e-5f);
}

TEST(CableForce, EqualAndOppositeAlongAxis) {
  StructureGraph g;
  const NodeId a = g.addNode({0, 0, 0}, 1.0);
  const NodeId b = g.addNode({0, 0, 0.11}, 1.0);
  const Cable cable = makeCable(a, b, 237.0, 0.0, 0.10);
  const CableForce f = cableForce(cable, 0.10, initialState(g));
  EXPECT_NEAR(f.tension, 2.37, 1e-12);
  EXPECT_NEAR((f.onFirst - Vector3d(0, 0, 2.37)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((f.onFirst + f.onSecond).norm(), 0.0, 1e-15);
}

TEST(CableForce, DegenerateCableExertsNothing) {
  StructureGraph g;
  const NodeId a = g.addNode({0, 0, 0}, 1.0);
  const NodeId b = g.addNode({0, 0, 0}, 1.0);
  const CableForce f = cableForce(makeCable(a, b, 237.0, 1.0, 0.0), 0.0, initialState(g));
  EXPECT_EQ(f.tension, 0.0);
  EXPECT_EQ(f.onFirst, Vector3d::Zero());
}

// Elastic force against central differences of U = k/2 (x - r)^2.
TEST(CableForce, MatchesFiniteDifferencePotential) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  std::uniform_real_distribution<double> stiffness(100.0, 1200.0);
  std::uniform_real_distribution<double> fraction(0.3, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    StructureGraph g;
    const NodeId a = g.addNode({coord(rng), coord(rng), coord(rng)}, 1.0);
    const NodeId b = g.addNode({coord(rng), coord(rng), coord(rng)}, 1.0);
    SimState s = initialState(g);
    const double length = (s.position(b) - s.position(a)).norm();
    const double k = stiffness(rng);
    const double rest = fraction(rng) * length;
    const Cable cable = makeCable(a, b, k, 0.0, rest);
    auto energy = [&](const SimState& st) {
      const double x = (st.position(b) - st.position(a)).norm();
      return 0.5 * k * (x - rest) * (x - rest);
    };
    const Vector3d analytic = cableForce(cable, rest, s).onFirst;
    Vector3d numeric;
    const double h = 1e-6;
    for (int d = 0; d < 3; ++d) {
      SimState plus = s, minus = s;
      plus.positions(d, a.value) += h;
      minus.positions(d, a.value) -= h;
      numeric(d) = -(energy(plus) - energy(minus)) / (2.0 * h);
    }
    EXPECT_LE((analytic - numeric).norm(), 1e-6 * analytic.norm()) << "trial " << trial;
  }
}

TEST(CableForce, SlackInvariantOnRandomStates) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(-0.3, 0.3);
  std::uniform_real_distribution<double> rest(0.0, 0.8);
  std::uniform_real_distribution<double> vel(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    StructureGraph g;
    const NodeId a = g.addNode({coord(rng), coord(rng), coord(rng)}, 1.0);
    const NodeId b = g.addNode({coord(rng), coord(rng), coord(rng)}, 1.0);
    SimState s = initialState(g);
    s.velocities.col(1) = Vector3d(vel(rng), vel(rng), vel(rng));
    const double r = rest(rng);
    const CableForce f = cableForce(makeCable(a, b, 500.0, 3.0, r), r, s);
    EXPECT_GE(f.tension, 0.0);
    if ((s.position(b) - s.position(a)).norm() <= r) EXPECT_EQ(f.tension, 0.0);
  }
}

TEST(GroundContact, AboveGroundIsFree) {
  EXPECT_EQ(groundContactForce(Vector3d(0, 0, 0.01), Vector3d(1, 0, -1), SimParams{}), Vector3d::Zero());
}

TEST(GroundContact, PenaltyNormal) {
  SimParams p;
  p.groundStiffness = 1e4;
  const Vector3d f = groundContactForce(Vector3d(0, 0, -0.001), Vector3d::Zero(), p);
  EXPECT_NEAR((f - Vector3d(0, 0, 10)).norm(), 0.0, 1e-12);
}

TEST(GroundContact, CoulombSaturationAboveRegularization) {
  SimParams p;
  const Vector3d v(0.3, -0.4, 0.0);
  const Vector3d f = groundContactForce(Vector3d(0, 0, -0.002), v, p);
  EXPECT_NEAR(f.head<2>().norm(), p.frictionCoefficient * f.z(), 1e-12);
  EXPECT_LT(f.head<2>().dot(v.head<2>()), 0.0);
}

TEST(GroundContact, LinearBelowRegularization) {
  SimParams p;
  const Vector3d slow(0.25 * p.frictionRegularizationVelocity, 0, 0);
  const Vector3d f1 = groundContactForce(Vector3d(0, 0, -0.002), slow, p);
  const Vector3d f2 = groundContactForce(Vector3d(0, 0, -0.002), Vector3d(2.0 * slow), p);
  EXPECT_NEAR(f2.x(), 2.0 * f1.x(), 1e-12);
  EXPECT_LT(std::abs(f2.x()), p.frictionCoefficient * f2.z());
}

TEST(GroundContact, NormalNeverPulls) {
  const Vector3d f = groundContactForce(Vector3d(0, 0, -1e-5), Vector3d(0, 0, 5.0), SimParams{});
  EXPECT_EQ(f, Vector3d::Zero());
}

TEST(Obstacle, SurfaceRisesUnderBoxOnly) {
  SimParams p;
  p.obstacles.push_back({-0.1, 0.1, -0.1, 0.1, 0.075, 1.0});
  EXPECT_EQ(surfaceHeight(p, 0.5, 0.0, 2.0), 0.0);
  EXPECT_NEAR(surfaceHeight(p, 0.0, 0.0, 0.5), 0.0375, 1e-15);
  EXPECT_NEAR(surfaceHeight(p, 0.0, 0.0, 3.0), 0.075, 1e-15);
}

TEST(Obstacle, NodeRestsOnBoxTop) {
  StructureGraph g;
  g.addNode({0, 0, 0.08}, 0.1);
  SimParams p;
  p.obstacles.push_back({-0.1, 0.1, -0.1, 0.1, 0.075, 0.0});
  const SimState s = settle(g, initialState(g), p);
  const double sink = 0.1 * p.gravity / p.groundStiffness;
  EXPECT_NEAR(s.positions(2, 0), 0.075 - sink, 1e-6);
}

TEST(NetForces, GravityOnlyOnFreeNode) {
  StructureGraph g;
  g.addNode({0, 0, 1}, 0.3);
  SimParams p;
  const Matrix3Xd f = netForces(g, initialState(g), p);
  EXPECT_NEAR((f.col(0) - Vector3d(0, 0, -0.3 * p.gravity)).norm(), 0.0, 1e-15);
}

TEST(NetForces, TautCableIsNewtonsThirdLaw) {
  StructureGraph g;
  const NodeId a = g.addNode({0, 0, 1}, 0.3);
  const NodeId b = g.addNode({0.2, 0.1, 1}, 0.5);
  g.cables.push_back(makeCable(a, b, 300.0, 0.0, 0.1));
  const Matrix3Xd f = netForces(g, initialState(g), noGravityNoGround());
  EXPECT_GT(f.col(0).norm(), 0.0);
  EXPECT_NEAR((f.col(0) + f.col(1)).norm(), 0.0, 1e-13);
}

TEST(NetForces, CableForcesSumToZeroOnLaika) {
  const StructureGraph g = buildLaika(LaikaConfig{});
  const Matrix3Xd f = cableForces(g, initialState(g));
  EXPECT_LT(f.rowwise().sum().norm(), 1e-10);
}

TEST(NetForces, NonFiniteStateIsRejected) {
  StructureGraph g;
  g.addNode({0, 0, 1}, 0.3);
  SimState s = initialState(g);
  s.positions(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(netForces(g, s, SimParams{}), SimulationError);
}

TEST(Step, FreeFallMatchesAnalytic) {
  StructureGraph g;
  g.addNode({0, 0, 10}, 1.0);
  SimParams p;
  p.dt = 1e-3;
  p.groundEnabled = false;
  Simulator sim(g, p);
  SimState s = initialState(g);
  for (int i = 0; i < 1000; ++i) sim.step(s);
  const double drop = 10.0 - s.positions(2, 0);
  const double exact = 0.5 * p.gravity * 1.0 * 1.0;
  EXPECT_NEAR(drop, exact, 0.01 * exact);
  EXPECT_NEAR(s.time, 1.0, 1e-9);
}

// m = 0.1 kg on a 187 N/m spring cable hanging below an anchor, damping
// ratio 0.1. The cable stays taut because the amplitude is below the static
// stretch m g / k.
TEST(Step, DampedOscillatorFollowsClosedForm) {
  const double m = 0.1, k = 187.0, zeta = 0.1;
  const double c = 2.0 * zeta * std::sqrt(k * m);
  StructureGraph g;
  SimParams p;
  p.groundEnabled = false;
  const double rest = 0.2;
  const double stretch = m * p.gravity / k;
  const double amplitude = 0.6 * stretch;
  const NodeId top = g.addNode({0, 0, 1.0}, 1.0, true);
  const NodeId bob = g.addNode({0, 0, 1.0 - rest - stretch - amplitude}, m);
  g.cables.push_back(makeCable(top, bob, k, c, rest));
  Simulator sim(g, p);
  SimState s = initialState(g);

  const double w = std::sqrt(k / m);
  const double wd = w * std::sqrt(1.0 - zeta * zeta);
  auto exact = [&](double t) {
    return amplitude * std::exp(-zeta * w * t) *
           (std::cos(wd * t) + zeta / std::sqrt(1.0 - zeta * zeta) * std::sin(wd * t));
  };
  double worst = 0.0;
  double previous = amplitude, beforePrevious = amplitude;
  int peaks = 0;
  while (s.time < 2.0) {
    sim.step(s);
    const double u = (1.0 - rest - stretch) - s.positions(2, bob.value);
    worst = std::max(worst, std::abs(u - exact(s.time)));
    if (previous > beforePrevious && previous >= u && previous > 0.0) {
      const double t = s.time - p.dt;
      const double envelope = amplitude * std::exp(-zeta * w * t) / std::sqrt(1.0 - zeta * zeta);
      const double envelopeAtPeak = envelope * std::sqrt(1.0 - zeta * zeta);
      EXPECT_NEAR(previous, envelopeAtPeak, 0.02 * envelopeAtPeak) << "peak at t=" << t;
      ++peaks;
    }
    beforePrevious = previous;
    previous = u;
  }
  EXPECT_GE(peaks, 10);
  EXPECT_LT(worst, 0.02 * amplitude);
}

StructureGraph tetrahedron(double z) {
  StructureGraph g;
  std::array<NodeId, 4> ids{g.addNode({0, 0, z}, 0.1), g.addNode({0.1, 0, z}, 0.1),
                            g.addNode({0, 0.1, z}, 0.1), g.addNode({0.03, 0.03, z + 0.1}, 0.1)};
  g.addGroup(ids, "tetra");
  return g;
}

double maxPairDrift(const StructureGraph& g, const SimState& s) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
      const double ref = (g.nodes[i].position - g.nodes[j].position).norm();
      const double now = (s.positions.col(static_cast<Eigen::Index>(i)) -
                          s.positions.col(static_cast<Eigen::Index>(j))).norm();
      worst = std::max(worst, std::abs(now - ref));
    }
  }
  return worst;
}

TEST(Step, RigidGroupKeepsShapeOnGround) {
  const StructureGraph g = tetrahedron(0.01);
  Simulator sim(g, SimParams{});
  SimState s = initialState(g);
  s.velocities.col(0) = Vector3d(0.3, 0.0, 0.0);
  while (s.time < 10.0) sim.step(s);
  EXPECT_LT(maxPairDrift(g, s), 1e-6);
  EXPECT_LT(s.positions.row(2).minCoeff(), 0.0);  // it did land
}

TEST(Step, LinearMomentumConservedWithoutExternalForces) {
  StructureGraph g = tetrahedron(0.0);
  const NodeId loose = g.addNode({0.4, 0.2, 0.1}, 0.05);
  g.cables.push_back(makeCable(NodeId{0}, loose, 400.0, 0.5, 0.2));
  g.cables.push_back(makeCable(NodeId{3}, loose, 250.0, 0.2, 0.1));
  Simulator sim(g, noGravityNoGround());
  SimState s = initialState(g);
  s.velocities.col(1) = Vector3d(0.2, -0.1, 0.05);
  s.velocities.col(4) = Vector3d(-0.3, 0.4, 0.0);
  auto momentum = [&g](const SimState& st) {
    Vector3d p = Vector3d::Zero();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      p += g.nodes[i].mass * st.velocities.col(static_cast<Eigen::Index>(i));
    }
    return p;
  };
  sim.step(s);  // the first projection makes the group velocities rigid
  Vector3d previous = momentum(s);
  for (int i = 0; i < 5000; ++i) {
    sim.step(s);
    const Vector3d now = momentum(s);
    ASSERT_LT((now - previous).norm(), 1e-8) << "step " << i;
    previous = now;
  }
}

TEST(Step, DivergenceAborts) {
  StructureGraph g;
  g.addNode({0, 0, 1}, 1.0);
  SimParams p = noGravityNoGround();
  Simulator sim(g, p);
  SimState s = initialState(g);
  s.velocities.col(0) = Vector3d(150.0, 0, 0);
  EXPECT_THROW(sim.step(s), DivergenceError);
}

TEST(Step, CommandSeesNextTime) {
  StructureGraph g;
  g.addNode({0, 0, 1}, 1.0);
  SimParams p = noGravityNoGround();
  SimState s = initialState(g);
  double seen = -1.0;
  stepDynamics(g, s, p, [&seen](double t, SimState&) { seen = t; });
  EXPECT_DOUBLE_EQ(seen, p.dt);
}

// A sliding body stops without sliding back. The mass center rocks back as
// the contact springs unload, and regularized friction lets the contacts
// creep by a few micrometres, so the contact points are checked to 10 um.
TEST(Step, FrictionStopsWithoutReversal) {
  const StructureGraph g = tetrahedron(-0.0005);
  Simulator sim(g, SimParams{});
  SimState s = initialState(g);
  for (Eigen::Index i = 0; i < 4; ++i) s.velocities.col(i) = Vector3d(0.05, 0.0, 0.0);
  double furthest = s.positions.row(0).head<3>().mean();
  double lastVx = 0.05;
  while (s.time < 1.0) {
    sim.step(s);
    const double x = s.positions.row(0).head<3>().mean();
    EXPECT_GE(x, furthest - 1e-5) << "t=" << s.time;
    furthest = std::max(furthest, x);
    lastVx = s.velocities.row(0).mean();
  }
  EXPECT_LT(std::abs(lastVx), 1e-6);
}

TEST(Settle, StaticStateReturnsAfterOneWindow) {
  StructureGraph g;
  g.addNode({0, 0, 1}, 1.0);
  SimParams p = noGravityNoGround();
  const SimState s = settle(g, initialState(g), p);
  EXPECT_NEAR(s.time, p.settleWindow, 2.0 * p.dt);
}

TEST(Settle, UndampedOscillatorTimesOut) {
  StructureGraph g;
  const NodeId a = g.addNode({0, 0, 0}, 1.0, true);
  const NodeId b = g.addNode({0.15, 0, 0}, 0.1);
  g.cables.push_back(makeCable(a, b, 187.0, 0.0, 0.1));
  SimParams p = noGravityNoGround();
  p.settleMaxTime = 2.0;
  EXPECT_THROW(settle(g, initialState(g), p), SettleTimeoutError);
}

TEST(Settle, LaikaDroppedFromOneMillimetreStands) {
  const StructureGraph g = buildLaika(LaikaConfig{});
  SimParams p;
  p.settleMaxTime = 10.0;
  Simulator sim(g, p);
  SimState s = initialState(g);
  s.positions.row(2).array() += 0.001;
  ASSERT_NO_THROW(settle(sim, s));
  EXPECT_LT(s.time, 10.0);
  EXPECT_LT(sim.equilibriumResidual(s), 0.05);

  const auto feetIds = feet(g);
  std::array<Vector3d, 4> foot;
  for (std::size_t f = 0; f < 4; ++f) {
    foot[f] = s.position(feetIds[f]);
    EXPECT_LT(foot[f].z(), 0.0) << "foot " << f << " not in contact";
  }
  // A, B, C, D run around the support rectangle; the mass center must be
  // on the inner side of each edge.
  const Vector3d com = centerOfMass(g, s);
  for (std::size_t e = 0; e < 4; ++e) {
    const Vector3d p0 = foot[e], p1 = foot[(e + 1) % 4];
    const double cross = (p1.x() - p0.x()) * (com.y() - p0.y()) - (p1.y() - p0.y()) * (com.x() - p0.x());
    EXPECT_GT(cross, 0.0) << "edge " << e;
  }
}

TEST(Settle, RepeatedRunsAreBitIdentical) {
  const StructureGraph g = buildLaika(LaikaConfig{});
  SimParams p;
  auto run = [&] {
    Simulator sim(g, p);
    SimState s = initialState(g);
    for (int i = 0; i < 3000; ++i) {
      sim.step(s, [](double t, SimState& st) { st.theta = 0.1 * t; });
    }
    return s;
  };
  const SimState a = run();
  const SimState b = run();
  EXPECT_TRUE((a.positions.array() == b.positions.array()).all());
  EXPECT_TRUE((a.velocities.array() == b.velocities.array()).all());
}

}  // namespace
}  // namespace laika
