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

#include "laika/dynamics.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace laika {

void SimParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("SimParams: ") + what);
  };
  require(dt > 0.0 && std::isfinite(dt), "dt must be > 0");
  require(gravity >= 0.0, "gravity must be >= 0");
  require(groundStiffness >= 0.0, "groundStiffness must be >= 0");
  require(groundDamping >= 0.0, "groundDamping must be >= 0");
  require(frictionCoefficient >= 0.0, "frictionCoefficient must be >= 0");
  require(frictionRegularizationVelocity > 0.0, "frictionRegularizationVelocity must be > 0");
  require(settleKineticTol > 0.0, "settleKineticTol must be > 0");
  require(settleWindow >= 0.0, "settleWindow must be >= 0");
  require(settleMaxTime > 0.0, "settleMaxTime must be > 0");
  require(maxSpeed > 0.0, "maxSpeed must be > 0");
  for (const Obstacle& o : obstacles) {
    require(o.xMin < o.xMax && o.yMin < o.yMax, "obstacle extents must be ordered");
    require(o.height >= 0.0 && o.riseTime >= 0.0, "obstacle height and rise time must be >= 0");
  }
}

namespace {

std::once_flag degenerateWarning;

void warnDegenerate(const Cable& cable) {
  std::call_once(degenerateWarning, [&cable] {
    std::cerr << "laika: cable '" << cable.name
              << "' has coincident endpoints; treating its force as zero\n";
  });
}

}  // namespace

CableForce cableForce(const Cable& cable, double restLength, const SimState& state) {
  CableForce out;
  const Vector3d a = state.position(cable.first);
  const Vector3d b = state.position(cable.second);
  const Vector3d d = b - a;
  const double length = d.norm();
  if (length < kDegenerateLength) {
    warnDegenerate(cable);
    return out;
  }
  const Vector3d dir = d / length;
  const double closing = -(state.velocity(cable.second) - state.velocity(cable.first)).dot(dir);
  out.tension = cableTension(length, restLength, closing, cable.stiffness, cable.damping);
  out.onFirst = out.tension * dir;
  out.onSecond = -out.onFirst;
  return out;
}

CableForce cableForce(const Cable& cable, std::size_t index, const SimState& state) {
  return cableForce(cable, state.restLengths(static_cast<Eigen::Index>(index)), state);
}

Vector3d groundContactForce(const Vector3d& position, const Vector3d& velocity,
                            const SimParams& params) {
  return groundContactForce<double>(position, velocity, params.groundStiffness,
                                    params.groundDamping, params.frictionCoefficient,
                                    params.frictionRegularizationVelocity);
}

double surfaceHeight(const SimParams& params, double x, double y, double time) {
  double h = 0.0;
  for (const Obstacle& o : params.obstacles) {
    if (x < o.xMin || x > o.xMax || y < o.yMin || y > o.yMax) continue;
    const double rise = o.riseTime > 0.0 ? std::clamp(time / o.riseTime, 0.0, 1.0) : 1.0;
    h = std::max(h, rise * o.height);
  }
  return h;
}

Matrix3Xd cableForces(const StructureGraph& graph, const SimState& state) {
  Matrix3Xd forces = Matrix3Xd::Zero(3, state.positions.cols());
  for (std::size_t c = 0; c < graph.cables.size(); ++c) {
    const Cable& cable = graph.cables[c];
    const CableForce f = cableForce(cable, c, state);
    forces.col(cable.first.value) += f.onFirst;
    forces.col(cable.second.value) += f.onSecond;
  }
  return forces;
}

Matrix3Xd netForces(const StructureGraph& graph, const SimState& state, const SimParams& params) {
  if (!state.isFinite()) throw SimulationError("netForces: non-finite state");
  Matrix3Xd forces = cableForces(graph, state);
  for (Eigen::Index i = 0; i < forces.cols(); ++i) {
    const double m = graph.nodes[static_cast<std::size_t>(i)].mass;
    forces(2, i) -= m * params.gravity;
    if (params.groundEnabled) {
      Vector3d p = state.positions.col(i);
      p.z() -= surfaceHeight(params, p.x(), p.y(), state.time);
      forces.col(i) += groundContactForce(p, Vector3d(state.velocities.col(i)), params);
    }
  }
  if (!forces.allFinite()) throw SimulationError("netForces: non-finite force");
  return forces;
}

double kineticEnergy(const StructureGraph& graph, const SimState& state) {
  double e = 0.0;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    if (graph.nodes[i].anchored) continue;
    e += 0.5 * graph.nodes[i].mass *
         state.velocities.col(static_cast<Eigen::Index>(i)).squaredNorm();
  }
  return e;
}

Simulator::Simulator(const StructureGraph& graph, SimParams params)
    : graph_(graph), params_(params) {
  params_.validate();
  const std::size_t n = graph.nodes.size();
  inverseMass_ = VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Node& node = graph.nodes[i];
    if (!node.anchored && node.mass > 0.0) inverseMass_(static_cast<Eigen::Index>(i)) = 1.0 / node.mass;
  }

  std::vector<bool> grouped(n, false);
  auto makeBody = [&](std::initializer_list<const RigidGroup*> parts) {
    Body body;
    Eigen::Index count = 0;
    for (const RigidGroup* g : parts) count += static_cast<Eigen::Index>(g->members.size());
    body.reference.resize(3, count);
    body.masses.resize(count);
    Eigen::Index k = 0;
    for (const RigidGroup* g : parts) {
      for (std::size_t j = 0; j < g->members.size(); ++j, ++k) {
        const std::uint32_t id = g->members[j].value;
        body.members.push_back(id);
        body.reference.col(k) = g->reference.col(static_cast<Eigen::Index>(j));
        body.masses(k) = graph.nodes[id].mass;
        grouped[id] = true;
      }
    }
    return body;
  };

  for (std::size_t g = 0; g < graph.groups.size(); ++g) {
    if (graph.joint && (g == graph.joint->drivingGroup || g == graph.joint->drivenGroup)) continue;
    bodies_.push_back(makeBody({&graph.groups[g]}));
  }
  if (graph.joint) {
    const RigidGroup& driving = graph.groups.at(graph.joint->drivingGroup);
    const RigidGroup& driven = graph.groups.at(graph.joint->drivenGroup);
    Body body = makeBody({&driving, &driven});
    body.rotatingCount = static_cast<Eigen::Index>(driven.members.size());
    bodies_.push_back(std::move(body));
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!grouped[i]) looseNodes_.push_back(i);
  }
  bodyOf_.assign(n, -1);
  for (std::size_t b = 0; b < bodies_.size(); ++b) {
    for (std::uint32_t id : bodies_[b].members) bodyOf_[id] = static_cast<int>(b);
  }
  forces_.resize(3, static_cast<Eigen::Index>(n));
  previous_.resize(3, static_cast<Eigen::Index>(n));
}

void Simulator::accumulateForces(const SimState& state, Matrix3Xd& forces) const {
  forces.setZero();
  for (std::size_t c = 0; c < graph_.cables.size(); ++c) {
    const Cable& cable = graph_.cables[c];
    const CableForce f = cableForce(cable, c, state);
    if (f.tension == 0.0) continue;
    forces.col(cable.first.value) += f.onFirst;
    forces.col(cable.second.value) += f.onSecond;
  }
  const double g = params_.gravity;
  for (Eigen::Index i = 0; i < forces.cols(); ++i) {
    forces(2, i) -= graph_.nodes[static_cast<std::size_t>(i)].mass * g;
  }
  if (!params_.groundEnabled) return;

  std::vector<std::pair<std::uint32_t, Vector3d>> contacts;
  std::vector<int> contactsPerBody(bodies_.size(), 0);
  for (Eigen::Index i = 0; i < forces.cols(); ++i) {
    if (inverseMass_(i) == 0.0) continue;
    Vector3d p = state.positions.col(i);
    if (!params_.obstacles.empty()) p.z() -= surfaceHeight(params_, p.x(), p.y(), state.time);
    if (!(p.z() < 0.0)) continue;
    contacts.emplace_back(static_cast<std::uint32_t>(i), p);
    const int body = bodyOf_[static_cast<std::size_t>(i)];
    if (body >= 0) ++contactsPerBody[static_cast<std::size_t>(body)];
  }
  for (const auto& [i, p] : contacts) {
    const Vector3d v = state.velocities.col(i);
    Vector3d f = groundContactForce(p, v, params_);
    const double friction = f.head<2>().norm();
    if (friction > 0.0) {
      const int body = bodyOf_[i];
      const double share = body >= 0 ? contactsPerBody[static_cast<std::size_t>(body)] : 1;
      const double limit = tangentialEffectiveMass(state, i) * v.head<2>().norm() / (share * params_.dt);
      if (friction > limit) f.head<2>() *= limit / friction;
    }
    forces.col(i) += f;
  }
}

double Simulator::tangentialEffectiveMass(const SimState& state, std::uint32_t node) const {
  const int b = bodyOf_[node];
  if (b < 0) return graph_.nodes[node].mass;
  const Body& body = bodies_[static_cast<std::size_t>(b)];
  double total = 0.0;
  Vector3d com = Vector3d::Zero();
  for (std::size_t k = 0; k < body.members.size(); ++k) {
    const double m = body.masses(static_cast<Eigen::Index>(k));
    total += m;
    com += m * state.positions.col(body.members[k]);
  }
  com /= total;
  Matrix3d inertia = Matrix3d::Zero();
  for (std::size_t k = 0; k < body.members.size(); ++k) {
    const Vector3d r = state.positions.col(body.members[k]) - com;
    inertia += body.masses(static_cast<Eigen::Index>(k)) *
               (r.squaredNorm() * Matrix3d::Identity() - r * r.transpose());
  }
  const Vector3d r = state.positions.col(node) - com;
  Matrix3d cross;
  cross << 0.0, -r.z(), r.y(), r.z(), 0.0, -r.x(), -r.y(), r.x(), 0.0;
  const Eigen::CompleteOrthogonalDecomposition<Matrix3d> solver(inertia);
  const Matrix3d mobility = Matrix3d::Identity() / total - cross * solver.pseudoInverse() * cross;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(mobility.topLeftCorner<2, 2>());
  return 1.0 / eig.eigenvalues().maxCoeff();
}

void Simulator::project(SimState& state, const Matrix3Xd& previous) {
  const double dt = params_.dt;
  for (const Body& body : bodies_) {
    const Eigen::Index count = static_cast<Eigen::Index>(body.members.size());
    scratchCur_.resize(3, count);
    for (Eigen::Index k = 0; k < count; ++k) {
      scratchCur_.col(k) = state.positions.col(body.members[static_cast<std::size_t>(k)]);
    }
    const Matrix3Xd* reference = &body.reference;
    if (body.rotatingCount > 0) {
      scratchRef_ = body.reference;
      const Eigen::AngleAxisd rot(state.theta, graph_.joint->axis.normalized());
      const Matrix3d r = rot.toRotationMatrix();
      const Vector3d& pivot = graph_.joint->pivot;
      for (Eigen::Index k = count - body.rotatingCount; k < count; ++k) {
        scratchRef_.col(k) = pivot + r * (body.reference.col(k) - pivot);
      }
      reference = &scratchRef_;
    }
    const RigidTransform<double> fit = bestFitTransform<double>(*reference, scratchCur_, body.masses);
    for (Eigen::Index k = 0; k < count; ++k) {
      const std::uint32_t id = body.members[static_cast<std::size_t>(k)];
      const Vector3d snapped = fit(reference->col(k));
      state.positions.col(id) = snapped;
      state.velocities.col(id) = (snapped - previous.col(id)) / dt;
    }
  }
}

void Simulator::step(SimState& state, const CommandFn& command) {
  const double dt = params_.dt;
  accumulateForces(state, forces_);
  previous_ = state.positions;
  for (Eigen::Index i = 0; i < forces_.cols(); ++i) {
    const double invMass = inverseMass_(i);
    if (invMass == 0.0) {
      state.velocities.col(i).setZero();
      continue;
    }
    state.velocities.col(i) += dt * invMass * forces_.col(i);
    state.positions.col(i) += dt * state.velocities.col(i);
  }
  if (command) command(state.time + dt, state);
  project(state, previous_);
  state.time += dt;

  for (Eigen::Index i = 0; i < state.velocities.cols(); ++i) {
    const double speed = state.velocities.col(i).norm();
    if (!std::isfinite(speed) || !state.positions.col(i).allFinite() || speed > params_.maxSpeed) {
      std::ostringstream msg;
      msg << "simulation diverged at t=" << state.time << " s: node " << i << " speed " << speed
          << " m/s";
      throw DivergenceError(msg.str());
    }
  }
}

double Simulator::kineticEnergy(const SimState& state) const {
  return laika::kineticEnergy(graph_, state);
}

double Simulator::equilibriumResidual(const SimState& state) const {
  Matrix3Xd forces(3, state.positions.cols());
  accumulateForces(state, forces);
  double worst = 0.0;
  for (const Body& body : bodies_) {
    Vector3d total = Vector3d::Zero();
    for (std::uint32_t id : body.members) total += forces.col(id);
    worst = std::max(worst, total.norm());
  }
  for (std::uint32_t id : looseNodes_) {
    if (inverseMass_(id) == 0.0) continue;
    worst = std::max(worst, forces.col(id).norm());
  }
  return worst;
}

SimState stepDynamics(const StructureGraph& graph, const SimState& state, const SimParams& params,
                      const CommandFn& command) {
  Simulator sim(graph, params);
  SimState next = state;
  sim.step(next, command);
  return next;
}

void settle(Simulator& sim, SimState& state) {
  const SimParams& p = sim.params();
  const double start = state.time;
  double calmSince = state.time;
  bool calm = sim.kineticEnergy(state) < p.settleKineticTol;
  while (true) {
    if (calm && state.time - calmSince >= p.settleWindow - 0.5 * p.dt) return;
    if (state.time - start >= p.settleMaxTime) {
      std::ostringstream msg;
      msg << "structure did not settle within " << p.settleMaxTime << " s (kinetic energy "
          << sim.kineticEnergy(state) << " J)";
      throw SettleTimeoutError(msg.str());
    }
    sim.step(state);
    const bool nowCalm = sim.kineticEnergy(state) < p.settleKineticTol;
    if (nowCalm && !calm) calmSince = state.time;
    calm = nowCalm;
  }
}

SimState settle(const StructureGraph& graph, SimState state, const SimParams& params) {
  Simulator sim(graph, params);
  settle(sim, state);
  return state;
}

}  // namespace laika
