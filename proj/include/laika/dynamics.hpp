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

#ifndef LAIKA_DYNAMICS_HPP
#define LAIKA_DYNAMICS_HPP

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

#include "laika/rigid.hpp"
#include "laika/structure.hpp"

namespace laika {

/// Axis-aligned box standing on the ground. Only its top face is a contact
/// surface; it rises linearly from the ground to `height` over `riseTime`.
struct Obstacle {
  double xMin = 0.0, xMax = 0.0;  // m
  double yMin = 0.0, yMax = 0.0;  // m
  double height = 0.0;            // m
  double riseTime = 0.0;          // s
};

struct SimParams {
  double dt = 1e-4;                               // s
  double gravity = 9.81;                          // m/s^2, along -z
  double groundStiffness = 2e4;                   // N/m
  double groundDamping = 50.0;                    // N s/m
  double frictionCoefficient = 0.6;
  double frictionRegularizationVelocity = 1e-3;   // m/s
  double settleKineticTol = 1e-6;                 // J
  double settleWindow = 0.5;                      // s
  double settleMaxTime = 20.0;                    // s
  double maxSpeed = 100.0;                        // m/s, divergence guard
  bool groundEnabled = true;
  std::vector<Obstacle> obstacles;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class SettleTimeoutError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// Spring-damper cable law with slack clamp: zero when the elastic term is
/// not positive, otherwise max(0, k (x - r) - c xdot). `closingSpeed` is the
/// rate at which the endpoints approach each other (-dx/dt), so the damping
/// term always dissipates.
template <typename Scalar>
Scalar cableTension(Scalar length, Scalar restLength, Scalar closingSpeed, Scalar stiffness,
                    Scalar damping) {
  const Scalar elastic = stiffness * (length - restLength);
  if (!(elastic > Scalar(0))) return Scalar(0);
  return std::max(Scalar(0), elastic - damping * closingSpeed);
}

struct CableForce {
  double tension = 0.0;                     // N
  Vector3d onFirst = Vector3d::Zero();      // N
  Vector3d onSecond = Vector3d::Zero();     // N
};

/// Force of one cable using the rest length stored in `state`.
CableForce cableForce(const Cable& cable, std::size_t index, const SimState& state);
/// Same, with an explicit rest length.
CableForce cableForce(const Cable& cable, double restLength, const SimState& state);

template <typename Scalar>
Vector3<Scalar> groundContactForce(const Vector3<Scalar>& position, const Vector3<Scalar>& velocity,
                                   Scalar stiffness, Scalar damping, Scalar mu,
                                   Scalar regularization) {
  Vector3<Scalar> force = Vector3<Scalar>::Zero();
  if (!(position.z() < Scalar(0))) return force;
  const Scalar normal =
      std::max(Scalar(0), stiffness * (-position.z()) - damping * velocity.z());
  force.z() = normal;
  const Eigen::Matrix<Scalar, 2, 1> tangential = velocity.template head<2>();
  const Scalar speed = tangential.norm();
  if (speed > Scalar(0) && normal > Scalar(0)) {
    const Scalar scale = mu * normal / std::max(speed, regularization);
    force.template head<2>() = -scale * tangential;
  }
  return force;
}

Vector3d groundContactForce(const Vector3d& position, const Vector3d& velocity,
                            const SimParams& params);

/// Height of the contact surface (ground or obstacle top) below (x, y) at time t.
double surfaceHeight(const SimParams& params, double x, double y, double time);

/// Gravity + cable + ground forces per node (one column per node). Anchored
/// nodes receive their force but are never moved by the integrator.
Matrix3Xd netForces(const StructureGraph& graph, const SimState& state, const SimParams& params);

/// Cable-only forces; sums to zero over the structure.
Matrix3Xd cableForces(const StructureGraph& graph, const SimState& state);

/// Hook applied after the velocity/position update and before the rigid
/// projection; receives the time being stepped to.
using CommandFn = std::function<void(double, SimState&)>;

/// Integrator with preallocated scratch space. Semi-implicit Euler followed by
/// mass-weighted shape matching of every rigid group; the rotary joint's two
/// groups are matched together against a reference posed at the commanded
/// angle. Friction impulses are clamped so that within one step they can at
/// most stop a contact's tangential motion, never reverse it.
class Simulator {
 public:
  Simulator(const StructureGraph& graph, SimParams params);

  void step(SimState& state, const CommandFn& command = {});
  double kineticEnergy(const SimState& state) const;
  const SimParams& params() const { return params_; }
  const StructureGraph& graph() const { return graph_; }

  /// Net force and torque (about the body's mass center) on every rigid body
  /// and free node, largest force magnitude returned.
  double equilibriumResidual(const SimState& state) const;

 private:
  struct Body {
    std::vector<std::uint32_t> members;
    Matrix3Xd reference;
    VectorXd masses;
    // Compound bodies pose the trailing `rotatingCount` members about the joint.
    Eigen::Index rotatingCount = 0;
  };

  void accumulateForces(const SimState& state, Matrix3Xd& forces) const;
  double tangentialEffectiveMass(const SimState& state, std::uint32_t node) const;
  void project(SimState& state, const Matrix3Xd& previous);

  const StructureGraph& graph_;
  SimParams params_;
  std::vector<Body> bodies_;
  std::vector<std::uint32_t> looseNodes_;
  std::vector<int> bodyOf_;  // -1 for loose nodes
  VectorXd inverseMass_;
  Matrix3Xd forces_;
  Matrix3Xd previous_;
  Matrix3Xd scratchRef_;
  Matrix3Xd scratchCur_;
};

/// One integration step; pure wrapper around Simulator.
SimState stepDynamics(const StructureGraph& graph, const SimState& state, const SimParams& params,
                      const CommandFn& command = {});

double kineticEnergy(const StructureGraph& graph, const SimState& state);

/// Steps until kinetic energy stays below settleKineticTol for settleWindow.
/// Throws SettleTimeoutError after settleMaxTime simulated seconds.
SimState settle(const StructureGraph& graph, SimState state, const SimParams& params);
void settle(Simulator& sim, SimState& state);

}  // namespace laika

#endif  // LAIKA_DYNAMICS_HPP
