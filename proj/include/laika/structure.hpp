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

#ifndef LAIKA_STRUCTURE_HPP
#define LAIKA_STRUCTURE_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace laika {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix3X = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;

using Eigen::Matrix3d;
using Eigen::Matrix3Xd;
using Eigen::Vector3d;
using Eigen::VectorXd;
using Eigen::MatrixXd;

/// Index of a node inside a StructureGraph.
struct NodeId {
  std::uint32_t value = 0;
  friend auto operator<=>(NodeId, NodeId) = default;
};

struct Node {
  Vector3d position = Vector3d::Zero();  // m
  Vector3d velocity = Vector3d::Zero();  // m/s
  double mass = 0.0;                     // kg
  bool anchored = false;
};

enum class Side { Top, Bottom, Left, Right };

enum class CableKind { Horizontal, Saddle, StructuralPassive };

/// What a cable does in the lattice. Horizontal cables belong to one of the
/// four side sets and sit in a spool groove (1..4, ordered by span).
struct CableRole {
  CableKind kind = CableKind::StructuralPassive;
  Side side = Side::Top;
  int groove = 0;
  int spoolVertebra = 0;
  int targetVertebra = 0;
};

struct Cable {
  NodeId first;
  NodeId second;
  double stiffness = 0.0;           // N/m
  double damping = 0.0;             // N s/m
  double restLength = 0.0;          // m
  double originalRestLength = 0.0;  // m
  CableRole role;
  std::string material;
  std::string name;
};

struct MaterialSpec {
  std::string name;
  double kMean = 0.0;  // N/m
  double kStd = 0.0;   // N/m
};

namespace materials {
inline const MaterialSpec kSilicone{"silicone", 237.0, 11.0};
inline const MaterialSpec kBunaN{"buna-n", 810.0, 132.0};
inline const MaterialSpec kSpring{"spring", 187.0, 0.0};
}  // namespace materials

/// A set of nodes moved as one rigid body. `reference` holds the member
/// positions (world frame) at build time; `origin`/`basis` describe the
/// group frame in that same pose.
struct RigidGroup {
  std::vector<NodeId> members;
  Matrix3Xd reference;
  Vector3d origin = Vector3d::Zero();
  Matrix3d basis = Matrix3d::Identity();
  std::string label;
};

/// Revolute coupling between two rigid groups whose relative angle is
/// prescribed. Pivot and axis are expressed in the reference pose.
struct RotaryJoint {
  std::size_t drivingGroup = 0;
  std::size_t drivenGroup = 0;
  Vector3d pivot = Vector3d::Zero();
  Vector3d axis = Vector3d::UnitX();
};

struct StructureGraph {
  std::vector<Node> nodes;
  std::vector<Cable> cables;
  std::vector<RigidGroup> groups;
  std::optional<RotaryJoint> joint;
  std::map<std::string, NodeId> labels;
  std::vector<MaterialSpec> materials;

  NodeId addNode(const Vector3d& position, double mass, bool anchored = false);
  std::size_t addGroup(std::span<const NodeId> members, std::string label);
  void addLabel(const std::string& name, NodeId id);

  std::optional<NodeId> find(const std::string& label) const;
  /// Throws std::out_of_range for unknown labels.
  NodeId at(const std::string& label) const;
  bool contains(NodeId id) const { return id.value < nodes.size(); }
  const Node& node(NodeId id) const { return nodes.at(id.value); }
  std::optional<std::size_t> groupOf(NodeId id) const;
  const MaterialSpec* material(const std::string& name) const;

  double totalMass() const;
};

/// Evolving simulation state. Positions and velocities are stored column-wise,
/// one column per node.
struct SimState {
  Matrix3Xd positions;
  Matrix3Xd velocities;
  VectorXd restLengths;
  double time = 0.0;   // s
  double theta = 0.0;  // rad, commanded center-vertebra angle

  Vector3d position(NodeId id) const { return positions.col(id.value); }
  Vector3d velocity(NodeId id) const { return velocities.col(id.value); }
  bool isFinite() const;
};

SimState initialState(const StructureGraph& graph);

enum class ViolationKind {
  DanglingEndpoint,
  DanglingMember,
  DanglingLabel,
  DanglingJoint,
  MasslessNode,
  GroupOverlap,
  AnchoredMember,
  DegenerateGroup,
  MissingFoot,
  InvalidCable,
  Disconnected,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
};

std::string to_string(ViolationKind kind);
std::string to_string(Side side);

/// Lists every invariant violation of `graph`. Never throws.
ValidationReport validateStructure(const StructureGraph& graph);

/// Mass-weighted mean position. With an empty `subset` every node is used.
/// Throws std::invalid_argument on an explicitly empty subset or zero mass.
Vector3d centerOfMass(const StructureGraph& graph, const SimState& state,
                      std::optional<std::span<const NodeId>> subset = std::nullopt);

class DegenerateCableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDegenerateLength = 1e-9;

template <typename Scalar>
Scalar cableLength(const Vector3<Scalar>& from, const Vector3<Scalar>& to) {
  return (to - from).norm();
}

/// Unit vector from `from` to `to`. Throws DegenerateCableError when the
/// points are closer than kDegenerateLength.
template <typename Scalar>
Vector3<Scalar> cableDirection(const Vector3<Scalar>& from, const Vector3<Scalar>& to) {
  const Vector3<Scalar> d = to - from;
  const Scalar n = d.norm();
  if (!(n >= Scalar(kDegenerateLength))) {
    throw DegenerateCableError("cable endpoints coincide");
  }
  return d / n;
}

double cableLength(const Cable& cable, const SimState& state);
Vector3d cableDirection(const Cable& cable, const SimState& state);

}  // namespace laika

#endif  // LAIKA_STRUCTURE_HPP
