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

#include "laika/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace laika {

NodeId StructureGraph::addNode(const Vector3d& position, double mass, bool anchored) {
  nodes.push_back(Node{position, Vector3d::Zero(), mass, anchored});
  return NodeId{static_cast<std::uint32_t>(nodes.size() - 1)};
}

std::size_t StructureGraph::addGroup(std::span<const NodeId> members, std::string label) {
  RigidGroup group;
  group.members.assign(members.begin(), members.end());
  group.reference.resize(3, static_cast<Eigen::Index>(members.size()));
  double mass = 0.0;
  Vector3d weighted = Vector3d::Zero();
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Node& n = nodes.at(members[i].value);
    group.reference.col(static_cast<Eigen::Index>(i)) = n.position;
    weighted += n.mass * n.position;
    mass += n.mass;
  }
  group.origin = mass > 0.0 ? Vector3d(weighted / mass) : Vector3d::Zero();
  group.basis = Matrix3d::Identity();
  group.label = std::move(label);
  groups.push_back(std::move(group));
  return groups.size() - 1;
}

void StructureGraph::addLabel(const std::string& name, NodeId id) { labels[name] = id; }

std::optional<NodeId> StructureGraph::find(const std::string& label) const {
  auto it = labels.find(label);
  if (it == labels.end()) return std::nullopt;
  return it->second;
}

NodeId StructureGraph::at(const std::string& label) const {
  auto it = labels.find(label);
  if (it == labels.end()) throw std::out_of_range("unknown node label: " + label);
  return it->second;
}

std::optional<std::size_t> StructureGraph::groupOf(NodeId id) const {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& m = groups[g].members;
    if (std::find(m.begin(), m.end(), id) != m.end()) return g;
  }
  return std::nullopt;
}

const MaterialSpec* StructureGraph::material(const std::string& name) const {
  for (const auto& m : materials) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

double StructureGraph::totalMass() const {
  return std::accumulate(nodes.begin(), nodes.end(), 0.0,
                         [](double acc, const Node& n) { return acc + n.mass; });
}

bool SimState::isFinite() const {
  return positions.allFinite() && velocities.allFinite() && restLengths.allFinite() &&
         std::isfinite(time) && std::isfinite(theta);
}

SimState initialState(const StructureGraph& graph) {
  SimState s;
  const auto n = static_cast<Eigen::Index>(graph.nodes.size());
  s.positions.resize(3, n);
  s.velocities.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.positions.col(i) = graph.nodes[static_cast<std::size_t>(i)].position;
    s.velocities.col(i) = graph.nodes[static_cast<std::size_t>(i)].velocity;
  }
  s.restLengths.resize(static_cast<Eigen::Index>(graph.cables.size()));
  for (std::size_t c = 0; c < graph.cables.size(); ++c) {
    s.restLengths(static_cast<Eigen::Index>(c)) = graph.cables[c].restLength;
  }
  return s;
}

std::size_t ValidationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; }));
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DanglingEndpoint: return "dangling endpoint";
    case ViolationKind::DanglingMember: return "dangling group member";
    case ViolationKind::DanglingLabel: return "dangling label";
    case ViolationKind::DanglingJoint: return "dangling joint";
    case ViolationKind::MasslessNode: return "massless free node";
    case ViolationKind::GroupOverlap: return "group overlap";
    case ViolationKind::AnchoredMember: return "anchored group member";
    case ViolationKind::DegenerateGroup: return "degenerate group";
    case ViolationKind::MissingFoot: return "missing foot label";
    case ViolationKind::InvalidCable: return "invalid cable";
    case ViolationKind::Disconnected: return "disconnected structure";
  }
  return "unknown";
}

std::string to_string(Side side) {
  switch (side) {
    case Side::Top: return "top";
    case Side::Bottom: return "bottom";
    case Side::Left: return "left";
    case Side::Right: return "right";
  }
  return "unknown";
}

namespace {

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t root(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void join(std::size_t a, std::size_t b) { parent[root(a)] = root(b); }
};

}  // namespace

ValidationReport validateStructure(const StructureGraph& graph) {
  ValidationReport report;
  auto add = [&report](ViolationKind kind, std::string msg) {
    report.violations.push_back(Violation{kind, std::move(msg)});
  };

  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const Node& n = graph.nodes[i];
    if (!n.anchored && !(n.mass > 0.0)) {
      add(ViolationKind::MasslessNode, "node " + std::to_string(i) + " is free with mass <= 0");
    }
  }

  for (std::size_t c = 0; c < graph.cables.size(); ++c) {
    const Cable& cable = graph.cables[c];
    const std::string tag = "cable " + std::to_string(c) + " (" + cable.name + ")";
    if (!graph.contains(cable.first) || !graph.contains(cable.second)) {
      add(ViolationKind::DanglingEndpoint, tag + " has a dangling endpoint");
      continue;
    }
    if (cable.first == cable.second || !(cable.restLength >= 0.0) || !(cable.stiffness >= 0.0) ||
        !(cable.damping >= 0.0)) {
      add(ViolationKind::InvalidCable, tag + " is malformed");
    }
  }

  // Membership: one group per node at most.
  std::vector<int> owner(graph.nodes.size(), -1);
  for (std::size_t g = 0; g < graph.groups.size(); ++g) {
    const RigidGroup& group = graph.groups[g];
    bool dangling = false;
    for (NodeId id : group.members) {
      if (!graph.contains(id)) {
        add(ViolationKind::DanglingMember, "group '" + group.label + "' references missing node " +
                                               std::to_string(id.value));
        dangling = true;
        continue;
      }
      if (owner[id.value] >= 0) {
        add(ViolationKind::GroupOverlap, "node " + std::to_string(id.value) + " is in groups '" +
                                             graph.groups[static_cast<std::size_t>(owner[id.value])].label +
                                             "' and '" + group.label + "'");
      } else {
        owner[id.value] = static_cast<int>(g);
      }
      if (graph.nodes[id.value].anchored) {
        add(ViolationKind::AnchoredMember, "group '" + group.label + "' contains anchored node");
      }
    }
    if (!dangling && (group.members.size() < 3 ||
                      group.reference.cols() != static_cast<Eigen::Index>(group.members.size()))) {
      add(ViolationKind::DegenerateGroup, "group '" + group.label + "' needs >= 3 referenced members");
    }
  }

  if (graph.joint) {
    if (graph.joint->drivingGroup >= graph.groups.size() ||
        graph.joint->drivenGroup >= graph.groups.size() ||
        graph.joint->drivingGroup == graph.joint->drivenGroup) {
      add(ViolationKind::DanglingJoint, "rotary joint references missing groups");
    }
  }

  for (const auto& [name, id] : graph.labels) {
    if (!graph.contains(id)) add(ViolationKind::DanglingLabel, "label '" + name + "' is dangling");
  }
  for (const char* foot : {"footA", "footB", "footC", "footD"}) {
    if (!graph.labels.contains(foot)) {
      add(ViolationKind::MissingFoot, std::string("missing label ") + foot);
    }
  }

  // Connectivity over bodies: each group is one body, each loose node its own.
  if (!graph.nodes.empty()) {
    const std::size_t n = graph.nodes.size();
    DisjointSet sets(n);
    for (const auto& group : graph.groups) {
      std::optional<std::uint32_t> first;
      for (NodeId id : group.members) {
        if (!graph.contains(id)) continue;
        if (first) sets.join(*first, id.value);
        else first = id.value;
      }
    }
    for (const Cable& cable : graph.cables) {
      if (graph.contains(cable.first) && graph.contains(cable.second)) {
        sets.join(cable.first.value, cable.second.value);
      }
    }
    if (graph.joint && graph.joint->drivingGroup < graph.groups.size() &&
        graph.joint->drivenGroup < graph.groups.size()) {
      const auto& a = graph.groups[graph.joint->drivingGroup].members;
      const auto& b = graph.groups[graph.joint->drivenGroup].members;
      if (!a.empty() && !b.empty() && graph.contains(a.front()) && graph.contains(b.front())) {
        sets.join(a.front().value, b.front().value);
      }
    }
    const std::size_t root = sets.root(0);
    for (std::size_t i = 1; i < n; ++i) {
      if (sets.root(i) != root) {
        add(ViolationKind::Disconnected, "node " + std::to_string(i) + " is not connected");
        break;
      }
    }
  }
  return report;
}

Vector3d centerOfMass(const StructureGraph& graph, const SimState& state,
                      std::optional<std::span<const NodeId>> subset) {
  double mass = 0.0;
  Vector3d weighted = Vector3d::Zero();
  auto accumulate = [&](std::uint32_t i) {
    const double m = graph.nodes.at(i).mass;
    weighted += m * state.positions.col(i);
    mass += m;
  };
  if (subset) {
    if (subset->empty()) throw std::invalid_argument("centerOfMass: empty subset");
    for (NodeId id : *subset) accumulate(id.value);
  } else {
    for (std::uint32_t i = 0; i < graph.nodes.size(); ++i) accumulate(i);
  }
  if (!(mass > 0.0)) throw std::invalid_argument("centerOfMass: zero total mass");
  return weighted / mass;
}

double cableLength(const Cable& cable, const SimState& state) {
  return cableLength<double>(state.position(cable.first), state.position(cable.second));
}

Vector3d cableDirection(const Cable& cable, const SimState& state) {
  return cableDirection<double>(state.position(cable.first), state.position(cable.second));
}

}  // namespace laika
