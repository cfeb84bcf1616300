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

#include "laika/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/QR>

namespace laika {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("LaikaConfig: " + what);
}

bool knownMaterial(const std::string& name) {
  return name == materials::kSilicone.name || name == materials::kBunaN.name ||
         name == materials::kSpring.name;
}

double meanStiffness(const std::string& material) {
  if (material == materials::kSilicone.name) return materials::kSilicone.kMean;
  if (material == materials::kBunaN.name) return materials::kBunaN.kMean;
  return materials::kSpring.kMean;
}

double criticalDamping(double stiffness, double mass, double ratio) {
  return 2.0 * std::sqrt(stiffness * mass) * ratio;
}

const char* capPrefix(Side side) {
  switch (side) {
    case Side::Top: return "T";
    case Side::Bottom: return "B";
    case Side::Left: return "L";
    case Side::Right: return "R";
  }
  return "?";
}

std::size_t sideIndex(Side side) { return static_cast<std::size_t>(side); }

}  // namespace

void LaikaConfig::validate() const {
  require(overallLength > 0.0, "overallLength must be > 0");
  require(standingHeight > 0.0, "standingHeight must be > 0");
  require(hipHeight > 0.0, "hipHeight must be > 0");
  require(spineAxisHeight() + endCapBottom.z() > 0.0, "bottom end caps must clear the ground");
  require(totalMass > 0.0, "totalMass must be > 0");
  require(vertebraSpacing > 0.0, "vertebraSpacing must be > 0");
  require(hubOffset > 0.0, "hubOffset must be > 0");
  require(footLongitudinal > 0.0 && trackHalfWidth > 0.0, "foot placement must be > 0");
  require(frameLongitudinal > 0.0 && frameHalfWidth > 0.0, "frame placement must be > 0");
  for (const Vector3d* cap : {&endCapTop, &endCapBottom, &endCapLeft, &endCapRight}) {
    require(cap->allFinite() && cap->norm() > 0.0, "end-cap offsets must be finite and nonzero");
  }
  for (double f : {spineMassFraction, shoulderMassFraction, hipMassFraction, legMassFraction}) {
    require(f >= 0.0, "mass fractions must be >= 0");
  }
  require(std::abs(spineMassFraction + shoulderMassFraction + hipMassFraction + legMassFraction -
                   1.0) <= 1e-9,
          "mass fractions must sum to 1");
  require(spineMassFraction > 0.0 && legMassFraction > 0.0,
          "spine and leg mass fractions must be > 0");
  for (const std::string* m :
       {&topMaterial, &bottomMaterial, &leftMaterial, &rightMaterial, &saddleMaterial}) {
    require(knownMaterial(*m), "unknown material '" + *m + "'");
  }
  for (int spool : {topSpool, bottomSpool, leftSpool, rightSpool}) {
    require(spool == 2 || spool == 4, "spools sit on vertebra 2 or 4");
  }
  require(horizontalPrestrain >= 0.0 && horizontalPrestrain < 1.0, "horizontalPrestrain in [0,1)");
  require(saddlePrestrain >= 0.0 && saddlePrestrain < 1.0, "saddlePrestrain in [0,1)");
  require(minimumPretension >= 0.0, "minimumPretension must be >= 0");
  require(slackMargin >= 0.0 && slackMargin < 0.25, "slackMargin must be in [0, 0.25)");
  require(cableDampingRatio >= 0.0, "cableDampingRatio must be >= 0");
  require(obstacleHeight >= 0.0, "obstacleHeight must be >= 0");
  require(frameLongitudinal >= 0.0, "frameLongitudinal must be >= 0");
}

std::string to_string(VertebraKind kind) {
  switch (kind) {
    case VertebraKind::Passive: return "passive";
    case VertebraKind::Active: return "active";
    case VertebraKind::Rotating: return "rotating";
  }
  return "unknown";
}

VertebraKind vertebraKindFor(int index) {
  switch (index) {
    case 1:
    case 5: return VertebraKind::Passive;
    case 2:
    case 4: return VertebraKind::Active;
    case 3: return VertebraKind::Rotating;
    default: throw std::invalid_argument("vertebra index must be 1..5");
  }
}

VertebraNodes buildVertebra(StructureGraph& graph, int index, VertebraKind kind,
                            const LaikaConfig& config, bool makeGroups) {
  if (vertebraKindFor(index) != kind) {
    throw std::invalid_argument("vertebra " + std::to_string(index) + " cannot be " +
                                to_string(kind));
  }
  const std::string n = std::to_string(index);
  const double mass = config.totalMass * config.spineMassFraction / 5.0;
  const Vector3d center((index - 3) * config.vertebraSpacing, 0.0, config.spineAxisHeight());

  VertebraNodes out;
  out.index = index;
  out.kind = kind;
  auto cap = [&](Side side, const Vector3d& offset) {
    const NodeId id = graph.addNode(center + offset, 0.15 * mass);
    graph.addLabel(capPrefix(side) + n, id);
    out.caps[sideIndex(side)] = id;
    return id;
  };

  if (kind != VertebraKind::Rotating) {
    const NodeId hub = graph.addNode(center, 0.4 * mass);
    graph.addLabel("C" + n, hub);
    out.nodes = {hub,
                 cap(Side::Top, config.endCapTop),
                 cap(Side::Bottom, config.endCapBottom),
                 cap(Side::Left, config.endCapLeft),
                 cap(Side::Right, config.endCapRight)};
    if (makeGroups) out.groups.push_back(graph.addGroup(out.nodes, "vertebra-" + n));
    return out;
  }

  const Vector3d axial(config.hubOffset, 0.0, 0.0);
  const NodeId rearHub = graph.addNode(center - axial, 0.2 * mass);
  graph.addLabel("C" + n + "-driving", rearHub);
  const NodeId left = cap(Side::Left, config.endCapLeft);
  const NodeId right = cap(Side::Right, config.endCapRight);
  const NodeId frontHub = graph.addNode(center + axial, 0.2 * mass);
  graph.addLabel("C" + n + "-driven", frontHub);
  const NodeId top = cap(Side::Top, config.endCapTop);
  const NodeId bottom = cap(Side::Bottom, config.endCapBottom);
  out.nodes = {rearHub, left, right, frontHub, top, bottom};
  if (makeGroups) {
    const std::array<NodeId, 3> driving{rearHub, left, right};
    const std::array<NodeId, 3> driven{frontHub, top, bottom};
    const std::size_t a = graph.addGroup(driving, "vertebra-" + n + "-driving-half");
    const std::size_t b = graph.addGroup(driven, "vertebra-" + n + "-driven-half");
    out.groups = {a, b};
    // Positive angles turn the front (driven) half counter-clockwise as seen
    // from behind the robot, i.e. right-handed about the rearward axis.
    graph.joint = RotaryJoint{a, b, center, -Vector3d::UnitX()};
  }
  return out;
}

SpineFragment buildSpine(const LaikaConfig& config) {
  config.validate();
  SpineFragment frag;
  StructureGraph& g = frag.graph;
  g.materials = {materials::kSilicone, materials::kBunaN, materials::kSpring};
  const double vertebraMass = config.totalMass * config.spineMassFraction / 5.0;

  for (int i = 1; i <= 5; ++i) {
    const bool endVertebra = i == 1 || i == 5;
    frag.vertebrae[static_cast<std::size_t>(i - 1)] =
        buildVertebra(g, i, vertebraKindFor(i), config, !endVertebra);
  }

  auto addCable = [&](NodeId a, NodeId b, const std::string& material, double prestrain,
                      CableRole role, std::string name) {
    const double length = (g.nodes[b.value].position - g.nodes[a.value].position).norm();
    Cable c;
    c.first = a;
    c.second = b;
    c.stiffness = meanStiffness(material);
    c.damping = criticalDamping(c.stiffness, vertebraMass, config.cableDampingRatio);
    c.restLength = (1.0 - prestrain) * length;
    c.originalRestLength = c.restLength;
    c.role = role;
    c.material = material;
    c.name = std::move(name);
    g.cables.push_back(std::move(c));
  };

  struct SideSpec {
    Side side;
    int spool;
    const std::string* material;
  };
  const std::array<SideSpec, 4> sides{{{Side::Top, config.topSpool, &config.topMaterial},
                                       {Side::Bottom, config.bottomSpool, &config.bottomMaterial},
                                       {Side::Left, config.leftSpool, &config.leftMaterial},
                                       {Side::Right, config.rightSpool, &config.rightMaterial}}};
  for (const SideSpec& s : sides) {
    std::vector<int> targets;
    for (int v = 1; v <= 5; ++v) {
      if (v != s.spool) targets.push_back(v);
    }
    // Groove order follows span; equal spans go rear vertebra first.
    std::stable_sort(targets.begin(), targets.end(), [&](int a, int b) {
      return std::abs(a - s.spool) < std::abs(b - s.spool);
    });
    const std::size_t side = sideIndex(s.side);
    const NodeId spoolCap = frag.vertebrae[static_cast<std::size_t>(s.spool - 1)].caps[side];
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const int target = targets[k];
      CableRole role{CableKind::Horizontal, s.side, static_cast<int>(k + 1), s.spool, target};
      addCable(spoolCap, frag.vertebrae[static_cast<std::size_t>(target - 1)].caps[side],
               *s.material, config.horizontalPrestrain, role,
               "horizontal-" + to_string(s.side) + "-" + std::to_string(s.spool) + "-" +
                   std::to_string(target));
    }
  }

  // Saddles: the forward-leaning top/bottom caps of vertebra n reach past the
  // rearward-leaning left/right caps of vertebra n+1.
  for (int v = 1; v <= 4; ++v) {
    const auto& rear = frag.vertebrae[static_cast<std::size_t>(v - 1)];
    const auto& front = frag.vertebrae[static_cast<std::size_t>(v)];
    for (Side from : {Side::Top, Side::Bottom}) {
      for (Side to : {Side::Left, Side::Right}) {
        CableRole role{CableKind::Saddle, from, 0, v, v + 1};
        addCable(rear.caps[sideIndex(from)], front.caps[sideIndex(to)], config.saddleMaterial,
                 config.saddlePrestrain, role,
                 std::string("saddle-") + capPrefix(from) + std::to_string(v) + "-" +
                     capPrefix(to) + std::to_string(v + 1));
      }
    }
  }
  if (config.balancePrestress) {
    std::vector<std::vector<NodeId>> bodies;
    for (const VertebraNodes& v : frag.vertebrae) bodies.push_back(v.nodes);
    VectorXd nominal(static_cast<Eigen::Index>(g.cables.size()));
    for (std::size_t c = 0; c < g.cables.size(); ++c) {
      const Cable& cable = g.cables[c];
      nominal(static_cast<Eigen::Index>(c)) =
          cable.stiffness * (cableLength<double>(g.nodes[cable.first.value].position,
                                                 g.nodes[cable.second.value].position) -
                             cable.restLength);
    }
    const VectorXd tension = balancedPretension(g, bodies, nominal, config.minimumPretension);
    for (std::size_t c = 0; c < g.cables.size(); ++c) {
      Cable& cable = g.cables[c];
      const double length = cableLength<double>(g.nodes[cable.first.value].position,
                                                g.nodes[cable.second.value].position);
      const double t = tension(static_cast<Eigen::Index>(c));
      cable.restLength = t > 0.0 ? length - t / cable.stiffness : (1.0 + config.slackMargin) * length;
      cable.originalRestLength = cable.restLength;
    }
  }
  return frag;
}

VectorXd balancedPretension(const StructureGraph& graph,
                            const std::vector<std::vector<NodeId>>& bodies,
                            const VectorXd& nominal, double minimum) {
  const auto nc = static_cast<Eigen::Index>(graph.cables.size());
  if (nominal.size() != nc) throw std::invalid_argument("balancedPretension: size mismatch");
  std::vector<int> owner(graph.nodes.size(), -1);
  std::vector<Vector3d> centers;
  for (std::size_t b = 0; b < bodies.size(); ++b) {
    Vector3d sum = Vector3d::Zero();
    for (NodeId id : bodies[b]) {
      owner.at(id.value) = static_cast<int>(b);
      sum += graph.nodes[id.value].position;
    }
    centers.push_back(sum / static_cast<double>(std::max<std::size_t>(1, bodies[b].size())));
  }

  const auto rows = static_cast<Eigen::Index>(6 * bodies.size());
  MatrixXd a = MatrixXd::Zero(rows, nc);
  std::vector<bool> active(static_cast<std::size_t>(nc), false);
  for (Eigen::Index c = 0; c < nc; ++c) {
    const Cable& cable = graph.cables[static_cast<std::size_t>(c)];
    const int ba = owner[cable.first.value];
    const int bb = owner[cable.second.value];
    if (ba < 0 || bb < 0 || ba == bb) continue;
    active[static_cast<std::size_t>(c)] = true;
    const Vector3d pa = graph.nodes[cable.first.value].position;
    const Vector3d pb = graph.nodes[cable.second.value].position;
    const Vector3d u = cableDirection<double>(pa, pb);
    a.block<3, 1>(6 * ba, c) += u;
    a.block<3, 1>(6 * ba + 3, c) += (pa - centers[static_cast<std::size_t>(ba)]).cross(u);
    a.block<3, 1>(6 * bb, c) -= u;
    a.block<3, 1>(6 * bb + 3, c) -= (pb - centers[static_cast<std::size_t>(bb)]).cross(u);
  }

  // Orthonormal basis of the self-stress space, then Dykstra's alternating
  // projections between that space and the box t >= minimum.
  const Eigen::FullPivLU<MatrixXd> lu(a);
  const MatrixXd kernel = lu.kernel();
  if (lu.rank() == nc || kernel.cols() == 0) return VectorXd::Zero(nc);
  const Eigen::HouseholderQR<MatrixXd> qr(kernel);
  const MatrixXd basis = qr.householderQ() * MatrixXd::Identity(nc, kernel.cols());
  auto project = [&basis](const VectorXd& v) -> VectorXd { return basis * (basis.transpose() * v); };

  VectorXd x = nominal;
  VectorXd p = VectorXd::Zero(nc);
  VectorXd q = VectorXd::Zero(nc);
  for (int it = 0; it < 20000; ++it) {
    const VectorXd y = project(x + p);
    p = x + p - y;
    VectorXd next = y + q;
    for (Eigen::Index c = 0; c < nc; ++c) {
      if (active[static_cast<std::size_t>(c)]) next(c) = std::max(next(c), minimum);
    }
    q = y + q - next;
    const double change = (next - x).cwiseAbs().maxCoeff();
    x = next;
    if (change < 1e-12) break;
  }
  VectorXd t = project(x);
  for (Eigen::Index c = 0; c < nc; ++c) {
    if (!active[static_cast<std::size_t>(c)]) t(c) = nominal(c);
    else if (std::abs(t(c)) < 1e-9) t(c) = 0.0;
  }
  return t;
}

StructureGraph buildLaika(const LaikaConfig& config) {
  SpineFragment frag = buildSpine(config);
  StructureGraph g = std::move(frag.graph);
  const double h = config.hipHeight;
  const double legMass = config.totalMass * config.legMassFraction / 4.0;

  auto buildFrame = [&](double sign, double frameMass, const VertebraNodes& vertebra,
                        const std::string& label, const char* rightFoot, const char* leftFoot) {
    std::vector<NodeId> members = vertebra.nodes;
    const double x = sign * config.frameLongitudinal;
    const double fx = sign * config.footLongitudinal;
    for (double side : {1.0, -1.0}) {
      const double y = side * config.frameHalfWidth;
      members.push_back(g.addNode(Vector3d(x, y, h), 0.5 * frameMass));
      const double fy = side * config.trackHalfWidth;
      members.push_back(g.addNode(Vector3d(fx, fy, 0.5 * h), 0.5 * legMass));
      const NodeId foot = g.addNode(Vector3d(fx, fy, 0.0), 0.5 * legMass);
      members.push_back(foot);
      g.addLabel(side > 0 ? leftFoot : rightFoot, foot);
    }
    g.addGroup(members, label);
  };

  buildFrame(-1.0, config.totalMass * config.hipMassFraction, frag.vertebrae[0], "hip-frame",
             "footD", "footC");
  buildFrame(1.0, config.totalMass * config.shoulderMassFraction, frag.vertebrae[4],
             "shoulder-frame", "footA", "footB");
  return g;
}

const std::array<TensionTestPoint, 5>& canonicalTensionPoints() {
  static const std::array<TensionTestPoint, 5> points{{{"low", 216.0, 547.0},
                                                       {"medlow", 227.0, 678.0},
                                                       {"mean", 237.0, 810.0},
                                                       {"medhigh", 248.0, 941.0},
                                                       {"high", 258.0, 1073.0}}};
  return points;
}

TensionTestPoint tensionPointByName(const std::string& name) {
  std::string key;
  for (char c : name) {
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (const auto& p : canonicalTensionPoints()) {
    if (p.name == key) return p;
  }
  throw std::invalid_argument("unknown tension point '" + name +
                              "' (expected low, medlow, mean, medhigh or high)");
}

StructureGraph applyTensionTestPoint(const StructureGraph& graph, const TensionTestPoint& point) {
  if (!(point.silicone > 0.0) || !(point.bunaN > 0.0)) {
    throw std::invalid_argument("tension test point stiffness must be > 0");
  }
  StructureGraph out = graph;
  for (Cable& c : out.cables) {
    double k = c.stiffness;
    if (c.material == materials::kSilicone.name) k = point.silicone;
    else if (c.material == materials::kBunaN.name) k = point.bunaN;
    else if (c.material == materials::kSpring.name) k = materials::kSpring.kMean;
    if (k != c.stiffness) {
      if (c.stiffness > 0.0) c.damping *= std::sqrt(k / c.stiffness);
      c.stiffness = k;
    }
  }
  return out;
}

std::vector<NodeId> spineNodes(const StructureGraph& graph) {
  std::vector<NodeId> out;
  for (const auto& [name, id] : graph.labels) {
    if (name.empty()) continue;
    const char p = name.front();
    if ((p == 'T' || p == 'B' || p == 'L' || p == 'R' || p == 'C') && name.size() >= 2 &&
        std::isdigit(static_cast<unsigned char>(name[1]))) {
      out.push_back(id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::array<NodeId, 4> feet(const StructureGraph& graph) {
  return {graph.at("footA"), graph.at("footB"), graph.at("footC"), graph.at("footD")};
}

}  // namespace laika
