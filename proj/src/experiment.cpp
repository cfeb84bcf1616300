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

#include "laika/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace laika {

std::string to_string(Foot foot) {
  static const char* names[] = {"A", "B", "C", "D"};
  return names[footIndex(foot)];
}

std::string footLabel(Foot foot) { return "foot" + to_string(foot); }

std::string footDescription(Foot foot) {
  switch (foot) {
    case Foot::A: return "front right";
    case Foot::B: return "front left";
    case Foot::C: return "back left";
    case Foot::D: return "back right";
  }
  return "unknown";
}

std::size_t footIndex(Foot foot) { return static_cast<std::size_t>(foot); }

Foot parseFoot(const std::string& text) {
  std::string s = text;
  if (s.size() == 5 && s.rfind("foot", 0) == 0) s = s.substr(4);
  if (s.size() == 1) {
    switch (std::toupper(static_cast<unsigned char>(s[0]))) {
      case 'A': return Foot::A;
      case 'B': return Foot::B;
      case 'C': return Foot::C;
      case 'D': return Foot::D;
      default: break;
    }
  }
  throw std::invalid_argument("unknown foot label '" + text + "'");
}

std::array<CanonicalMotion, 4> canonicalMotions(const MotionSpec& base) {
  auto make = [&base](BendSide bend, RotationDirection dir) {
    MotionSpec m = base;
    m.bend = bend;
    m.rotation = dir;
    return m;
  };
  return {{{make(BendSide::PullRight, RotationDirection::CCW), Foot::A},
           {make(BendSide::PullLeft, RotationDirection::CCW), Foot::C},
           {make(BendSide::PullRight, RotationDirection::CW), Foot::B},
           {make(BendSide::PullLeft, RotationDirection::CW), Foot::D}}};
}

MotionSpec motionForFoot(Foot foot, const MotionSpec& base) {
  for (const auto& c : canonicalMotions(base)) {
    if (c.expectedFoot == foot) return c.motion;
  }
  throw std::logic_error("no motion for foot");
}

Foot expectedFoot(const MotionSpec& motion) {
  for (const auto& c : canonicalMotions()) {
    if (c.motion.bend == motion.bend && c.motion.rotation == motion.rotation) return c.expectedFoot;
  }
  throw std::logic_error("no expected foot");
}

namespace {

// Index of the first sample where the foot rises above `threshold` and stays
// above it until at least `holdWindow` later.
std::optional<std::size_t> liftOffSample(const FootLiftTrace& trace, std::size_t foot,
                                         double threshold, double holdWindow) {
  const auto& s = trace.samples;
  std::optional<std::size_t> since;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].footZ[foot] > threshold) {
      if (!since) since = i;
      if (s[i].time - s[*since].time >= holdWindow - 1e-9) return since;
    } else {
      since.reset();
    }
  }
  return std::nullopt;
}

void checkDetectionArgs(double threshold, double holdWindow) {
  if (!(threshold > 0.0)) throw std::invalid_argument("lift-off threshold must be > 0");
  if (!(holdWindow >= 0.0)) throw std::invalid_argument("hold window must be >= 0");
}

}  // namespace

std::optional<double> detectLiftOff(const FootLiftTrace& trace, Foot foot, double threshold,
                                    double holdWindow) {
  checkDetectionArgs(threshold, holdWindow);
  const auto i = liftOffSample(trace, footIndex(foot), threshold, holdWindow);
  if (!i) return std::nullopt;
  return std::abs(trace.samples[*i].theta);
}

std::optional<double> detectLiftOff(const FootLiftTrace& trace, const std::string& foot,
                                    double threshold, double holdWindow) {
  return detectLiftOff(trace, parseFoot(foot), threshold, holdWindow);
}

namespace {

class Recorder {
 public:
  Recorder(const StructureGraph& graph, const SimParams& params, const ProtocolOptions& options,
           std::span<const std::size_t> pulled, double startTime)
      : params_(params), options_(options), feet_(feet(graph)), spine_(spineNodes(graph)), graph_(graph),
        pulled_(pulled.begin(), pulled.end()), start_(startTime), next_(startTime) {
    trace.samplePeriod = options.samplePeriod;
  }

  void maybeRecord(const SimState& state, Phase phase) {
    if (state.time + 1e-9 < next_) return;
    record(state, phase);
    ++count_;
    next_ = start_ + static_cast<double>(count_) * options_.samplePeriod;
  }

  /// True once some foot has been above the threshold for the hold window.
  bool liftConfirmed() const {
    for (std::size_t f = 0; f < 4; ++f) {
      if (since_[f] && trace.samples.back().time - trace.samples[*since_[f]].time >=
                           options_.holdWindow - 1e-9) {
        return true;
      }
    }
    return false;
  }

  FootLiftTrace trace;

 private:
  void record(const SimState& state, Phase phase) {
    TraceSample s;
    s.time = state.time - start_;
    s.theta = state.theta;
    s.phase = phase;
    for (std::size_t f = 0; f < 4; ++f) {
      const Vector3d p = state.positions.col(feet_[f].value);
      const double z = p.z() - surfaceHeight(params_, p.x(), p.y(), state.time);
      s.footZ[f] = z;
      s.contact[f] = z < 0.0;
    }
    s.spineCom = centerOfMass(graph_, state, std::span<const NodeId>(spine_));
    s.bendScale = 0.0;
    for (std::size_t c : pulled_) {
      s.bendScale += state.restLengths(static_cast<Eigen::Index>(c)) /
                     graph_.cables[c].originalRestLength;
    }
    s.bendScale /= static_cast<double>(pulled_.size());
    trace.samples.push_back(s);
    const std::size_t idx = trace.samples.size() - 1;
    for (std::size_t f = 0; f < 4; ++f) {
      if (s.footZ[f] > options_.liftThreshold) {
        if (!since_[f]) since_[f] = idx;
      } else {
        since_[f].reset();
      }
    }
  }

  const SimParams& params_;
  const ProtocolOptions& options_;
  std::array<NodeId, 4> feet_;
  std::vector<NodeId> spine_;
  const StructureGraph& graph_;
  std::vector<std::size_t> pulled_;
  double start_;
  double next_;
  std::size_t count_ = 0;
  std::array<std::optional<std::size_t>, 4> since_{};
};

}  // namespace

FootLiftResult runFootLiftTest(const LaikaConfig& config, const MotionSpec& motion,
                               const TensionTestPoint& tension, const SimParams& params,
                               const ProtocolOptions& options) {
  motion.validate();
  config.validate();
  params.validate();
  checkDetectionArgs(options.liftThreshold, options.holdWindow);
  if (!(options.samplePeriod > 0.0) || !(options.bendRampDuration >= 0.0)) {
    throw std::invalid_argument("sample period must be > 0 and bend ramp >= 0");
  }

  const StructureGraph graph = applyTensionTestPoint(buildLaika(config), tension);
  Simulator sim(graph, params);
  SimState state = initialState(graph);
  settle(sim, state);

  const auto set = horizontalSet(graph, pulledSide(motion.bend));
  std::array<double, 4> original{};
  for (std::size_t g = 0; g < 4; ++g) original[g] = graph.cables[set[g]].originalRestLength;

  Recorder recorder(graph, params, options, set, state.time);
  recorder.maybeRecord(state, Phase::Bend);

  // Bend: rest lengths ramp linearly to P r(0).
  const double bendStart = state.time;
  const double rampEnd = bendStart + options.bendRampDuration;
  const CommandFn bendCommand = [&](double t, SimState& s) {
    const double progress =
        options.bendRampDuration > 0.0 ? std::clamp((t - bendStart) / options.bendRampDuration, 0.0, 1.0)
                                       : 1.0;
    const double scale = 1.0 - (1.0 - motion.retraction) * progress;
    for (std::size_t g = 0; g < 4; ++g) {
      s.restLengths(static_cast<Eigen::Index>(set[g])) = std::max(0.0, scale * original[g]);
    }
  };
  if (options.bendRampDuration == 0.0) bendCommand(bendStart, state);
  while (state.time < rampEnd - 0.5 * params.dt) {
    sim.step(state, bendCommand);
    recorder.maybeRecord(state, Phase::Bend);
  }

  // Settle with the bend held.
  {
    const double start = state.time;
    double calmSince = state.time;
    bool calm = sim.kineticEnergy(state) < params.settleKineticTol;
    while (!(calm && state.time - calmSince >= params.settleWindow - 0.5 * params.dt)) {
      if (state.time - start >= params.settleMaxTime) {
        throw SettleTimeoutError("bent structure did not settle within " +
                                 std::to_string(params.settleMaxTime) + " s");
      }
      sim.step(state);
      recorder.maybeRecord(state, Phase::Settle);
      const bool nowCalm = sim.kineticEnergy(state) < params.settleKineticTol;
      if (nowCalm && !calm) calmSince = state.time;
      calm = nowCalm;
    }
  }

  // Rotation ramp; a hold window past the ramp end lets a late lift confirm.
  const double rotStart = state.time;
  const CommandFn rotateCommand = [&](double t, SimState& s) {
    s.theta = options.rotate ? rotationAngle(std::max(0.0, t - rotStart), motion.rotation, motion) : 0.0;
  };
  const double rotEnd = rotStart + motion.rampDuration + options.holdWindow;
  while (state.time < rotEnd - 0.5 * params.dt) {
    sim.step(state, rotateCommand);
    recorder.maybeRecord(state, Phase::Rotate);
    if (!options.fullTrace && !recorder.trace.samples.empty() && recorder.liftConfirmed()) break;
  }

  FootLiftResult result;
  result.motion = motion;
  result.tension = tension;
  result.trace = std::move(recorder.trace);

  std::optional<std::size_t> first;
  for (Foot foot : kFeet) {
    const auto idx =
        liftOffSample(result.trace, footIndex(foot), options.liftThreshold, options.holdWindow);
    if (idx && (!first || *idx < *first)) {
      first = idx;
      result.liftedFoot = foot;
    }
  }
  if (first) result.liftOffAngle = std::abs(result.trace.samples[*first].theta);
  return result;
}

std::vector<FootLiftResult> calibrationSweep(const LaikaConfig& config, const SimParams& params,
                                             const ProtocolOptions& options,
                                             const MotionSpec& base) {
  struct Job {
    MotionSpec motion;
    TensionTestPoint tension;
  };
  std::vector<Job> jobs;
  for (const auto& m : canonicalMotions(base)) {
    for (const auto& t : canonicalTensionPoints()) jobs.push_back({m.motion, t});
  }
  std::vector<FootLiftResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = runFootLiftTest(config, jobs[i].motion, jobs[i].tension, params, options);
      } catch (const std::exception& e) {
        results[i].motion = jobs[i].motion;
        results[i].tension = jobs[i].tension;
        results[i].error = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                           static_cast<unsigned>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return results;
}

ObstacleScenarioResult runObstacleScenario(const LaikaConfig& config, Foot foot,
                                           const TensionTestPoint& tension, const SimParams& params,
                                           const ProtocolOptions& options, const MotionSpec& base) {
  config.validate();
  const StructureGraph graph = buildLaika(config);
  const Vector3d at = graph.nodes[feet(graph)[footIndex(foot)].value].position;
  constexpr double kHalfSize = 0.04;  // m
  constexpr double kRiseTime = 1.0;   // s
  SimParams withBox = params;
  withBox.obstacles.push_back({at.x() - kHalfSize, at.x() + kHalfSize, at.y() - kHalfSize,
                               at.y() + kHalfSize, config.obstacleHeight, kRiseTime});

  ObstacleScenarioResult out;
  out.supportedFoot = foot;
  out.obstacleHeight = config.obstacleHeight;
  out.run = runFootLiftTest(config, motionForFoot(foot, base), tension, withBox, options);
  if (!out.run.trace.samples.empty()) {
    const TraceSample& last = out.run.trace.samples.back();
    out.othersGrounded = true;
    for (Foot other : kFeet) {
      if (other != foot && !last.contact[footIndex(other)]) out.othersGrounded = false;
    }
  }
  return out;
}

double AngleInterval::distance(double angle) const {
  return std::max({0.0, min - angle, angle - max});
}

const HardwareReference& defaultHardwareReference() {
  static const HardwareReference ref{
      {{{0.44, 0.50}, {0.57, 0.60}, {0.51, 0.54}, {0.41, 0.43}}},
      {{{0.33, 0.47}, {0.35, 0.47}, {0.25, 0.44}, {0.25, 0.43}}}};
  return ref;
}

ComparisonReport compareToHardware(const std::vector<FootLiftResult>& results,
                                   const HardwareReference& reference, double tolerance) {
  if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
  ComparisonReport report;
  report.tolerance = tolerance;

  std::vector<std::string> tensions;
  for (const auto& r : results) {
    if (std::find(tensions.begin(), tensions.end(), r.tension.name) == tensions.end()) {
      tensions.push_back(r.tension.name);
    }
  }

  for (Foot foot : kFeet) {
    FootComparison& fc = report.feet[footIndex(foot)];
    fc.foot = foot;
    fc.hardware = reference.hardware[footIndex(foot)];
    fc.distance = std::numeric_limits<double>::infinity();
    for (const auto& r : results) {
      if (r.error || r.liftedFoot != foot || !r.liftOffAngle) continue;
      fc.anglesByTension.emplace_back(r.tension.name, *r.liftOffAngle);
      const double d = fc.hardware.distance(*r.liftOffAngle);
      if (d < fc.distance) {
        fc.distance = d;
        fc.bestTension = r.tension.name;
        fc.bestAngle = *r.liftOffAngle;
      }
    }
    if (fc.anglesByTension.empty()) {
      throw std::invalid_argument("compareToHardware: no run lifted foot " + to_string(foot));
    }
    fc.pass = fc.distance <= tolerance;
  }

  for (const auto& name : tensions) {
    TensionRank rank{name, 0.0, 0};
    for (const FootComparison& fc : report.feet) {
      auto it = std::find_if(fc.anglesByTension.begin(), fc.anglesByTension.end(),
                             [&name](const auto& p) { return p.first == name; });
      if (it == fc.anglesByTension.end()) {
        ++rank.missingFeet;
      } else {
        rank.totalDistance += fc.hardware.distance(it->second);
      }
    }
    report.ranking.push_back(rank);
  }
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [](const TensionRank& a, const TensionRank& b) {
                     if (a.missingFeet != b.missingFeet) return a.missingFeet < b.missingFeet;
                     return a.totalDistance < b.totalDistance;
                   });
  return report;
}

}  // namespace laika
