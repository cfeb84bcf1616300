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

#include "laika/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace laika {

using nlohmann::json;
using nlohmann::ordered_json;

ConfigError::ConfigError(const std::string& message, std::string key, std::size_t line)
    : std::runtime_error(message), key_(std::move(key)), line_(line) {}

namespace {

enum class Range { Any, Positive, NonNegative, Fraction };

struct Field {
  std::string key;
  std::function<void(RunConfig&, const json&)> read;  // throws std::invalid_argument
  std::function<ordered_json(const RunConfig&)> write;
};

void checkRange(double v, Range range) {
  if (!std::isfinite(v)) throw std::invalid_argument("must be finite");
  switch (range) {
    case Range::Any: break;
    case Range::Positive:
      if (!(v > 0.0)) throw std::invalid_argument("must be > 0");
      break;
    case Range::NonNegative:
      if (!(v >= 0.0)) throw std::invalid_argument("must be >= 0");
      break;
    case Range::Fraction:
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("must be in [0, 1]");
      break;
  }
}

double asNumber(const json& v) {
  if (!v.is_number()) throw std::invalid_argument("expected a number");
  return v.get<double>();
}

template <typename Get>
Field real(std::string key, Get get, Range range) {
  return {std::move(key),
          [get, range](RunConfig& c, const json& v) {
            const double x = asNumber(v);
            checkRange(x, range);
            get(c) = x;
          },
          [get](const RunConfig& c) { return ordered_json(get(c)); }};
}

template <typename Get>
Field integer(std::string key, Get get) {
  return {std::move(key),
          [get](RunConfig& c, const json& v) {
            if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
            get(c) = v.get<int>();
          },
          [get](const RunConfig& c) { return ordered_json(get(c)); }};
}

template <typename Get>
Field boolean(std::string key, Get get) {
  return {std::move(key),
          [get](RunConfig& c, const json& v) {
            if (!v.is_boolean()) throw std::invalid_argument("expected true or false");
            get(c) = v.get<bool>();
          },
          [get](const RunConfig& c) { return ordered_json(get(c)); }};
}

template <typename Get>
Field text(std::string key, Get get) {
  return {std::move(key),
          [get](RunConfig& c, const json& v) {
            if (!v.is_string()) throw std::invalid_argument("expected a string");
            get(c) = v.get<std::string>();
          },
          [get](const RunConfig& c) { return ordered_json(get(c)); }};
}

template <typename Get>
Field vector3(std::string key, Get get) {
  return {std::move(key),
          [get](RunConfig& c, const json& v) {
            if (!v.is_array() || v.size() != 3) throw std::invalid_argument("expected [x, y, z]");
            Vector3d out;
            for (int i = 0; i < 3; ++i) {
              out(i) = asNumber(v[static_cast<std::size_t>(i)]);
              checkRange(out(i), Range::Any);
            }
            get(c) = out;
          },
          [get](const RunConfig& c) {
            const Vector3d& p = get(c);
            return ordered_json::array({p.x(), p.y(), p.z()});
          }};
}

BendSide parseBend(const std::string& s) {
  if (s == "pull-right") return BendSide::PullRight;
  if (s == "pull-left") return BendSide::PullLeft;
  throw std::invalid_argument("expected \"pull-right\" or \"pull-left\"");
}

RotationDirection parseRotation(const std::string& s) {
  if (s == "ccw") return RotationDirection::CCW;
  if (s == "cw") return RotationDirection::CW;
  throw std::invalid_argument("expected \"ccw\" or \"cw\"");
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f;
    // Robot.
    f.push_back(real("overallLengthM", [](auto& c) -> auto& { return c.robot.overallLength; }, Range::Positive));
    f.push_back(real("standingHeightM", [](auto& c) -> auto& { return c.robot.standingHeight; }, Range::Positive));
    f.push_back(real("hipHeightM", [](auto& c) -> auto& { return c.robot.hipHeight; }, Range::Positive));
    f.push_back(real("totalMassKg", [](auto& c) -> auto& { return c.robot.totalMass; }, Range::Positive));
    f.push_back(real("vertebraSpacingM", [](auto& c) -> auto& { return c.robot.vertebraSpacing; }, Range::Positive));
    f.push_back(vector3("endCapTopM", [](auto& c) -> auto& { return c.robot.endCapTop; }));
    f.push_back(vector3("endCapBottomM", [](auto& c) -> auto& { return c.robot.endCapBottom; }));
    f.push_back(vector3("endCapLeftM", [](auto& c) -> auto& { return c.robot.endCapLeft; }));
    f.push_back(vector3("endCapRightM", [](auto& c) -> auto& { return c.robot.endCapRight; }));
    f.push_back(real("hubOffsetM", [](auto& c) -> auto& { return c.robot.hubOffset; }, Range::Positive));
    f.push_back(real("footLongitudinalM", [](auto& c) -> auto& { return c.robot.footLongitudinal; }, Range::Positive));
    f.push_back(real("trackHalfWidthM", [](auto& c) -> auto& { return c.robot.trackHalfWidth; }, Range::Positive));
    f.push_back(real("frameLongitudinalM", [](auto& c) -> auto& { return c.robot.frameLongitudinal; }, Range::Positive));
    f.push_back(real("frameHalfWidthM", [](auto& c) -> auto& { return c.robot.frameHalfWidth; }, Range::Positive));
    f.push_back(real("spineMassFraction", [](auto& c) -> auto& { return c.robot.spineMassFraction; }, Range::Fraction));
    f.push_back(real("shoulderMassFraction", [](auto& c) -> auto& { return c.robot.shoulderMassFraction; }, Range::Fraction));
    f.push_back(real("hipMassFraction", [](auto& c) -> auto& { return c.robot.hipMassFraction; }, Range::Fraction));
    f.push_back(real("legMassFraction", [](auto& c) -> auto& { return c.robot.legMassFraction; }, Range::Fraction));
    f.push_back(text("topMaterial", [](auto& c) -> auto& { return c.robot.topMaterial; }));
    f.push_back(text("bottomMaterial", [](auto& c) -> auto& { return c.robot.bottomMaterial; }));
    f.push_back(text("leftMaterial", [](auto& c) -> auto& { return c.robot.leftMaterial; }));
    f.push_back(text("rightMaterial", [](auto& c) -> auto& { return c.robot.rightMaterial; }));
    f.push_back(text("saddleMaterial", [](auto& c) -> auto& { return c.robot.saddleMaterial; }));
    f.push_back(integer("topSpoolVertebra", [](auto& c) -> auto& { return c.robot.topSpool; }));
    f.push_back(integer("bottomSpoolVertebra", [](auto& c) -> auto& { return c.robot.bottomSpool; }));
    f.push_back(integer("leftSpoolVertebra", [](auto& c) -> auto& { return c.robot.leftSpool; }));
    f.push_back(integer("rightSpoolVertebra", [](auto& c) -> auto& { return c.robot.rightSpool; }));
    f.push_back(real("horizontalPrestrain", [](auto& c) -> auto& { return c.robot.horizontalPrestrain; }, Range::Fraction));
    f.push_back(real("saddlePrestrain", [](auto& c) -> auto& { return c.robot.saddlePrestrain; }, Range::Fraction));
    f.push_back(real("minimumPretensionN", [](auto& c) -> auto& { return c.robot.minimumPretension; }, Range::NonNegative));
    f.push_back(boolean("balancePrestress", [](auto& c) -> auto& { return c.robot.balancePrestress; }));
    f.push_back(real("slackMargin", [](auto& c) -> auto& { return c.robot.slackMargin; }, Range::NonNegative));
    f.push_back(real("cableDampingRatio", [](auto& c) -> auto& { return c.robot.cableDampingRatio; }, Range::NonNegative));
    f.push_back(real("obstacleHeightM", [](auto& c) -> auto& { return c.robot.obstacleHeight; }, Range::NonNegative));
    // Simulation.
    f.push_back(real("dtS", [](auto& c) -> auto& { return c.sim.dt; }, Range::Positive));
    f.push_back(real("gravityMps2", [](auto& c) -> auto& { return c.sim.gravity; }, Range::NonNegative));
    f.push_back(real("groundStiffnessNpm", [](auto& c) -> auto& { return c.sim.groundStiffness; }, Range::NonNegative));
    f.push_back(real("groundDampingNspm", [](auto& c) -> auto& { return c.sim.groundDamping; }, Range::NonNegative));
    f.push_back(real("frictionCoefficient", [](auto& c) -> auto& { return c.sim.frictionCoefficient; }, Range::NonNegative));
    f.push_back(real("frictionRegularizationMps", [](auto& c) -> auto& { return c.sim.frictionRegularizationVelocity; }, Range::Positive));
    f.push_back(real("settleKineticTolJ", [](auto& c) -> auto& { return c.sim.settleKineticTol; }, Range::Positive));
    f.push_back(real("settleWindowS", [](auto& c) -> auto& { return c.sim.settleWindow; }, Range::NonNegative));
    f.push_back(real("settleMaxTimeS", [](auto& c) -> auto& { return c.sim.settleMaxTime; }, Range::Positive));
    f.push_back(real("maxSpeedMps", [](auto& c) -> auto& { return c.sim.maxSpeed; }, Range::Positive));
    f.push_back(boolean("groundEnabled", [](auto& c) -> auto& { return c.sim.groundEnabled; }));
    // Protocol.
    f.push_back(real("bendRampDurationS", [](auto& c) -> auto& { return c.protocol.bendRampDuration; }, Range::NonNegative));
    f.push_back(real("liftThresholdM", [](auto& c) -> auto& { return c.protocol.liftThreshold; }, Range::Positive));
    f.push_back(real("holdWindowS", [](auto& c) -> auto& { return c.protocol.holdWindow; }, Range::NonNegative));
    f.push_back(real("samplePeriodS", [](auto& c) -> auto& { return c.protocol.samplePeriod; }, Range::Positive));
    f.push_back(boolean("fullTrace", [](auto& c) -> auto& { return c.protocol.fullTrace; }));
    // Motion.
    f.push_back({"bend",
                 [](RunConfig& c, const json& v) {
                   if (!v.is_string()) throw std::invalid_argument("expected a string");
                   c.motion.bend = parseBend(v.get<std::string>());
                 },
                 [](const RunConfig& c) { return ordered_json(to_string(c.motion.bend)); }});
    f.push_back({"rotation",
                 [](RunConfig& c, const json& v) {
                   if (!v.is_string()) throw std::invalid_argument("expected a string");
                   c.motion.rotation = parseRotation(v.get<std::string>());
                 },
                 [](const RunConfig& c) { return ordered_json(to_string(c.motion.rotation)); }});
    f.push_back(real("retraction", [](auto& c) -> auto& { return c.motion.retraction; }, Range::Fraction));
    f.push_back(real("rotationRampS", [](auto& c) -> auto& { return c.motion.rampDuration; }, Range::Positive));
    f.push_back(real("maxAngleRad", [](auto& c) -> auto& { return c.motion.maxAngle; }, Range::Positive));
    // Run selection and output.
    f.push_back(text("tension", [](auto& c) -> auto& { return c.tension; }));
    f.push_back(text("outputDir", [](auto& c) -> auto& { return c.outputDir; }));
    f.push_back(real("comparisonToleranceRad", [](auto& c) -> auto& { return c.comparisonTolerance; }, Range::NonNegative));
    f.push_back({"seed",
                 [](RunConfig& c, const json& v) {
                   if (!v.is_number_unsigned()) throw std::invalid_argument("expected an unsigned integer");
                   c.seed = v.get<std::uint64_t>();
                 },
                 [](const RunConfig& c) { return ordered_json(c.seed); }});
    return f;
  }();
  return all;
}

std::size_t lineOfOffset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::size_t lineOfKey(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  return pos == std::string::npos ? 0 : lineOfOffset(text, pos);
}

[[noreturn]] void fail(const std::string& what, const std::string& key, std::size_t line) {
  std::ostringstream msg;
  msg << "config";
  if (line > 0) msg << " line " << line;
  if (!key.empty()) msg << " key '" << key << "'";
  msg << ": " << what;
  throw ConfigError(msg.str(), key, line);
}

void validateAll(const RunConfig& c) {
  c.robot.validate();
  c.sim.validate();
  c.motion.validate();
  if (!(c.protocol.samplePeriod > 0.0)) throw std::invalid_argument("samplePeriodS must be > 0");
  tensionPointByName(c.tension);
  if (c.outputDir.empty()) throw std::invalid_argument("outputDir must not be empty");
}

std::string formatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> splitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

ordered_json optionalNumber(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

RunConfig loadConfig(const std::string& text) {
  std::set<std::string> seen;
  std::string duplicate;
  const json::parser_callback_t callback = [&](int depth, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::key && depth == 1) {
      const auto key = parsed.get<std::string>();
      if (!seen.insert(key).second && duplicate.empty()) duplicate = key;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(text, callback);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed syntax: ") + e.what(), "", lineOfOffset(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!doc.is_object()) fail("top level must be an object", "", 1);
  if (!duplicate.empty()) fail("duplicate key", duplicate, lineOfKey(text, duplicate));

  RunConfig config;
  const auto& all = fields();
  for (const auto& [key, value] : doc.items()) {
    auto it = std::find_if(all.begin(), all.end(), [&key](const Field& f) { return f.key == key; });
    if (it == all.end()) fail("unknown key", key, lineOfKey(text, key));
    try {
      it->read(config, value);
    } catch (const std::exception& e) {
      fail(e.what(), key, lineOfKey(text, key));
    }
  }
  try {
    validateAll(config);
  } catch (const std::exception& e) {
    fail(e.what(), "", 0);
  }
  return config;
}

RunConfig loadConfigFile(const std::filesystem::path& path) {
  std::string text;
  try {
    text = readText(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what(), "", 0);
  }
  try {
    return loadConfig(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.key(), e.line());
  }
}

ordered_json configToJson(const RunConfig& config) {
  ordered_json out = ordered_json::object();
  for (const Field& f : fields()) out[f.key] = f.write(config);
  return out;
}

std::vector<std::string> configKeys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.push_back(f.key);
  return keys;
}

MotionSpec parseMotion(const std::string& text, const MotionSpec& base) {
  try {
    if (text.size() == 1) return motionForFoot(parseFoot(text), base);
    const auto slash = text.find('/');
    if (slash == std::string::npos) throw std::invalid_argument("expected A-D or <bend>/<rotation>");
    MotionSpec m = base;
    m.bend = parseBend(text.substr(0, slash));
    m.rotation = parseRotation(text.substr(slash + 1));
    return m;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("motion '" + text + "': " + e.what(), "motion", 0);
  }
}

std::string formatTrace(const FootLiftTrace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceSample& s : trace.samples) {
    out += formatNumber(s.time);
    out += ',';
    out += formatNumber(s.theta);
    for (double z : s.footZ) {
      out += ',';
      out += formatNumber(z);
    }
    for (bool c : s.contact) out += c ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

FootLiftTrace parseTrace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::runtime_error("trace: line 1: unexpected header");
  }
  FootLiftTrace trace;
  std::size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    const auto cells = splitCsv(line);
    if (cells.size() != 10) {
      throw std::runtime_error("trace: line " + std::to_string(lineNo) + ": expected 10 columns");
    }
    TraceSample s;
    try {
      s.time = std::stod(cells[0]);
      s.theta = std::stod(cells[1]);
      for (std::size_t f = 0; f < 4; ++f) s.footZ[f] = std::stod(cells[2 + f]);
    } catch (const std::exception&) {
      throw std::runtime_error("trace: line " + std::to_string(lineNo) + ": bad number");
    }
    for (std::size_t f = 0; f < 4; ++f) {
      const std::string& c = cells[6 + f];
      if (c != "0" && c != "1") {
        throw std::runtime_error("trace: line " + std::to_string(lineNo) + ": contact must be 0 or 1");
      }
      s.contact[f] = c == "1";
    }
    trace.samples.push_back(s);
  }
  if (trace.samples.size() >= 2) {
    trace.samplePeriod = trace.samples[1].time - trace.samples[0].time;
  }
  return trace;
}

void writeText(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string readText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void writeTrace(const FootLiftTrace& trace, const std::filesystem::path& path) {
  writeText(formatTrace(trace), path);
}

FootLiftTrace readTrace(const std::filesystem::path& path) {
  try {
    return parseTrace(readText(path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::string runStem(const FootLiftResult& result) {
  return to_string(result.motion.bend) + "_" + to_string(result.motion.rotation) + "_" +
         result.tension.name;
}

ordered_json reportJson(const RunConfig& config, const std::vector<FootLiftResult>& results,
                        const std::optional<ComparisonReport>& comparison,
                        const std::vector<std::string>& traceFiles) {
  ordered_json report;
  report["schema"] = 1;
  report["config"] = configToJson(config);

  ordered_json runs = ordered_json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const FootLiftResult& r = results[i];
    const Foot expected = expectedFoot(r.motion);
    ordered_json run;
    run["index"] = i;
    run["motion"] = {{"bend", to_string(r.motion.bend)},
                     {"rotation", to_string(r.motion.rotation)},
                     {"retraction", r.motion.retraction},
                     {"rotationRampS", r.motion.rampDuration},
                     {"maxAngleRad", r.motion.maxAngle}};
    run["tension"] = {{"name", r.tension.name},
                      {"siliconeNpm", r.tension.silicone},
                      {"bunaNNpm", r.tension.bunaN}};
    run["expectedFoot"] = to_string(expected);
    run["liftedFoot"] = r.liftedFoot ? ordered_json(to_string(*r.liftedFoot)) : ordered_json(nullptr);
    run["liftOffAngleRad"] = optionalNumber(r.liftOffAngle);
    run["matchesExpected"] = r.liftedFoot == expected;
    run["error"] = r.error ? ordered_json(*r.error) : ordered_json(nullptr);
    run["trace"] = i < traceFiles.size() ? ordered_json(traceFiles[i]) : ordered_json(nullptr);
    runs.push_back(std::move(run));
  }
  report["runs"] = std::move(runs);

  ordered_json feetJson = ordered_json::array();
  for (Foot foot : kFeet) {
    ordered_json lifts = ordered_json::array();
    std::optional<double> lo, hi;
    for (const FootLiftResult& r : results) {
      if (r.liftedFoot != foot || !r.liftOffAngle) continue;
      lifts.push_back({{"tension", r.tension.name},
                       {"motion", to_string(r.motion.bend) + "/" + to_string(r.motion.rotation)},
                       {"angleRad", *r.liftOffAngle}});
      lo = lo ? std::min(*lo, *r.liftOffAngle) : *r.liftOffAngle;
      hi = hi ? std::max(*hi, *r.liftOffAngle) : *r.liftOffAngle;
    }
    feetJson.push_back({{"foot", to_string(foot)},
                        {"description", footDescription(foot)},
                        {"lifts", std::move(lifts)},
                        {"minAngleRad", optionalNumber(lo)},
                        {"maxAngleRad", optionalNumber(hi)}});
  }
  report["feet"] = std::move(feetJson);

  if (comparison) {
    const HardwareReference& ref = defaultHardwareReference();
    ordered_json cmp;
    cmp["toleranceRad"] = comparison->tolerance;
    ordered_json feetCmp = ordered_json::array();
    for (const FootComparison& fc : comparison->feet) {
      const AngleInterval& prior = ref.simulation[footIndex(fc.foot)];
      feetCmp.push_back({{"foot", to_string(fc.foot)},
                         {"hardwareRad", {fc.hardware.min, fc.hardware.max}},
                         {"previousSimulationRad", {prior.min, prior.max}},
                         {"bestTension", fc.bestTension},
                         {"bestAngleRad", fc.bestAngle},
                         {"distanceRad", fc.distance},
                         {"pass", fc.pass}});
    }
    cmp["feet"] = std::move(feetCmp);
    ordered_json ranking = ordered_json::array();
    for (const TensionRank& r : comparison->ranking) {
      ranking.push_back({{"tension", r.tension},
                         {"totalDistanceRad", r.totalDistance},
                         {"missingFeet", r.missingFeet}});
    }
    cmp["tensionRanking"] = std::move(ranking);
    report["hardwareComparison"] = std::move(cmp);
  }
  return report;
}

void writeReport(const ordered_json& report, const std::filesystem::path& path) {
  writeText(report.dump(2) + "\n", path);
}

std::vector<FootLiftResult> resultsFromReport(const json& report) {
  if (!report.is_object() || report.value("schema", 0) != 1 || !report.contains("runs")) {
    throw std::runtime_error("report: expected a schema 1 document with runs");
  }
  std::vector<FootLiftResult> out;
  for (const json& run : report.at("runs")) {
    FootLiftResult r;
    const json& m = run.at("motion");
    r.motion.bend = parseBend(m.at("bend").get<std::string>());
    r.motion.rotation = parseRotation(m.at("rotation").get<std::string>());
    r.motion.retraction = m.at("retraction").get<double>();
    r.motion.rampDuration = m.at("rotationRampS").get<double>();
    r.motion.maxAngle = m.at("maxAngleRad").get<double>();
    const json& t = run.at("tension");
    r.tension = {t.at("name").get<std::string>(), t.at("siliconeNpm").get<double>(),
                 t.at("bunaNNpm").get<double>()};
    if (!run.at("liftedFoot").is_null()) r.liftedFoot = parseFoot(run.at("liftedFoot").get<std::string>());
    if (!run.at("liftOffAngleRad").is_null()) r.liftOffAngle = run.at("liftOffAngleRad").get<double>();
    if (!run.at("error").is_null()) r.error = run.at("error").get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace laika
