#include "gazeqa/recalibration.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <utility>
#include <vector>

#include "gazeqa/regression.hpp"

namespace gazeqa {

namespace {

// Any triangle of target positions with non-negligible area makes the grid
// usable; degrees^2 scale.
constexpr double kCollinearAreaEps = 1e-9;

bool targets_non_collinear(const std::vector<GazeAngles>& pts) {
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double area =
          (pts[i].x - pts[0].x) * (pts[j].y - pts[0].y) -
          (pts[j].x - pts[0].x) * (pts[i].y - pts[0].y);
      if (std::abs(area) > kCollinearAreaEps) return true;
    }
  }
  return false;
}

}  // namespace

CalibrationModel fit_calibration(const std::vector<FixationSegment>& segments) {
  std::vector<GazeAngles> distinct_targets;
  std::vector<double> gx, gy, ones, tx, ty;
  for (const auto& seg : segments) {
    bool seen = false;
    for (const auto& p : distinct_targets)
      if (p.x == seg.target.x && p.y == seg.target.y) {
        seen = true;
        break;
      }
    if (!seen) distinct_targets.push_back(seg.target);
    for (const auto& s : seg.samples) {
      gx.push_back(s.angles.x);
      gy.push_back(s.angles.y);
      ones.push_back(1.0);
      tx.push_back(seg.target.x);
      ty.push_back(seg.target.y);
    }
  }

  if (distinct_targets.size() < 3 || !targets_non_collinear(distinct_targets))
    throw AnalysisError(
        "fit_calibration: grid covers fewer than 3 non-collinear targets");
  if (gx.size() < 6)
    throw AnalysisError("fit_calibration: need at least 6 samples");

  const OlsFit fx = ols_fit({gx, gy, ones}, tx);
  const OlsFit fy = ols_fit({gx, gy, ones}, ty);

  CalibrationModel m;
  m.ax = fx.coefficients[0];
  m.bx = fx.coefficients[1];
  m.cx = fx.coefficients[2];
  m.ay = fy.coefficients[0];
  m.by = fy.coefficients[1];
  m.cy = fy.coefficients[2];
  return m;
}

GazeAngles apply_calibration(const CalibrationModel& m, const GazeAngles& a) {
  return {m.ax * a.x + m.bx * a.y + m.cx, m.ay * a.x + m.by * a.y + m.cy};
}

Recording recalibrate_recording(const CalibrationModel& m, const Recording& r) {
  Recording out = r;
  for (auto& sample : out.samples) {
    if (!sample.valid) continue;
    const GazeAngles corrected = apply_calibration(m, to_angles(sample.vector));
    sample.vector = angles_to_vector(corrected);
  }
  return out;
}

std::string calibration_to_json(const CalibrationModel& m) {
  const nlohmann::json j{{"ax", m.ax}, {"bx", m.bx}, {"cx", m.cx},
                         {"ay", m.ay}, {"by", m.by}, {"cy", m.cy}};
  return j.dump(2);
}

CalibrationModel calibration_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("calibration JSON parse failure: ") + e.what());
  }
  CalibrationModel m;
  try {
    m.ax = j.at("ax").get<double>();
    m.bx = j.at("bx").get<double>();
    m.cx = j.at("cx").get<double>();
    m.ay = j.at("ay").get<double>();
    m.by = j.at("by").get<double>();
    m.cy = j.at("cy").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("calibration JSON missing field: ") + e.what());
  }
  return m;
}

}  // namespace gazeqa
