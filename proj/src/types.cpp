#include "gazeqa/types.hpp"

#include <cmath>
#include <numbers>

namespace gazeqa {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;
}  // namespace

std::string to_string(Task t) {
  return t == Task::random_saccades ? "random_saccades" : "calibration_grid";
}

Task task_from_string(const std::string& s) {
  if (s == "random_saccades") return Task::random_saccades;
  if (s == "calibration_grid") return Task::calibration_grid;
  throw DataError("unknown task \"" + s +
                  "\" (expected random_saccades or calibration_grid)");
}

Point3Mm target_point_mm(const TargetStep& step, double viewing_distance_mm) {
  const GazeVector d = angles_to_vector(step.position);
  return {d.vx * viewing_distance_mm, d.vy * viewing_distance_mm,
          viewing_distance_mm};
}

GazeAngles to_angles(const GazeVector& v) {
  if (v.vx == 0.0 && v.vy == 0.0 && v.vz == 0.0)
    throw std::domain_error("to_angles: zero gaze vector");
  if (!(v.vz > 0.0))
    throw std::domain_error("to_angles: vz must be positive");
  return {std::atan2(v.vx, v.vz) * kRadToDeg,
          std::atan2(v.vy, v.vz) * kRadToDeg};
}

GazeVector angles_to_vector(const GazeAngles& a) {
  if (!(std::abs(a.x) < 90.0) || !(std::abs(a.y) < 90.0))
    throw std::domain_error("angles_to_vector: angles must lie in (-90, 90)");
  return {std::tan(a.x * kDegToRad), std::tan(a.y * kDegToRad), 1.0};
}

double euclidean_deg(const GazeAngles& a, const GazeAngles& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace gazeqa
