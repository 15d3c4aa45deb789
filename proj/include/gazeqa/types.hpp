#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gazeqa {

/// Ingestion / file-format / validation failures. CLI exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Estimation, fitting, or model-selection failures. CLI exit code 3.
struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 3D gaze direction, right-handed, vz pointing into the scene.
/// Direction only: all operations are invariant under positive scaling.
struct GazeVector {
  double vx{0.0};
  double vy{0.0};
  double vz{0.0};
};

/// Gaze position in degrees of visual angle. Positive x = rightward,
/// positive y = upward.
struct GazeAngles {
  double x{0.0};
  double y{0.0};
};

struct GazeSample {
  double timestamp_ms{0.0};
  GazeVector vector{};
  bool valid{true};
};

enum class Task { random_saccades, calibration_grid };

std::string to_string(Task t);
Task task_from_string(const std::string& s);

/// One stimulus position with its active interval [onset_ms, offset_ms).
struct TargetStep {
  double onset_ms{0.0};
  double offset_ms{0.0};
  GazeAngles position{};
};

/// Target center as a 3D point, millimeters, at the given viewing distance.
struct Point3Mm {
  double x{0.0};
  double y{0.0};
  double z{0.0};
};
Point3Mm target_point_mm(const TargetStep& step, double viewing_distance_mm);

struct Recording {
  std::string subject_id;
  Task task{Task::random_saccades};
  double nominal_rate_hz{30.0};
  double viewing_distance_mm{1500.0};
  std::vector<GazeSample> samples;  // timestamp-ordered, strictly increasing
  std::vector<TargetStep> targets;  // onset-ordered, non-overlapping

  double nominal_isi_ms() const { return 1000.0 / nominal_rate_hz; }
};

/// Degrees of visual angle from a raw gaze vector (atan2 per component).
/// Throws std::domain_error on the zero vector or vz <= 0.
GazeAngles to_angles(const GazeVector& v);

/// Inverse of to_angles with vz = 1. Requires |x| < 90 and |y| < 90.
GazeVector angles_to_vector(const GazeAngles& a);

/// sqrt(dx^2 + dy^2) over the two angle components, degrees.
double euclidean_deg(const GazeAngles& a, const GazeAngles& b);

}  // namespace gazeqa
