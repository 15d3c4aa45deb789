#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gazeqa/recalibration.hpp"
#include "gazeqa/types.hpp"

namespace gazeqa {

/// Corruption pipeline applied to the true gaze, in order: crosstalk terms,
/// affine miscalibration, additive isotropic noise, integer-sample latency,
/// sample dropping.
struct OracleConfig {
  std::uint64_t seed{1};
  std::string subject_id{"oracle"};
  int n_steps{80};
  double dwell_min_ms{1000.0};
  double dwell_max_ms{1500.0};
  double min_jump_deg{3.0};
  double field_half_x_deg{15.0};
  double field_half_y_deg{10.0};
  double rate_hz{30.0};
  int latency_samples{0};
  double noise_sd_deg{0.0};
  CalibrationModel affine{};  // identity = no miscalibration
  double crosstalk_linear{0.0};     // vertical error per degree of target x
  double crosstalk_quadratic{0.0};  // vertical error per degree^2 of target x
  double drop_probability{0.0};
  double settle_ms{0.0};  // linear ramp from the previous target
};

struct GroundTruth {
  OracleConfig config;
  std::vector<TargetStep> schedule;
};

struct OracleOutput {
  Recording recording;
  GroundTruth truth;
};

/// Random-saccades task: n_steps uniform positions within the field, each at
/// least min_jump_deg from its predecessor, dwelling dwell_min..dwell_max ms.
OracleOutput generate_saccades_recording(const OracleConfig& c);

/// Calibration-grid task: the 13 fixed grid positions in seed-determined
/// random order, same corruption pipeline.
OracleOutput generate_grid_recording(const OracleConfig& c);

/// Center, 4 corners, 4 edge midpoints, and 4 half-diagonal points of the
/// +-half_x x +-half_y field.
std::array<GazeAngles, 13> grid_points(double half_x_deg, double half_y_deg);

std::string ground_truth_to_json(const GroundTruth& gt);

}  // namespace gazeqa
