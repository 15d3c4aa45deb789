#pragma once

#include <string>
#include <vector>

#include "gazeqa/preprocessing.hpp"
#include "gazeqa/types.hpp"

namespace gazeqa {

/// Affine recalibration map in degrees:
///   x' = ax x + bx y + cx
///   y' = ay x + by y + cy
/// Defaults to the identity.
struct CalibrationModel {
  double ax{1.0}, bx{0.0}, cx{0.0};
  double ay{0.0}, by{1.0}, cy{0.0};
};

/// Two independent least-squares fits of target position on measured gaze
/// (predictors x, y, 1) over all in-segment samples of a calibration grid.
/// Throws AnalysisError when the grid covers fewer than 3 non-collinear
/// targets, has fewer than 6 samples, or the design is rank deficient.
CalibrationModel fit_calibration(const std::vector<FixationSegment>& segments);

GazeAngles apply_calibration(const CalibrationModel& m, const GazeAngles& a);

/// Copy of r with every valid sample's angles (and reconstructed vector)
/// transformed by m; timestamps and validity flags unchanged.
Recording recalibrate_recording(const CalibrationModel& m, const Recording& r);

std::string calibration_to_json(const CalibrationModel& m);
CalibrationModel calibration_from_json(const std::string& text);

}  // namespace gazeqa
