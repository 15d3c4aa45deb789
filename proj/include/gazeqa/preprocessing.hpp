#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "gazeqa/types.hpp"

namespace gazeqa {

/// Per-sample error profile length: the first 30 samples after target onset
/// (~1000 ms at 30 Hz).
inline constexpr std::size_t kProfileLength = 30;

/// Upper bound of the saccade-latency shift search, milliseconds.
inline constexpr double kMaxLatencyMs = 800.0;

struct LatencyEstimate {
  int shift_samples{0};
  double shift_ms{0.0};
  /// Mean Euclidean gaze-target distance at the chosen shift, degrees.
  double residual_error_deg{0.0};
};

/// Mean gaze-target error per post-onset sample index, averaged over all
/// target steps. counts[i] == 0 marks an index with no contributors.
struct ErrorProfile {
  std::array<double, kProfileLength> mean_error{};
  std::array<std::size_t, kProfileLength> counts{};
};

/// Count-weighted combination of per-recording profiles into one profile.
ErrorProfile pool_profiles(const std::vector<ErrorProfile>& profiles);

enum class WindowPolicy { data_driven, paper_fixed };

std::string to_string(WindowPolicy p);
WindowPolicy window_policy_from_string(const std::string& s);

/// Inclusive sample-index window relative to target onset.
struct StableWindow {
  std::size_t start_index{0};
  std::size_t end_index{0};
};

inline constexpr double kDefaultToleranceFactor = 1.10;

struct TimedAngles {
  double timestamp_ms{0.0};
  GazeAngles angles{};
};

/// A latency-corrected, windowed run of valid gaze angles for one target.
struct FixationSegment {
  std::string subject_id;
  GazeAngles target{};
  std::vector<TimedAngles> samples;
  std::size_t source_step_index{0};
};

/// Exhaustive integer-sample shift search minimizing the mean gaze-target
/// distance, shifts 0..floor(800 ms / nominal ISI). Ties break toward the
/// smaller shift.
LatencyEstimate estimate_latency(const Recording& r);

ErrorProfile error_profile(const Recording& r, const LatencyEstimate& shift);

/// data_driven: longest contiguous run of indices whose mean error is within
/// tolerance_factor of the profile minimum (earlier window on ties).
/// paper_fixed: indices 8..22 unconditionally.
StableWindow select_stable_window(const ErrorProfile& p, WindowPolicy policy,
                                  double tolerance_factor = kDefaultToleranceFactor);

struct SegmentExtraction {
  std::vector<FixationSegment> segments;
  std::size_t skipped_steps{0};  // steps with zero valid in-window samples
};

SegmentExtraction extract_segments(const Recording& r,
                                   const LatencyEstimate& shift,
                                   const StableWindow& w);

GazeAngles segment_mean_gaze(const FixationSegment& s);

}  // namespace gazeqa
