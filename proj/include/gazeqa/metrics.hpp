#pragma once

#include <cstddef>
#include <vector>

#include "gazeqa/preprocessing.hpp"
#include "gazeqa/types.hpp"

namespace gazeqa {

/// Spatial accuracy of one fixation segment, degrees.
struct AccuracyResult {
  double horizontal{0.0};  // mean |x_gaze - x_target|
  double vertical{0.0};    // mean |y_gaze - y_target|
  double combined{0.0};    // mean Euclidean offset
};

/// Spatial precision of one fixation segment, degrees. RMS fields are
/// root-mean-square consecutive intersample distances; sd fields are the
/// population standard deviation of those distances.
struct PrecisionResult {
  double rms_h{0.0}, rms_v{0.0}, rms_c{0.0};
  double sd_h{0.0}, sd_v{0.0}, sd_c{0.0};
};

struct TemporalStats {
  std::size_t n_samples{0};
  double mean_isi_ms{0.0};
  double sd_isi_ms{0.0};  // population convention
  std::size_t dropped_count{0};
  double dropped_fraction{0.0};  // dropped_count / (n_samples - 1)
};

/// Dataset-level aggregate of a per-fixation metric.
struct AggregateStat {
  double median{0.0};
  double p75{0.0};
  double p90{0.0};
  double mean{0.0};
};

/// An ISI strictly above this marks a dropped sample (1.5x the nominal
/// 33.3 ms interval at 30 Hz).
inline constexpr double kDefaultDropThresholdMs = 49.95;

AccuracyResult segment_accuracy(const FixationSegment& s);

/// Angle between two gaze vectors, degrees (cosine similarity route).
double vector_accuracy_deg(const GazeVector& v, const GazeVector& u);

PrecisionResult segment_precision(const FixationSegment& s);

/// ISI statistics over consecutive device timestamps; validity flags are
/// ignored since timestamps are device-reported.
TemporalStats temporal_stats(const Recording& r,
                             double drop_threshold_ms = kDefaultDropThresholdMs);

/// ISI statistics pooled over several recordings (ISIs never span
/// recording boundaries).
TemporalStats pooled_temporal_stats(
    const std::vector<const Recording*>& recordings,
    double drop_threshold_ms = kDefaultDropThresholdMs);

enum class MetricKind { accuracy, precision };

/// median/p75/p90 over per-subject medians; mean over per-subject means, or
/// over all fixations pooled when pooled_mean is set.
AggregateStat aggregate_metric(
    const std::vector<std::vector<double>>& per_subject_values,
    MetricKind kind, bool pooled_mean = false);

struct HistogramBin {
  double left{0.0};
  double right{0.0};
  std::size_t count{0};
};

/// Fixed-width bins from 0; every value lands in exactly one bin.
std::vector<HistogramBin> histogram(const std::vector<double>& values,
                                    double bin_width = 0.25);

}  // namespace gazeqa
