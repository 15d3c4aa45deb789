#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gazeqa/ingestion.hpp"
#include "gazeqa/metrics.hpp"
#include "gazeqa/preprocessing.hpp"
#include "gazeqa/recalibration.hpp"
#include "gazeqa/regression.hpp"

namespace gazeqa {

inline constexpr const char* kToolVersion = "0.1.0";

struct AnalyzeOptions {
  std::filesystem::path manifest_path;
  std::filesystem::path out_dir;
  WindowPolicy window{WindowPolicy::data_driven};
  double tolerance_factor{kDefaultToleranceFactor};
  bool recalibrate{false};
  double drop_threshold_ms{kDefaultDropThresholdMs};
  double alpha{0.05};
  bool pooled_mean{false};
  bool include_timestamp{false};
};

/// A metric family that may be marked not-computable instead of failing the
/// whole analysis.
template <typename T>
struct Computed {
  std::optional<T> value;
  std::string reason;  // set when value is absent
};

/// Per-fixation intermediate row; feeds tables, histograms, and scatters.
struct FixationRow {
  std::string subject_id;
  std::size_t step_index{0};
  std::size_t n_samples{0};
  GazeAngles target{};
  GazeAngles mean_gaze{};
  AccuracyResult accuracy{};
  bool has_precision{false};  // requires >= 2 samples
  PrecisionResult precision{};
};

struct ConditionReport {
  std::map<std::string, AggregateStat> accuracy;   // keys "H", "V", "C"
  std::map<std::string, AggregateStat> precision;  // percentiles RMS, mean SD
  Computed<LinearityResult> linearity_h, linearity_v;
  Computed<CrosstalkResult> crosstalk_h, crosstalk_v;
  std::vector<FixationRow> fixations;
};

struct SubjectExclusion {
  std::string subject_id;
  std::vector<std::string> reasons;
};

struct QualityReport {
  std::string dataset_id;
  std::vector<std::string> subjects_included;
  std::vector<SubjectExclusion> subjects_excluded;
  ConditionReport original;
  std::optional<ConditionReport> recalibrated;
  Computed<TemporalStats> temporal;  // pooled over included saccades recordings
  ErrorProfile pooled_profile;
  StableWindow window;
  std::size_t skipped_steps{0};
  std::map<std::string, LatencyEstimate> latency_by_recording;
  std::map<std::string, CalibrationModel> calibration_by_subject;
  std::string config_hash;
  AnalyzeOptions options;
  std::string generated_at_utc;  // empty unless requested
};

/// Full pipeline: ingestion, validation and exclusion, latency, window,
/// segments, optional recalibration, metrics, linearity and crosstalk.
QualityReport run_analyze(const AnalyzeOptions& opts);

std::string report_json(const QualityReport& rep);

/// Writes report.json, the table CSVs, and the intermediates that
/// export-figures consumes. Nothing is written on analysis failure.
void write_report_files(const QualityReport& rep,
                        const std::filesystem::path& out_dir);

struct GenerateOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
};

/// Writes oracle recordings, ground-truth JSON, and a ready-to-use manifest.
void run_generate(const GenerateOptions& opts);

struct ExportOptions {
  std::filesystem::path analysis_dir;
  std::filesystem::path out_dir;
  double bin_width{0.25};
};

/// Emits plot data from an analysis directory: error profile, accuracy and
/// precision histograms, linearity and crosstalk scatters with fitted models.
void run_export_figures(const ExportOptions& opts);

}  // namespace gazeqa
