#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gazeqa/types.hpp"

namespace gazeqa {

struct ManifestEntry {
  std::string subject_id;
  Task task{Task::random_saccades};
  std::filesystem::path samples;
  std::filesystem::path targets;
  double nominal_rate_hz{30.0};
  double viewing_distance_mm{1500.0};
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

/// Manifest is a JSON array of {subject_id, task, samples, targets};
/// relative paths resolve against base_dir. Each (subject_id, task) pair
/// may appear at most once.
DatasetManifest parse_manifest(const std::string& json_text,
                               const std::filesystem::path& base_dir);
DatasetManifest load_manifest(const std::filesystem::path& file);

struct RecordingMeta {
  std::string subject_id;
  Task task{Task::random_saccades};
  double nominal_rate_hz{30.0};
  double viewing_distance_mm{1500.0};
};

/// Parses the samples CSV (timestamp_ms,vx,vy,vz,valid) and targets CSV
/// (onset_ms,offset_ms,target_x_deg,target_y_deg). Samples are sorted by
/// timestamp with duplicate timestamps collapsed to the first occurrence;
/// rows with a non-finite gaze field, vz <= 0, or a 0 validity flag are
/// retained but marked invalid.
Recording parse_recording(std::istream& samples_source,
                          std::istream& targets_source,
                          const RecordingMeta& meta);

Recording load_recording(const std::filesystem::path& samples,
                         const std::filesystem::path& targets,
                         const RecordingMeta& meta);

/// Subjects with more than this fraction of invalid samples are excluded.
inline constexpr double kInvalidFractionLimit = 0.20;

struct ValidationSummary {
  std::string subject_id;
  std::size_t total_samples{0};
  double invalid_fraction{0.0};
  bool excluded{false};
  std::vector<std::string> reasons;
  /// Fraction of intervals exceeding the dropped-sample threshold.
  /// Informational only; never triggers exclusion.
  double dropped_fraction{0.0};
};

ValidationSummary validate_recording(const Recording& r);

struct DatasetEntry {
  Recording recording;
  ValidationSummary summary;
};

/// Loads and validates every manifest entry. Excluded recordings are
/// flagged, not dropped.
std::vector<DatasetEntry> load_dataset(const DatasetManifest& manifest);

void write_samples_csv(std::ostream& out, const Recording& r);
void write_targets_csv(std::ostream& out, const Recording& r);
void write_recording_csv(const Recording& r,
                         const std::filesystem::path& samples,
                         const std::filesystem::path& targets);

}  // namespace gazeqa
