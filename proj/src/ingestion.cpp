#include "gazeqa/ingestion.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "gazeqa/metrics.hpp"
#include "gazeqa/textio.hpp"

namespace gazeqa {

namespace {

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void check_header(const std::string& line,
                  const std::vector<std::string>& expected,
                  const std::string& what) {
  const auto fields = split_csv_row(line);
  if (fields.size() != expected.size()) {
    throw DataError(what + ": malformed header, expected " +
                    std::to_string(expected.size()) + " columns");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (trim(fields[i]) != expected[i])
      throw DataError(what + ": malformed header, column " +
                      std::to_string(i + 1) + " is \"" +
                      std::string(trim(fields[i])) + "\", expected \"" +
                      expected[i] + "\"");
  }
}

double parse_field(std::string_view token, std::size_t row,
                   const std::string& column, const std::string& what) {
  const auto v = parse_double(token);
  if (!v)
    throw DataError(what + ": row " + std::to_string(row) +
                    ", column " + column + ": cannot parse \"" +
                    std::string(trim(token)) + "\"");
  return *v;
}

std::vector<GazeSample> parse_samples(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw DataError("samples: missing header");
  check_header(lines[0], {"timestamp_ms", "vx", "vy", "vz", "valid"},
               "samples");

  std::vector<GazeSample> samples;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (trim(lines[row]).empty()) continue;
    const auto fields = split_csv_row(lines[row]);
    if (fields.size() != 5)
      throw DataError("samples: row " + std::to_string(row + 1) +
                      ": expected 5 columns, got " +
                      std::to_string(fields.size()));
    GazeSample s;
    s.timestamp_ms = parse_field(fields[0], row + 1, "timestamp_ms", "samples");
    if (!std::isfinite(s.timestamp_ms))
      throw DataError("samples: row " + std::to_string(row + 1) +
                      ", column timestamp_ms: non-finite value");
    s.vector.vx = parse_field(fields[1], row + 1, "vx", "samples");
    s.vector.vy = parse_field(fields[2], row + 1, "vy", "samples");
    s.vector.vz = parse_field(fields[3], row + 1, "vz", "samples");
    const double flag = parse_field(fields[4], row + 1, "valid", "samples");
    if (flag != 0.0 && flag != 1.0)
      throw DataError("samples: row " + std::to_string(row + 1) +
                      ", column valid: expected 0 or 1");
    s.valid = flag == 1.0 && std::isfinite(s.vector.vx) &&
              std::isfinite(s.vector.vy) && std::isfinite(s.vector.vz) &&
              s.vector.vz > 0.0;
    samples.push_back(s);
  }

  std::stable_sort(samples.begin(), samples.end(),
                   [](const GazeSample& a, const GazeSample& b) {
                     return a.timestamp_ms < b.timestamp_ms;
                   });
  // Duplicate timestamps collapse to the first occurrence.
  std::vector<GazeSample> unique;
  unique.reserve(samples.size());
  for (const auto& s : samples)
    if (unique.empty() || s.timestamp_ms != unique.back().timestamp_ms)
      unique.push_back(s);
  return unique;
}

std::vector<TargetStep> parse_targets(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw DataError("targets: missing header");
  check_header(lines[0],
               {"onset_ms", "offset_ms", "target_x_deg", "target_y_deg"},
               "targets");

  std::vector<TargetStep> steps;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (trim(lines[row]).empty()) continue;
    const auto fields = split_csv_row(lines[row]);
    if (fields.size() != 4)
      throw DataError("targets: row " + std::to_string(row + 1) +
                      ": expected 4 columns, got " +
                      std::to_string(fields.size()));
    TargetStep t;
    t.onset_ms = parse_field(fields[0], row + 1, "onset_ms", "targets");
    t.offset_ms = parse_field(fields[1], row + 1, "offset_ms", "targets");
    t.position.x = parse_field(fields[2], row + 1, "target_x_deg", "targets");
    t.position.y = parse_field(fields[3], row + 1, "target_y_deg", "targets");
    for (double v : {t.onset_ms, t.offset_ms, t.position.x, t.position.y})
      if (!std::isfinite(v))
        throw DataError("targets: row " + std::to_string(row + 1) +
                        ": non-finite value");
    if (!(t.offset_ms > t.onset_ms))
      throw DataError("targets: row " + std::to_string(row + 1) +
                      ": offset_ms must exceed onset_ms");
    if (!steps.empty() && t.onset_ms < steps.back().offset_ms)
      throw DataError("targets: row " + std::to_string(row + 1) +
                      ": step overlaps or precedes the previous step");
    steps.push_back(t);
  }
  return steps;
}

}  // namespace

Recording parse_recording(std::istream& samples_source,
                          std::istream& targets_source,
                          const RecordingMeta& meta) {
  Recording r;
  r.subject_id = meta.subject_id;
  r.task = meta.task;
  r.nominal_rate_hz = meta.nominal_rate_hz;
  r.viewing_distance_mm = meta.viewing_distance_mm;
  r.samples = parse_samples(samples_source);
  r.targets = parse_targets(targets_source);
  return r;
}

Recording load_recording(const std::filesystem::path& samples,
                         const std::filesystem::path& targets,
                         const RecordingMeta& meta) {
  std::ifstream fs(samples);
  if (!fs) throw DataError("cannot open samples file: " + samples.string());
  std::ifstream ft(targets);
  if (!ft) throw DataError("cannot open targets file: " + targets.string());
  try {
    return parse_recording(fs, ft, meta);
  } catch (const DataError& e) {
    throw DataError(samples.string() + " / " + targets.string() + ": " +
                    e.what());
  }
}

DatasetManifest parse_manifest(const std::string& json_text,
                               const std::filesystem::path& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest JSON parse failure: ") + e.what());
  }
  if (!doc.is_array()) throw DataError("manifest: expected a JSON array");

  DatasetManifest m;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& item : doc) {
    if (!item.is_object())
      throw DataError("manifest: entries must be JSON objects");
    ManifestEntry e;
    try {
      e.subject_id = item.at("subject_id").get<std::string>();
      e.task = task_from_string(item.at("task").get<std::string>());
      e.samples = std::filesystem::path(item.at("samples").get<std::string>());
      e.targets = std::filesystem::path(item.at("targets").get<std::string>());
    } catch (const nlohmann::json::exception& ex) {
      throw DataError(std::string("manifest entry: ") + ex.what());
    }
    if (item.contains("rate_hz")) e.nominal_rate_hz = item.at("rate_hz").get<double>();
    if (item.contains("viewing_distance_mm"))
      e.viewing_distance_mm = item.at("viewing_distance_mm").get<double>();
    if (e.samples.is_relative()) e.samples = base_dir / e.samples;
    if (e.targets.is_relative()) e.targets = base_dir / e.targets;
    if (!seen.insert({e.subject_id, to_string(e.task)}).second)
      throw DataError("manifest: duplicate entry for subject \"" +
                      e.subject_id + "\", task " + to_string(e.task));
    m.entries.push_back(std::move(e));
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open manifest: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), file.parent_path());
}

ValidationSummary validate_recording(const Recording& r) {
  if (r.samples.empty())
    throw DataError("validate_recording(" + r.subject_id +
                    "): empty recording");

  ValidationSummary s;
  s.subject_id = r.subject_id;
  s.total_samples = r.samples.size();

  std::size_t invalid = 0;
  for (const auto& sample : r.samples) invalid += sample.valid ? 0 : 1;
  s.invalid_fraction =
      static_cast<double>(invalid) / static_cast<double>(s.total_samples);
  if (s.invalid_fraction > kInvalidFractionLimit) {
    s.excluded = true;
    s.reasons.push_back("invalid fraction " + fmt_double(s.invalid_fraction) +
                        " exceeds " + fmt_double(kInvalidFractionLimit));
  }

  if (r.targets.empty()) {
    s.excluded = true;
    s.reasons.push_back("no target steps");
  }
  for (std::size_t i = 0; i + 1 < r.samples.size(); ++i) {
    if (!(r.samples[i].timestamp_ms < r.samples[i + 1].timestamp_ms)) {
      s.excluded = true;
      s.reasons.push_back("sample timestamps not strictly increasing");
      break;
    }
  }

  if (r.samples.size() >= 2)
    s.dropped_fraction = temporal_stats(r).dropped_fraction;
  return s;
}

std::vector<DatasetEntry> load_dataset(const DatasetManifest& manifest) {
  std::vector<DatasetEntry> out;
  out.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    RecordingMeta meta{e.subject_id, e.task, e.nominal_rate_hz,
                       e.viewing_distance_mm};
    Recording r = load_recording(e.samples, e.targets, meta);
    ValidationSummary s = validate_recording(r);
    out.push_back({std::move(r), std::move(s)});
  }
  return out;
}

void write_samples_csv(std::ostream& out, const Recording& r) {
  out << "timestamp_ms,vx,vy,vz,valid\n";
  for (const auto& s : r.samples) {
    out << fmt_double(s.timestamp_ms) << ',' << fmt_double(s.vector.vx) << ','
        << fmt_double(s.vector.vy) << ',' << fmt_double(s.vector.vz) << ','
        << (s.valid ? '1' : '0') << '\n';
  }
}

void write_targets_csv(std::ostream& out, const Recording& r) {
  out << "onset_ms,offset_ms,target_x_deg,target_y_deg\n";
  for (const auto& t : r.targets) {
    out << fmt_double(t.onset_ms) << ',' << fmt_double(t.offset_ms) << ','
        << fmt_double(t.position.x) << ',' << fmt_double(t.position.y) << '\n';
  }
}

void write_recording_csv(const Recording& r,
                         const std::filesystem::path& samples,
                         const std::filesystem::path& targets) {
  std::ofstream fs(samples);
  if (!fs) throw DataError("cannot write samples file: " + samples.string());
  write_samples_csv(fs, r);
  std::ofstream ft(targets);
  if (!ft) throw DataError("cannot write targets file: " + targets.string());
  write_targets_csv(ft, r);
}

}  // namespace gazeqa
