#include "gazeqa/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "gazeqa/oracle.hpp"
#include "gazeqa/stats.hpp"
#include "gazeqa/textio.hpp"

namespace gazeqa {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view text, std::uint64_t h) {
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string canonical_flags(const AnalyzeOptions& o) {
  std::ostringstream s;
  s << "alpha=" << fmt_double(o.alpha)
    << ";drop_threshold_ms=" << fmt_double(o.drop_threshold_ms)
    << ";pooled_mean=" << (o.pooled_mean ? 1 : 0)
    << ";recalibrate=" << (o.recalibrate ? 1 : 0)
    << ";tolerance_factor=" << fmt_double(o.tolerance_factor)
    << ";window=" << to_string(o.window);
  return s.str();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + p.string());
  out << content;
}

// ---------------------------------------------------------------------------
// Analysis pipeline
// ---------------------------------------------------------------------------

struct SubjectData {
  std::string subject_id;
  Recording saccades;
  ValidationSummary saccades_summary;
  std::optional<Recording> grid;
  std::optional<ValidationSummary> grid_summary;
};

std::vector<SubjectData> load_subjects(const DatasetManifest& manifest,
                                       bool need_grid) {
  std::vector<std::string> order;
  std::map<std::string, const ManifestEntry*> saccades_entry, grid_entry;
  for (const auto& e : manifest.entries) {
    if (!saccades_entry.count(e.subject_id) && !grid_entry.count(e.subject_id))
      order.push_back(e.subject_id);
    if (e.task == Task::random_saccades)
      saccades_entry[e.subject_id] = &e;
    else
      grid_entry[e.subject_id] = &e;
  }

  std::vector<SubjectData> subjects;
  for (const auto& id : order) {
    auto it = saccades_entry.find(id);
    if (it == saccades_entry.end())
      throw DataError("subject " + id + ": no random_saccades recording in manifest");
    const ManifestEntry& se = *it->second;
    SubjectData d;
    d.subject_id = id;
    d.saccades = load_recording(
        se.samples, se.targets,
        {id, Task::random_saccades, se.nominal_rate_hz, se.viewing_distance_mm});
    d.saccades_summary = validate_recording(d.saccades);

    auto git = grid_entry.find(id);
    if (git != grid_entry.end()) {
      const ManifestEntry& ge = *git->second;
      d.grid = load_recording(ge.samples, ge.targets,
                              {id, Task::calibration_grid, ge.nominal_rate_hz,
                               ge.viewing_distance_mm});
      d.grid_summary = validate_recording(*d.grid);
    } else if (need_grid) {
      throw DataError("subject " + id +
                      ": --recalibrate needs a calibration_grid recording");
    }
    subjects.push_back(std::move(d));
  }
  return subjects;
}

std::vector<FixationRow> fixation_rows(const std::vector<FixationSegment>& segments) {
  std::vector<FixationRow> rows;
  rows.reserve(segments.size());
  for (const auto& seg : segments) {
    FixationRow row;
    row.subject_id = seg.subject_id;
    row.step_index = seg.source_step_index;
    row.n_samples = seg.samples.size();
    row.target = seg.target;
    row.mean_gaze = segment_mean_gaze(seg);
    row.accuracy = segment_accuracy(seg);
    if (seg.samples.size() >= 2) {
      row.has_precision = true;
      row.precision = segment_precision(seg);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ConditionReport condition_metrics(
    const std::vector<std::vector<FixationSegment>>& segments_by_subject,
    const AnalyzeOptions& opts) {
  ConditionReport cond;

  // Per-subject metric vectors feeding the aggregates.
  std::vector<std::vector<double>> acc_h, acc_v, acc_c;
  std::vector<std::vector<double>> rms_h, rms_v, rms_c, sd_h, sd_v, sd_c;
  for (const auto& segments : segments_by_subject) {
    std::vector<double> ah, av, ac, rh, rv, rc, sh, sv, sc;
    for (const auto& seg : segments) {
      const AccuracyResult a = segment_accuracy(seg);
      ah.push_back(a.horizontal);
      av.push_back(a.vertical);
      ac.push_back(a.combined);
      if (seg.samples.size() >= 2) {
        const PrecisionResult p = segment_precision(seg);
        rh.push_back(p.rms_h);
        rv.push_back(p.rms_v);
        rc.push_back(p.rms_c);
        sh.push_back(p.sd_h);
        sv.push_back(p.sd_v);
        sc.push_back(p.sd_c);
      }
    }
    acc_h.push_back(std::move(ah));
    acc_v.push_back(std::move(av));
    acc_c.push_back(std::move(ac));
    rms_h.push_back(std::move(rh));
    rms_v.push_back(std::move(rv));
    rms_c.push_back(std::move(rc));
    sd_h.push_back(std::move(sh));
    sd_v.push_back(std::move(sv));
    sd_c.push_back(std::move(sc));
  }

  cond.accuracy["H"] = aggregate_metric(acc_h, MetricKind::accuracy, opts.pooled_mean);
  cond.accuracy["V"] = aggregate_metric(acc_v, MetricKind::accuracy, opts.pooled_mean);
  cond.accuracy["C"] = aggregate_metric(acc_c, MetricKind::accuracy, opts.pooled_mean);

  // Precision percentiles come from the RMS values; the mean column reports
  // the standard-deviation variant for comparability.
  auto precision_aggregate = [&](const std::vector<std::vector<double>>& rms,
                                 const std::vector<std::vector<double>>& sd) {
    AggregateStat a = aggregate_metric(rms, MetricKind::precision, opts.pooled_mean);
    a.mean = aggregate_metric(sd, MetricKind::precision, opts.pooled_mean).mean;
    return a;
  };
  cond.precision["H"] = precision_aggregate(rms_h, sd_h);
  cond.precision["V"] = precision_aggregate(rms_v, sd_v);
  cond.precision["C"] = precision_aggregate(rms_c, sd_c);

  auto run_linearity = [&](Dimension dim) -> Computed<LinearityResult> {
    try {
      return {linearity(segments_by_subject, dim), ""};
    } catch (const AnalysisError& e) {
      return {std::nullopt, e.what()};
    }
  };
  cond.linearity_h = run_linearity(Dimension::horizontal);
  cond.linearity_v = run_linearity(Dimension::vertical);

  std::vector<FixationSegment> pooled;
  for (const auto& segments : segments_by_subject)
    pooled.insert(pooled.end(), segments.begin(), segments.end());
  auto run_crosstalk = [&](Dimension dim) -> Computed<CrosstalkResult> {
    try {
      return {crosstalk(pooled, dim, opts.alpha), ""};
    } catch (const AnalysisError& e) {
      return {std::nullopt, e.what()};
    }
  };
  cond.crosstalk_h = run_crosstalk(Dimension::horizontal);
  cond.crosstalk_v = run_crosstalk(Dimension::vertical);

  cond.fixations = fixation_rows(pooled);
  return cond;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

json aggregate_json(const AggregateStat& a) {
  return {{"median", a.median}, {"p75", a.p75}, {"p90", a.p90}, {"mean", a.mean}};
}

json linearity_json(const Computed<LinearityResult>& c) {
  if (!c.value) return {{"not_computable", c.reason}};
  const auto& r = *c.value;
  return {{"mean_slope", r.mean_slope},
          {"sd_slope", r.sd_slope},
          {"ci_low", r.ci_low},
          {"ci_high", r.ci_high},
          {"significantly_nonideal", r.significantly_nonideal},
          {"per_subject_slopes", r.per_subject_slopes}};
}

json ols_json(const OlsFit& f) {
  return {{"coefficients", f.coefficients},
          {"standard_errors", f.standard_errors},
          {"p_values", f.p_values},
          {"residual_variance", f.residual_variance},
          {"n", f.n},
          {"k", f.k}};
}

json crosstalk_json(const Computed<CrosstalkResult>& c) {
  if (!c.value) return {{"not_computable", c.reason}};
  json j = ols_json(c.value->fit);
  j["model_kind"] = to_string(c.value->model_kind);
  return j;
}

json condition_json(const ConditionReport& c) {
  json j;
  for (const auto& [dim, st] : c.accuracy) j["accuracy"][dim] = aggregate_json(st);
  for (const auto& [dim, st] : c.precision) j["precision"][dim] = aggregate_json(st);
  j["linearity"]["H"] = linearity_json(c.linearity_h);
  j["linearity"]["V"] = linearity_json(c.linearity_v);
  j["crosstalk"]["H"] = crosstalk_json(c.crosstalk_h);
  j["crosstalk"]["V"] = crosstalk_json(c.crosstalk_v);
  j["n_fixations"] = c.fixations.size();
  return j;
}

json calibration_json_obj(const CalibrationModel& m) {
  return {{"ax", m.ax}, {"bx", m.bx}, {"cx", m.cx},
          {"ay", m.ay}, {"by", m.by}, {"cy", m.cy}};
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

std::string fixations_csv(const QualityReport& rep) {
  std::ostringstream out;
  out << "condition,subject_id,step_index,n_samples,target_x_deg,target_y_deg,"
         "mean_gaze_x_deg,mean_gaze_y_deg,acc_h_deg,acc_v_deg,acc_c_deg,"
         "rms_h_deg,rms_v_deg,rms_c_deg,sd_h_deg,sd_v_deg,sd_c_deg\n";
  auto emit = [&](const std::string& condition, const ConditionReport& cond) {
    for (const auto& r : cond.fixations) {
      out << condition << ',' << r.subject_id << ',' << r.step_index << ','
          << r.n_samples << ',' << fmt_double(r.target.x) << ','
          << fmt_double(r.target.y) << ',' << fmt_double(r.mean_gaze.x) << ','
          << fmt_double(r.mean_gaze.y) << ','
          << fmt_double(r.accuracy.horizontal) << ','
          << fmt_double(r.accuracy.vertical) << ','
          << fmt_double(r.accuracy.combined) << ',';
      if (r.has_precision) {
        out << fmt_double(r.precision.rms_h) << ','
            << fmt_double(r.precision.rms_v) << ','
            << fmt_double(r.precision.rms_c) << ','
            << fmt_double(r.precision.sd_h) << ','
            << fmt_double(r.precision.sd_v) << ','
            << fmt_double(r.precision.sd_c) << '\n';
      } else {
        out << "nan,nan,nan,nan,nan,nan\n";
      }
    }
  };
  emit("original", rep.original);
  if (rep.recalibrated) emit("recalibrated", *rep.recalibrated);
  return out.str();
}

std::string error_profile_csv(const ErrorProfile& p) {
  std::ostringstream out;
  out << "index,mean_error_deg,count\n";
  for (std::size_t i = 0; i < kProfileLength; ++i) {
    out << i << ',';
    if (p.counts[i] > 0)
      out << fmt_double(p.mean_error[i]);
    else
      out << "nan";
    out << ',' << p.counts[i] << '\n';
  }
  return out.str();
}

std::string accuracy_table_csv(const QualityReport& rep) {
  std::ostringstream out;
  out << "condition,dim,median_deg,p75_deg,p90_deg,mean_deg\n";
  auto emit = [&](const std::string& condition, const ConditionReport& c) {
    for (const char* dim : {"H", "V", "C"}) {
      const auto& a = c.accuracy.at(dim);
      out << condition << ',' << dim << ',' << fmt_double(a.median) << ','
          << fmt_double(a.p75) << ',' << fmt_double(a.p90) << ','
          << fmt_double(a.mean) << '\n';
    }
  };
  emit("original", rep.original);
  if (rep.recalibrated) emit("recalibrated", *rep.recalibrated);
  return out.str();
}

std::string precision_table_csv(const QualityReport& rep) {
  std::ostringstream out;
  out << "condition,dim,median_deg,p75_deg,p90_deg,mean_sd_deg\n";
  auto emit = [&](const std::string& condition, const ConditionReport& c) {
    for (const char* dim : {"H", "V", "C"}) {
      const auto& a = c.precision.at(dim);
      out << condition << ',' << dim << ',' << fmt_double(a.median) << ','
          << fmt_double(a.p75) << ',' << fmt_double(a.p90) << ','
          << fmt_double(a.mean) << '\n';
    }
  };
  emit("original", rep.original);
  if (rep.recalibrated) emit("recalibrated", *rep.recalibrated);
  return out.str();
}

std::string linearity_table_csv(const QualityReport& rep) {
  std::ostringstream out;
  out << "condition,dim,mean_slope,sd_slope,ci95_low,ci95_high,"
         "significantly_nonideal\n";
  auto emit_dim = [&](const std::string& condition, const char* dim,
                      const Computed<LinearityResult>& c) {
    out << condition << ',' << dim << ',';
    if (c.value) {
      const auto& r = *c.value;
      out << fmt_double(r.mean_slope) << ',' << fmt_double(r.sd_slope) << ','
          << fmt_double(r.ci_low) << ',' << fmt_double(r.ci_high) << ','
          << (r.significantly_nonideal ? "true" : "false") << '\n';
    } else {
      out << "nan,nan,nan,nan,not_computable\n";
    }
  };
  auto emit = [&](const std::string& condition, const ConditionReport& c) {
    emit_dim(condition, "H", c.linearity_h);
    emit_dim(condition, "V", c.linearity_v);
  };
  emit("original", rep.original);
  if (rep.recalibrated) emit("recalibrated", *rep.recalibrated);
  return out.str();
}

std::string crosstalk_table_csv(const QualityReport& rep) {
  std::ostringstream out;
  out << "condition,error_dim,model_kind,intercept,linear,quadratic,"
         "p_intercept,p_linear,p_quadratic\n";
  auto cell = [](const std::vector<double>& v, std::size_t i) {
    return i < v.size() ? fmt_double(v[i]) : std::string();
  };
  auto emit_dim = [&](const std::string& condition, const char* dim,
                      const Computed<CrosstalkResult>& c) {
    out << condition << ',' << dim << ',';
    if (c.value) {
      const auto& r = *c.value;
      out << to_string(r.model_kind) << ',' << cell(r.fit.coefficients, 0)
          << ',' << cell(r.fit.coefficients, 1) << ','
          << cell(r.fit.coefficients, 2) << ',' << cell(r.fit.p_values, 0)
          << ',' << cell(r.fit.p_values, 1) << ',' << cell(r.fit.p_values, 2)
          << '\n';
    } else {
      out << "not_computable,,,,,,\n";
    }
  };
  auto emit = [&](const std::string& condition, const ConditionReport& c) {
    emit_dim(condition, "H", c.crosstalk_h);
    emit_dim(condition, "V", c.crosstalk_v);
  };
  emit("original", rep.original);
  if (rep.recalibrated) emit("recalibrated", *rep.recalibrated);
  return out.str();
}

}  // namespace

QualityReport run_analyze(const AnalyzeOptions& opts) {
  const std::string manifest_bytes = read_file(opts.manifest_path);
  const DatasetManifest manifest =
      parse_manifest(manifest_bytes, opts.manifest_path.parent_path());
  if (manifest.entries.empty()) throw DataError("manifest: no entries");

  QualityReport rep;
  rep.options = opts;
  rep.dataset_id = opts.manifest_path.stem().string();
  rep.config_hash = hash_hex(
      fnv1a(canonical_flags(opts), fnv1a(manifest_bytes, 1469598103934665603ull)));

  auto subjects = load_subjects(manifest, opts.recalibrate);

  // Subject exclusion over the recordings the analysis will actually use.
  std::vector<SubjectData*> included;
  for (auto& s : subjects) {
    std::vector<std::string> reasons;
    if (s.saccades_summary.excluded)
      for (const auto& r : s.saccades_summary.reasons)
        reasons.push_back("random_saccades: " + r);
    if (opts.recalibrate && s.grid_summary && s.grid_summary->excluded)
      for (const auto& r : s.grid_summary->reasons)
        reasons.push_back("calibration_grid: " + r);
    if (reasons.empty())
      included.push_back(&s);
    else
      rep.subjects_excluded.push_back({s.subject_id, std::move(reasons)});
  }
  if (included.empty())
    throw AnalysisError("analysis: every subject was excluded");
  for (const auto* s : included) rep.subjects_included.push_back(s->subject_id);

  // Latency per recording, then one stable window from the pooled profile.
  std::vector<LatencyEstimate> saccade_latency(included.size());
  std::vector<ErrorProfile> profiles(included.size());
  for (std::size_t i = 0; i < included.size(); ++i) {
    saccade_latency[i] = estimate_latency(included[i]->saccades);
    profiles[i] = error_profile(included[i]->saccades, saccade_latency[i]);
    rep.latency_by_recording[included[i]->subject_id + "/random_saccades"] =
        saccade_latency[i];
  }
  rep.pooled_profile = pool_profiles(profiles);
  rep.window =
      select_stable_window(rep.pooled_profile, opts.window, opts.tolerance_factor);

  std::vector<std::vector<FixationSegment>> original_segments;
  std::vector<std::vector<FixationSegment>> recalibrated_segments;
  for (std::size_t i = 0; i < included.size(); ++i) {
    SubjectData& s = *included[i];
    SegmentExtraction ext =
        extract_segments(s.saccades, saccade_latency[i], rep.window);
    rep.skipped_steps += ext.skipped_steps;
    original_segments.push_back(std::move(ext.segments));

    if (opts.recalibrate) {
      const LatencyEstimate grid_latency = estimate_latency(*s.grid);
      rep.latency_by_recording[s.subject_id + "/calibration_grid"] = grid_latency;
      const SegmentExtraction grid_ext =
          extract_segments(*s.grid, grid_latency, rep.window);
      CalibrationModel model;
      try {
        model = fit_calibration(grid_ext.segments);
      } catch (const AnalysisError& e) {
        throw AnalysisError("subject " + s.subject_id + ": " + e.what());
      }
      rep.calibration_by_subject[s.subject_id] = model;
      const Recording corrected = recalibrate_recording(model, s.saccades);
      recalibrated_segments.push_back(
          extract_segments(corrected, saccade_latency[i], rep.window).segments);
    }
  }

  rep.original = condition_metrics(original_segments, opts);
  if (opts.recalibrate)
    rep.recalibrated = condition_metrics(recalibrated_segments, opts);

  std::vector<const Recording*> temporal_pool;
  for (const auto* s : included) temporal_pool.push_back(&s->saccades);
  try {
    rep.temporal = {pooled_temporal_stats(temporal_pool, opts.drop_threshold_ms), ""};
  } catch (const std::invalid_argument& e) {
    rep.temporal = {std::nullopt, e.what()};
  }

  if (opts.include_timestamp) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    rep.generated_at_utc = buf;
  }
  return rep;
}

std::string report_json(const QualityReport& rep) {
  json j;
  j["dataset_id"] = rep.dataset_id;
  j["subjects"] = rep.subjects_included;
  json excl = json::array();
  for (const auto& e : rep.subjects_excluded)
    excl.push_back({{"subject_id", e.subject_id}, {"reasons", e.reasons}});
  j["exclusions"] = excl;

  j["conditions"]["original"] = condition_json(rep.original);
  if (rep.recalibrated)
    j["conditions"]["recalibrated"] = condition_json(*rep.recalibrated);

  if (rep.temporal.value) {
    const auto& t = *rep.temporal.value;
    j["temporal"] = {{"n_samples", t.n_samples},
                     {"mean_isi_ms", t.mean_isi_ms},
                     {"sd_isi_ms", t.sd_isi_ms},
                     {"dropped_count", t.dropped_count},
                     {"dropped_fraction", t.dropped_fraction}};
  } else {
    j["temporal"] = {{"not_computable", rep.temporal.reason}};
  }
  j["skipped_steps"] = rep.skipped_steps;

  json prov;
  prov["version"] = kToolVersion;
  prov["config_hash"] = rep.config_hash;
  prov["window"] = {{"policy", to_string(rep.options.window)},
                    {"start_index", rep.window.start_index},
                    {"end_index", rep.window.end_index}};
  prov["tolerance_factor"] = rep.options.tolerance_factor;
  prov["alpha"] = rep.options.alpha;
  prov["drop_threshold_ms"] = rep.options.drop_threshold_ms;
  prov["pooled_mean"] = rep.options.pooled_mean;
  prov["recalibrate"] = rep.options.recalibrate;
  json lat;
  for (const auto& [key, est] : rep.latency_by_recording)
    lat[key] = {{"shift_samples", est.shift_samples},
                {"shift_ms", est.shift_ms},
                {"residual_error_deg", est.residual_error_deg}};
  prov["latency_by_recording"] = lat;
  json cal;
  for (const auto& [subject, model] : rep.calibration_by_subject)
    cal[subject] = calibration_json_obj(model);
  prov["calibration_by_subject"] = cal;
  if (!rep.generated_at_utc.empty())
    prov["generated_at_utc"] = rep.generated_at_utc;
  j["provenance"] = prov;
  return j.dump(2) + "\n";
}

void write_report_files(const QualityReport& rep,
                        const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "report.json", report_json(rep));
  write_file(out_dir / "accuracy_table.csv", accuracy_table_csv(rep));
  write_file(out_dir / "precision_table.csv", precision_table_csv(rep));
  write_file(out_dir / "linearity_table.csv", linearity_table_csv(rep));
  write_file(out_dir / "crosstalk_table.csv", crosstalk_table_csv(rep));
  write_file(out_dir / "fixations.csv", fixations_csv(rep));
  write_file(out_dir / "error_profile.csv", error_profile_csv(rep.pooled_profile));
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

namespace {

OracleConfig oracle_config_from_json(const json& j) {
  static const std::set<std::string> known = {
      "seeds",        "n_subjects",       "base_seed",
      "n_steps",      "dwell_min_ms",     "dwell_max_ms",
      "min_jump_deg", "field_half_x_deg", "field_half_y_deg",
      "rate_hz",      "latency_samples",  "noise_sd_deg",
      "affine",       "crosstalk_linear", "crosstalk_quadratic",
      "drop_probability", "settle_ms"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key))
      throw DataError("generate config: unknown key \"" + key + "\"");

  OracleConfig c;
  auto get = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  if (j.contains("n_steps")) c.n_steps = j.at("n_steps").get<int>();
  get("dwell_min_ms", c.dwell_min_ms);
  get("dwell_max_ms", c.dwell_max_ms);
  get("min_jump_deg", c.min_jump_deg);
  get("field_half_x_deg", c.field_half_x_deg);
  get("field_half_y_deg", c.field_half_y_deg);
  get("rate_hz", c.rate_hz);
  if (j.contains("latency_samples"))
    c.latency_samples = j.at("latency_samples").get<int>();
  get("noise_sd_deg", c.noise_sd_deg);
  if (j.contains("affine")) {
    const auto& a = j.at("affine");
    c.affine.ax = a.value("ax", 1.0);
    c.affine.bx = a.value("bx", 0.0);
    c.affine.cx = a.value("cx", 0.0);
    c.affine.ay = a.value("ay", 0.0);
    c.affine.by = a.value("by", 1.0);
    c.affine.cy = a.value("cy", 0.0);
  }
  get("crosstalk_linear", c.crosstalk_linear);
  get("crosstalk_quadratic", c.crosstalk_quadratic);
  get("drop_probability", c.drop_probability);
  get("settle_ms", c.settle_ms);
  return c;
}

constexpr std::uint64_t kGridSeedSalt = 0x9e3779b97f4a7c15ull;

}  // namespace

void run_generate(const GenerateOptions& opts) {
  json doc;
  try {
    doc = json::parse(read_file(opts.config_path));
  } catch (const json::exception& e) {
    throw DataError(std::string("generate config parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("generate config: expected a JSON object");

  std::vector<std::uint64_t> seeds;
  if (doc.contains("seeds")) {
    if (doc.contains("n_subjects"))
      throw DataError("generate config: give either seeds or n_subjects, not both");
    seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
  } else {
    const auto n = doc.value("n_subjects", 1);
    if (n < 1) throw DataError("generate config: n_subjects must be >= 1");
    const auto base = doc.value("base_seed", std::uint64_t{1});
    for (int i = 0; i < n; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
  }
  if (seeds.empty()) throw DataError("generate config: no seeds");

  const OracleConfig base = oracle_config_from_json(doc);
  std::filesystem::create_directories(opts.out_dir);

  json manifest = json::array();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "s%02zu", i + 1);

    OracleConfig cfg = base;
    cfg.subject_id = id;
    cfg.seed = seeds[i];
    const OracleOutput saccades = generate_saccades_recording(cfg);

    OracleConfig grid_cfg = cfg;
    grid_cfg.seed = seeds[i] ^ kGridSeedSalt;
    const OracleOutput grid = generate_grid_recording(grid_cfg);

    const std::string prefix = std::string(id) + "_";
    write_recording_csv(saccades.recording,
                        opts.out_dir / (prefix + "saccades_samples.csv"),
                        opts.out_dir / (prefix + "saccades_targets.csv"));
    write_recording_csv(grid.recording,
                        opts.out_dir / (prefix + "grid_samples.csv"),
                        opts.out_dir / (prefix + "grid_targets.csv"));
    json truth;
    truth["saccades"] = json::parse(ground_truth_to_json(saccades.truth));
    truth["grid"] = json::parse(ground_truth_to_json(grid.truth));
    write_file(opts.out_dir / (prefix + "truth.json"), truth.dump(2) + "\n");

    manifest.push_back({{"subject_id", id},
                        {"task", "random_saccades"},
                        {"samples", prefix + "saccades_samples.csv"},
                        {"targets", prefix + "saccades_targets.csv"}});
    manifest.push_back({{"subject_id", id},
                        {"task", "calibration_grid"},
                        {"samples", prefix + "grid_samples.csv"},
                        {"targets", prefix + "grid_targets.csv"}});
  }
  write_file(opts.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// export-figures
// ---------------------------------------------------------------------------

namespace {

struct FixationTable {
  // condition -> parsed columns
  struct Row {
    std::string condition, subject_id;
    double target_x, target_y, mean_x, mean_y, acc_c, rms_c;
    bool has_precision;
  };
  std::vector<Row> rows;
};

FixationTable read_fixations_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("export-figures: missing intermediate " + p.string());
  std::string line;
  if (!std::getline(in, line))
    throw DataError("export-figures: empty fixations table");
  FixationTable table;
  std::size_t rowno = 1;
  while (std::getline(in, line)) {
    ++rowno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_row(line);
    if (f.size() != 17)
      throw DataError("fixations.csv row " + std::to_string(rowno) +
                      ": expected 17 columns");
    auto num = [&](std::size_t idx) {
      const auto v = parse_double(f[idx]);
      if (!v)
        throw DataError("fixations.csv row " + std::to_string(rowno) +
                        ": bad number in column " + std::to_string(idx + 1));
      return *v;
    };
    FixationTable::Row r;
    r.condition = std::string(trim(f[0]));
    r.subject_id = std::string(trim(f[1]));
    r.target_x = num(4);
    r.target_y = num(5);
    r.mean_x = num(6);
    r.mean_y = num(7);
    r.acc_c = num(10);
    r.rms_c = num(13);
    r.has_precision = std::isfinite(r.rms_c);
    table.rows.push_back(std::move(r));
  }
  return table;
}

std::string histogram_csv(const std::vector<double>& values, double bin_width) {
  std::ostringstream out;
  out << "bin_left_deg,bin_right_deg,count\n";
  for (const auto& b : histogram(values, bin_width))
    out << fmt_double(b.left) << ',' << fmt_double(b.right) << ',' << b.count
        << '\n';
  return out.str();
}

std::string scatter_csv(const std::vector<std::pair<double, double>>& pts) {
  std::ostringstream out;
  out << "target_deg,observed_deg\n";
  for (const auto& [t, o] : pts)
    out << fmt_double(t) << ',' << fmt_double(o) << '\n';
  return out.str();
}

double eval_poly(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

std::string curve_csv(const std::vector<double>& coeffs, double lo, double hi) {
  std::ostringstream out;
  out << "target_deg,fitted_deg\n";
  constexpr int kPoints = 101;
  for (int i = 0; i < kPoints; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (kPoints - 1);
    out << fmt_double(x) << ',' << fmt_double(eval_poly(coeffs, x)) << '\n';
  }
  return out.str();
}

}  // namespace

void run_export_figures(const ExportOptions& opts) {
  const auto report_path = opts.analysis_dir / "report.json";
  json report;
  try {
    report = json::parse(read_file(report_path));
  } catch (const json::exception& e) {
    throw DataError("export-figures: cannot parse " + report_path.string() +
                    ": " + e.what());
  }
  const FixationTable table =
      read_fixations_csv(opts.analysis_dir / "fixations.csv");
  const std::string profile =
      read_file(opts.analysis_dir / "error_profile.csv");

  std::filesystem::create_directories(opts.out_dir);
  write_file(opts.out_dir / "fig_error_profile.csv", profile);

  std::vector<std::string> conditions = {"original"};
  if (report.at("conditions").contains("recalibrated"))
    conditions.push_back("recalibrated");

  for (const auto& condition : conditions) {
    const std::string suffix =
        condition == "original" ? "" : "_" + condition;

    std::vector<double> acc, prec;
    std::vector<std::pair<double, double>> lin_h, lin_v, xt_h, xt_v;
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    for (const auto& r : table.rows) {
      if (r.condition != condition) continue;
      acc.push_back(r.acc_c);
      if (r.has_precision) prec.push_back(r.rms_c);
      lin_h.emplace_back(r.target_x, r.mean_x);
      lin_v.emplace_back(r.target_y, r.mean_y);
      xt_h.emplace_back(r.target_y, r.mean_x - r.target_x);
      xt_v.emplace_back(r.target_x, r.mean_y - r.target_y);
      min_x = std::min(min_x, r.target_x);
      max_x = std::max(max_x, r.target_x);
      min_y = std::min(min_y, r.target_y);
      max_y = std::max(max_y, r.target_y);
    }
    if (acc.empty())
      throw DataError("export-figures: no fixations for condition " + condition);

    write_file(opts.out_dir / ("fig_accuracy_hist" + suffix + ".csv"),
               histogram_csv(acc, opts.bin_width));
    write_file(opts.out_dir / ("fig_precision_hist" + suffix + ".csv"),
               histogram_csv(prec, opts.bin_width));

    write_file(opts.out_dir / ("fig_linearity_h" + suffix + ".csv"),
               scatter_csv(lin_h));
    write_file(opts.out_dir / ("fig_linearity_v" + suffix + ".csv"),
               scatter_csv(lin_v));
    // Illustrative pooled fit over the scatter for each dimension.
    auto write_linearity_model =
        [&](const char* dim, const std::vector<std::pair<double, double>>& pts) {
          std::vector<double> ones(pts.size(), 1.0), tx, gx;
          for (const auto& [t, o] : pts) {
            tx.push_back(t);
            gx.push_back(o);
          }
          const OlsFit fit = ols_fit({ones, tx}, gx);
          const json model = {{"kind", "linear"},
                              {"coefficients", fit.coefficients},
                              {"p_values", fit.p_values}};
          write_file(opts.out_dir / ("fig_linearity_model_" + std::string(dim) +
                                     suffix + ".json"),
                     model.dump(2) + "\n");
        };
    write_linearity_model("h", lin_h);
    write_linearity_model("v", lin_v);

    write_file(opts.out_dir / ("fig_crosstalk_h" + suffix + ".csv"),
               scatter_csv(xt_h));
    write_file(opts.out_dir / ("fig_crosstalk_v" + suffix + ".csv"),
               scatter_csv(xt_v));
    for (const char* dim : {"H", "V"}) {
      const json& x = report.at("conditions").at(condition).at("crosstalk").at(dim);
      const std::string d = dim[0] == 'H' ? "h" : "v";
      if (x.contains("not_computable")) {
        write_file(opts.out_dir / ("fig_crosstalk_model_" + d + suffix + ".json"),
                   x.dump(2) + "\n");
        continue;
      }
      json model = {{"kind", x.at("model_kind")},
                    {"coefficients", x.at("coefficients")},
                    {"p_values", x.at("p_values")}};
      write_file(opts.out_dir / ("fig_crosstalk_model_" + d + suffix + ".json"),
                 model.dump(2) + "\n");
      const auto coeffs = x.at("coefficients").get<std::vector<double>>();
      const double lo = dim[0] == 'H' ? min_y : min_x;
      const double hi = dim[0] == 'H' ? max_y : max_x;
      write_file(opts.out_dir / ("fig_crosstalk_curve_" + d + suffix + ".csv"),
                 curve_csv(coeffs, lo, hi));
    }
  }
}

}  // namespace gazeqa
