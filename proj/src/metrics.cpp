#include "gazeqa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gazeqa/stats.hpp"

namespace gazeqa {

AccuracyResult segment_accuracy(const FixationSegment& s) {
  if (s.samples.empty())
    throw std::invalid_argument("segment_accuracy: empty segment");
  AccuracyResult r{};
  for (const auto& ts : s.samples) {
    const double dx = ts.angles.x - s.target.x;
    const double dy = ts.angles.y - s.target.y;
    r.horizontal += std::abs(dx);
    r.vertical += std::abs(dy);
    r.combined += std::hypot(dx, dy);
  }
  const auto n = static_cast<double>(s.samples.size());
  r.horizontal /= n;
  r.vertical /= n;
  r.combined /= n;
  return r;
}

double vector_accuracy_deg(const GazeVector& v, const GazeVector& u) {
  const double nv = std::sqrt(v.vx * v.vx + v.vy * v.vy + v.vz * v.vz);
  const double nu = std::sqrt(u.vx * u.vx + u.vy * u.vy + u.vz * u.vz);
  if (nv == 0.0 || nu == 0.0)
    throw std::domain_error("vector_accuracy_deg: zero vector");
  const double dot = v.vx * u.vx + v.vy * u.vy + v.vz * u.vz;
  const double cos = std::clamp(dot / (nv * nu), -1.0, 1.0);
  return std::acos(cos) * 180.0 / std::numbers::pi;
}

PrecisionResult segment_precision(const FixationSegment& s) {
  if (s.samples.size() < 2)
    throw std::invalid_argument("segment_precision: need >= 2 samples");
  const std::size_t m = s.samples.size() - 1;
  std::vector<double> dh(m), dv(m), dc(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = s.samples[i + 1].angles.x - s.samples[i].angles.x;
    const double dy = s.samples[i + 1].angles.y - s.samples[i].angles.y;
    dh[i] = std::abs(dx);
    dv[i] = std::abs(dy);
    dc[i] = std::hypot(dx, dy);
  }
  auto rms = [m](const std::vector<double>& d) {
    double ss = 0.0;
    for (double x : d) ss += x * x;
    return std::sqrt(ss / static_cast<double>(m));
  };
  PrecisionResult r{};
  r.rms_h = rms(dh);
  r.rms_v = rms(dv);
  r.rms_c = rms(dc);
  r.sd_h = stats::population_sd(dh);
  r.sd_v = stats::population_sd(dv);
  r.sd_c = stats::population_sd(dc);
  return r;
}

namespace {

TemporalStats stats_from_isis(const std::vector<double>& isis,
                              std::size_t n_samples, double threshold) {
  TemporalStats t{};
  t.n_samples = n_samples;
  t.mean_isi_ms = stats::mean(isis);
  t.sd_isi_ms = stats::population_sd(isis);
  for (double isi : isis)
    if (isi > threshold) ++t.dropped_count;
  t.dropped_fraction =
      static_cast<double>(t.dropped_count) / static_cast<double>(isis.size());
  return t;
}

}  // namespace

TemporalStats temporal_stats(const Recording& r, double drop_threshold_ms) {
  if (r.samples.size() < 2)
    throw std::invalid_argument("temporal_stats: need >= 2 samples");
  std::vector<double> isis(r.samples.size() - 1);
  for (std::size_t i = 0; i + 1 < r.samples.size(); ++i)
    isis[i] = r.samples[i + 1].timestamp_ms - r.samples[i].timestamp_ms;
  return stats_from_isis(isis, r.samples.size(), drop_threshold_ms);
}

TemporalStats pooled_temporal_stats(
    const std::vector<const Recording*>& recordings, double drop_threshold_ms) {
  std::vector<double> isis;
  std::size_t n_samples = 0;
  for (const Recording* r : recordings) {
    n_samples += r->samples.size();
    for (std::size_t i = 0; i + 1 < r->samples.size(); ++i)
      isis.push_back(r->samples[i + 1].timestamp_ms -
                     r->samples[i].timestamp_ms);
  }
  if (isis.empty())
    throw std::invalid_argument("pooled_temporal_stats: no intervals");
  return stats_from_isis(isis, n_samples, drop_threshold_ms);
}

AggregateStat aggregate_metric(
    const std::vector<std::vector<double>>& per_subject_values,
    MetricKind /*kind*/, bool pooled_mean) {
  std::vector<double> subject_medians, subject_means, pooled;
  for (const auto& values : per_subject_values) {
    if (values.empty()) continue;
    subject_medians.push_back(stats::median(values));
    subject_means.push_back(stats::mean(values));
    pooled.insert(pooled.end(), values.begin(), values.end());
  }
  if (subject_medians.empty())
    throw std::invalid_argument("aggregate_metric: no values");

  AggregateStat a{};
  a.median = stats::percentile(subject_medians, 0.50);
  a.p75 = stats::percentile(subject_medians, 0.75);
  a.p90 = stats::percentile(subject_medians, 0.90);
  a.mean = pooled_mean ? stats::mean(pooled) : stats::mean(subject_means);
  return a;
}

std::vector<HistogramBin> histogram(const std::vector<double>& values,
                                    double bin_width) {
  if (!(bin_width > 0.0))
    throw std::invalid_argument("histogram: bin width must be positive");
  std::vector<HistogramBin> bins;
  if (values.empty()) return bins;
  const double max_v = *std::max_element(values.begin(), values.end());
  const auto n_bins =
      max_v <= 0.0
          ? std::size_t{1}
          : static_cast<std::size_t>(std::floor(max_v / bin_width)) + 1;
  bins.resize(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].left = static_cast<double>(b) * bin_width;
    bins[b].right = static_cast<double>(b + 1) * bin_width;
  }
  for (double v : values) {
    const double fb = std::floor(v / bin_width);
    auto b = fb <= 0.0 ? std::size_t{0} : static_cast<std::size_t>(fb);
    if (b >= n_bins) b = n_bins - 1;
    ++bins[b].count;
  }
  return bins;
}

}  // namespace gazeqa
