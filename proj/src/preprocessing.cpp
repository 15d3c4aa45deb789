#include "gazeqa/preprocessing.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace gazeqa {

namespace {

constexpr std::size_t kNoStep = std::numeric_limits<std::size_t>::max();

// Per-sample index of the target step active at the sample's timestamp
// (onset <= t < offset), or kNoStep. Samples and steps are both time-ordered.
std::vector<std::size_t> active_step_index(const Recording& r) {
  std::vector<std::size_t> active(r.samples.size(), kNoStep);
  std::size_t k = 0;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const double t = r.samples[i].timestamp_ms;
    while (k < r.targets.size() && r.targets[k].offset_ms <= t) ++k;
    if (k < r.targets.size() && r.targets[k].onset_ms <= t) active[i] = k;
  }
  return active;
}

// Angles for valid samples, cached once per recording.
std::vector<std::optional<GazeAngles>> cached_angles(const Recording& r) {
  std::vector<std::optional<GazeAngles>> angles(r.samples.size());
  for (std::size_t i = 0; i < r.samples.size(); ++i)
    if (r.samples[i].valid) angles[i] = to_angles(r.samples[i].vector);
  return angles;
}

// Sample indices falling inside step k, in time order, capped at
// kProfileLength positions.
std::vector<std::vector<std::size_t>> samples_by_step(
    const Recording& r, const std::vector<std::size_t>& active) {
  std::vector<std::vector<std::size_t>> by_step(r.targets.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i] == kNoStep) continue;
    auto& list = by_step[active[i]];
    if (list.size() < kProfileLength) list.push_back(i);
  }
  return by_step;
}

}  // namespace

std::string to_string(WindowPolicy p) {
  return p == WindowPolicy::data_driven ? "data_driven" : "paper_fixed";
}

WindowPolicy window_policy_from_string(const std::string& s) {
  if (s == "data_driven") return WindowPolicy::data_driven;
  if (s == "paper_fixed") return WindowPolicy::paper_fixed;
  throw DataError("unknown window policy \"" + s + "\"");
}

LatencyEstimate estimate_latency(const Recording& r) {
  if (r.targets.size() < 2)
    throw AnalysisError("estimate_latency(" + r.subject_id +
                        "): need at least 2 target steps");
  std::size_t n_valid = 0;
  for (const auto& s : r.samples) n_valid += s.valid ? 1 : 0;
  if (n_valid < 2)
    throw AnalysisError("estimate_latency(" + r.subject_id +
                        "): need at least 2 valid samples");

  const auto active = active_step_index(r);
  const auto angles = cached_angles(r);
  const std::size_t n = r.samples.size();

  // floor(800 ms / nominal ISI) expressed as 0.8 * rate to keep the 30 Hz
  // cap at exactly 24 samples despite the non-representable ISI.
  const int max_shift = static_cast<int>(
      std::floor(kMaxLatencyMs * r.nominal_rate_hz / 1000.0 + 1e-9));

  int best_shift = -1;
  double best_mean = std::numeric_limits<double>::infinity();
  for (int s = 0; s <= max_shift; ++s) {
    if (static_cast<std::size_t>(s) >= n) break;
    double sum = 0.0;
    std::size_t count = 0;
    const std::size_t limit = n - static_cast<std::size_t>(s);
    for (std::size_t i = 0; i < limit; ++i) {
      const std::size_t k = active[i];
      if (k == kNoStep) continue;
      const auto& g = angles[i + static_cast<std::size_t>(s)];
      if (!g) continue;
      sum += euclidean_deg(*g, r.targets[k].position);
      ++count;
    }
    if (count == 0) continue;
    const double m = sum / static_cast<double>(count);
    if (m < best_mean) {
      best_mean = m;
      best_shift = s;
    }
  }
  if (best_shift < 0)
    throw AnalysisError("estimate_latency(" + r.subject_id +
                        "): no valid gaze-target pairs at any shift");

  return {best_shift,
          static_cast<double>(best_shift) * 1000.0 / r.nominal_rate_hz,
          best_mean};
}

ErrorProfile error_profile(const Recording& r, const LatencyEstimate& shift) {
  const auto active = active_step_index(r);
  const auto angles = cached_angles(r);
  const auto by_step = samples_by_step(r, active);
  const auto s = static_cast<std::size_t>(shift.shift_samples);

  ErrorProfile profile{};
  std::array<double, kProfileLength> sums{};
  for (std::size_t k = 0; k < by_step.size(); ++k) {
    const auto& in_step = by_step[k];
    for (std::size_t idx = 0; idx < in_step.size(); ++idx) {
      const std::size_t j = in_step[idx] + s;
      if (j >= r.samples.size() || !angles[j]) continue;
      sums[idx] += euclidean_deg(*angles[j], r.targets[k].position);
      ++profile.counts[idx];
    }
  }
  for (std::size_t idx = 0; idx < kProfileLength; ++idx)
    if (profile.counts[idx] > 0)
      profile.mean_error[idx] = sums[idx] / static_cast<double>(profile.counts[idx]);
  return profile;
}

ErrorProfile pool_profiles(const std::vector<ErrorProfile>& profiles) {
  ErrorProfile pooled{};
  std::array<double, kProfileLength> sums{};
  for (const auto& p : profiles) {
    for (std::size_t i = 0; i < kProfileLength; ++i) {
      sums[i] += p.mean_error[i] * static_cast<double>(p.counts[i]);
      pooled.counts[i] += p.counts[i];
    }
  }
  for (std::size_t i = 0; i < kProfileLength; ++i)
    if (pooled.counts[i] > 0)
      pooled.mean_error[i] = sums[i] / static_cast<double>(pooled.counts[i]);
  return pooled;
}

StableWindow select_stable_window(const ErrorProfile& p, WindowPolicy policy,
                                  double tolerance_factor) {
  if (policy == WindowPolicy::paper_fixed) return {8, 22};

  double min_error = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < kProfileLength; ++i) {
    if (p.counts[i] == 0) continue;
    any = true;
    min_error = std::min(min_error, p.mean_error[i]);
  }
  if (!any) throw AnalysisError("select_stable_window: empty error profile");

  const double threshold = min_error * tolerance_factor;
  StableWindow best{0, 0};
  std::size_t best_len = 0;
  std::size_t run_start = 0;
  std::size_t run_len = 0;
  for (std::size_t i = 0; i < kProfileLength; ++i) {
    const bool ok = p.counts[i] > 0 && p.mean_error[i] <= threshold;
    if (ok) {
      if (run_len == 0) run_start = i;
      ++run_len;
      if (run_len > best_len) {
        best_len = run_len;
        best = {run_start, i};
      }
    } else {
      run_len = 0;
    }
  }
  return best;
}

SegmentExtraction extract_segments(const Recording& r,
                                   const LatencyEstimate& shift,
                                   const StableWindow& w) {
  const auto active = active_step_index(r);
  const auto angles = cached_angles(r);
  const auto by_step = samples_by_step(r, active);
  const auto s = static_cast<std::size_t>(shift.shift_samples);

  SegmentExtraction out;
  for (std::size_t k = 0; k < by_step.size(); ++k) {
    FixationSegment seg;
    seg.subject_id = r.subject_id;
    seg.target = r.targets[k].position;
    seg.source_step_index = k;
    const auto& in_step = by_step[k];
    for (std::size_t idx = w.start_index;
         idx <= w.end_index && idx < in_step.size(); ++idx) {
      const std::size_t j = in_step[idx] + s;
      if (j >= r.samples.size() || !angles[j]) continue;
      seg.samples.push_back({r.samples[j].timestamp_ms, *angles[j]});
    }
    if (seg.samples.empty())
      ++out.skipped_steps;
    else
      out.segments.push_back(std::move(seg));
  }
  return out;
}

GazeAngles segment_mean_gaze(const FixationSegment& s) {
  if (s.samples.empty())
    throw std::invalid_argument("segment_mean_gaze: empty segment");
  GazeAngles m{};
  for (const auto& ts : s.samples) {
    m.x += ts.angles.x;
    m.y += ts.angles.y;
  }
  const auto n = static_cast<double>(s.samples.size());
  return {m.x / n, m.y / n};
}

}  // namespace gazeqa
