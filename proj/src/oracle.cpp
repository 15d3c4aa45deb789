#include "gazeqa/oracle.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

namespace gazeqa {

namespace {

// mt19937_64 driven through fixed transforms so identical configs produce
// byte-identical output on any platform (std:: distributions are
// implementation-defined).
class OracleRng {
 public:
  explicit OracleRng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double gaussian() {  // Box-Muller, one variate per call
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t next_index(std::uint64_t bound) {  // [0, bound)
    return engine_() % bound;
  }

 private:
  std::mt19937_64 engine_;
};

void check_config(const OracleConfig& c) {
  if (c.n_steps < 1) throw DataError("oracle config: n_steps must be >= 1");
  if (!(c.rate_hz > 0.0)) throw DataError("oracle config: rate_hz must be positive");
  if (!(c.dwell_min_ms > 0.0) || c.dwell_max_ms < c.dwell_min_ms)
    throw DataError("oracle config: dwell range must satisfy 0 < min <= max");
  if (!(c.field_half_x_deg > 0.0) || !(c.field_half_y_deg > 0.0))
    throw DataError("oracle config: field extents must be positive");
  const double diameter =
      2.0 * std::hypot(c.field_half_x_deg, c.field_half_y_deg);
  if (c.min_jump_deg < 0.0 || c.min_jump_deg >= diameter)
    throw DataError("oracle config: min_jump_deg infeasible for the field");
  if (c.noise_sd_deg < 0.0)
    throw DataError("oracle config: noise_sd_deg must be non-negative");
  if (c.latency_samples < 0)
    throw DataError("oracle config: latency_samples must be non-negative");
  if (c.drop_probability < 0.0 || c.drop_probability >= 1.0)
    throw DataError("oracle config: drop_probability must lie in [0, 1)");
  if (c.settle_ms < 0.0)
    throw DataError("oracle config: settle_ms must be non-negative");
}

std::vector<TargetStep> build_schedule(const OracleConfig& c,
                                       const std::vector<GazeAngles>& positions,
                                       OracleRng& rng) {
  std::vector<TargetStep> schedule;
  schedule.reserve(positions.size());
  double onset = 0.0;
  for (const auto& p : positions) {
    const double dwell = rng.uniform(c.dwell_min_ms, c.dwell_max_ms);
    schedule.push_back({onset, onset + dwell, p});
    onset += dwell;
  }
  return schedule;
}

// True gaze at time t given the schedule: the active target, optionally
// ramping from the previous target over settle_ms after each onset.
GazeAngles true_gaze_at(const std::vector<TargetStep>& schedule,
                        std::size_t step, double t, double settle_ms) {
  const auto& cur = schedule[step];
  if (settle_ms <= 0.0 || step == 0) return cur.position;
  const double dt = t - cur.onset_ms;
  if (dt >= settle_ms) return cur.position;
  const auto& prev = schedule[step - 1].position;
  const double f = dt / settle_ms;
  return {prev.x + (cur.position.x - prev.x) * f,
          prev.y + (cur.position.y - prev.y) * f};
}

OracleOutput generate_recording(const OracleConfig& c, Task task,
                                std::vector<GazeAngles> positions,
                                OracleRng& rng) {
  auto schedule = build_schedule(c, positions, rng);
  const double duration = schedule.back().offset_ms;

  std::vector<double> timestamps;
  std::vector<std::size_t> step_of;
  std::size_t step = 0;
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * 1000.0 / c.rate_hz;
    if (t >= duration) break;
    while (step + 1 < schedule.size() && schedule[step].offset_ms <= t) ++step;
    timestamps.push_back(t);
    step_of.push_back(step);
  }

  // Corrupted gaze before latency: crosstalk, affine, then noise.
  std::vector<GazeAngles> corrupted(timestamps.size());
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    GazeAngles g = true_gaze_at(schedule, step_of[i], timestamps[i], c.settle_ms);
    const double tx = schedule[step_of[i]].position.x;
    g.y += c.crosstalk_linear * tx + c.crosstalk_quadratic * tx * tx;
    g = apply_calibration(c.affine, g);
    if (c.noise_sd_deg > 0.0) {
      g.x += c.noise_sd_deg * rng.gaussian();
      g.y += c.noise_sd_deg * rng.gaussian();
    }
    corrupted[i] = g;
  }

  Recording r;
  r.subject_id = c.subject_id;
  r.task = task;
  r.nominal_rate_hz = c.rate_hz;
  r.viewing_distance_mm = 1500.0;
  r.targets = schedule;
  r.samples.reserve(timestamps.size());
  const auto lag = static_cast<std::size_t>(c.latency_samples);
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const std::size_t src = i >= lag ? i - lag : 0;
    if (c.drop_probability > 0.0 && rng.uniform01() < c.drop_probability)
      continue;
    r.samples.push_back(
        {timestamps[i], angles_to_vector(corrupted[src]), true});
  }

  return {std::move(r), {c, std::move(schedule)}};
}

}  // namespace

std::array<GazeAngles, 13> grid_points(double half_x_deg, double half_y_deg) {
  const double x = half_x_deg, y = half_y_deg;
  return {{{0.0, 0.0},
           {-x, -y}, {-x, y}, {x, -y}, {x, y},
           {-x, 0.0}, {x, 0.0}, {0.0, -y}, {0.0, y},
           {-x / 2.0, -y / 2.0}, {-x / 2.0, y / 2.0},
           {x / 2.0, -y / 2.0}, {x / 2.0, y / 2.0}}};
}

OracleOutput generate_saccades_recording(const OracleConfig& c) {
  check_config(c);
  OracleRng rng(c.seed);

  std::vector<GazeAngles> positions;
  positions.reserve(static_cast<std::size_t>(c.n_steps));
  for (int k = 0; k < c.n_steps; ++k) {
    GazeAngles p{};
    int tries = 0;
    do {
      p = {rng.uniform(-c.field_half_x_deg, c.field_half_x_deg),
           rng.uniform(-c.field_half_y_deg, c.field_half_y_deg)};
      if (++tries > 100000)
        throw DataError("oracle config: min_jump_deg rejection limit reached");
    } while (!positions.empty() &&
             euclidean_deg(p, positions.back()) < c.min_jump_deg);
    positions.push_back(p);
  }
  return generate_recording(c, Task::random_saccades, std::move(positions), rng);
}

OracleOutput generate_grid_recording(const OracleConfig& c) {
  check_config(c);
  OracleRng rng(c.seed);

  const auto points = grid_points(c.field_half_x_deg, c.field_half_y_deg);
  std::vector<GazeAngles> order(points.begin(), points.end());
  for (std::size_t i = order.size() - 1; i > 0; --i) {  // Fisher-Yates
    const auto j = static_cast<std::size_t>(rng.next_index(i + 1));
    std::swap(order[i], order[j]);
  }
  return generate_recording(c, Task::calibration_grid, std::move(order), rng);
}

std::string ground_truth_to_json(const GroundTruth& gt) {
  const auto& c = gt.config;
  nlohmann::json j;
  j["seed"] = c.seed;
  j["subject_id"] = c.subject_id;
  j["n_steps"] = c.n_steps;
  j["dwell_min_ms"] = c.dwell_min_ms;
  j["dwell_max_ms"] = c.dwell_max_ms;
  j["min_jump_deg"] = c.min_jump_deg;
  j["field_half_x_deg"] = c.field_half_x_deg;
  j["field_half_y_deg"] = c.field_half_y_deg;
  j["rate_hz"] = c.rate_hz;
  j["latency_samples"] = c.latency_samples;
  j["latency_ms"] = static_cast<double>(c.latency_samples) * 1000.0 / c.rate_hz;
  j["noise_sd_deg"] = c.noise_sd_deg;
  j["affine"] = {{"ax", c.affine.ax}, {"bx", c.affine.bx}, {"cx", c.affine.cx},
                 {"ay", c.affine.ay}, {"by", c.affine.by}, {"cy", c.affine.cy}};
  j["crosstalk_linear"] = c.crosstalk_linear;
  j["crosstalk_quadratic"] = c.crosstalk_quadratic;
  j["drop_probability"] = c.drop_probability;
  j["settle_ms"] = c.settle_ms;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : gt.schedule)
    steps.push_back({{"onset_ms", s.onset_ms},
                     {"offset_ms", s.offset_ms},
                     {"x_deg", s.position.x},
                     {"y_deg", s.position.y}});
  j["schedule"] = steps;
  return j.dump(2);
}

}  // namespace gazeqa
