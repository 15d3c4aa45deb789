#include "gazeqa/regression.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

#include "gazeqa/stats.hpp"

namespace gazeqa {

std::string to_string(Dimension d) {
  return d == Dimension::horizontal ? "H" : "V";
}

std::string to_string(CrosstalkModel m) {
  switch (m) {
    case CrosstalkModel::intercept: return "intercept";
    case CrosstalkModel::linear: return "linear";
    case CrosstalkModel::quadratic: return "quadratic";
  }
  return "intercept";
}

namespace {

double coefficient_p_value(double coef, double se, double df) {
  if (se == 0.0) return coef == 0.0 ? 1.0 : 0.0;
  return stats::t_two_sided_p(coef / se, df);
}

double component(const GazeAngles& a, Dimension d) {
  return d == Dimension::horizontal ? a.x : a.y;
}

}  // namespace

OlsFit ols_fit(const std::vector<std::vector<double>>& predictor_columns,
               const std::vector<double>& response) {
  const std::size_t k = predictor_columns.size();
  const std::size_t n = response.size();
  if (k == 0) throw AnalysisError("ols_fit: no predictors");
  for (const auto& col : predictor_columns)
    if (col.size() != n)
      throw AnalysisError("ols_fit: predictor/response length mismatch");
  if (n <= k)
    throw AnalysisError("ols_fit: need more observations than predictors");

  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y(n);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          predictor_columns[j][i];
  for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = response[i];

  const Eigen::MatrixXd xtx = X.transpose() * X;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(xtx);
  const auto& ev = eig.eigenvalues();
  const double ev_min = ev.minCoeff();
  const double ev_max = ev.maxCoeff();
  if (!(ev_min > 0.0) || ev_max / ev_min > kRankConditionLimit)
    throw AnalysisError("ols_fit: rank-deficient design matrix");

  const Eigen::VectorXd beta = xtx.ldlt().solve(X.transpose() * y);
  const Eigen::VectorXd resid = y - X * beta;
  const double rss = resid.squaredNorm();
  const double df = static_cast<double>(n - k);
  const double s2 = rss / df;
  const Eigen::MatrixXd cov = s2 * xtx.inverse();

  OlsFit fit;
  fit.n = n;
  fit.k = k;
  fit.residual_variance = s2;
  fit.coefficients.resize(k);
  fit.standard_errors.resize(k);
  fit.p_values.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    fit.coefficients[j] = beta(jj);
    fit.standard_errors[j] = std::sqrt(std::max(0.0, cov(jj, jj)));
    fit.p_values[j] = coefficient_p_value(beta(jj), fit.standard_errors[j], df);
  }
  return fit;
}

LinearityResult linearity(
    const std::vector<std::vector<FixationSegment>>& segments_by_subject,
    Dimension dimension) {
  if (segments_by_subject.size() < 2)
    throw AnalysisError("linearity: need at least 2 subjects");

  LinearityResult result;
  result.dimension = dimension;
  for (const auto& segments : segments_by_subject) {
    const std::string subject =
        segments.empty() ? std::string("<empty>") : segments.front().subject_id;
    std::set<double> distinct;
    std::vector<double> target_pos, gaze_pos;
    for (const auto& seg : segments) {
      const double t = component(seg.target, dimension);
      distinct.insert(t);
      target_pos.push_back(t);
      gaze_pos.push_back(component(segment_mean_gaze(seg), dimension));
    }
    if (distinct.size() < 3)
      throw AnalysisError("linearity(" + to_string(dimension) + "): subject " +
                          subject + " has fewer than 3 distinct target positions");
    const std::vector<double> ones(target_pos.size(), 1.0);
    const OlsFit fit = ols_fit({ones, target_pos}, gaze_pos);
    result.per_subject_slopes.push_back(fit.coefficients[1]);
  }

  const auto n = static_cast<double>(result.per_subject_slopes.size());
  result.mean_slope = stats::mean(result.per_subject_slopes);
  result.sd_slope = stats::sample_sd(result.per_subject_slopes);
  const double half_width =
      stats::t_quantile(0.975, n - 1.0) * result.sd_slope / std::sqrt(n);
  result.ci_low = result.mean_slope - half_width;
  result.ci_high = result.mean_slope + half_width;
  result.significantly_nonideal =
      !(result.ci_low <= 1.0 && 1.0 <= result.ci_high);
  return result;
}

CrosstalkResult crosstalk(const std::vector<FixationSegment>& fixations,
                          Dimension error_dimension, double alpha,
                          double effect_floor_deg) {
  if (fixations.size() < 10)
    throw AnalysisError("crosstalk: need at least 10 fixations");

  const Dimension orth = error_dimension == Dimension::horizontal
                             ? Dimension::vertical
                             : Dimension::horizontal;
  const std::size_t n = fixations.size();
  std::vector<double> ones(n, 1.0), t(n), t2(n), err(n);
  double max_abs_t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& seg = fixations[i];
    t[i] = component(seg.target, orth);
    t2[i] = t[i] * t[i];
    err[i] = component(segment_mean_gaze(seg), error_dimension) -
             component(seg.target, error_dimension);
    max_abs_t = std::max(max_abs_t, std::abs(t[i]));
  }

  CrosstalkResult result;
  result.dimension = error_dimension;

  const OlsFit quad = ols_fit({ones, t, t2}, err);
  const bool quad_material =
      std::abs(quad.coefficients[2]) * max_abs_t * max_abs_t >= effect_floor_deg;
  if (quad.p_values[2] < alpha && quad_material) {
    result.model_kind = CrosstalkModel::quadratic;
    result.fit = quad;
    return result;
  }

  const OlsFit lin = ols_fit({ones, t}, err);
  const bool lin_material =
      std::abs(lin.coefficients[1]) * max_abs_t >= effect_floor_deg;
  if (lin.p_values[1] < alpha && lin_material) {
    result.model_kind = CrosstalkModel::linear;
    result.fit = lin;
    return result;
  }

  result.model_kind = CrosstalkModel::intercept;
  result.fit = ols_fit({ones}, err);
  return result;
}

}  // namespace gazeqa
