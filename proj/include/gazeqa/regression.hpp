#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gazeqa/preprocessing.hpp"

namespace gazeqa {

enum class Dimension { horizontal, vertical };

std::string to_string(Dimension d);

struct OlsFit {
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  /// Two-sided p-values from the t distribution with n - k df.
  std::vector<double> p_values;
  double residual_variance{0.0};
  std::size_t n{0};
  std::size_t k{0};
};

/// Ordinary least squares via normal equations. Columns are the predictors,
/// including the intercept column when one is wanted. Rank deficiency is
/// detected by a 1e10 conditioning threshold on X'X.
OlsFit ols_fit(const std::vector<std::vector<double>>& predictor_columns,
               const std::vector<double>& response);

inline constexpr double kRankConditionLimit = 1e10;

struct LinearityResult {
  Dimension dimension{Dimension::horizontal};
  std::vector<double> per_subject_slopes;
  double mean_slope{0.0};
  double sd_slope{0.0};
  double ci_low{0.0};
  double ci_high{0.0};
  /// True iff 1.0 lies outside the 95% t-interval of the mean slope.
  bool significantly_nonideal{false};
};

/// Per subject, regresses per-fixation mean gaze on target position in the
/// given dimension and aggregates the slopes across subjects.
LinearityResult linearity(
    const std::vector<std::vector<FixationSegment>>& segments_by_subject,
    Dimension dimension);

enum class CrosstalkModel { intercept, linear, quadratic };

std::string to_string(CrosstalkModel m);

struct CrosstalkResult {
  Dimension dimension{Dimension::vertical};  // the error dimension modeled
  CrosstalkModel model_kind{CrosstalkModel::intercept};
  OlsFit fit;
};

/// Terms whose largest effect over the observed predictor range falls below
/// this floor are numerical dust, not crosstalk, regardless of p-value.
inline constexpr double kCrosstalkEffectFloorDeg = 1e-9;

/// Regresses per-fixation signed error in error_dimension on the orthogonal
/// target coordinate (err = a + b t + c t^2) over fixations pooled across
/// subjects; backward elimination drops the non-significant highest-order
/// term first.
CrosstalkResult crosstalk(const std::vector<FixationSegment>& fixations,
                          Dimension error_dimension, double alpha = 0.05,
                          double effect_floor_deg = kCrosstalkEffectFloorDeg);

}  // namespace gazeqa
