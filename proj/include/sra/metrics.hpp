#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sra/gmm.hpp"

namespace sra {

/// Component means at each time step; element t - 1 holds time t.
using MeanSeries = std::vector<std::vector<Vector>>;

struct SegmentMse {
  double s_eval = 0.0;
  double s_bc = 0.0;
  double s_ac = 0.0;
  double s_tot = 0.0;
};

/// Summation windows (all 1-based, inclusive):
///   s_tot over [tau + 1, T], s_bc over [tau + 1, t_star - 1],
///   s_ac over [t_star + 1, T], s_eval over [eval_begin, eval_end].
/// Each MSE divides by the number of summed steps.
struct MseWindows {
  std::uint64_t tau = 1000;
  std::uint64_t t_star = 10001;
  std::uint64_t T = 20000;
  std::uint64_t eval_begin = 500;
  std::uint64_t eval_end = 999;
};

/// Smallest sum of squared distances between estimated and true means over
/// all component matchings.
double matched_squared_error(const std::vector<Vector>& estimated, const std::vector<Vector>& truth);

/// Mean matched squared error over the inclusive window [first, last].
double window_mse(const MeanSeries& estimated, const MeanSeries& truth, std::uint64_t first, std::uint64_t last);

SegmentMse segment_mse(const MeanSeries& estimated, const MeanSeries& truth, const MseWindows& windows);

/// 1 - |t - t_star| / tau inside the tolerance window, 0 otherwise.
double benefit(std::int64_t t, std::int64_t t_star, double tau);

struct AlarmProtocol {
  double tau = 100.0;
  std::uint64_t t_start = 1;
  std::uint64_t t_end = 0;  ///< 0 means the last score
};

/// Benefit/false-alarm curve over thresholds.
///
/// An alarm at t is tested against its nearest change point (the earlier one
/// on ties). It is a false alarm when its benefit is zero. Each change point
/// is credited with the single best benefit among the alarms assigned to it;
/// the total benefit is the sum over change points.
struct AlarmEval {
  std::vector<double> thresholds;  ///< ascending
  std::vector<double> benefit_recall;
  std::vector<double> false_alarm_rate;
  std::vector<std::pair<double, double>> curve;  ///< (false-alarm rate, recall), sorted
  double auc = 0.0;
  double sup_benefit = 0.0;
  double sup_false_alarms = 0.0;
  bool no_benefit = false;        ///< sup benefit was zero; auc set to 0
  bool no_false_alarms = false;   ///< no alarm can be false; rates set to 0
};

/// `scores[i]` is the score at time t = i + 1. Default thresholds are every
/// distinct score in the window plus -inf and +inf.
AlarmEval alarm_eval(std::span<const double> scores, std::span<const std::uint64_t> change_points,
                     const AlarmProtocol& protocol, std::optional<std::vector<double>> thresholds = std::nullopt);

/// Area under the ROC curve (normalised Mann-Whitney statistic, ties count 1/2).
double roc_auc(std::span<const double> scores, const std::vector<bool>& labels);

}  // namespace sra
