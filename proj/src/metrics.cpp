#include "sra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sra/errors.hpp"

namespace sra {

double matched_squared_error(const std::vector<Vector>& estimated, const std::vector<Vector>& truth) {
  if (estimated.size() != truth.size()) throw DataError("estimated and true component counts differ");
  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
      if (estimated[order[k]].size() != truth[k].size()) throw DataError("mean dimensions differ");
      total += (estimated[order[k]] - truth[k]).squaredNorm();
    }
    best = std::min(best, total);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

double window_mse(const MeanSeries& estimated, const MeanSeries& truth, std::uint64_t first, std::uint64_t last) {
  if (first < 1 || first > last || last > estimated.size() || last > truth.size()) {
    throw std::invalid_argument("window must lie inside both series");
  }
  double sum = 0.0;
  for (std::uint64_t t = first; t <= last; ++t) sum += matched_squared_error(estimated[t - 1], truth[t - 1]);
  return sum / static_cast<double>(last - first + 1);
}

SegmentMse segment_mse(const MeanSeries& estimated, const MeanSeries& truth, const MseWindows& w) {
  if (estimated.size() != truth.size()) {
    throw DataError("estimate series has " + std::to_string(estimated.size()) + " steps, truth has " +
                    std::to_string(truth.size()));
  }
  if (w.T > truth.size()) throw DataError("series shorter than T");
  if (!(w.tau + 1 < w.t_star && w.t_star < w.T)) throw std::invalid_argument("need tau + 1 < t_star < T");
  if (!(w.eval_begin >= 1 && w.eval_begin <= w.eval_end && w.eval_end <= w.T)) {
    throw std::invalid_argument("evaluation window must lie inside [1, T]");
  }

  auto window_mean = [&](std::uint64_t first, std::uint64_t last) { return window_mse(estimated, truth, first, last); };
  SegmentMse mse;
  mse.s_tot = window_mean(w.tau + 1, w.T);
  mse.s_bc = window_mean(w.tau + 1, w.t_star - 1);
  mse.s_ac = window_mean(w.t_star + 1, w.T);
  mse.s_eval = window_mean(w.eval_begin, w.eval_end);
  return mse;
}

double benefit(std::int64_t t, std::int64_t t_star, double tau) {
  const double distance = std::abs(static_cast<double>(t - t_star));
  return distance < tau ? 1.0 - distance / tau : 0.0;
}

AlarmEval alarm_eval(std::span<const double> scores, std::span<const std::uint64_t> change_points,
                     const AlarmProtocol& protocol, std::optional<std::vector<double>> thresholds) {
  if (!(protocol.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const std::uint64_t t_end = protocol.t_end == 0 ? scores.size() : protocol.t_end;
  if (protocol.t_start < 1 || protocol.t_start > t_end || t_end > scores.size()) {
    throw std::invalid_argument("evaluation range must lie inside the score series");
  }
  std::vector<std::uint64_t> changes(change_points.begin(), change_points.end());
  std::sort(changes.begin(), changes.end());

  struct Point {
    double score;
    double benefit;
    std::size_t change;
  };
  std::vector<Point> points;
  points.reserve(t_end - protocol.t_start + 1);
  for (std::uint64_t t = protocol.t_start; t <= t_end; ++t) {
    const double s = scores[t - 1];
    if (!std::isfinite(s)) throw DataError("non-finite score at t = " + std::to_string(t));
    Point p{s, 0.0, 0};
    if (!changes.empty()) {
      const auto it = std::lower_bound(changes.begin(), changes.end(), t);
      std::size_t nearest = 0;
      if (it == changes.end()) {
        nearest = changes.size() - 1;
      } else if (it != changes.begin()) {
        const auto after = static_cast<std::size_t>(it - changes.begin());
        nearest = t - changes[after - 1] <= changes[after] - t ? after - 1 : after;
      }
      p.change = nearest;
      p.benefit = benefit(static_cast<std::int64_t>(t), static_cast<std::int64_t>(changes[nearest]), protocol.tau);
    }
    points.push_back(p);
  }

  std::vector<double> eps;
  if (thresholds) {
    eps = std::move(*thresholds);
  } else {
    eps.reserve(points.size() + 2);
    for (const Point& p : points) eps.push_back(p.score);
    eps.push_back(-std::numeric_limits<double>::infinity());
    eps.push_back(std::numeric_limits<double>::infinity());
  }
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());

  std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) { return a.score > b.score; });

  // Sweep thresholds from high to low, adding alarms with score > eps.
  std::vector<double> best(changes.size(), 0.0);
  std::vector<double> total_benefit(eps.size());
  std::vector<double> false_alarms(eps.size());
  double total = 0.0;
  double n_false = 0.0;
  std::size_t next = 0;
  for (std::size_t i = eps.size(); i-- > 0;) {
    while (next < points.size() && points[next].score > eps[i]) {
      const Point& p = points[next++];
      if (p.benefit > 0.0) {
        if (p.benefit > best[p.change]) {
          total += p.benefit - best[p.change];
          best[p.change] = p.benefit;
        }
      } else {
        n_false += 1.0;
      }
    }
    total_benefit[i] = total;
    false_alarms[i] = n_false;
  }

  AlarmEval result;
  result.thresholds = eps;
  result.sup_benefit = eps.empty() ? 0.0 : *std::max_element(total_benefit.begin(), total_benefit.end());
  result.sup_false_alarms = eps.empty() ? 0.0 : *std::max_element(false_alarms.begin(), false_alarms.end());
  result.no_benefit = !(result.sup_benefit > 0.0);
  result.no_false_alarms = !(result.sup_false_alarms > 0.0);
  result.benefit_recall.resize(eps.size());
  result.false_alarm_rate.resize(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    result.benefit_recall[i] = result.no_benefit ? 0.0 : total_benefit[i] / result.sup_benefit;
    result.false_alarm_rate[i] = result.no_false_alarms ? 0.0 : false_alarms[i] / result.sup_false_alarms;
    result.curve.emplace_back(result.false_alarm_rate[i], result.benefit_recall[i]);
  }
  result.curve.emplace_back(0.0, 0.0);
  result.curve.emplace_back(1.0, 1.0);
  std::sort(result.curve.begin(), result.curve.end());
  result.curve.erase(std::unique(result.curve.begin(), result.curve.end()), result.curve.end());

  if (result.no_benefit) {
    result.auc = 0.0;
    return result;
  }
  double area = 0.0;
  for (std::size_t i = 1; i < result.curve.size(); ++i) {
    const auto [x0, y0] = result.curve[i - 1];
    const auto [x1, y1] = result.curve[i];
    area += 0.5 * (x1 - x0) * (y0 + y1);
  }
  result.auc = area;
  return result;
}

double roc_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  for (double s : scores) {
    if (std::isnan(s)) throw DataError("NaN score");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positives = 0.0;
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double average_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]]) {
        positives += 1.0;
        rank_sum += average_rank;
      }
    }
    i = j + 1;
  }
  const double negatives = static_cast<double>(scores.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) throw DataError("ROC AUC needs both positive and negative labels");
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

}  // namespace sra
