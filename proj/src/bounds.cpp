#include "sra/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/minima.hpp>

namespace sra {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

double outlier_variance_cap(const BoundInputs& in) {
  const double box = static_cast<double>(in.d) * in.U * in.U;
  return std::min(box, in.gamma * in.gamma);
}

double noise_mix(const BoundInputs& in) {
  return in.alpha * in.sigma0_sq + (1.0 - in.alpha) * outlier_variance_cap(in);
}

double bias_term(const BoundInputs& in) {
  return 2.0 * (in.c0 + in.c1 * (in.d0 + 1.0) * gaussian_tail(in.gamma, in.M));
}

}  // namespace

void BoundInputs::validate() const {
  require(c0 >= 0.0, "c0 must be nonnegative");
  require(c1 > 0.0, "c1 must be positive");
  require(d0 > 0.0, "d0 must be positive");
  require(d1 > 0.0, "d1 must be positive");
  require(sigma0_sq >= 0.0 && sigma1_sq >= 0.0, "noise variances must be nonnegative");
  require(L > 0.0, "L must be positive");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  require(U > 0.0, "U must be positive");
  require(d >= 1, "dimension must be at least 1");
  require(V0n >= 0.0, "V0n must be nonnegative");
  require(gamma > 0.0, "gamma must be positive");
  require(M > 0.0, "M must be positive");
}

double gaussian_tail(double gamma, double M) {
  require(gamma >= 0.0, "gaussian_tail needs gamma >= 0");
  require(M > 0.0, "gaussian_tail needs M > 0");
  if (std::isinf(gamma)) return 0.0;
  return 0.5 * M * std::sqrt(std::numbers::pi) * std::erfc(gamma / M);
}

StepSums step_sums(const StepSchedule& schedule, std::uint64_t n) {
  const double terms = static_cast<double>(n) + 1.0;
  StepSums sums;
  switch (schedule.kind()) {
    case StepSchedule::Kind::kConstant:
      sums.sum = terms * schedule.scale();
      sums.sum_sq = terms * schedule.scale() * schedule.scale();
      break;
    case StepSchedule::Kind::kInverse: {
      // H_m = digamma(m + 1) + Euler gamma; sum 1/t^2 = pi^2 / 6 - trigamma(m + 1).
      sums.sum = boost::math::digamma(terms + 1.0) + std::numbers::egamma;
      sums.sum_sq = std::numbers::pi * std::numbers::pi / 6.0 - boost::math::trigamma(terms + 1.0);
      break;
    }
    case StepSchedule::Kind::kInverseSqrt: {
      const double c = schedule.scale();
      double sum = 0.0;
      double carry = 0.0;
      for (std::uint64_t t = 1; t <= n + 1; ++t) {
        const double term = c / std::sqrt(static_cast<double>(t)) - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
      }
      sums.sum = sum;
      sums.sum_sq = c * c * (boost::math::digamma(terms + 1.0) + std::numbers::egamma);
      break;
    }
  }
  return sums;
}

BoundValue theorem2_bound(const BoundInputs& inputs) {
  inputs.validate();
  const StepSums sums = step_sums(inputs.rho, inputs.n);
  require(sums.sum > 0.0, "step sizes must have a positive sum");

  BoundValue result;
  result.value = bias_term(inputs) +
                 2.0 * inputs.c1 * (inputs.V0n + inputs.L * noise_mix(inputs) * sums.sum_sq) / sums.sum;

  const AdmissibilityConstants constants{inputs.c1, inputs.d1, inputs.L, inputs.sigma1_sq};
  const double limit = admissible_rho_limit(inputs.gamma, inputs.M, constants);
  const double first = inputs.rho.at(1);
  if (!(first < limit)) {
    std::ostringstream out;
    out.precision(6);
    out << "schedule " << inputs.rho.describe() << " starts at " << first << ", not below the admissible limit "
        << limit;
    result.warnings.push_back(out.str());
  }
  return result;
}

double const_rho_bound(const BoundInputs& inputs, double rho) {
  inputs.validate();
  require(rho > 0.0, "rho must be positive");
  const double horizon = static_cast<double>(inputs.n) + 1.0;
  return bias_term(inputs) + 2.0 * inputs.c1 * inputs.V0n / (rho * horizon) +
         2.0 * inputs.c1 * rho * inputs.L * noise_mix(inputs);
}

double corollary2_limit(const BoundInputs& inputs) {
  inputs.validate();
  const StepSums sums = step_sums(inputs.rho, inputs.n);
  require(sums.sum > 0.0, "step sizes must have a positive sum");
  const double box = static_cast<double>(inputs.d) * inputs.U * inputs.U;
  const double mix = inputs.alpha * inputs.sigma0_sq + (1.0 - inputs.alpha) * box;
  return 2.0 * inputs.c0 + 2.0 * inputs.c1 * (inputs.V0n + inputs.L * mix * sums.sum_sq) / sums.sum;
}

double corollary3_gap(const BoundInputs& inputs) {
  inputs.validate();
  const StepSums sums = step_sums(inputs.rho, inputs.n);
  const double box = static_cast<double>(inputs.d) * inputs.U * inputs.U;
  const double excess = std::max(0.0, box - inputs.gamma * inputs.gamma);
  return 2.0 * inputs.c1 * inputs.L * (1.0 - inputs.alpha) * excess * sums.sum_sq / sums.sum -
         2.0 * inputs.c1 * (inputs.d0 + 1.0) * gaussian_tail(inputs.gamma, inputs.M);
}

double corollary3_gap_bounded(const BoundInputs& inputs, double gamma_star) {
  inputs.validate();
  require(gamma_star > 0.0, "gamma_star must be positive");
  const StepSums sums = step_sums(inputs.rho, inputs.n);
  const double box = static_cast<double>(inputs.d) * inputs.U * inputs.U;
  const double excess = std::max(0.0, box - inputs.gamma * inputs.gamma);
  const double gain = 2.0 * inputs.c1 * inputs.L * (1.0 - inputs.alpha) * excess * sums.sum_sq / sums.sum;
  if (inputs.gamma >= gamma_star) return gain;
  // Integral of exp(-z^2 / w^2) over [gamma, gamma_star] with w = gamma_star - gamma.
  const double width = gamma_star - inputs.gamma;
  const double cost = 0.5 * width * std::sqrt(std::numbers::pi) *
                      (std::erf(gamma_star / width) - std::erf(inputs.gamma / width));
  return gain - 2.0 * inputs.c1 * (inputs.d0 + 1.0) * cost;
}

RhoMinimum minimize_const_rho_bound(const BoundInputs& inputs, double rho_max) {
  inputs.validate();
  require(rho_max > 0.0, "rho_max must be positive");
  require(inputs.gamma < std::sqrt(static_cast<double>(inputs.d)) * inputs.U,
          "the trade-off minimisation needs gamma < sqrt(d) U");

  const double hi = std::log(rho_max);
  const double lo = hi - 700.0;
  auto objective = [&](double log_rho) { return const_rho_bound(inputs, std::exp(log_rho)); };

  constexpr int kCoarse = 241;
  std::vector<double> xs(kCoarse);
  std::vector<double> fs(kCoarse);
  for (int i = 0; i < kCoarse; ++i) {
    xs[i] = lo + (hi - lo) * i / (kCoarse - 1);
    fs[i] = objective(xs[i]);
  }
  const auto best = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  bool unimodal = true;
  for (int i = 1; i <= best; ++i) unimodal = unimodal && fs[i] <= fs[i - 1];
  for (int i = best + 1; i < kCoarse; ++i) unimodal = unimodal && fs[i] >= fs[i - 1];

  RhoMinimum result;
  if (unimodal) {
    const double left = xs[std::max(best - 1, 0)];
    const double right = xs[std::min(best + 1, kCoarse - 1)];
    const auto found = boost::math::tools::brent_find_minima(objective, left, right, 52);
    result.rho = std::exp(found.first);
    result.bound = found.second;
    return result;
  }

  result.grid_fallback = true;
  constexpr int kDense = 200001;
  double best_x = lo;
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kDense; ++i) {
    const double x = lo + (hi - lo) * i / (kDense - 1);
    const double f = objective(x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  result.rho = std::exp(best_x);
  result.bound = best_f;
  return result;
}

TradeoffCrossCheck cross_check_tradeoff_step(const BoundInputs& inputs) {
  require(inputs.alpha < 1.0, "the trade-off step needs alpha < 1");
  TradeoffCrossCheck report;
  report.beta = (inputs.d0 + 1.0) / (inputs.L * (1.0 - inputs.alpha));
  report.rho_closed_form = corollary1_rho(inputs.gamma, report.beta, inputs.M);
  report.rho_with_c1 = inputs.c1 * report.rho_closed_form;

  BoundInputs configured = inputs;
  const double horizon = static_cast<double>(inputs.n) + 1.0;
  configured.V0n = 0.0;
  configured.V0n = report.rho_closed_form * report.rho_closed_form * horizon * inputs.L * noise_mix(configured);
  report.V0n = configured.V0n;

  const RhoMinimum numeric = minimize_const_rho_bound(configured, 1.0);
  report.rho_numeric = numeric.rho;
  report.relative_error = std::abs(numeric.rho - report.rho_closed_form) / report.rho_closed_form;

  auto dgamma = [&](double rho) {
    const double h = 1e-5 * inputs.gamma;
    BoundInputs up = configured;
    BoundInputs down = configured;
    up.gamma += h;
    down.gamma -= h;
    return (const_rho_bound(up, rho) - const_rho_bound(down, rho)) / (2.0 * h);
  };
  report.dgamma_closed_form = dgamma(report.rho_closed_form);
  report.dgamma_with_c1 = dgamma(report.rho_with_c1);

  const double gamma_max = std::sqrt(static_cast<double>(inputs.d)) * inputs.U;
  auto profile = [&](double gamma) {
    BoundInputs cell = configured;
    cell.gamma = gamma;
    return minimize_const_rho_bound(cell, 1.0).bound;
  };
  constexpr int kScan = 200;
  double best_gamma = gamma_max / kScan;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 1; i < kScan; ++i) {
    const double g = gamma_max * i / kScan;
    const double v = profile(g);
    if (v < best_value) {
      best_value = v;
      best_gamma = g;
    }
  }
  const double step = gamma_max / kScan;
  const auto found = boost::math::tools::brent_find_minima(profile, std::max(best_gamma - step, 0.5 * step),
                                                           std::min(best_gamma + step, gamma_max - 0.5 * step), 40);
  report.gamma_profile_argmin = found.first;
  return report;
}

std::vector<BoundRow> bound_table(const BoundInputs& inputs, const std::vector<double>& gammas,
                                  const std::vector<double>& rhos) {
  std::vector<BoundRow> rows;
  rows.reserve(gammas.size() * rhos.size());
  for (double gamma : gammas) {
    for (double rho : rhos) {
      BoundInputs cell = inputs;
      cell.gamma = gamma;
      cell.rho = StepSchedule::constant(rho);
      BoundRow row;
      row.gamma = gamma;
      row.rho = rho;
      row.tail = gaussian_tail(gamma, inputs.M);
      const BoundValue bound = theorem2_bound(cell);
      row.theorem2 = bound.value;
      row.admissible = bound.warnings.empty();
      row.corollary2 = corollary2_limit(cell);
      row.gap = corollary3_gap(cell);
      row.admissible_limit =
          admissible_rho_limit(gamma, inputs.M, AdmissibilityConstants{inputs.c1, inputs.d1, inputs.L, inputs.sigma1_sq});
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace sra
