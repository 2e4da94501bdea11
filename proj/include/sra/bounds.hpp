#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sra/sa_core.hpp"

namespace sra {

/// Constants of the convergence analysis. V0n is the expected Lyapunov
/// decrement E[V(theta_0) - V(theta_{n+1})], supplied by the caller.
struct BoundInputs {
  double c0 = 0.0;
  double c1 = 1.0;
  double d0 = 1.0;
  double d1 = 1.0;
  double sigma0_sq = 0.0;
  double sigma1_sq = 0.0;
  double L = 1.0;
  double alpha = 1.0;
  double U = 1.0;
  std::size_t d = 1;
  double V0n = 0.0;
  std::uint64_t n = 0;
  StepSchedule rho = StepSchedule::constant(0.01);
  double gamma = kNoTruncation;
  double M = 1.0;

  /// Throws std::invalid_argument when a sign constraint is violated.
  void validate() const;
};

/// Integral of exp(-z^2 / M^2) over [gamma, inf) = (M sqrt(pi) / 2) erfc(gamma / M).
double gaussian_tail(double gamma, double M);

/// Sum of rho_t and rho_t^2 over t = 1 .. n + 1.
struct StepSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};
StepSums step_sums(const StepSchedule& schedule, std::uint64_t n);

struct BoundValue {
  double value = 0.0;
  std::vector<std::string> warnings;
};

/// Upper bound on E||h(theta_N)||^2 for the truncated scheme under uniform
/// contamination. Attaches a warning when the schedule exceeds the
/// admissible step limit.
BoundValue theorem2_bound(const BoundInputs& inputs);

/// The same bound specialised to a constant step rho (the schedule in
/// `inputs` is ignored).
double const_rho_bound(const BoundInputs& inputs, double rho);

/// Limit of the bound as gamma -> inf.
double corollary2_limit(const BoundInputs& inputs);

/// Gap g(gamma) = corollary2_limit - theorem2_bound.
double corollary3_gap(const BoundInputs& inputs);

/// Gap when ||H|| <= gamma_star almost surely: the Gaussian tail is replaced
/// by the integral of exp(-z^2 / (gamma_star - gamma)^2) over [gamma, gamma_star],
/// and vanishes for gamma >= gamma_star.
double corollary3_gap_bounded(const BoundInputs& inputs, double gamma_star);

struct RhoMinimum {
  double rho = 0.0;
  double bound = 0.0;
  bool grid_fallback = false;
};

/// Minimises const_rho_bound over rho in (0, rho_max]. Requires
/// gamma < sqrt(d) U. Uses a bracketing minimiser in log(rho) and falls back
/// to a dense grid if a coarse scan is not unimodal.
RhoMinimum minimize_const_rho_bound(const BoundInputs& inputs, double rho_max = 1.0);

/// Cross-check of the closed-form trade-off step against numeric minimisation.
///
/// V0n is set so that the rho-derivative of the constant-step bound vanishes
/// at the closed-form step, then the bound is minimised numerically in rho and
/// its gamma-derivative is evaluated at both the closed-form step and the
/// variant carrying an extra factor c1. Finally the profile bound
/// min_rho b(rho, gamma') is minimised over gamma' in (0, sqrt(d) U); at a
/// joint stationary point that minimiser returns the input gamma.
struct TradeoffCrossCheck {
  double beta = 0.0;
  double rho_closed_form = 0.0;
  double rho_with_c1 = 0.0;
  double rho_numeric = 0.0;
  double relative_error = 0.0;
  double dgamma_closed_form = 0.0;
  double dgamma_with_c1 = 0.0;
  double V0n = 0.0;
  double gamma_profile_argmin = 0.0;
};
TradeoffCrossCheck cross_check_tradeoff_step(const BoundInputs& inputs);

struct BoundRow {
  double gamma = 0.0;
  double rho = 0.0;
  double tail = 0.0;
  double theorem2 = 0.0;
  double corollary2 = 0.0;
  double gap = 0.0;
  double admissible_limit = 0.0;
  bool admissible = true;
};

/// Evaluates the constant-step bounds on a gamma x rho grid (row-major in gamma).
std::vector<BoundRow> bound_table(const BoundInputs& inputs, const std::vector<double>& gammas,
                                  const std::vector<double>& rhos);

}  // namespace sra
