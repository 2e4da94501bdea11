#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sra {

using Vector = Eigen::VectorXd;

inline constexpr double kNoTruncation = std::numeric_limits<double>::infinity();

/// Step-size sequence rho_t, t = 1, 2, ...
class StepSchedule {
 public:
  enum class Kind { kConstant, kInverseSqrt, kInverse };

  /// rho_t = rho, rho in (0, 1].
  static StepSchedule constant(double rho);
  /// rho_t = c / sqrt(t), c in (0, 1].
  static StepSchedule inverse_sqrt(double c);
  /// rho_t = 1 / t.
  static StepSchedule inverse();

  Kind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }

  /// rho_t for t >= 1.
  double at(std::uint64_t t) const;

  std::string describe() const;

 private:
  StepSchedule(Kind kind, double scale) : kind_(kind), scale_(scale) {}

  Kind kind_;
  double scale_;
};

/// Truncation threshold, step-size schedule, and the (beta, M) pair used to
/// derive a constant step size from gamma.
struct SraConfig {
  double gamma = kNoTruncation;
  StepSchedule schedule = StepSchedule::constant(1.0);
  std::optional<double> beta;
  std::optional<double> M;

  /// Constant step from corollary1_rho(gamma, beta, M).
  static SraConfig from_tradeoff(double gamma, double beta, double M);

  /// Throws std::invalid_argument on gamma <= 0 or non-positive beta / M.
  void validate() const;
};

/// Iterate of the stochastic-approximation scheme.
struct SaState {
  Vector theta;
  std::uint64_t t = 0;
  std::uint64_t dropped_count = 0;
};

struct Truncation {
  Vector update;
  double norm = 0.0;
  bool truncated = false;
};

/// Returns H when ||H||_2 <= gamma, otherwise the zero vector.
Truncation truncate(const Vector& update, double gamma);

struct SaStepOutcome {
  double rho = 0.0;
  double update_norm = 0.0;
  bool truncated = false;
};

/// theta <- theta - rho_{t+1} * truncate(H, gamma); t <- t + 1.
/// Throws NumericError (leaving the state untouched) if the result is not finite.
SaStepOutcome sa_step(SaState& state, const Vector& update, const SraConfig& config);

/// Constant step size balancing the truncation bias against the outlier
/// variance: beta * exp(-gamma^2 / M^2) / (2 gamma), with
/// beta = (d0 + 1) / (L (1 - alpha)).
double corollary1_rho(double gamma, double beta, double M);

/// Constants needed to check a step size against the admissibility limit of
/// the truncated scheme.
struct AdmissibilityConstants {
  double c1 = 1.0;
  double d1 = 1.0;
  double L = 1.0;
  double sigma1_sq = 0.0;
};

/// Largest step (exclusive) for which the convergence bound holds:
/// (1 - 2 c1 d1 tail(gamma, M)) / (2 c1 L (sigma1^2 + 2)).
double admissible_rho_limit(double gamma, double M, const AdmissibilityConstants& constants);

/// Warnings for every violation of the admissibility limit by the first step
/// of the schedule (schedules here are non-increasing). Empty when fine.
std::vector<std::string> check_step_size(const SraConfig& config, const AdmissibilityConstants& constants);

}  // namespace sra
