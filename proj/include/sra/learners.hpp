#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sra/gmm.hpp"
#include "sra/sa_core.hpp"

namespace sra {

enum class Algorithm { kSra, kSem, kIem, kSdem };

std::string_view to_string(Algorithm algorithm) noexcept;
/// Accepts "sra", "sem", "iem", "sdem" (case-insensitive).
Algorithm parse_algorithm(std::string_view name);

/// SDEM mixes posteriors toward uniform by this amount before each update.
inline constexpr double kSdemSmoothing = 1e-4;

/// Hyperparameters of an online-EM learner.
///
/// All four algorithms update the flattened sufficient statistics with the
/// same stochastic-approximation step; they differ in threshold and schedule:
///   SRA   gamma finite, any schedule
///   sEM   gamma = inf, constant rho = r
///   iEM   gamma = inf, rho_t = 1 / t
///   SDEM  gamma = inf, rho_t = 1 / W_t with W_t = 1 + (1 - r) W_{t-1},
///         posteriors smoothed toward uniform
struct EmConfig {
  Algorithm algorithm = Algorithm::kSra;
  SraConfig sa;
  double discount = 0.0;
  double smoothing = kSdemSmoothing;
  MStepOptions m_step;

  static EmConfig sra(SraConfig config);
  static EmConfig sem(double r);
  static EmConfig iem();
  static EmConfig sdem(double r, double smoothing = kSdemSmoothing);
};

struct StepReport {
  double score = 0.0;  ///< -log f(y; model before the update)
  bool truncated = false;
  double theta_delta_norm = 0.0;
};

/// Learner state. `sa.theta` holds the flattened statistics and `model` is
/// always m_step of those statistics.
struct LearnerState {
  EmConfig config;
  GmmParams model;
  SaState sa;
  double discount_weight = 0.0;
  std::size_t components = 0;
  std::size_t dim = 0;

  SuffStats stats() const { return SuffStats::unflatten(sa.theta, components, dim); }
};

/// Builds a learner from explicit statistics (the step counter starts at `t`).
LearnerState make_learner(const EmConfig& config, const SuffStats& stats, std::uint64_t t = 0);

enum class InitMode {
  kMoments,  ///< moment matching on the window
  kUniform,  ///< moment matching on points drawn uniformly over the window's range
};

struct InitOptions {
  InitMode mode = InitMode::kMoments;
  std::size_t uniform_points = 20;
  std::uint64_t seed = 0;
  /// Drop window points outside Q1 - 3 IQR .. Q3 + 3 IQR (per coordinate)
  /// before moment matching, as long as at least K points remain.
  bool fence = true;
};

/// Sorts the window by its first coordinate, splits it into K contiguous
/// groups of near-equal size and matches each group's weight, mean and
/// (population) covariance. Groups with a singular covariance take the whole
/// window's covariance instead.
GmmParams moment_match(std::span<const Vector> window, std::size_t components, bool fence = true);

/// `count` points drawn uniformly over the per-coordinate [min, max] of the window.
std::vector<Vector> uniform_points_in_range(std::span<const Vector> window, std::size_t count, std::uint64_t seed);

/// Initial learner. The step counter starts at the window length so that
/// decaying schedules treat the initial statistics as that many observations.
LearnerState init_from_window(const EmConfig& config, std::span<const Vector> window, std::size_t components,
                              const InitOptions& options = {});

StepReport step_sra(LearnerState& state, const Vector& y);
StepReport step_sem(LearnerState& state, const Vector& y);
StepReport step_iem(LearnerState& state, const Vector& y);
StepReport step_sdem(LearnerState& state, const Vector& y);

/// Dispatches on the state's algorithm.
StepReport step(LearnerState& state, const Vector& y);

/// SGD with an L2 penalty as a truncated SA scheme: H = lambda theta + grad l(theta; y).
struct LossEval {
  double value = 0.0;
  Vector gradient;
};
using LossFunction = std::function<LossEval(const Vector& theta, const Vector& y)>;

struct SgdL2State {
  double lambda = 0.0;
  SraConfig sa_config;
  SaState sa;
};

SgdL2State make_sgd_l2(Vector theta0, double lambda, SraConfig config);

/// The score is the loss at the pre-update parameters.
StepReport step_sgd_l2(SgdL2State& state, const Vector& y, const LossFunction& loss_fn);

}  // namespace sra
