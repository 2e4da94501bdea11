#include "sra/learners.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sra/errors.hpp"
#include "sra/rng.hpp"

namespace sra {

namespace {

void require_algorithm(const LearnerState& state, Algorithm expected) {
  if (state.config.algorithm != expected) {
    throw std::invalid_argument("learner is " + std::string(to_string(state.config.algorithm)) + ", not " +
                                std::string(to_string(expected)));
  }
}

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<Vector> fenced(std::span<const Vector> window, std::size_t components) {
  const auto d = static_cast<Eigen::Index>(window.front().size());
  std::vector<bool> keep(window.size(), true);
  for (Eigen::Index j = 0; j < d; ++j) {
    std::vector<double> column;
    column.reserve(window.size());
    for (const Vector& y : window) column.push_back(y[j]);
    const double q1 = quantile(column, 0.25);
    const double q3 = quantile(column, 0.75);
    const double iqr = q3 - q1;
    if (!(iqr > 0.0)) continue;
    for (std::size_t i = 0; i < window.size(); ++i) {
      if (window[i][j] < q1 - 3.0 * iqr || window[i][j] > q3 + 3.0 * iqr) keep[i] = false;
    }
  }
  std::vector<Vector> kept;
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (keep[i]) kept.push_back(window[i]);
  }
  if (kept.size() < components) return {window.begin(), window.end()};
  return kept;
}

Matrix population_covariance(std::span<const Vector> points, const Vector& mean) {
  Matrix cov = Matrix::Zero(mean.size(), mean.size());
  for (const Vector& y : points) cov += (y - mean) * (y - mean).transpose();
  return cov / static_cast<double>(points.size());
}

bool well_conditioned(const Matrix& cov, double reference_trace) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
  const double scale = std::max(reference_trace / static_cast<double>(cov.rows()), 0.0);
  return eig.eigenvalues().minCoeff() > 1e-9 * scale && eig.eigenvalues().minCoeff() > 0.0;
}

// Shared E-step / SA / M-step for SRA, sEM and iEM. The new model is computed
// before the state is committed so an M-step failure leaves the state intact.
StepReport em_sa_step(LearnerState& state, const Vector& y) {
  StepReport report;
  report.score = -log_density(state.model, y);
  const Vector expected = expected_suffstats(state.model, y).flatten();
  const Vector update = state.sa.theta - expected;

  SaState next = state.sa;
  const SaStepOutcome outcome = sa_step(next, update, state.config.sa);
  report.truncated = outcome.truncated;
  if (outcome.truncated) {
    state.sa = std::move(next);
    return report;
  }
  GmmParams model = m_step(SuffStats::unflatten(next.theta, state.components, state.dim), state.config.m_step);
  report.theta_delta_norm = (next.theta - state.sa.theta).norm();
  state.sa = std::move(next);
  state.model = std::move(model);
  return report;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::kSra:
      return "sra";
    case Algorithm::kSem:
      return "sem";
    case Algorithm::kIem:
      return "iem";
    case Algorithm::kSdem:
      return "sdem";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "sra") return Algorithm::kSra;
  if (lower == "sem") return Algorithm::kSem;
  if (lower == "iem") return Algorithm::kIem;
  if (lower == "sdem") return Algorithm::kSdem;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

EmConfig EmConfig::sra(SraConfig config) {
  config.validate();
  EmConfig em;
  em.algorithm = Algorithm::kSra;
  em.sa = std::move(config);
  return em;
}

EmConfig EmConfig::sem(double r) {
  EmConfig em;
  em.algorithm = Algorithm::kSem;
  em.sa.gamma = kNoTruncation;
  em.sa.schedule = StepSchedule::constant(r);
  em.discount = r;
  return em;
}

EmConfig EmConfig::iem() {
  EmConfig em;
  em.algorithm = Algorithm::kIem;
  em.sa.gamma = kNoTruncation;
  em.sa.schedule = StepSchedule::inverse();
  return em;
}

EmConfig EmConfig::sdem(double r, double smoothing) {
  if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("SDEM discount must lie in [0, 1)");
  if (!(smoothing >= 0.0 && smoothing <= 1.0)) throw std::invalid_argument("SDEM smoothing must lie in [0, 1]");
  EmConfig em;
  em.algorithm = Algorithm::kSdem;
  em.sa.gamma = kNoTruncation;
  em.discount = r;
  em.smoothing = smoothing;
  return em;
}

LearnerState make_learner(const EmConfig& config, const SuffStats& stats, std::uint64_t t) {
  stats.validate();
  GmmParams model = m_step(stats, config.m_step);
  LearnerState state{config, std::move(model), SaState{stats.flatten(), t, 0}, static_cast<double>(t),
                     stats.components(), stats.dim()};
  return state;
}

GmmParams moment_match(std::span<const Vector> window, std::size_t components, bool fence) {
  if (window.empty()) throw DataError("initialisation window is empty");
  if (components == 0) throw std::invalid_argument("need at least one mixture component");
  if (window.size() < components) {
    throw DataError("initialisation window has " + std::to_string(window.size()) + " points, fewer than K = " +
                    std::to_string(components));
  }
  const auto d = window.front().size();
  for (const Vector& y : window) {
    if (y.size() != d) throw DataError("initialisation window mixes dimensions");
    if (!y.allFinite()) throw DataError("initialisation window has non-finite values");
  }

  std::vector<Vector> points = fence ? fenced(window, components) : std::vector<Vector>(window.begin(), window.end());
  std::stable_sort(points.begin(), points.end(), [](const Vector& a, const Vector& b) { return a[0] < b[0]; });

  const Vector overall_mean =
      std::accumulate(points.begin(), points.end(), Vector(Vector::Zero(d))) / static_cast<double>(points.size());
  Matrix overall_cov = population_covariance(points, overall_mean);
  const double overall_trace = overall_cov.trace();
  if (!well_conditioned(overall_cov, overall_trace)) {
    const double jitter = 1e-6 * std::max(1.0, overall_mean.squaredNorm() / static_cast<double>(d));
    overall_cov.diagonal().array() += jitter;
  }

  const std::size_t n = points.size();
  Vector weights(static_cast<Eigen::Index>(components));
  std::vector<Vector> means;
  std::vector<Matrix> covariances;
  std::size_t begin = 0;
  for (std::size_t k = 0; k < components; ++k) {
    const std::size_t size = n / components + (k < n % components ? 1 : 0);
    const std::span<const Vector> group(points.data() + begin, size);
    begin += size;
    Vector mean = std::accumulate(group.begin(), group.end(), Vector(Vector::Zero(d))) / static_cast<double>(size);
    Matrix cov = population_covariance(group, mean);
    if (size < 2 || !well_conditioned(cov, overall_trace)) cov = overall_cov;
    weights[static_cast<Eigen::Index>(k)] = static_cast<double>(size) / static_cast<double>(n);
    means.push_back(std::move(mean));
    covariances.push_back(std::move(cov));
  }
  return GmmParams::create(std::move(weights), std::move(means), std::move(covariances));
}

std::vector<Vector> uniform_points_in_range(std::span<const Vector> window, std::size_t count, std::uint64_t seed) {
  if (window.empty()) throw DataError("initialisation window is empty");
  const auto d = window.front().size();
  Vector lo = window.front();
  Vector hi = window.front();
  for (const Vector& y : window) {
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  Rng rng(seed, 0);
  std::vector<Vector> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vector y(d);
    for (Eigen::Index j = 0; j < d; ++j) y[j] = rng.uniform(lo[j], hi[j]);
    points.push_back(std::move(y));
  }
  return points;
}

LearnerState init_from_window(const EmConfig& config, std::span<const Vector> window, std::size_t components,
                              const InitOptions& options) {
  if (window.empty()) throw DataError("initialisation window is empty");
  GmmParams initial = [&] {
    if (options.mode == InitMode::kUniform) {
      const std::vector<Vector> drawn = uniform_points_in_range(window, options.uniform_points, options.seed);
      return moment_match(drawn, components, false);
    }
    return moment_match(window, components, options.fence);
  }();
  return make_learner(config, population_stats(initial), window.size());
}

StepReport step_sra(LearnerState& state, const Vector& y) {
  require_algorithm(state, Algorithm::kSra);
  return em_sa_step(state, y);
}

StepReport step_sem(LearnerState& state, const Vector& y) {
  require_algorithm(state, Algorithm::kSem);
  return em_sa_step(state, y);
}

StepReport step_iem(LearnerState& state, const Vector& y) {
  require_algorithm(state, Algorithm::kIem);
  return em_sa_step(state, y);
}

StepReport step_sdem(LearnerState& state, const Vector& y) {
  require_algorithm(state, Algorithm::kSdem);
  StepReport report;
  report.score = -log_density(state.model, y);

  const double eps = state.config.smoothing;
  const Vector post = responsibilities(state.model, y);
  const Vector smoothed = ((1.0 - eps) * post.array() + eps / static_cast<double>(state.components)).matrix();
  const Matrix outer = y * y.transpose();
  SuffStats target;
  target.s0 = smoothed;
  for (Eigen::Index k = 0; k < smoothed.size(); ++k) {
    target.s1.push_back(smoothed[k] * y);
    target.s2.push_back(smoothed[k] * outer);
  }
  const Vector update = state.sa.theta - target.flatten();

  const double weight = 1.0 + (1.0 - state.config.discount) * state.discount_weight;
  const double rho = 1.0 / weight;
  Vector next = state.sa.theta - rho * update;
  if (!next.allFinite()) throw NumericError("SDEM update diverged at t = " + std::to_string(state.sa.t + 1));
  GmmParams model = m_step(SuffStats::unflatten(next, state.components, state.dim), state.config.m_step);

  report.theta_delta_norm = (next - state.sa.theta).norm();
  state.sa.theta = std::move(next);
  ++state.sa.t;
  state.discount_weight = weight;
  state.model = std::move(model);
  return report;
}

StepReport step(LearnerState& state, const Vector& y) {
  switch (state.config.algorithm) {
    case Algorithm::kSra:
      return step_sra(state, y);
    case Algorithm::kSem:
      return step_sem(state, y);
    case Algorithm::kIem:
      return step_iem(state, y);
    case Algorithm::kSdem:
      return step_sdem(state, y);
  }
  throw std::logic_error("unhandled algorithm");
}

SgdL2State make_sgd_l2(Vector theta0, double lambda, SraConfig config) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  config.validate();
  SgdL2State state;
  state.lambda = lambda;
  state.sa_config = std::move(config);
  state.sa.theta = std::move(theta0);
  return state;
}

StepReport step_sgd_l2(SgdL2State& state, const Vector& y, const LossFunction& loss_fn) {
  if (!loss_fn) throw std::invalid_argument("step_sgd_l2 needs a loss function");
  const LossEval eval = loss_fn(state.sa.theta, y);
  if (eval.gradient.size() != state.sa.theta.size()) {
    throw std::invalid_argument("loss gradient has the wrong dimension");
  }
  const Vector update = state.lambda * state.sa.theta + eval.gradient;
  const Vector before = state.sa.theta;
  StepReport report;
  report.score = eval.value;
  report.truncated = sa_step(state.sa, update, state.sa_config).truncated;
  report.theta_delta_norm = (state.sa.theta - before).norm();
  return report;
}

}  // namespace sra
