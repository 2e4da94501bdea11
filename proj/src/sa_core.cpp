#include "sra/sa_core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sra/bounds.hpp"
#include "sra/errors.hpp"

namespace sra {

StepSchedule StepSchedule::constant(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("constant step size must lie in (0, 1]");
  return {Kind::kConstant, rho};
}

StepSchedule StepSchedule::inverse_sqrt(double c) {
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("c / sqrt(t) schedule needs c in (0, 1]");
  return {Kind::kInverseSqrt, c};
}

StepSchedule StepSchedule::inverse() { return {Kind::kInverse, 1.0}; }

double StepSchedule::at(std::uint64_t t) const {
  if (t == 0) throw std::invalid_argument("step sizes are indexed from t = 1");
  switch (kind_) {
    case Kind::kConstant:
      return scale_;
    case Kind::kInverseSqrt:
      return scale_ / std::sqrt(static_cast<double>(t));
    case Kind::kInverse:
      return 1.0 / static_cast<double>(t);
  }
  return scale_;
}

std::string StepSchedule::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::kConstant:
      out << "constant(" << scale_ << ")";
      break;
    case Kind::kInverseSqrt:
      out << "inverse_sqrt(" << scale_ << ")";
      break;
    case Kind::kInverse:
      out << "inverse";
      break;
  }
  return out.str();
}

SraConfig SraConfig::from_tradeoff(double gamma, double beta, double M) {
  SraConfig config;
  config.gamma = gamma;
  config.beta = beta;
  config.M = M;
  config.schedule = StepSchedule::constant(corollary1_rho(gamma, beta, M));
  return config;
}

void SraConfig::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (beta && !(*beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (M && !(*M > 0.0)) throw std::invalid_argument("M must be positive");
}

Truncation truncate(const Vector& update, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  Truncation result;
  result.norm = update.norm();
  result.truncated = !(result.norm <= gamma);
  result.update = result.truncated ? Vector::Zero(update.size()) : update;
  return result;
}

SaStepOutcome sa_step(SaState& state, const Vector& update, const SraConfig& config) {
  if (update.size() != state.theta.size()) {
    throw std::invalid_argument("update dimension does not match the iterate");
  }
  if (!update.allFinite()) throw NumericError("non-finite stochastic update at t = " + std::to_string(state.t + 1));
  SaStepOutcome outcome;
  outcome.rho = config.schedule.at(state.t + 1);
  outcome.update_norm = update.norm();
  outcome.truncated = !(outcome.update_norm <= config.gamma);
  if (outcome.truncated) {
    ++state.t;
    ++state.dropped_count;
    return outcome;
  }
  Vector next = state.theta - outcome.rho * update;
  if (!next.allFinite()) throw NumericError("stochastic approximation step diverged at t = " + std::to_string(state.t + 1));
  state.theta = std::move(next);
  ++state.t;
  return outcome;
}

double corollary1_rho(double gamma, double beta, double M) {
  if (!(gamma > 0.0 && beta > 0.0 && M > 0.0)) {
    throw std::invalid_argument("gamma, beta and M must all be positive");
  }
  const double ratio = gamma / M;
  return beta * std::exp(-ratio * ratio) / (2.0 * gamma);
}

double admissible_rho_limit(double gamma, double M, const AdmissibilityConstants& constants) {
  const double tail = gaussian_tail(gamma, M);
  return (1.0 - 2.0 * constants.c1 * constants.d1 * tail) /
         (2.0 * constants.c1 * constants.L * (constants.sigma1_sq + 2.0));
}

std::vector<std::string> check_step_size(const SraConfig& config, const AdmissibilityConstants& constants) {
  std::vector<std::string> warnings;
  const double M = config.M.value_or(1.0);
  const double limit = admissible_rho_limit(config.gamma, M, constants);
  const double first = config.schedule.at(1);
  if (!(first < limit)) {
    std::ostringstream out;
    out.precision(6);
    out << "step size " << first << " is not below the admissible limit " << limit;
    warnings.push_back(out.str());
  }
  return warnings;
}

}  // namespace sra
