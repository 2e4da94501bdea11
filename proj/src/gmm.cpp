#include "sra/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sra/errors.hpp"

namespace sra {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;  // log(2 pi)

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

Vector component_log_terms(const GmmParams& params, const Vector& y) {
  if (static_cast<std::size_t>(y.size()) != params.dim()) {
    throw std::invalid_argument("observation dimension " + std::to_string(y.size()) +
                                " does not match model dimension " + std::to_string(params.dim()));
  }
  if (!y.allFinite()) throw DataError("non-finite observation");
  const std::size_t k_count = params.components();
  Vector terms(static_cast<Eigen::Index>(k_count));
  for (std::size_t k = 0; k < k_count; ++k) {
    const double w = params.weights()[static_cast<Eigen::Index>(k)];
    terms[static_cast<Eigen::Index>(k)] =
        w > 0.0 ? std::log(w) + params.component_log_density(k, y) : -std::numeric_limits<double>::infinity();
  }
  return terms;
}

}  // namespace

GmmParams GmmParams::create(Vector weights, std::vector<Vector> means, std::vector<Matrix> covariances) {
  const auto k_count = static_cast<std::size_t>(weights.size());
  require(k_count > 0, "mixture needs at least one component");
  require(means.size() == k_count, "means count does not match weights");
  require(covariances.size() == k_count, "covariance count does not match weights");
  const auto dim = static_cast<std::size_t>(means.front().size());
  require(dim > 0, "mixture dimension must be positive");

  require(weights.allFinite() && (weights.array() >= 0.0).all(), "mixture weights must be finite and nonnegative");
  require(std::abs(weights.sum() - 1.0) <= 1e-9, "mixture weights must sum to 1");

  GmmParams params;
  params.dim_ = dim;
  params.factors_.reserve(k_count);
  params.log_normalizers_.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const Vector& mu = means[k];
    const Matrix& cov = covariances[k];
    require(static_cast<std::size_t>(mu.size()) == dim, "mean " + std::to_string(k) + " has wrong dimension");
    require(mu.allFinite(), "mean " + std::to_string(k) + " is not finite");
    require(static_cast<std::size_t>(cov.rows()) == dim && static_cast<std::size_t>(cov.cols()) == dim,
            "covariance " + std::to_string(k) + " has wrong shape");
    if (!cov.allFinite()) throw SingularCovarianceError(k);
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    require((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
            "covariance " + std::to_string(k) + " is not symmetric");

    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw SingularCovarianceError(k);
    const Matrix lower = llt.matrixL();
    const Vector diag = lower.diagonal();
    if (!(diag.array() > 0.0).all() || !diag.allFinite()) throw SingularCovarianceError(k);
    const double log_det_half = diag.array().log().sum();
    if (!std::isfinite(log_det_half)) throw SingularCovarianceError(k);

    params.log_normalizers_.push_back(-0.5 * static_cast<double>(dim) * kLogTwoPi - log_det_half);
    params.factors_.push_back(std::move(llt));
  }
  params.weights_ = std::move(weights);
  params.means_ = std::move(means);
  params.covariances_ = std::move(covariances);
  return params;
}

GmmParams GmmParams::univariate(const std::vector<double>& weights, const std::vector<double>& means,
                                const std::vector<double>& sigmas) {
  require(weights.size() == means.size() && means.size() == sigmas.size(), "univariate mixture arrays differ in length");
  Vector w(static_cast<Eigen::Index>(weights.size()));
  std::vector<Vector> mu;
  std::vector<Matrix> cov;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    w[static_cast<Eigen::Index>(k)] = weights[k];
    mu.push_back(Vector::Constant(1, means[k]));
    cov.push_back(Matrix::Constant(1, 1, sigmas[k] * sigmas[k]));
  }
  return create(std::move(w), std::move(mu), std::move(cov));
}

double GmmParams::component_log_density(std::size_t k, const Vector& y) const {
  const Vector centered = y - means_.at(k);
  const Vector whitened = factors_[k].matrixL().solve(centered);
  return log_normalizers_[k] - 0.5 * whitened.squaredNorm();
}

SuffStats SuffStats::zeros(std::size_t components, std::size_t dim) {
  SuffStats stats;
  const auto d = static_cast<Eigen::Index>(dim);
  stats.s0 = Vector::Zero(static_cast<Eigen::Index>(components));
  stats.s1.assign(components, Vector::Zero(d));
  stats.s2.assign(components, Matrix::Zero(d, d));
  return stats;
}

std::size_t SuffStats::flat_size(std::size_t components, std::size_t dim) noexcept {
  return components * (1 + dim + dim * (dim + 1) / 2);
}

Vector SuffStats::flatten() const {
  const std::size_t k_count = components();
  const std::size_t d = dim();
  Vector flat(static_cast<Eigen::Index>(flat_size(k_count, d)));
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < k_count; ++k) flat[pos++] = s0[static_cast<Eigen::Index>(k)];
  for (std::size_t k = 0; k < k_count; ++k) {
    flat.segment(pos, static_cast<Eigen::Index>(d)) = s1[k];
    pos += static_cast<Eigen::Index>(d);
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i) {
      for (Eigen::Index j = i; j < static_cast<Eigen::Index>(d); ++j) flat[pos++] = s2[k](i, j);
    }
  }
  return flat;
}

SuffStats SuffStats::unflatten(const Vector& flat, std::size_t components, std::size_t dim) {
  require(static_cast<std::size_t>(flat.size()) == flat_size(components, dim),
          "flat statistics vector has wrong length");
  SuffStats stats = zeros(components, dim);
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < components; ++k) stats.s0[static_cast<Eigen::Index>(k)] = flat[pos++];
  for (std::size_t k = 0; k < components; ++k) {
    stats.s1[k] = flat.segment(pos, static_cast<Eigen::Index>(dim));
    pos += static_cast<Eigen::Index>(dim);
  }
  for (std::size_t k = 0; k < components; ++k) {
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(dim); ++i) {
      for (Eigen::Index j = i; j < static_cast<Eigen::Index>(dim); ++j) {
        stats.s2[k](i, j) = flat[pos];
        stats.s2[k](j, i) = flat[pos];
        ++pos;
      }
    }
  }
  return stats;
}

void SuffStats::validate() const {
  require(components() > 0, "statistics need at least one component");
  require(s1.size() == components() && s2.size() == components(), "statistics arrays differ in length");
  require(s0.allFinite() && (s0.array() >= 0.0).all(), "occupancies must be finite and nonnegative");
  require(std::abs(s0.sum() - 1.0) <= 1e-9, "occupancies must sum to 1");
}

bool SuffStats::component_consistent(std::size_t k) const {
  const double occ = s0[static_cast<Eigen::Index>(k)];
  if (!(occ > kOccupancyFloor)) return false;
  const Matrix scatter = s2[k] - s1[k] * s1[k].transpose() / occ;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (scatter + scatter.transpose()), Eigen::EigenvaluesOnly);
  const double tol = 1e-12 * std::max(1.0, s2[k].cwiseAbs().maxCoeff());
  return eig.eigenvalues().minCoeff() >= -tol;
}

double log_density(const GmmParams& params, const Vector& y) {
  const Vector terms = component_log_terms(params, y);
  const double top = terms.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((terms.array() - top).exp().sum());
}

Vector responsibilities(const GmmParams& params, const Vector& y) {
  const Vector terms = component_log_terms(params, y);
  const double top = terms.maxCoeff();
  Vector post = (terms.array() - top).exp().matrix();
  post /= post.sum();
  return post;
}

SuffStats expected_suffstats(const GmmParams& params, const Vector& y) {
  const Vector post = responsibilities(params, y);
  const Matrix outer = y * y.transpose();
  SuffStats stats;
  stats.s0 = post;
  stats.s1.reserve(params.components());
  stats.s2.reserve(params.components());
  for (Eigen::Index k = 0; k < post.size(); ++k) {
    stats.s1.push_back(post[k] * y);
    stats.s2.push_back(post[k] * outer);
  }
  return stats;
}

SuffStats population_stats(const GmmParams& params) {
  SuffStats stats;
  stats.s0 = params.weights();
  for (std::size_t k = 0; k < params.components(); ++k) {
    const double w = params.weights()[static_cast<Eigen::Index>(k)];
    const Vector& mu = params.mean(k);
    stats.s1.push_back(w * mu);
    stats.s2.push_back(w * (params.covariance(k) + mu * mu.transpose()));
  }
  return stats;
}

GmmParams m_step(const SuffStats& stats, const MStepOptions& options) {
  const std::size_t k_count = stats.components();
  const std::size_t d = stats.dim();
  require(k_count > 0 && d > 0, "m_step needs nonempty statistics");
  require(stats.s1.size() == k_count && stats.s2.size() == k_count, "statistics arrays differ in length");
  if (options.prior) {
    require(static_cast<std::size_t>(options.prior->scale.rows()) == d &&
                static_cast<std::size_t>(options.prior->scale.cols()) == d,
            "covariance prior scale has wrong shape");
  }

  double total = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double occ = stats.s0[static_cast<Eigen::Index>(k)];
    if (!(occ >= options.occupancy_floor) || !std::isfinite(occ)) throw DegenerateComponentError(k, occ);
    total += occ;
  }

  Vector weights = stats.s0 / total;
  std::vector<Vector> means;
  std::vector<Matrix> covariances;
  means.reserve(k_count);
  covariances.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double occ = stats.s0[static_cast<Eigen::Index>(k)];
    Vector mu = stats.s1[k] / occ;
    Matrix cov = stats.s2[k] / occ - mu * mu.transpose();
    if (options.prior) cov = (occ * cov + options.prior->scale) / (occ + options.prior->dof);
    cov = 0.5 * (cov + cov.transpose());
    const double eps = options.covariance_floor_scale * cov.trace() / static_cast<double>(d);
    if (eps > 0.0) cov.diagonal().array() += eps;
    means.push_back(std::move(mu));
    covariances.push_back(std::move(cov));
  }
  return GmmParams::create(std::move(weights), std::move(means), std::move(covariances));
}

double loss(const SuffStats& stats, const GmmParams& params, const CovariancePrior* prior) {
  require(stats.components() == params.components() && stats.dim() == params.dim(),
          "statistics and parameters differ in shape");
  const auto d = static_cast<double>(params.dim());
  double value = 0.0;
  for (std::size_t k = 0; k < params.components(); ++k) {
    const double occ = stats.s0[static_cast<Eigen::Index>(k)];
    const double w = params.weights()[static_cast<Eigen::Index>(k)];
    const Vector& mu = params.mean(k);
    const Matrix& cov = params.covariance(k);
    const Eigen::LLT<Matrix> llt(cov);
    const double log_det = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();

    if (occ > 0.0) value -= occ * std::log(w);
    value += occ * 0.5 * (d * kLogTwoPi + log_det);
    const Matrix centered_second = stats.s2[k] - stats.s1[k] * mu.transpose() - mu * stats.s1[k].transpose() +
                                   occ * mu * mu.transpose();
    value += 0.5 * llt.solve(centered_second).trace();
    if (prior != nullptr) value += 0.5 * prior->dof * log_det + 0.5 * llt.solve(prior->scale).trace();
  }
  return value;
}

}  // namespace sra
