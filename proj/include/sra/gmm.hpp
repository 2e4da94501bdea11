#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace sra {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Components with occupancy below this are degenerate.
inline constexpr double kOccupancyFloor = 1e-8;
/// After the M-step each covariance gets eps * I added, eps = scale * trace / d.
inline constexpr double kCovarianceFloorScale = 1e-6;

/// Inverse-Wishart style covariance penalty,
/// R(theta) = sum_k [ dof/2 * log|Sigma_k| + 1/2 tr(scale * Sigma_k^-1) ].
/// Absent by default (R == 0).
struct CovariancePrior {
  Matrix scale;
  double dof = 0.0;
};

/// Parameters of a K-component Gaussian mixture in d dimensions.
///
/// Instances are immutable and always valid: weights are nonnegative and sum
/// to one, covariances are symmetric positive definite. The Cholesky factor
/// and log-normalizer of every component are cached at construction.
class GmmParams {
 public:
  /// Validates and builds a parameter set. Throws std::invalid_argument on
  /// shape or weight errors and SingularCovarianceError when a covariance is
  /// not positive definite.
  static GmmParams create(Vector weights, std::vector<Vector> means, std::vector<Matrix> covariances);

  /// Univariate convenience constructor (d = 1) from standard deviations.
  static GmmParams univariate(const std::vector<double>& weights, const std::vector<double>& means,
                              const std::vector<double>& sigmas);

  std::size_t components() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  std::size_t dim() const noexcept { return dim_; }

  const Vector& weights() const noexcept { return weights_; }
  const std::vector<Vector>& means() const noexcept { return means_; }
  const std::vector<Matrix>& covariances() const noexcept { return covariances_; }
  const Vector& mean(std::size_t k) const { return means_.at(k); }
  const Matrix& covariance(std::size_t k) const { return covariances_.at(k); }

  /// log N(y; mu_k, Sigma_k), without the mixture weight.
  double component_log_density(std::size_t k, const Vector& y) const;

  /// Cholesky factor L of Sigma_k (Sigma_k = L L^T).
  Matrix cholesky_factor(std::size_t k) const { return factors_.at(k).matrixL(); }

 private:
  GmmParams() = default;

  std::size_t dim_ = 0;
  Vector weights_;
  std::vector<Vector> means_;
  std::vector<Matrix> covariances_;
  std::vector<Eigen::LLT<Matrix>> factors_;
  std::vector<double> log_normalizers_;
};

/// Per-component sufficient statistics of the complete-data GMM likelihood:
/// occupancy s0, first moments s1 = E[z_k y], second moments s2 = E[z_k y y^T].
struct SuffStats {
  Vector s0;
  std::vector<Vector> s1;
  std::vector<Matrix> s2;

  static SuffStats zeros(std::size_t components, std::size_t dim);

  std::size_t components() const noexcept { return static_cast<std::size_t>(s0.size()); }
  std::size_t dim() const noexcept { return s1.empty() ? 0 : static_cast<std::size_t>(s1.front().size()); }

  /// Length of the flat layout [s0 | s1_1..s1_K | upper(s2_1)..upper(s2_K)].
  static std::size_t flat_size(std::size_t components, std::size_t dim) noexcept;
  Vector flatten() const;
  static SuffStats unflatten(const Vector& flat, std::size_t components, std::size_t dim);

  /// Throws std::invalid_argument when the occupancies are negative or do not
  /// sum to one within 1e-9.
  void validate() const;

  /// True when s2_k - s1_k s1_k^T / s0_k is positive semidefinite (within a
  /// relative tolerance). Components at or below the occupancy floor report false.
  bool component_consistent(std::size_t k) const;
};

struct MStepOptions {
  double covariance_floor_scale = kCovarianceFloorScale;
  double occupancy_floor = kOccupancyFloor;
  std::optional<CovariancePrior> prior;
};

/// log sum_k w_k N(y; mu_k, Sigma_k), evaluated with log-sum-exp.
double log_density(const GmmParams& params, const Vector& y);

/// Posterior component probabilities p(z = k | y).
Vector responsibilities(const GmmParams& params, const Vector& y);

/// Conditional expectation of the complete-data statistics given y.
SuffStats expected_suffstats(const GmmParams& params, const Vector& y);

/// Exact population statistics of params: s0 = w, s1 = w mu, s2 = w (Sigma + mu mu^T).
SuffStats population_stats(const GmmParams& params);

/// Closed-form minimizer of the complete-data loss. Throws
/// DegenerateComponentError when a component's occupancy is below the floor.
GmmParams m_step(const SuffStats& stats, const MStepOptions& options = {});

/// Negated complete-data log-likelihood l(s; theta) plus the optional penalty.
double loss(const SuffStats& stats, const GmmParams& params, const CovariancePrior* prior = nullptr);

}  // namespace sra
