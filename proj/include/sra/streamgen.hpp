#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sra/gmm.hpp"

namespace sra {

/// A stationary stretch of the stream starting at time `start` (1-based).
struct Segment {
  std::uint64_t start = 1;
  GmmParams params;
};

/// Piecewise-stationary stream contaminated by uniform noise: with
/// probability alpha draw from the active segment's mixture, otherwise
/// uniformly from [-U, U]^d.
struct StreamSpec {
  std::uint64_t T = 0;
  std::size_t d = 1;
  double alpha = 1.0;
  double U = 1.0;
  std::vector<Segment> segments;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when starts are not strictly increasing
  /// from 1, alpha is outside (0, 1], U <= 0, or dimensions disagree.
  void validate() const;

  /// Times t at which a new segment begins (every start after the first).
  std::vector<std::uint64_t> change_points() const;
};

struct LabeledSample {
  std::uint64_t t = 0;
  Vector y;
  bool is_outlier = false;
  std::size_t segment_id = 0;
  std::vector<Vector> true_means;
};

/// Substream ids of the generator (see Rng).
enum class Substream : std::uint32_t { kContamination = 1, kComponent = 2, kGaussian = 3, kNoise = 4 };

/// Deterministic given the spec. Each random decision draws from its own
/// substream: one contamination coin per step, one component choice and d
/// normals per inlier, d uniforms per outlier.
std::vector<LabeledSample> generate(const StreamSpec& spec);

/// The one-dimensional benchmark: equal-weight two-component mixture with
/// sigma = 0.1, means (0.5, -0.5) for t <= 10000 and (1, -1) afterwards, T = 20000.
StreamSpec paper_synthetic_spec(double alpha, double U, std::uint64_t seed);

/// CSV with header t,y1..yd,is_outlier,segment_id,true_mu_1..true_mu_{K d}
/// (component-major), values in shortest round-trip decimal form.
void write_stream_csv(std::ostream& out, const std::vector<LabeledSample>& samples);

}  // namespace sra
