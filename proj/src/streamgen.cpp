#include "sra/streamgen.hpp"

#include <ostream>
#include <stdexcept>

#include "sra/format.hpp"
#include "sra/rng.hpp"

namespace sra {

void StreamSpec::validate() const {
  if (segments.empty()) throw std::invalid_argument("stream needs at least one segment");
  if (segments.front().start != 1) throw std::invalid_argument("first segment must start at t = 1");
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (segments[i].start <= segments[i - 1].start) {
      throw std::invalid_argument("segment starts must be strictly increasing");
    }
  }
  for (const Segment& segment : segments) {
    if (segment.params.dim() != d) throw std::invalid_argument("segment dimension does not match the stream");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(U > 0.0)) throw std::invalid_argument("U must be positive");
}

std::vector<std::uint64_t> StreamSpec::change_points() const {
  std::vector<std::uint64_t> points;
  for (std::size_t i = 1; i < segments.size(); ++i) points.push_back(segments[i].start);
  return points;
}

std::vector<LabeledSample> generate(const StreamSpec& spec) {
  spec.validate();
  Rng coin(spec.seed, static_cast<std::uint32_t>(Substream::kContamination));
  Rng chooser(spec.seed, static_cast<std::uint32_t>(Substream::kComponent));
  Rng gaussian(spec.seed, static_cast<std::uint32_t>(Substream::kGaussian));
  Rng noise(spec.seed, static_cast<std::uint32_t>(Substream::kNoise));

  std::vector<Matrix> factors;
  std::vector<LabeledSample> samples;
  samples.reserve(spec.T);
  const auto d = static_cast<Eigen::Index>(spec.d);
  std::size_t segment = 0;
  for (std::uint64_t t = 1; t <= spec.T; ++t) {
    while (segment + 1 < spec.segments.size() && spec.segments[segment + 1].start <= t) ++segment;
    const GmmParams& params = spec.segments[segment].params;

    LabeledSample sample;
    sample.t = t;
    sample.segment_id = segment;
    sample.true_means = params.means();
    sample.y = Vector(d);
    sample.is_outlier = !(coin.uniform() < spec.alpha);
    if (sample.is_outlier) {
      for (Eigen::Index j = 0; j < d; ++j) sample.y[j] = noise.uniform(-spec.U, spec.U);
    } else {
      const double u = chooser.uniform();
      std::size_t k = 0;
      double cumulative = params.weights()[0];
      while (k + 1 < params.components() && u >= cumulative) {
        ++k;
        cumulative += params.weights()[static_cast<Eigen::Index>(k)];
      }
      Vector z(d);
      for (Eigen::Index j = 0; j < d; ++j) z[j] = gaussian.normal();
      sample.y = params.mean(k) + params.cholesky_factor(k) * z;
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

StreamSpec paper_synthetic_spec(double alpha, double U, std::uint64_t seed) {
  StreamSpec spec;
  spec.T = 20000;
  spec.d = 1;
  spec.alpha = alpha;
  spec.U = U;
  spec.seed = seed;
  spec.segments.push_back({1, GmmParams::univariate({0.5, 0.5}, {0.5, -0.5}, {0.1, 0.1})});
  spec.segments.push_back({10001, GmmParams::univariate({0.5, 0.5}, {1.0, -1.0}, {0.1, 0.1})});
  spec.validate();
  return spec;
}

void write_stream_csv(std::ostream& out, const std::vector<LabeledSample>& samples) {
  if (samples.empty()) return;
  const auto d = samples.front().y.size();
  std::size_t mean_columns = 0;
  for (const Vector& mu : samples.front().true_means) mean_columns += static_cast<std::size_t>(mu.size());

  out << "t";
  for (Eigen::Index j = 0; j < d; ++j) out << ",y" << (j + 1);
  out << ",is_outlier,segment_id";
  for (std::size_t j = 0; j < mean_columns; ++j) out << ",true_mu_" << (j + 1);
  out << '\n';

  for (const LabeledSample& sample : samples) {
    out << sample.t;
    for (Eigen::Index j = 0; j < d; ++j) out << ',' << shortest(sample.y[j]);
    out << ',' << (sample.is_outlier ? 1 : 0) << ',' << sample.segment_id;
    for (const Vector& mu : sample.true_means) {
      for (Eigen::Index j = 0; j < mu.size(); ++j) out << ',' << shortest(mu[j]);
    }
    out << '\n';
  }
}

}  // namespace sra
