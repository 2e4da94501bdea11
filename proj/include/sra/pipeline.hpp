#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sra/learners.hpp"
#include "sra/metrics.hpp"
#include "sra/streamgen.hpp"

namespace sra {

struct RunOptions {
  std::size_t components = 2;
  InitOptions init;
  /// 1-based inclusive range of the observations used for initialisation.
  std::uint64_t init_begin = 1;
  std::uint64_t init_end = 10;
  /// Stop after this many observations (0 = whole stream).
  std::uint64_t max_steps = 0;
};

/// Per-step outputs of a learner run; index t - 1 holds time t.
struct RunTrace {
  std::vector<double> scores;
  MeanSeries means;
  std::vector<bool> truncated;
  std::uint64_t dropped = 0;
};

using StepObserver = std::function<void(std::uint64_t t, const StepReport& report, const LearnerState& state)>;

/// Initialises from the configured window and steps through every
/// observation (the window included), recording the pre-update score and the
/// post-update means.
RunTrace run_learner(const EmConfig& config, std::span<const Vector> observations, const RunOptions& options,
                     const StepObserver& observer = {});

std::vector<Vector> observations_of(const std::vector<LabeledSample>& samples);
MeanSeries true_means_of(const std::vector<LabeledSample>& samples);

/// MSEs of one learner on one generated stream.
SegmentMse stream_mse(const EmConfig& config, const StreamSpec& spec, const MseWindows& windows,
                      const RunOptions& options = {});

/// S_eval alone; the learner only runs up to the end of the evaluation window.
double stream_eval_mse(const EmConfig& config, const StreamSpec& spec, const MseWindows& windows,
                       RunOptions options = {});

}  // namespace sra
