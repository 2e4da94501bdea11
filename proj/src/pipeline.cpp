#include "sra/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "sra/errors.hpp"

namespace sra {

RunTrace run_learner(const EmConfig& config, std::span<const Vector> observations, const RunOptions& options,
                     const StepObserver& observer) {
  RunTrace trace;
  if (observations.empty()) return trace;
  if (options.init_begin < 1 || options.init_begin > options.init_end) {
    throw std::invalid_argument("initialisation window must satisfy 1 <= begin <= end");
  }
  if (options.init_end > observations.size()) {
    throw DataError("initialisation window ends at t = " + std::to_string(options.init_end) + " but the stream has " +
                    std::to_string(observations.size()) + " observations");
  }
  const auto window = observations.subspan(options.init_begin - 1, options.init_end - options.init_begin + 1);
  LearnerState state = init_from_window(config, window, options.components, options.init);

  const std::size_t steps =
      options.max_steps == 0 ? observations.size() : std::min<std::size_t>(options.max_steps, observations.size());
  trace.scores.reserve(steps);
  trace.means.reserve(steps);
  trace.truncated.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const StepReport report = step(state, observations[i]);
    trace.scores.push_back(report.score);
    trace.means.push_back(state.model.means());
    trace.truncated.push_back(report.truncated);
    if (observer) observer(i + 1, report, state);
  }
  trace.dropped = state.sa.dropped_count;
  return trace;
}

std::vector<Vector> observations_of(const std::vector<LabeledSample>& samples) {
  std::vector<Vector> ys;
  ys.reserve(samples.size());
  for (const LabeledSample& s : samples) ys.push_back(s.y);
  return ys;
}

MeanSeries true_means_of(const std::vector<LabeledSample>& samples) {
  MeanSeries means;
  means.reserve(samples.size());
  for (const LabeledSample& s : samples) means.push_back(s.true_means);
  return means;
}

SegmentMse stream_mse(const EmConfig& config, const StreamSpec& spec, const MseWindows& windows,
                      const RunOptions& options) {
  const std::vector<LabeledSample> samples = generate(spec);
  const std::vector<Vector> ys = observations_of(samples);
  const RunTrace trace = run_learner(config, ys, options);
  return segment_mse(trace.means, true_means_of(samples), windows);
}

double stream_eval_mse(const EmConfig& config, const StreamSpec& spec, const MseWindows& windows,
                       RunOptions options) {
  const std::vector<LabeledSample> samples = generate(spec);
  const std::vector<Vector> ys = observations_of(samples);
  options.max_steps = windows.eval_end;
  const RunTrace trace = run_learner(config, ys, options);
  return window_mse(trace.means, true_means_of(samples), windows.eval_begin, windows.eval_end);
}

}  // namespace sra
