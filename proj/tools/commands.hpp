#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "io.hpp"
#include "sra/bounds.hpp"
#include "sra/learners.hpp"
#include "sra/metrics.hpp"
#include "sra/pipeline.hpp"

namespace sra::cli {

/// Where observations come from: a file or a generated stream.
struct SourceOptions {
  std::string input;
  std::string format = "auto";
  std::string label_column;
  std::vector<std::string> columns;
  bool paper_synthetic = false;
  std::string spec;
  double alpha = 0.99;
  double U = 20.0;
  std::uint64_t seed = 1;
  std::uint64_t T = 0;  ///< 0 keeps the generator's length
  std::string dataset;
  std::string split = "train";
};

struct LearnerOptions {
  std::string algorithm = "sra";
  double gamma = 3.0;
  std::optional<double> beta = 0.1;
  std::optional<double> M = 5.0;
  std::optional<double> rho;
  std::string schedule = "constant";
  double schedule_scale = 1.0;
  double r = 0.005;
  std::size_t K = 2;
  std::string init = "moments";
  std::size_t init_points = 20;
  std::uint64_t init_begin = 1;
  std::uint64_t init_end = 10;
  std::uint64_t init_seed = 1;
  bool no_fence = false;
  std::uint64_t max_steps = 0;
};

struct SimulateOptions {
  SourceOptions source;
  std::string out;
};

struct RunCommandOptions {
  SourceOptions source;
  LearnerOptions learner;
  std::string out;
};

struct EvalOptions {
  std::string run;
  std::string truth;
  std::string truth_format = "auto";
  std::string label_column;
  std::vector<std::string> columns;
  std::vector<double> changes;
  int annotation = 0;
  std::string dataset;
  std::string split = "test";
  double tau = 100.0;
  std::uint64_t t_start = 0;  ///< 0 means unset
  std::uint64_t t_end = 0;
  bool mse = false;
  MseWindows windows;
  bool windows_T_set = false;
  std::string out;
  std::string curve_csv;
};

struct TuneOptions {
  SourceOptions source;
  LearnerOptions learner;
  std::vector<double> gammas;
  std::vector<double> betas;
  std::vector<double> Ms;
  std::vector<double> rhos;
  std::vector<double> rs;
  bool relative_to_gamma = false;
  std::string objective = "s_eval";
  std::size_t repetitions = 10;
  std::size_t threads = 0;  ///< 0 = hardware concurrency
  MseWindows windows;
  double tau = 100.0;
  std::uint64_t t_start = 0;
  std::uint64_t t_end = 0;
  std::vector<double> changes;
  int annotation = 0;
  std::string out;
};

struct BoundsOptions {
  BoundInputs inputs;
  std::vector<double> gammas{1, 3, 5, 10, 15};
  std::vector<double> rhos{0.001, 0.005, 0.0116, 0.05, 0.1};
  std::string format = "text";
  bool cross_check = false;
  std::string out;
};

/// EmConfig described by the learner flags. SRA takes its constant step from
/// --rho, else from (gamma, beta, M).
EmConfig make_em_config(const LearnerOptions& options);
RunOptions make_run_options(const LearnerOptions& options);

json learner_to_json(const LearnerOptions& options, const EmConfig& config);
json source_to_json(const SourceOptions& options);

/// Observations (and truth when the source carries it) for a source; the
/// generated streams use `seed`.
InputData load_source(const SourceOptions& options, std::uint64_t seed);

int cmd_simulate(const SimulateOptions& options, std::ostream& out);
int cmd_run(const RunCommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& options, std::ostream& out);
int cmd_tune(const TuneOptions& options, std::ostream& out);
int cmd_bounds(const BoundsOptions& options, std::ostream& out);

}  // namespace sra::cli
