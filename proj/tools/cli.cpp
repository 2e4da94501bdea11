#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "sra/errors.hpp"

namespace sra::cli {

namespace {

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return 1;
  const std::string text(env);
  if (!std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw std::invalid_argument(std::string(kSeedEnv) + " must be a nonnegative integer");
  }
  return std::stoull(text);
}

void add_optional(CLI::App* app, const std::string& name, std::optional<double>& target, const std::string& help) {
  app->add_option_function<double>(name, [&target](const double& v) { target = v; }, help);
}

void add_source_options(CLI::App* app, SourceOptions& o) {
  app->add_option("--input,-i", o.input, "Input file (stream CSV, one value per line, or labeled CSV)");
  app->add_option("--format", o.format, "Input format")->check(CLI::IsMember({"auto", "stream", "values", "labeled"}));
  app->add_option("--label-column", o.label_column, "Label column of a labeled CSV (name or 0-based index)");
  app->add_option("--columns", o.columns, "Feature columns of a labeled CSV (default: all but the label)")->delimiter(',');
  app->add_flag("--paper-synthetic", o.paper_synthetic, "Generate the two-component benchmark stream");
  app->add_option("--spec", o.spec, "Generate from a JSON stream specification");
  app->add_option("--alpha", o.alpha, "Inlier probability of the generated stream");
  app->add_option("--U", o.U, "Half-width of the uniform noise box");
  app->add_option("--seed", o.seed, std::string("Generator seed (default from ") + kSeedEnv + ")");
  app->add_option("--T", o.T, "Override the generated stream length");
  app->add_option("--dataset", o.dataset, "Real-dataset preset")->check(CLI::IsMember({"welllog", "smtp", "thyroid"}));
  app->add_option("--split", o.split, "Preset split")->check(CLI::IsMember({"train", "test"}));
}

void add_learner_options(CLI::App* app, LearnerOptions& o) {
  app->add_option("--algorithm,-a", o.algorithm, "sra, sem, iem or sdem")
      ->check(CLI::IsMember({"sra", "sem", "iem", "sdem"}, CLI::ignore_case));
  app->add_option("--gamma", o.gamma, "Truncation threshold (inf disables truncation)");
  add_optional(app, "--beta", o.beta, "Trade-off constant beta");
  add_optional(app, "--M", o.M, "Tail scale M");
  add_optional(app, "--rho", o.rho, "Constant step size (overrides the trade-off step)");
  app->add_option("--schedule", o.schedule, "Step schedule")->check(CLI::IsMember({"constant", "inv-sqrt", "inverse"}));
  app->add_option("--schedule-scale", o.schedule_scale, "Scale c of the c / sqrt(t) schedule");
  app->add_option("--r", o.r, "Discount rate of sEM and SDEM");
  app->add_option("--K", o.K, "Number of mixture components")->check(CLI::PositiveNumber);
  app->add_option("--init", o.init, "Initialisation mode")->check(CLI::IsMember({"moments", "uniform"}));
  app->add_option("--init-points", o.init_points, "Points drawn by uniform initialisation")->check(CLI::PositiveNumber);
  app->add_option("--init-begin", o.init_begin, "First observation of the initialisation window");
  app->add_option("--init-end", o.init_end, "Last observation of the initialisation window");
  app->add_option("--init-seed", o.init_seed, "Seed of uniform initialisation");
  app->add_flag("--no-fence", o.no_fence, "Keep outlying points in the initialisation window");
  app->add_option("--max-steps", o.max_steps, "Stop after this many observations (0 = all)");
}

void add_windows(CLI::App* app, MseWindows& w) {
  app->add_option("--mse-tau", w.tau, "Burn-in of the MSE windows");
  app->add_option("--t-star", w.t_star, "Change point of the MSE windows");
  app->add_option("--eval-begin", w.eval_begin, "First step of the tuning window");
  app->add_option("--eval-end", w.eval_end, "Last step of the tuning window");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::uint64_t seed = 1;
  try {
    seed = default_seed();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  CLI::App app{"Robust and adaptive online learning on data streams"};
  app.name("sra");
  app.set_config("--config", "", "TOML or INI file; command line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  SimulateOptions sim;
  sim.source.seed = seed;
  auto* simulate = app.add_subcommand("simulate", "Generate a contaminated stream as CSV");
  add_source_options(simulate, sim.source);
  simulate->add_option("--out,-o", sim.out, "Output CSV (default stdout)");

  RunCommandOptions run;
  run.source.seed = seed;
  run.learner.init_seed = seed;
  auto* run_cmd = app.add_subcommand("run", "Run a learner and write per-step JSONL");
  add_source_options(run_cmd, run.source);
  add_learner_options(run_cmd, run.learner);
  run_cmd->add_option("--out,-o", run.out, "Output JSONL (default stdout)");

  TuneOptions tune;
  tune.source.seed = seed;
  tune.learner.init_seed = seed;
  auto* tune_cmd = app.add_subcommand("tune", "Grid search over hyperparameters");
  add_source_options(tune_cmd, tune.source);
  add_learner_options(tune_cmd, tune.learner);
  tune_cmd->add_option("--gammas", tune.gammas, "Grid of gamma")->delimiter(',');
  tune_cmd->add_option("--betas", tune.betas, "Grid of beta")->delimiter(',');
  tune_cmd->add_option("--Ms", tune.Ms, "Grid of M")->delimiter(',');
  tune_cmd->add_option("--rhos", tune.rhos, "Grid of constant steps (replaces beta and M)")->delimiter(',');
  tune_cmd->add_option("--rs", tune.rs, "Grid of discount rates")->delimiter(',');
  tune_cmd->add_flag("--relative-to-gamma", tune.relative_to_gamma, "Multiply the beta and M grids by gamma");
  tune_cmd->add_option("--objective", tune.objective, "Selection objective")
      ->check(CLI::IsMember({"s_eval", "alarm_auc", "roc_auc"}));
  tune_cmd->add_option("--repetitions,-R", tune.repetitions, "Seeded repetitions per cell")->check(CLI::PositiveNumber);
  tune_cmd->add_option("--threads", tune.threads, "Worker threads (0 = hardware concurrency)");
  add_windows(tune_cmd, tune.windows);
  tune_cmd->add_option("--tau", tune.tau, "Tolerated detection delay");
  tune_cmd->add_option("--t-start", tune.t_start, "First scored step");
  tune_cmd->add_option("--t-end", tune.t_end, "Last scored step");
  tune_cmd->add_option("--changes", tune.changes, "Change points")->delimiter(',');
  tune_cmd->add_option("--annotation", tune.annotation, "Built-in Well-log annotation set")->check(CLI::Range(1, 5));
  tune_cmd->add_option("--out,-o", tune.out, "Output JSON (default stdout)");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a run against ground truth");
  eval_cmd->add_option("--run", eval.run, "JSONL written by run")->required();
  eval_cmd->add_option("--truth", eval.truth, "Stream CSV or labeled CSV with the ground truth");
  eval_cmd->add_option("--truth-format", eval.truth_format, "Truth file format")
      ->check(CLI::IsMember({"auto", "stream", "values", "labeled"}));
  eval_cmd->add_option("--label-column", eval.label_column, "Label column of a labeled truth CSV");
  eval_cmd->add_option("--columns", eval.columns, "Feature columns of a labeled truth CSV")->delimiter(',');
  eval_cmd->add_option("--changes", eval.changes, "Change points")->delimiter(',');
  eval_cmd->add_option("--annotation", eval.annotation, "Built-in Well-log annotation set")->check(CLI::Range(1, 5));
  eval_cmd->add_option("--dataset", eval.dataset, "Real-dataset preset")->check(CLI::IsMember({"welllog", "smtp", "thyroid"}));
  eval_cmd->add_option("--split", eval.split, "Preset split")->check(CLI::IsMember({"train", "test"}));
  eval_cmd->add_option("--tau", eval.tau, "Tolerated detection delay");
  eval_cmd->add_option("--t-start", eval.t_start, "First scored step");
  eval_cmd->add_option("--t-end", eval.t_end, "Last scored step");
  eval_cmd->add_flag("--mse", eval.mse, "Report the segment MSEs");
  add_windows(eval_cmd, eval.windows);
  eval_cmd->add_option_function<std::uint64_t>(
      "--mse-T", [&eval](const std::uint64_t& v) { eval.windows.T = v, eval.windows_T_set = true; }, "Last step of the MSE windows");
  eval_cmd->add_option("--out,-o", eval.out, "Output JSON (default stdout)");
  eval_cmd->add_option("--curve-csv", eval.curve_csv, "Write the alarm curve as CSV");

  BoundsOptions bounds;
  bounds.inputs.L = 2000;
  bounds.inputs.alpha = 0.99;
  bounds.inputs.U = 20;
  bounds.inputs.V0n = 1;
  bounds.inputs.n = 20000;
  bounds.inputs.gamma = 3;
  bounds.inputs.M = 5;
  auto* bounds_cmd = app.add_subcommand("bounds", "Tabulate the convergence bounds");
  auto& bi = bounds.inputs;
  bounds_cmd->add_option("--c0", bi.c0, "Bias constant c0");
  bounds_cmd->add_option("--c1", bi.c1, "Relation constant c1");
  bounds_cmd->add_option("--d0", bi.d0, "Bias constant d0");
  bounds_cmd->add_option("--d1", bi.d1, "Relation constant d1");
  bounds_cmd->add_option("--sigma0-sq", bi.sigma0_sq, "Noise variance constant sigma0^2");
  bounds_cmd->add_option("--sigma1-sq", bi.sigma1_sq, "Noise variance constant sigma1^2");
  bounds_cmd->add_option("--L", bi.L, "Smoothness constant");
  bounds_cmd->add_option("--alpha", bi.alpha, "Inlier ratio");
  bounds_cmd->add_option("--U", bi.U, "Noise half-width");
  bounds_cmd->add_option("--d", bi.d, "Dimension");
  bounds_cmd->add_option("--V0n", bi.V0n, "Lyapunov decrement");
  bounds_cmd->add_option("--n", bi.n, "Horizon");
  bounds_cmd->add_option("--M", bi.M, "Tail scale");
  bounds_cmd->add_option("--gamma", bi.gamma, "Threshold of the cross-check");
  bounds_cmd->add_option("--gammas", bounds.gammas, "Grid of gamma")->delimiter(',');
  bounds_cmd->add_option("--rhos", bounds.rhos, "Grid of constant steps")->delimiter(',');
  bounds_cmd->add_option("--output-format", bounds.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  bounds_cmd->add_flag("--cross-check", bounds.cross_check, "Compare the closed-form step with numeric minimisation");
  bounds_cmd->add_option("--out,-o", bounds.out, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (run_cmd->parsed()) return cmd_run(run, out, err);
    if (tune_cmd->parsed()) return cmd_tune(tune, out);
    if (eval_cmd->parsed()) return cmd_eval(eval, out);
    if (bounds_cmd->parsed()) return cmd_bounds(bounds, out);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace sra::cli
