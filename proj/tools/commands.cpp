#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <thread>

#include "datasets.hpp"
#include "sra/errors.hpp"
#include "sra/format.hpp"
#include "sra/streamgen.hpp"

namespace sra::cli {

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

/// Writes to `path`, or to `fallback` when the path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw DataError("cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::optional<StreamSpec> generated_spec(const SourceOptions& options, std::uint64_t seed) {
  std::optional<StreamSpec> spec;
  if (options.paper_synthetic) {
    spec = paper_synthetic_spec(options.alpha, options.U, seed);
  } else if (!options.spec.empty()) {
    std::ifstream in(options.spec);
    if (!in) throw DataError("cannot open '" + options.spec + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw DataError(options.spec + ": invalid JSON: " + e.what());
    }
    spec = stream_spec_from_json(j);
    spec->seed = seed;
  } else {
    return spec;
  }
  if (options.T > 0) spec->T = options.T;
  spec->validate();
  return spec;
}

std::uint64_t to_time(double v) {
  if (!(v >= 1) || v != std::floor(v)) throw std::invalid_argument("change points must be positive integers");
  return static_cast<std::uint64_t>(v);
}

std::vector<std::uint64_t> resolve_changes(const std::vector<double>& changes, int annotation,
                                           const std::vector<std::uint64_t>& from_data) {
  if (!changes.empty()) {
    std::vector<std::uint64_t> out;
    for (double c : changes) out.push_back(to_time(c));
    return out;
  }
  if (annotation != 0) return welllog_annotation(annotation);
  return from_data;
}

struct Window {
  std::uint64_t t_start = 1;
  std::uint64_t t_end = 0;
};

Window resolve_window(std::uint64_t t_start, std::uint64_t t_end, const std::string& dataset, const std::string& split) {
  Window w;
  if (!dataset.empty()) {
    const SplitWindow s = split_window(dataset_preset(dataset), split);
    w = {s.t_start, s.t_end};
  }
  if (t_start != 0) w.t_start = t_start;
  if (t_end != 0) w.t_end = t_end;
  return w;
}

/// ROC AUC over the scores and labels at times [w.t_start, w.t_end].
double windowed_roc(const std::vector<double>& scores, const std::vector<bool>& labels, const Window& w) {
  const std::size_t last = w.t_end == 0 ? scores.size() : w.t_end;
  if (w.t_start < 1 || w.t_start > last || last > scores.size() || last > labels.size()) {
    throw std::invalid_argument("evaluation range must lie inside the score series");
  }
  const std::vector<double> s(scores.begin() + static_cast<std::ptrdiff_t>(w.t_start - 1),
                              scores.begin() + static_cast<std::ptrdiff_t>(last));
  const std::vector<bool> l(labels.begin() + static_cast<std::ptrdiff_t>(w.t_start - 1),
                            labels.begin() + static_cast<std::ptrdiff_t>(last));
  return roc_auc(s, l);
}

json windows_to_json(const MseWindows& w) {
  return {{"tau", w.tau}, {"t_star", w.t_star}, {"T", w.T}, {"eval_begin", w.eval_begin}, {"eval_end", w.eval_end}};
}

json mse_to_json(const SegmentMse& m) {
  return {{"s_eval", m.s_eval}, {"s_bc", m.s_bc}, {"s_ac", m.s_ac}, {"s_tot", m.s_tot}};
}

}  // namespace

EmConfig make_em_config(const LearnerOptions& options) {
  const Algorithm algorithm = parse_algorithm(options.algorithm);
  switch (algorithm) {
    case Algorithm::kSem:
      return EmConfig::sem(options.r);
    case Algorithm::kIem:
      return EmConfig::iem();
    case Algorithm::kSdem:
      return EmConfig::sdem(options.r);
    case Algorithm::kSra:
      break;
  }
  SraConfig sa;
  if (options.schedule == "constant") {
    if (options.rho) {
      sa.gamma = options.gamma;
      sa.schedule = StepSchedule::constant(*options.rho);
      sa.beta = options.beta;
      sa.M = options.M;
    } else if (options.beta && options.M) {
      sa = SraConfig::from_tradeoff(options.gamma, *options.beta, *options.M);
    } else {
      throw std::invalid_argument("SRA with a constant step needs --rho or both --beta and --M");
    }
  } else if (options.schedule == "inv-sqrt") {
    sa.gamma = options.gamma;
    sa.schedule = StepSchedule::inverse_sqrt(options.schedule_scale);
  } else if (options.schedule == "inverse") {
    sa.gamma = options.gamma;
    sa.schedule = StepSchedule::inverse();
  } else {
    throw std::invalid_argument("schedule must be constant, inv-sqrt or inverse");
  }
  sa.validate();
  return EmConfig::sra(sa);
}

RunOptions make_run_options(const LearnerOptions& options) {
  RunOptions run;
  run.components = options.K;
  if (options.init == "moments") {
    run.init.mode = InitMode::kMoments;
  } else if (options.init == "uniform") {
    run.init.mode = InitMode::kUniform;
  } else {
    throw std::invalid_argument("init must be moments or uniform");
  }
  run.init.uniform_points = options.init_points;
  run.init.seed = options.init_seed;
  run.init.fence = !options.no_fence;
  run.init_begin = options.init_begin;
  run.init_end = options.init_end;
  run.max_steps = options.max_steps;
  return run;
}

json learner_to_json(const LearnerOptions& options, const EmConfig& config) {
  json j;
  j["algorithm"] = std::string(to_string(config.algorithm));
  j["gamma"] = number(config.sa.gamma);
  j["beta"] = optional_number(config.sa.beta);
  j["M"] = optional_number(config.sa.M);
  j["schedule"] = config.sa.schedule.describe();
  j["rho"] = config.sa.schedule.kind() == StepSchedule::Kind::kConstant ? json(config.sa.schedule.scale()) : json(nullptr);
  j["r"] = config.algorithm == Algorithm::kSem || config.algorithm == Algorithm::kSdem ? json(options.r) : json(nullptr);
  j["K"] = options.K;
  j["init"] = {{"mode", options.init},       {"points", options.init_points}, {"begin", options.init_begin},
               {"end", options.init_end},     {"seed", options.init_seed},     {"fence", !options.no_fence}};
  j["max_steps"] = options.max_steps;
  return j;
}

json source_to_json(const SourceOptions& options) {
  json j;
  if (options.paper_synthetic) {
    j = {{"kind", "paper_synthetic"}, {"alpha", options.alpha}, {"U", options.U}, {"seed", options.seed}};
  } else if (!options.spec.empty()) {
    j = {{"kind", "spec"}, {"path", options.spec}, {"seed", options.seed}};
  } else {
    j = {{"kind", "file"}, {"path", options.input}, {"format", options.format}};
    if (!options.label_column.empty()) j["label_column"] = options.label_column;
    if (!options.columns.empty()) j["columns"] = options.columns;
  }
  if (options.T > 0) j["T"] = options.T;
  if (!options.dataset.empty()) {
    j["dataset"] = options.dataset;
    j["split"] = options.split;
  }
  return j;
}

InputData load_source(const SourceOptions& options, std::uint64_t seed) {
  if (const auto spec = generated_spec(options, seed)) {
    const std::vector<LabeledSample> samples = generate(*spec);
    InputData data;
    data.ys = observations_of(samples);
    data.true_means = true_means_of(samples);
    std::vector<bool> labels;
    for (const auto& s : samples) labels.push_back(s.is_outlier);
    data.labels = std::move(labels);
    for (auto cp : spec->change_points()) {
      if (cp <= spec->T) data.change_points.push_back(cp);
    }
    return data;
  }
  if (options.input.empty()) throw std::invalid_argument("no input: pass --input, --paper-synthetic or --spec");
  return read_input(options.input, parse_input_format(options.format), options.label_column, options.columns);
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out) {
  const auto spec = generated_spec(options.source, options.source.seed);
  if (!spec) throw std::invalid_argument("simulate needs --paper-synthetic or --spec");
  const std::vector<LabeledSample> samples = generate(*spec);
  Sink sink(options.out, out);
  json header = {{"command", "simulate"}, {"source", source_to_json(options.source)}, {"stream", stream_spec_to_json(*spec)}};
  *sink << "# " << header.dump() << '\n';
  write_stream_csv(*sink, samples);
  return 0;
}

int cmd_run(const RunCommandOptions& options, std::ostream& out, std::ostream& err) {
  const EmConfig config = make_em_config(options.learner);
  LearnerOptions learner = options.learner;
  if (!options.source.dataset.empty() && options.source.split == "train" && learner.max_steps == 0) {
    learner.max_steps = dataset_preset(options.source.dataset).train_end;
  }
  const RunOptions run = make_run_options(learner);
  const InputData data = load_source(options.source, options.source.seed);
  Sink sink(options.out, out);
  if (data.ys.empty()) return 0;

  json header = {{"command", "run"},
                 {"source", source_to_json(options.source)},
                 {"learner", learner_to_json(learner, config)},
                 {"observations", data.ys.size()},
                 {"dim", data.ys.front().size()}};
  *sink << json{{"header", header}}.dump() << '\n';
  std::uint64_t last_t = 0;
  try {
    run_learner(config, data.ys, run, [&](std::uint64_t t, const StepReport& report, const LearnerState& state) {
      *sink << step_record(t, report, state.model).dump() << '\n';
      last_t = t;
    });
  } catch (const NumericError& e) {
    *sink << json{{"error", e.what()}, {"t", last_t + 1}}.dump() << '\n';
    (*sink).flush();
    err << "error: numeric failure at t = " << last_t + 1 << ": " << e.what() << '\n';
    return 3;
  }
  return 0;
}

int cmd_eval(const EvalOptions& options, std::ostream& out) {
  if (options.run.empty()) throw std::invalid_argument("eval needs --run");
  std::ifstream in(options.run);
  if (!in) throw DataError("cannot open '" + options.run + "'");
  const RunRecords records = read_run_jsonl(in, options.run);
  const std::size_t n = records.scores.size();

  InputData truth;
  if (!options.truth.empty()) {
    truth = read_input(options.truth, parse_input_format(options.truth_format), options.label_column, options.columns);
    if (truth.ys.size() < n) throw DataError("truth file is shorter than the score series");
  }
  const auto changes = resolve_changes(options.changes, options.annotation, truth.change_points);
  const Window window = resolve_window(options.t_start, options.t_end, options.dataset, options.split);

  json header = {{"command", "eval"}, {"run", options.run}, {"truth", options.truth}, {"scores", n},
                 {"tau", options.tau}, {"t_start", window.t_start}, {"t_end", window.t_end}};
  if (options.annotation != 0) header["annotation"] = options.annotation;
  if (!options.dataset.empty()) {
    header["dataset"] = options.dataset;
    header["split"] = options.split;
  }
  if (records.header.is_object()) header["run_header"] = records.header;

  json report = {{"header", header}, {"mse", nullptr}, {"alarm", nullptr}, {"roc_auc", nullptr}};

  if (options.mse) {
    if (!truth.true_means) throw DataError("--mse needs a truth stream with true means");
    const MeanSeries true_means(truth.true_means->begin(), truth.true_means->begin() + static_cast<std::ptrdiff_t>(n));
    MseWindows w = options.windows;
    if (!options.windows_T_set) w.T = n;
    json mse = mse_to_json(segment_mse(records.means, true_means, w));
    mse["windows"] = windows_to_json(w);
    report["mse"] = std::move(mse);
  }

  AlarmEval alarm;
  bool have_alarm = false;
  if (!changes.empty() && n > 0) {
    alarm = alarm_eval(records.scores, changes, AlarmProtocol{options.tau, window.t_start, window.t_end});
    have_alarm = true;
    json curve = json::array();
    for (const auto& [far, recall] : alarm.curve) curve.push_back({far, recall});
    report["alarm"] = {{"auc", alarm.auc},
                       {"curve", std::move(curve)},
                       {"sup_benefit", alarm.sup_benefit},
                       {"sup_false_alarms", alarm.sup_false_alarms},
                       {"no_benefit", alarm.no_benefit},
                       {"no_false_alarms", alarm.no_false_alarms},
                       {"change_points", changes},
                       {"assignment", "nearest change point, earlier on ties"}};
  }

  if (truth.labels && n > 0) {
    const std::vector<bool> labels(truth.labels->begin(), truth.labels->begin() + static_cast<std::ptrdiff_t>(n));
    const bool both = std::find(labels.begin(), labels.end(), true) != labels.end() &&
                      std::find(labels.begin(), labels.end(), false) != labels.end();
    if (both) report["roc_auc"] = windowed_roc(records.scores, labels, window);
  }

  Sink sink(options.out, out);
  *sink << report.dump() << '\n';

  if (!options.curve_csv.empty()) {
    if (!have_alarm) throw std::invalid_argument("--curve-csv needs change points");
    std::ofstream csv(options.curve_csv, std::ios::binary);
    if (!csv) throw DataError("cannot write '" + options.curve_csv + "'");
    csv << "# " << header.dump() << '\n' << "false_alarm_rate,recall\n";
    for (const auto& [far, recall] : alarm.curve) csv << shortest(far) << ',' << shortest(recall) << '\n';
  }
  return 0;
}

namespace {

struct TuneCell {
  double gamma = std::numeric_limits<double>::infinity();
  std::optional<double> beta;
  std::optional<double> M;
  std::optional<double> rho;
  std::optional<double> r;
};

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<TuneCell> tune_cells(const TuneOptions& options, Algorithm algorithm) {
  std::vector<TuneCell> cells;
  switch (algorithm) {
    case Algorithm::kSra: {
      const auto gammas = sorted_unique(options.gammas.empty() ? std::vector<double>{options.learner.gamma} : options.gammas);
      if (!options.rhos.empty()) {
        for (double g : gammas) {
          for (double rho : sorted_unique(options.rhos)) cells.push_back({g, std::nullopt, std::nullopt, rho, std::nullopt});
        }
        break;
      }
      if (options.betas.empty() || options.Ms.empty()) throw std::invalid_argument("SRA tuning needs --betas and --Ms, or --rhos");
      for (double g : gammas) {
        const double scale = options.relative_to_gamma ? g : 1.0;
        for (double b : sorted_unique(options.betas)) {
          for (double m : sorted_unique(options.Ms)) cells.push_back({g, b * scale, m * scale, std::nullopt, std::nullopt});
        }
      }
      break;
    }
    case Algorithm::kSem:
    case Algorithm::kSdem:
      for (double r : sorted_unique(options.rs.empty() ? std::vector<double>{options.learner.r} : options.rs)) {
        cells.push_back({std::numeric_limits<double>::infinity(), std::nullopt, std::nullopt, std::nullopt, r});
      }
      break;
    case Algorithm::kIem:
      cells.emplace_back();
      break;
  }
  return cells;
}

json cell_to_json(const TuneCell& c, Algorithm algorithm) {
  json j;
  if (algorithm == Algorithm::kSra) {
    j["gamma"] = number(c.gamma);
    if (c.beta) j["beta"] = *c.beta;
    if (c.M) j["M"] = *c.M;
    if (c.rho) j["rho"] = *c.rho;
  }
  if (c.r) j["r"] = *c.r;
  return j;
}

}  // namespace

int cmd_tune(const TuneOptions& options, std::ostream& out) {
  const Algorithm algorithm = parse_algorithm(options.learner.algorithm);
  const std::vector<TuneCell> cells = tune_cells(options, algorithm);
  if (options.repetitions == 0) throw std::invalid_argument("--repetitions must be positive");
  const std::string& objective = options.objective;
  if (objective != "s_eval" && objective != "alarm_auc" && objective != "roc_auc") {
    throw std::invalid_argument("objective must be s_eval, alarm_auc or roc_auc");
  }
  const bool minimize = objective == "s_eval";

  LearnerOptions base = options.learner;
  if (!options.source.dataset.empty() && options.source.split == "train" && base.max_steps == 0) {
    base.max_steps = dataset_preset(options.source.dataset).train_end;
  }
  const Window window = resolve_window(options.t_start, options.t_end, options.source.dataset, options.source.split);

  const bool generated = options.source.paper_synthetic || !options.source.spec.empty();
  std::vector<InputData> data;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < options.repetitions; ++i) seeds.push_back(options.source.seed + i);
  if (generated) {
    for (auto seed : seeds) data.push_back(load_source(options.source, seed));
  } else {
    data.push_back(load_source(options.source, options.source.seed));
  }
  for (const auto& d : data) {
    if (objective == "s_eval" && !d.true_means) throw DataError("s_eval needs a source with true means");
    if (objective == "roc_auc" && !d.labels) throw DataError("roc_auc needs labels");
    if (objective == "alarm_auc" && resolve_changes(options.changes, options.annotation, d.change_points).empty()) {
      throw std::invalid_argument("alarm_auc needs change points");
    }
  }

  const std::size_t tasks = cells.size() * options.repetitions;
  std::vector<std::optional<double>> values(tasks);
  std::vector<std::string> failures(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t idx = next++; idx < tasks; idx = next++) {
      const TuneCell& cell = cells[idx / options.repetitions];
      const std::size_t rep = idx % options.repetitions;
      const InputData& d = data[generated ? rep : 0];
      try {
        LearnerOptions lo = base;
        lo.gamma = cell.gamma;
        lo.beta = cell.beta;
        lo.M = cell.M;
        lo.rho = cell.rho;
        if (cell.r) lo.r = *cell.r;
        lo.init_seed = seeds[rep];
        RunOptions run = make_run_options(lo);
        const EmConfig config = make_em_config(lo);
        if (objective == "s_eval") {
          run.max_steps = options.windows.eval_end;
          const RunTrace trace = run_learner(config, d.ys, run);
          values[idx] = window_mse(trace.means, *d.true_means, options.windows.eval_begin, options.windows.eval_end);
        } else {
          const RunTrace trace = run_learner(config, d.ys, run);
          if (objective == "alarm_auc") {
            const auto changes = resolve_changes(options.changes, options.annotation, d.change_points);
            values[idx] = alarm_eval(trace.scores, changes, AlarmProtocol{options.tau, window.t_start, window.t_end}).auc;
          } else {
            values[idx] = windowed_roc(trace.scores, *d.labels, window);
          }
        }
      } catch (const NumericError& e) {
        failures[idx] = e.what();
      } catch (const std::invalid_argument& e) {
        failures[idx] = e.what();
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };

  std::size_t threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = std::min(threads, tasks);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  json table = json::array();
  std::optional<std::size_t> best;
  std::optional<double> best_value;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    json row = cell_to_json(cells[c], algorithm);
    json per_rep = json::array();
    double sum = 0;
    std::size_t failed = 0;
    std::string first_failure;
    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
      const std::size_t idx = c * options.repetitions + rep;
      if (values[idx]) {
        per_rep.push_back(*values[idx]);
        sum += *values[idx];
      } else {
        per_rep.push_back(nullptr);
        if (failed++ == 0) first_failure = failures[idx];
      }
    }
    row["values"] = std::move(per_rep);
    row["failures"] = failed;
    if (failed == 0) {
      const double mean = sum / static_cast<double>(options.repetitions);
      row["mean"] = mean;
      if (!best_value || (minimize ? mean < *best_value : mean > *best_value)) {
        best = c;
        best_value = mean;
      }
    } else {
      row["mean"] = nullptr;
      row["failure"] = first_failure;
    }
    table.push_back(std::move(row));
  }

  json header = {{"command", "tune"},
                 {"source", source_to_json(options.source)},
                 {"learner", learner_to_json(base, EmConfig{})},
                 {"objective", objective},
                 {"direction", minimize ? "min" : "max"},
                 {"repetitions", options.repetitions},
                 {"seeds", seeds},
                 {"relative_to_gamma", options.relative_to_gamma}};
  header["learner"]["algorithm"] = std::string(to_string(algorithm));
  for (const char* key : {"gamma", "beta", "M", "rho", "schedule", "r"}) header["learner"].erase(key);
  if (objective == "s_eval") header["windows"] = windows_to_json(options.windows);
  if (objective != "s_eval") {
    header["tau"] = options.tau;
    header["t_start"] = window.t_start;
    header["t_end"] = window.t_end;
  }
  if (options.annotation != 0) header["annotation"] = options.annotation;

  json result = {{"header", header}, {"best", nullptr}, {"table", std::move(table)}};
  if (best) {
    json b = cell_to_json(cells[*best], algorithm);
    b["mean"] = *best_value;
    if (algorithm == Algorithm::kSra && cells[*best].beta && cells[*best].M) {
      b["rho"] = corollary1_rho(cells[*best].gamma, *cells[*best].beta, *cells[*best].M);
    }
    result["best"] = std::move(b);
  }
  Sink sink(options.out, out);
  *sink << result.dump(2) << '\n';
  return best ? 0 : 3;
}

int cmd_bounds(const BoundsOptions& options, std::ostream& out) {
  const BoundInputs& in = options.inputs;
  in.validate();
  if (options.format != "text" && options.format != "json") throw std::invalid_argument("format must be text or json");
  const std::vector<BoundRow> rows = bound_table(in, options.gammas, options.rhos);

  json header = {{"command", "bounds"}, {"c0", in.c0},   {"c1", in.c1},       {"d0", in.d0},
                 {"d1", in.d1},         {"sigma0_sq", in.sigma0_sq},            {"sigma1_sq", in.sigma1_sq},
                 {"L", in.L},           {"alpha", in.alpha}, {"U", in.U},     {"d", in.d},
                 {"V0n", in.V0n},       {"n", in.n},     {"M", in.M},         {"gamma", number(in.gamma)},
                 {"gammas", options.gammas}, {"rhos", options.rhos}};

  std::optional<TradeoffCrossCheck> check;
  if (options.cross_check) check = cross_check_tradeoff_step(in);

  Sink sink(options.out, out);
  if (options.format == "json") {
    json table = json::array();
    for (const auto& r : rows) {
      table.push_back({{"gamma", r.gamma},
                       {"rho", r.rho},
                       {"tail", r.tail},
                       {"theorem2", number(r.theorem2)},
                       {"corollary2", number(r.corollary2)},
                       {"gap", number(r.gap)},
                       {"admissible_limit", number(r.admissible_limit)},
                       {"admissible", r.admissible}});
    }
    json result = {{"header", header}, {"rows", std::move(table)}};
    if (check) {
      result["cross_check"] = {{"beta", check->beta},
                               {"rho_closed_form", check->rho_closed_form},
                               {"rho_with_c1", check->rho_with_c1},
                               {"rho_numeric", check->rho_numeric},
                               {"relative_error", check->relative_error},
                               {"dgamma_closed_form", check->dgamma_closed_form},
                               {"dgamma_with_c1", check->dgamma_with_c1},
                               {"V0n", check->V0n},
                               {"gamma_profile_argmin", check->gamma_profile_argmin}};
    }
    *sink << result.dump(2) << '\n';
    return 0;
  }

  std::ostream& o = *sink;
  o << "# " << header.dump() << '\n';
  const char* names[] = {"gamma", "rho", "tail", "theorem2", "corollary2", "gap", "admissible_limit", "admissible"};
  for (const char* name : names) o << std::setw(24) << name;
  o << '\n';
  for (const auto& r : rows) {
    for (double v : {r.gamma, r.rho, r.tail, r.theorem2, r.corollary2, r.gap, r.admissible_limit}) o << std::setw(24) << shortest(v);
    o << std::setw(24) << (r.admissible ? "yes" : "no") << '\n';
  }
  if (check) {
    o << "\ncross-check at gamma = " << shortest(in.gamma) << ", M = " << shortest(in.M) << '\n'
      << "  beta                 " << shortest(check->beta) << '\n'
      << "  rho closed form      " << shortest(check->rho_closed_form) << '\n'
      << "  rho numeric          " << shortest(check->rho_numeric) << '\n'
      << "  relative error       " << shortest(check->relative_error) << '\n'
      << "  rho with c1 factor   " << shortest(check->rho_with_c1) << '\n'
      << "  db/dgamma closed     " << shortest(check->dgamma_closed_form) << '\n'
      << "  db/dgamma with c1    " << shortest(check->dgamma_with_c1) << '\n'
      << "  V0n                  " << shortest(check->V0n) << '\n'
      << "  gamma profile argmin " << shortest(check->gamma_profile_argmin) << '\n';
  }
  return 0;
}

}  // namespace sra::cli
