#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sra/gmm.hpp"
#include "sra/learners.hpp"
#include "sra/metrics.hpp"
#include "sra/streamgen.hpp"

namespace sra::cli {

using nlohmann::json;

enum class InputFormat { kAuto, kStream, kValues, kLabeled };

InputFormat parse_input_format(const std::string& name);

/// Observations plus whatever ground truth the file carries.
struct InputData {
  std::vector<Vector> ys;
  std::optional<MeanSeries> true_means;
  std::optional<std::vector<bool>> labels;
  std::vector<std::uint64_t> change_points;
};

/// Stream CSV as written by `simulate`: t,y1..yd,is_outlier,segment_id,true_mu_*.
/// Lines starting with '#' are skipped. Change points are the times where
/// segment_id changes.
InputData read_stream_csv(std::istream& in, const std::string& name);

/// One value per line (blank lines and '#' comments skipped).
InputData read_values(std::istream& in, const std::string& name);

/// CSV with a header row. `label_column` is a column name or a 0-based
/// index; a nonzero label marks an anomaly. Features are `feature_columns`
/// (names or indices) or every other column.
InputData read_labeled_csv(std::istream& in, const std::string& name, const std::string& label_column,
                           const std::vector<std::string>& feature_columns);

/// Opens `path` and dispatches on `format` (kAuto sniffs a `t,y1` header,
/// then a label column, then falls back to one value per line).
InputData read_input(const std::string& path, InputFormat format, const std::string& label_column,
                     const std::vector<std::string>& feature_columns);

/// Parsed JSONL written by `run`.
struct RunRecords {
  json header;
  std::vector<double> scores;
  std::vector<bool> truncated;
  MeanSeries means;
};

RunRecords read_run_jsonl(std::istream& in, const std::string& name);

json step_record(std::uint64_t t, const StepReport& report, const GmmParams& model);

/// {"weights": [...], "means": [[...]...], "covariances": [[[...]]...]}.
json params_to_json(const GmmParams& params);
GmmParams params_from_json(const json& j);

/// Stream specification file: {"T", "d", "alpha", "U", "seed", "segments": [
/// {"start", "weights", "means", "covariances" | "sigmas"}]}.
StreamSpec stream_spec_from_json(const json& j);
json stream_spec_to_json(const StreamSpec& spec);

/// Parses a comma separated list of numbers ("1,3,5").
std::vector<double> parse_number_list(const std::string& text);

}  // namespace sra::cli
