#include "io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sra/errors.hpp"
#include "sra/format.hpp"

namespace sra::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool skippable(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t.front() == '#';
}

[[noreturn]] void fail(const std::string& name, std::size_t line_no, const std::string& what) {
  throw DataError(name + ":" + std::to_string(line_no) + ": " + what);
}

double field_double(const std::string& name, std::size_t line_no, const std::string& text) {
  try {
    return parse_double(text);
  } catch (const std::invalid_argument&) {
    fail(name, line_no, "not a number: '" + text + "'");
  }
}

std::uint64_t field_uint(const std::string& name, std::size_t line_no, const std::string& text) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    fail(name, line_no, "not a nonnegative integer: '" + text + "'");
  }
  return std::stoull(text);
}

std::size_t resolve_column(const std::vector<std::string>& header, const std::string& key, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), key);
  if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
  if (!key.empty() && std::all_of(key.begin(), key.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    const std::size_t idx = std::stoull(key);
    if (idx < header.size()) return idx;
  }
  throw DataError(name + ": no column '" + key + "'");
}

Vector to_vector(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json from_vector(const Vector& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Matrix to_matrix(const json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (j[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(n)) throw DataError("covariance must be square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json from_matrix(const Matrix& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(from_vector(m.row(r).transpose()));
  return j;
}

}  // namespace

InputFormat parse_input_format(const std::string& name) {
  if (name == "auto") return InputFormat::kAuto;
  if (name == "stream") return InputFormat::kStream;
  if (name == "values") return InputFormat::kValues;
  if (name == "labeled") return InputFormat::kLabeled;
  throw std::invalid_argument("unknown input format '" + name + "'");
}

InputData read_stream_csv(std::istream& in, const std::string& name) {
  InputData data;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    header = split_csv(line);
    break;
  }
  if (header.empty()) return data;
  if (header.front() != "t") fail(name, line_no, "expected a stream header starting with 't'");
  std::size_t d = 0;
  while (1 + d < header.size() && header[1 + d] == "y" + std::to_string(d + 1)) ++d;
  if (d == 0 || header.size() < d + 3 || header[d + 1] != "is_outlier" || header[d + 2] != "segment_id") {
    fail(name, line_no, "malformed stream header");
  }
  const std::size_t truth = header.size() - d - 3;
  if (truth % d != 0) fail(name, line_no, "true mean columns are not a multiple of the dimension");
  const std::size_t K = truth / d;
  std::vector<bool> labels;
  MeanSeries means;
  std::uint64_t previous_segment = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) fail(name, line_no, "expected " + std::to_string(header.size()) + " fields");
    const std::uint64_t t = field_uint(name, line_no, f[0]);
    if (t != data.ys.size() + 1) fail(name, line_no, "time index out of sequence");
    Vector y(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) y[static_cast<Eigen::Index>(i)] = field_double(name, line_no, f[1 + i]);
    const std::uint64_t outlier = field_uint(name, line_no, f[d + 1]);
    if (outlier > 1) fail(name, line_no, "is_outlier must be 0 or 1");
    const std::uint64_t segment = field_uint(name, line_no, f[d + 2]);
    if (t > 1 && segment != previous_segment) data.change_points.push_back(t);
    previous_segment = segment;
    std::vector<Vector> mu(K, Vector(static_cast<Eigen::Index>(d)));
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        mu[k][static_cast<Eigen::Index>(i)] = field_double(name, line_no, f[d + 3 + k * d + i]);
      }
    }
    data.ys.push_back(std::move(y));
    labels.push_back(outlier == 1);
    means.push_back(std::move(mu));
  }
  data.labels = std::move(labels);
  if (K > 0) data.true_means = std::move(means);
  return data;
}

InputData read_values(std::istream& in, const std::string& name) {
  InputData data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    Vector y(1);
    y[0] = field_double(name, line_no, trim(line));
    data.ys.push_back(std::move(y));
  }
  return data;
}

InputData read_labeled_csv(std::istream& in, const std::string& name, const std::string& label_column,
                           const std::vector<std::string>& feature_columns) {
  InputData data;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    header = split_csv(line);
    break;
  }
  if (header.empty()) return data;
  const std::size_t label = resolve_column(header, label_column, name);
  std::vector<std::size_t> features;
  if (feature_columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i != label) features.push_back(i);
    }
  } else {
    for (const auto& key : feature_columns) features.push_back(resolve_column(header, key, name));
  }
  if (features.empty()) throw DataError(name + ": no feature columns");
  std::vector<bool> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) fail(name, line_no, "expected " + std::to_string(header.size()) + " fields");
    Vector y(static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < features.size(); ++i) {
      y[static_cast<Eigen::Index>(i)] = field_double(name, line_no, f[features[i]]);
    }
    data.ys.push_back(std::move(y));
    labels.push_back(field_double(name, line_no, f[label]) != 0.0);
  }
  data.labels = std::move(labels);
  return data;
}

InputData read_input(const std::string& path, InputFormat format, const std::string& label_column,
                     const std::vector<std::string>& feature_columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  if (format == InputFormat::kAuto) {
    std::string first;
    const auto start = in.tellg();
    std::string line;
    while (std::getline(in, line)) {
      if (!skippable(line)) {
        first = trim(line);
        break;
      }
    }
    in.clear();
    in.seekg(start);
    if (first.rfind("t,y1", 0) == 0) {
      format = InputFormat::kStream;
    } else if (!label_column.empty()) {
      format = InputFormat::kLabeled;
    } else {
      format = InputFormat::kValues;
    }
  }
  switch (format) {
    case InputFormat::kStream:
      return read_stream_csv(in, path);
    case InputFormat::kLabeled:
      if (label_column.empty()) throw std::invalid_argument("labeled input needs --label-column");
      return read_labeled_csv(in, path, label_column, feature_columns);
    default:
      return read_values(in, path);
  }
}

RunRecords read_run_jsonl(std::istream& in, const std::string& name) {
  RunRecords records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(name, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (j.contains("header")) {
      records.header = j["header"];
      continue;
    }
    if (j.contains("error")) fail(name, line_no, "run aborted: " + j["error"].get<std::string>());
    if (!j.contains("t") || !j.contains("score")) fail(name, line_no, "record without t or score");
    if (j["t"].get<std::uint64_t>() != records.scores.size() + 1) fail(name, line_no, "time index out of sequence");
    records.scores.push_back(j["score"].get<double>());
    records.truncated.push_back(j.value("truncated", false));
    std::vector<Vector> mu;
    if (j.contains("means")) {
      for (const auto& m : j["means"]) mu.push_back(to_vector(m));
    }
    records.means.push_back(std::move(mu));
  }
  return records;
}

json step_record(std::uint64_t t, const StepReport& report, const GmmParams& model) {
  json j;
  j["t"] = t;
  j["score"] = report.score;
  j["truncated"] = report.truncated;
  j["weights"] = from_vector(model.weights());
  json means = json::array();
  for (const auto& m : model.means()) means.push_back(from_vector(m));
  j["means"] = std::move(means);
  return j;
}

json params_to_json(const GmmParams& params) {
  json j;
  j["weights"] = from_vector(params.weights());
  json means = json::array(), covs = json::array();
  for (const auto& m : params.means()) means.push_back(from_vector(m));
  for (const auto& c : params.covariances()) covs.push_back(from_matrix(c));
  j["means"] = std::move(means);
  j["covariances"] = std::move(covs);
  return j;
}

GmmParams params_from_json(const json& j) {
  std::vector<Vector> means;
  for (const auto& m : j.at("means")) means.push_back(to_vector(m));
  std::vector<Matrix> covs;
  if (j.contains("covariances")) {
    for (const auto& c : j["covariances"]) covs.push_back(to_matrix(c));
  } else if (j.contains("sigmas")) {
    for (const auto& s : j["sigmas"]) {
      const double sigma = s.get<double>();
      covs.push_back(Matrix::Identity(means.empty() ? 1 : means.front().size(), means.empty() ? 1 : means.front().size()) *
                     (sigma * sigma));
    }
  } else {
    throw DataError("segment needs 'covariances' or 'sigmas'");
  }
  return GmmParams::create(to_vector(j.at("weights")), std::move(means), std::move(covs));
}

StreamSpec stream_spec_from_json(const json& j) {
  StreamSpec spec;
  try {
    spec.T = j.at("T").get<std::uint64_t>();
    spec.d = j.value("d", std::size_t{1});
    spec.alpha = j.value("alpha", 1.0);
    spec.U = j.value("U", 1.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    for (const auto& s : j.at("segments")) spec.segments.push_back({s.value("start", std::uint64_t{1}), params_from_json(s)});
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid stream spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

json stream_spec_to_json(const StreamSpec& spec) {
  json j;
  j["T"] = spec.T;
  j["d"] = spec.d;
  j["alpha"] = spec.alpha;
  j["U"] = spec.U;
  j["seed"] = spec.seed;
  json segments = json::array();
  for (const auto& s : spec.segments) {
    json seg = params_to_json(s.params);
    seg["start"] = s.start;
    segments.push_back(std::move(seg));
  }
  j["segments"] = std::move(segments);
  return j;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& field : split_csv(text)) {
    if (field.empty()) continue;
    try {
      values.push_back(parse_double(field));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("not a number in list: '" + field + "'");
    }
  }
  return values;
}

}  // namespace sra::cli
