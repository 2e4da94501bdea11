#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sra::cli {

/// Annotated change points of the Well-log series (annotators 1 to 5).
inline const std::vector<std::vector<std::uint64_t>>& welllog_annotations() {
  static const std::vector<std::vector<std::uint64_t>> sets = {
      {1069, 1525, 1681, 1861, 2053, 2407, 2473, 2527, 2587, 2767, 2779},
      {1069, 1525, 1681, 1867, 2053, 2407, 2467, 2527, 2587},
      {1069, 1525, 1687, 1867, 2053, 2407, 2473, 2527, 2587},
      {1057, 2797},
      {19, 1069, 1525, 1681, 1861, 2059, 2407, 2467, 2527, 2587, 2767, 2779, 3121, 3151, 3715, 3853, 3961},
  };
  return sets;
}

inline const std::vector<std::uint64_t>& welllog_annotation(int index) {
  if (index < 1 || index > 5) throw std::invalid_argument("annotation must be 1..5");
  return welllog_annotations()[static_cast<std::size_t>(index - 1)];
}

/// Train/test layout of a real dataset. The training prefix is [1, train_end];
/// tuning scores are evaluated on [tune_start, tune_end] inside it.
struct DatasetPreset {
  std::string name;
  std::uint64_t train_end = 0;
  std::uint64_t tune_start = 1;
  std::uint64_t tune_end = 0;
  bool change_detection = false;
};

inline DatasetPreset dataset_preset(const std::string& name) {
  if (name == "welllog") return {name, 1550, 20, 1150, true};
  if (name == "smtp") return {name, 40000, 10000, 40000, false};
  if (name == "thyroid") return {name, 2000, 1000, 2000, false};
  throw std::invalid_argument("unknown dataset '" + name + "' (welllog, smtp, thyroid)");
}

/// Evaluation window of a split; t_end = 0 means the last observation.
struct SplitWindow {
  std::uint64_t t_start = 1;
  std::uint64_t t_end = 0;
};

inline SplitWindow split_window(const DatasetPreset& preset, const std::string& split) {
  if (split == "train") return {preset.tune_start, preset.tune_end};
  if (split == "test") return {preset.train_end + 1, 0};
  throw std::invalid_argument("split must be 'train' or 'test'");
}

}  // namespace sra::cli
