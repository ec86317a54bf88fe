#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsad/data.hpp"
#include "tsad/online.hpp"
#include "tsad/trainer.hpp"

namespace tsad {

// Strict JSON reader: every key must be consumed, unknown keys are errors.
class JsonView {
 public:
  JsonView(const nlohmann::json& j, std::string context);

  bool has(const std::string& key) const;

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return take<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    if (!has(key)) throw ConfigError(cat(context_, ": missing required key '", key, "'"));
    return take<T>(key);
  }

  // Consumes and returns the sub-object; the key must be present.
  const nlohmann::json& child(const std::string& key);
  std::vector<nlohmann::json> array(const std::string& key);

  // Throws if any key was never consumed.
  void finish();

 private:
  template <class T>
  T take(const std::string& key) {
    used_.push_back(key);
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(cat(context_, ": bad value for '", key, "': ", e.what()));
    }
  }

  const nlohmann::json& j_;
  std::string context_;
  std::vector<std::string> used_;
};

nlohmann::json load_json_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Per-command configurations.
// ---------------------------------------------------------------------------

struct PreprocessConfig {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path out_dir;
  uint64_t seed = 0;
  bool first_difference = false;
  bool normalize = false;
  std::optional<std::pair<std::vector<int>, std::vector<int>>> relabel;  // nominal, anomaly
  std::optional<std::pair<int, int>> subsample;                          // len_min, len_max
  std::vector<double> drop_rates;
  std::optional<std::array<double, 3>> split_fractions;
};

struct SynthCommandConfig {
  std::filesystem::path out_dir;
  uint64_t seed = 0;
  int count_train = 500;
  int count_validation = 200;
  int count_test = 200;
  SynthConfig synth;  // counts filled per split at generation time
};

struct TrainConfig {
  std::filesystem::path train_path;
  std::filesystem::path validation_path;
  std::filesystem::path out_dir;
  TrainMode mode = TrainMode::Unsupervised;
  Hyperparameters hp;
};

struct EvalConfig {
  std::vector<std::pair<std::string, std::filesystem::path>> checkpoints;
  std::filesystem::path test_path;
  std::filesystem::path out_dir;
  std::string stem = "roc";
};

struct OnlineConfig {
  std::string input = "-";  // "-" reads standard input
  std::filesystem::path out_dir;
  uint64_t seed = 0;
  std::vector<Hyperparameters> candidates;
  PsoConfig pso;
  int feature_dim = 0;  // 0 = infer from the first valid record
};

// Named hyperparameter presets (the published configurations plus the
// synthetic-benchmark ones). Throws ConfigError for unknown names.
Hyperparameters preset_hyperparameters(const std::string& name);
std::vector<std::string> preset_names();

// Overlay JSON hyperparameter keys onto `base`.
Hyperparameters hyperparameters_from_json(const nlohmann::json& j, Hyperparameters base);

PreprocessConfig parse_preprocess_config(const nlohmann::json& j);
SynthCommandConfig parse_synth_config(const nlohmann::json& j);
TrainConfig parse_train_config(const nlohmann::json& j);
EvalConfig parse_eval_config(const nlohmann::json& j);
OnlineConfig parse_online_config(const nlohmann::json& j);

}  // namespace tsad
