#pragma once

#include "tsad/metrics.hpp"
#include "tsad/runconfig.hpp"

namespace tsad {

inline constexpr const char* kVersion = "0.1.0";

// Every command drops a provenance record (config, its hash, seed, version)
// next to its outputs so a run can be reproduced bit for bit.
void write_provenance(const std::filesystem::path& out_dir, const std::string& command,
                      const nlohmann::json& config);

struct PreprocessOutput {
  std::vector<std::filesystem::path> files;
};
PreprocessOutput run_preprocess(const PreprocessConfig& cfg, const nlohmann::json& raw);

struct SynthOutput {
  std::filesystem::path train, validation, test;
};
SynthOutput run_synth(const SynthCommandConfig& cfg, const nlohmann::json& raw);

struct TrainOutput {
  std::filesystem::path checkpoint;
  std::filesystem::path losses;
  TrainReport report;
};
TrainOutput run_train(const TrainConfig& cfg, const nlohmann::json& raw);

struct EvalOutput {
  std::vector<std::pair<std::string, RocCurve>> curves;
  std::vector<std::filesystem::path> files;
};
EvalOutput run_eval(const EvalConfig& cfg, const nlohmann::json& raw);

struct OnlineOutput {
  std::filesystem::path verdicts;
  std::filesystem::path checkpoint;
  long records = 0;
  long skipped = 0;
  int committed_index = -1;
  std::vector<double> stream_losses;
};
OnlineOutput run_online(const OnlineConfig& cfg, const nlohmann::json& raw,
                        std::istream* stream_override = nullptr);

}  // namespace tsad
