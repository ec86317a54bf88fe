// Command-line front end: preprocess, synth, train, eval, online.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdlib>
#include <iostream>

#include <tsad/commands.hpp>

namespace {

// exit codes: 0 ok, 2 config error, 3 data error, 4 numerical divergence
constexpr int kConfigExit = 2;
constexpr int kDataExit = 3;
constexpr int kNumericExit = 4;

nlohmann::json config_or_empty(const std::string& path) {
  return path.empty() ? nlohmann::json::object() : tsad::load_json_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("TSAD_THREADS")) {
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));
  }

  CLI::App app{"Unsupervised anomaly detection for irregularly sampled sequences"};
  app.require_subcommand(1);

  std::string config_path, out_dir, preset, mode, input, test_path;
  std::vector<double> drop_rates;
  std::vector<std::string> checkpoints;
  long long seed = -1;
  bool have_seed = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--out", out_dir, "output directory (overrides the config)");
    cmd->add_option_function<long long>(
        "--seed", [&](long long s) { seed = s; have_seed = true; }, "RNG seed override");
  };

  CLI::App* c_pre = app.add_subcommand("preprocess", "relabel, difference, window, drop, split");
  add_common(c_pre);
  c_pre->add_option("--drop-rate", drop_rates, "drop rate (repeatable, overrides the config)");

  CLI::App* c_synth = app.add_subcommand("synth", "generate a labeled synthetic dataset");
  add_common(c_synth);

  CLI::App* c_train = app.add_subcommand("train", "batch training with early stopping");
  add_common(c_train);
  c_train->add_option("--preset", preset, "named hyperparameter preset");
  c_train->add_option("--mode", mode, "unsupervised, semi or supervised");

  CLI::App* c_eval = app.add_subcommand("eval", "score a labeled test set and report ROC/AUC");
  add_common(c_eval);
  c_eval->add_option("--checkpoint", checkpoints, "checkpoint path (repeatable as name=path)");
  c_eval->add_option("--test", test_path, "labeled test dataset");

  CLI::App* c_online = app.add_subcommand("online", "prequential detection over a stream");
  add_common(c_online);
  c_online->add_option("--input", input, "stream file or - for standard input");
  c_online->add_option("--preset", preset, "named hyperparameter preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigExit;
  }

  try {
    nlohmann::json raw = config_or_empty(config_path);
    if (!out_dir.empty()) raw["out_dir"] = out_dir;
    if (have_seed) raw["seed"] = seed;

    if (c_pre->parsed()) {
      if (!drop_rates.empty()) raw["drop_rates"] = drop_rates;
      tsad::run_preprocess(tsad::parse_preprocess_config(raw), raw);
    } else if (c_synth->parsed()) {
      tsad::run_synth(tsad::parse_synth_config(raw), raw);
    } else if (c_train->parsed()) {
      if (!preset.empty()) raw["preset"] = preset;
      if (!mode.empty()) raw["mode"] = mode;
      auto cfg = tsad::parse_train_config(raw);
      if (have_seed) cfg.hp.seed = static_cast<uint64_t>(seed);
      auto out = tsad::run_train(cfg, raw);
      std::cout << "checkpoint: " << out.checkpoint.string() << "\n"
                << "stopped after epoch " << out.report.stopping_epoch << ", best epoch "
                << out.report.best_epoch << ", validation loss "
                << out.report.best_val_loss << "\n";
    } else if (c_eval->parsed()) {
      for (const auto& c : checkpoints) {
        const auto eq = c.find('=');
        nlohmann::json entry;
        entry["name"] = eq == std::string::npos ? "model" : c.substr(0, eq);
        entry["path"] = eq == std::string::npos ? c : c.substr(eq + 1);
        raw["checkpoints"].push_back(entry);
      }
      if (!test_path.empty()) raw["test"] = test_path;
      auto out = tsad::run_eval(tsad::parse_eval_config(raw), raw);
      for (const auto& [name, curve] : out.curves) {
        std::cout << name << " AUC " << curve.auc << "\n";
      }
    } else if (c_online->parsed()) {
      if (!input.empty()) raw["input"] = input;
      if (!preset.empty()) raw["preset"] = preset;
      auto out = tsad::run_online(tsad::parse_online_config(raw), raw);
      std::cout << "verdicts: " << out.verdicts.string() << " (" << (out.records - out.skipped)
                << " written, " << out.skipped << " skipped)\n";
    }
  } catch (const tsad::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const tsad::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataExit;
  } catch (const tsad::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
