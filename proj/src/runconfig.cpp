#include "tsad/runconfig.hpp"

#include <algorithm>
#include <fstream>

namespace tsad {

using nlohmann::json;

JsonView::JsonView(const json& j, std::string context) : j_(j), context_(std::move(context)) {
  if (!j_.is_object()) throw ConfigError(cat(context_, ": expected a JSON object"));
}

bool JsonView::has(const std::string& key) const { return j_.contains(key); }

const json& JsonView::child(const std::string& key) {
  if (!has(key)) throw ConfigError(cat(context_, ": missing key '", key, "'"));
  used_.push_back(key);
  const json& c = j_.at(key);
  if (!c.is_object()) throw ConfigError(cat(context_, ": '", key, "' must be an object"));
  return c;
}

std::vector<json> JsonView::array(const std::string& key) {
  if (!has(key)) return {};
  used_.push_back(key);
  const json& c = j_.at(key);
  if (!c.is_array()) throw ConfigError(cat(context_, ": '", key, "' must be an array"));
  return std::vector<json>(c.begin(), c.end());
}

void JsonView::finish() {
  for (const auto& [key, value] : j_.items()) {
    if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
      throw ConfigError(cat(context_, ": unknown key '", key, "'"));
    }
  }
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(cat("cannot read config '", path.string(), "'"));
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(cat("config '", path.string(), "' is not valid JSON: ", e.what()));
  }
}

Hyperparameters hyperparameters_from_json(const json& j, Hyperparameters base) {
  JsonView v(j, "hyperparameters");
  if (v.has("variant")) base.variant = cell_variant_from_string(v.require<std::string>("variant"));
  if (v.has("head")) base.head = head_kind_from_string(v.require<std::string>("head"));
  if (v.has("pooling")) base.pooling = pooling_from_string(v.require<std::string>("pooling"));
  if (v.has("recon_mode")) {
    base.recon_mode = recon_mode_from_string(v.require<std::string>("recon_mode"));
  }
  if (v.has("optimizer")) base.optimizer = optimizer_from_string(v.require<std::string>("optimizer"));
  base.state_dim = v.get("p", base.state_dim);
  base.batch_size = v.get("B", base.batch_size);
  base.tau = v.get("tau", base.tau);
  base.lambda = v.get("lambda", base.lambda);
  base.alpha = v.get("alpha", base.alpha);
  base.decay_rate = v.get("gamma", base.decay_rate);
  base.learning_rate = v.get("mu", base.learning_rate);
  base.beta = v.get("beta", base.beta);
  base.nu = v.get("nu", base.nu);
  base.nominal_period = v.get("nominal_period", base.nominal_period);
  base.grad_clip = v.get("grad_clip", base.grad_clip);
  base.decoder_depth = v.get("decoder_depth", base.decoder_depth);
  base.decay_cell_state = v.get("decay_cell_state", base.decay_cell_state);
  base.max_epochs = v.get("max_epochs", base.max_epochs);
  base.patience = v.get("patience", base.patience);
  base.seed = v.get("seed", base.seed);
  v.finish();
  return base;
}

namespace {

Hyperparameters preset_base() {
  Hyperparameters hp;
  hp.head = HeadKind::Svdd;
  hp.beta = 100.0;
  hp.batch_size = 32;
  hp.max_epochs = 100;
  hp.patience = 3;
  hp.pooling = Pooling::Last;
  hp.optimizer = OptimizerKind::Sgd;
  hp.learning_rate = 1e-3;
  return hp;
}

}  // namespace

Hyperparameters preset_hyperparameters(const std::string& name) {
  Hyperparameters hp = preset_base();
  if (name == "digits-alstm") {
    hp.variant = CellVariant::ALstm;
    hp.state_dim = 8;
    hp.alpha = 1000.0;
    hp.lambda = 0.3;
    hp.nominal_period = 0.1;
  } else if (name == "digits-dlstm") {
    hp.variant = CellVariant::DLstm;
    hp.state_dim = 8;
    hp.alpha = 1000.0;
    hp.lambda = 0.3;
    hp.decay_rate = 0.1;
    hp.nominal_period = 0.1;
  } else if (name == "digits-mlstm") {
    hp.variant = CellVariant::MLstm;
    hp.state_dim = 8;
    hp.alpha = 1000.0;
    hp.lambda = 0.4;
    hp.tau = 10;
    hp.nominal_period = 0.1;
  } else if (name == "activity-alstm") {
    hp.variant = CellVariant::ALstm;
    hp.state_dim = 16;
    hp.alpha = 1000.0;
    hp.lambda = 0.3;
    hp.nominal_period = 0.04;
  } else if (name == "activity-dlstm") {
    hp.variant = CellVariant::DLstm;
    hp.state_dim = 16;
    hp.alpha = 10000.0;
    hp.lambda = 0.3;
    hp.decay_rate = 0.1;
    hp.nominal_period = 0.04;
  } else if (name == "activity-mlstm") {
    hp.variant = CellVariant::MLstm;
    hp.state_dim = 32;
    hp.alpha = 1000.0;
    hp.lambda = 0.4;
    hp.tau = 10;
    hp.nominal_period = 0.04;
  } else if (name == "synth-alstm" || name == "synth-dlstm" || name == "synth-mlstm") {
    hp.variant = name == "synth-alstm" ? CellVariant::ALstm
                 : name == "synth-dlstm" ? CellVariant::DLstm
                                         : CellVariant::MLstm;
    hp.state_dim = 8;
    hp.alpha = 1000.0;
    hp.lambda = name == "synth-mlstm" ? 0.4 : 0.3;
    hp.tau = 3;
    hp.decay_rate = 0.1;
    hp.nominal_period = 1.0;
    hp.pooling = Pooling::Mean;
    hp.recon_mode = ReconMode::Predict;
    hp.optimizer = OptimizerKind::Adam;
    hp.learning_rate = 0.01;
    hp.max_epochs = 30;
  } else {
    throw ConfigError(cat("unknown preset '", name, "'"));
  }
  return hp;
}

std::vector<std::string> preset_names() {
  return {"digits-alstm",   "digits-dlstm",   "digits-mlstm", "activity-alstm",
          "activity-dlstm", "activity-mlstm", "synth-alstm",  "synth-dlstm",
          "synth-mlstm"};
}

PreprocessConfig parse_preprocess_config(const json& j) {
  JsonView v(j, "preprocess config");
  PreprocessConfig cfg;
  if (v.has("inputs")) {
    for (const auto& p : v.array("inputs")) cfg.inputs.emplace_back(p.get<std::string>());
  }
  if (v.has("input")) cfg.inputs.emplace_back(v.require<std::string>("input"));
  if (cfg.inputs.empty()) throw ConfigError("preprocess config: no inputs given");
  cfg.out_dir = v.require<std::string>("out_dir");
  cfg.seed = v.get<uint64_t>("seed", 0);
  cfg.first_difference = v.get("first_difference", false);
  cfg.normalize = v.get("normalize", false);
  if (v.has("relabel")) {
    JsonView r(v.child("relabel"), "preprocess relabel");
    cfg.relabel = {r.require<std::vector<int>>("nominal"), r.require<std::vector<int>>("anomaly")};
    r.finish();
  }
  if (v.has("subsample")) {
    JsonView s(v.child("subsample"), "preprocess subsample");
    cfg.subsample = {s.require<int>("len_min"), s.require<int>("len_max")};
    s.finish();
  }
  cfg.drop_rates = v.get("drop_rates", std::vector<double>{});
  for (double r : cfg.drop_rates) {
    if (r < 0.0 || r >= 1.0) throw ConfigError(cat("preprocess config: drop rate ", r, " not in [0, 1)"));
  }
  if (v.has("split")) {
    JsonView s(v.child("split"), "preprocess split");
    cfg.split_fractions = {{s.require<double>("train"), s.require<double>("validation"),
                            s.require<double>("test")}};
    s.finish();
  }
  v.finish();
  return cfg;
}

SynthCommandConfig parse_synth_config(const json& j) {
  JsonView v(j, "synth config");
  SynthCommandConfig cfg;
  cfg.out_dir = v.require<std::string>("out_dir");
  cfg.seed = v.get<uint64_t>("seed", 0);
  if (v.has("counts")) {
    JsonView c(v.child("counts"), "synth counts");
    cfg.count_train = c.get("train", cfg.count_train);
    cfg.count_validation = c.get("validation", cfg.count_validation);
    cfg.count_test = c.get("test", cfg.count_test);
    c.finish();
  }
  cfg.synth.anomaly_fraction = v.get("anomaly_fraction", cfg.synth.anomaly_fraction);
  cfg.synth.feature_dim = v.get("feature_dim", cfg.synth.feature_dim);
  cfg.synth.period = v.get("period", cfg.synth.period);
  if (v.has("length")) {
    JsonView l(v.child("length"), "synth length");
    cfg.synth.len_min = l.get("min", cfg.synth.len_min);
    cfg.synth.len_max = l.get("max", cfg.synth.len_max);
    l.finish();
  }
  if (v.has("nominal")) {
    JsonView n(v.child("nominal"), "synth nominal family");
    cfg.synth.freq_min = n.get("freq_min", cfg.synth.freq_min);
    cfg.synth.freq_max = n.get("freq_max", cfg.synth.freq_max);
    cfg.synth.amp_min = n.get("amp_min", cfg.synth.amp_min);
    cfg.synth.amp_max = n.get("amp_max", cfg.synth.amp_max);
    cfg.synth.damping = n.get("damping", cfg.synth.damping);
    cfg.synth.noise = n.get("noise", cfg.synth.noise);
    n.finish();
  }
  if (v.has("anomaly")) {
    JsonView a(v.child("anomaly"), "synth anomaly family");
    cfg.synth.quiet_sigma = a.get("quiet_sigma", cfg.synth.quiet_sigma);
    cfg.synth.burst_sigma = a.get("burst_sigma", cfg.synth.burst_sigma);
    cfg.synth.regime_min = a.get("regime_min", cfg.synth.regime_min);
    cfg.synth.regime_max = a.get("regime_max", cfg.synth.regime_max);
    a.finish();
  }
  v.finish();
  return cfg;
}

TrainConfig parse_train_config(const json& j) {
  JsonView v(j, "train config");
  TrainConfig cfg;
  cfg.train_path = v.require<std::string>("train");
  cfg.validation_path = v.require<std::string>("validation");
  cfg.out_dir = v.require<std::string>("out_dir");
  if (v.has("mode")) cfg.mode = train_mode_from_string(v.require<std::string>("mode"));
  Hyperparameters base;
  if (v.has("preset")) base = preset_hyperparameters(v.require<std::string>("preset"));
  if (v.has("hyperparameters")) {
    cfg.hp = hyperparameters_from_json(v.child("hyperparameters"), base);
  } else {
    cfg.hp = base;
  }
  if (v.has("seed")) cfg.hp.seed = v.require<uint64_t>("seed");
  v.finish();
  cfg.hp.validate();
  return cfg;
}

EvalConfig parse_eval_config(const json& j) {
  JsonView v(j, "eval config");
  EvalConfig cfg;
  if (v.has("checkpoints")) {
    for (const auto& c : v.array("checkpoints")) {
      JsonView e(c, "eval checkpoint entry");
      cfg.checkpoints.emplace_back(e.require<std::string>("name"), e.require<std::string>("path"));
      e.finish();
    }
  }
  if (v.has("checkpoint")) {
    cfg.checkpoints.emplace_back("model", v.require<std::string>("checkpoint"));
  }
  if (cfg.checkpoints.empty()) throw ConfigError("eval config: no checkpoints given");
  cfg.test_path = v.require<std::string>("test");
  cfg.out_dir = v.require<std::string>("out_dir");
  cfg.stem = v.get<std::string>("stem", cfg.stem);
  v.finish();
  return cfg;
}

OnlineConfig parse_online_config(const json& j) {
  JsonView v(j, "online config");
  OnlineConfig cfg;
  cfg.input = v.get<std::string>("input", cfg.input);
  cfg.out_dir = v.require<std::string>("out_dir");
  cfg.seed = v.get<uint64_t>("seed", 0);
  cfg.feature_dim = v.get("feature_dim", 0);

  Hyperparameters base;
  base.batch_size = 1;
  if (v.has("preset")) base = preset_hyperparameters(v.require<std::string>("preset"));
  if (v.has("hyperparameters")) base = hyperparameters_from_json(v.child("hyperparameters"), base);
  if (v.has("candidates")) {
    for (const auto& c : v.array("candidates")) {
      cfg.candidates.push_back(hyperparameters_from_json(c, base));
    }
  } else {
    cfg.candidates.push_back(base);
  }
  for (auto& hp : cfg.candidates) hp.validate();

  if (v.has("pso")) {
    JsonView p(v.child("pso"), "online pso");
    cfg.pso.n_samples = p.get<long>("n_samples", cfg.pso.n_samples);
    cfg.pso.cadence = p.get("cadence", cfg.pso.cadence);
    cfg.pso.inertia = p.get("inertia", cfg.pso.inertia);
    cfg.pso.cognitive = p.get("cognitive", cfg.pso.cognitive);
    cfg.pso.social = p.get("social", cfg.pso.social);
    p.finish();
  }
  v.finish();
  return cfg;
}

}  // namespace tsad
