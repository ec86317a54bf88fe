#include "tsad/model.hpp"

namespace tsad {

std::string to_string(OptimizerKind o) { return o == OptimizerKind::Sgd ? "SGD" : "adaptive"; }

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "SGD") return OptimizerKind::Sgd;
  if (s == "adaptive") return OptimizerKind::Adam;
  throw ConfigError(cat("unknown optimizer '", s, "' (expected SGD or adaptive)"));
}

void Hyperparameters::validate() const {
  if (state_dim < 1) throw ConfigError(cat("hyperparameters: p must be >= 1, got ", state_dim));
  if (batch_size < 1) throw ConfigError(cat("hyperparameters: B must be >= 1, got ", batch_size));
  if (tau < 0) throw ConfigError(cat("hyperparameters: tau must be >= 0, got ", tau));
  if (!(lambda > 0.0)) throw ConfigError(cat("hyperparameters: lambda must be > 0, got ", lambda));
  if (!(alpha > 0.0)) throw ConfigError(cat("hyperparameters: alpha must be > 0, got ", alpha));
  if (!(learning_rate >= 0.0)) {
    throw ConfigError(cat("hyperparameters: mu must be >= 0, got ", learning_rate));
  }
  if (!(beta > 0.0)) throw ConfigError(cat("hyperparameters: beta must be > 0, got ", beta));
  if (variant == CellVariant::DLstm && !(decay_rate > 0.0)) {
    throw ConfigError(cat("hyperparameters: D-LSTM needs gamma > 0, got ", decay_rate));
  }
  if (!(nominal_period > 0.0)) {
    throw ConfigError(cat("hyperparameters: nominal period must be > 0, got ", nominal_period));
  }
  if (max_epochs < 0) throw ConfigError(cat("hyperparameters: max epochs must be >= 0, got ", max_epochs));
  if (patience < 1) throw ConfigError(cat("hyperparameters: patience must be >= 1, got ", patience));
  if (decoder_depth < 1) {
    throw ConfigError(cat("hyperparameters: decoder depth must be >= 1, got ", decoder_depth));
  }
  if (!(nu >= 0.0)) throw ConfigError(cat("hyperparameters: nu must be >= 0, got ", nu));
}

EncoderConfig Hyperparameters::encoder_config(int input_dim) const {
  EncoderConfig cfg;
  cfg.variant = variant;
  cfg.state_dim = state_dim;
  cfg.input_dim = input_dim;
  cfg.tau = tau;
  cfg.decay_rate = decay_rate;
  cfg.decay_cell_state = decay_cell_state;
  cfg.nominal_period = nominal_period;
  return cfg;
}

Model Model::init(const Hyperparameters& hp, int input_dim, Rng& rng) {
  hp.validate();
  Model m;
  m.encoder = EncoderParams::init(hp.encoder_config(input_dim), rng);
  m.decoder = DecoderParams::init(hp.state_dim, input_dim, hp.decoder_depth, rng);
  m.classifier = ClassifierParams::init_random(hp.head, hp.state_dim, hp.lambda, hp.beta, rng);
  m.classifier.nu = hp.nu;
  return m;
}

std::vector<std::pair<std::string, Mat*>> Model::trainable() {
  std::vector<std::pair<std::string, Mat*>> out;
  visit_params([&](const std::string& name, Mat& m) { out.emplace_back(name, &m); });
  return out;
}

double Model::max_abs_encoder_weight() {
  double worst = 0.0;
  encoder.visit_params([&](const std::string&, Mat& m) {
    worst = std::max(worst, m.cwiseAbs().maxCoeff());
  });
  return worst;
}

}  // namespace tsad
