#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsad/decoder.hpp"
#include "tsad/encoder.hpp"
#include "tsad/one_class.hpp"

namespace tsad {

enum class OptimizerKind { Sgd, Adam };

std::string to_string(OptimizerKind o);
OptimizerKind optimizer_from_string(const std::string& s);

// Everything tunable for a training run.
struct Hyperparameters {
  CellVariant variant = CellVariant::MLstm;
  HeadKind head = HeadKind::Svdd;
  Pooling pooling = Pooling::Last;
  ReconMode recon_mode = ReconMode::Autoencode;
  OptimizerKind optimizer = OptimizerKind::Sgd;

  int state_dim = 8;     // p
  int batch_size = 32;   // B
  int tau = 10;          // gap-power features m = 0..tau
  double lambda = 0.4;   // one-class slack weight
  double alpha = 1000.0; // reconstruction weight in the combined loss
  double decay_rate = 0.1;      // gamma (D-LSTM)
  double learning_rate = 1e-3;  // mu
  double beta = 100.0;          // hinge smoothing
  double nu = 1.0;              // unlabeled weight in the mixed loss
  double nominal_period = 1.0;
  double grad_clip = 5.0;  // global-norm cap; <= 0 disables
  int decoder_depth = 2;
  bool decay_cell_state = false;

  int max_epochs = 100;
  int patience = 3;  // epochs without validation improvement before stopping
  uint64_t seed = 0;

  void validate() const;
  EncoderConfig encoder_config(int input_dim) const;
};

// Jointly trained parameter triple: encoder, decoder, one-class head.
struct Model {
  EncoderParams encoder;
  DecoderParams decoder;
  ClassifierParams classifier;

  // Fresh parameters for `hp` on `input_dim`-dimensional sequences. The
  // classifier starts with random parameters; the trainer re-anchors a
  // hypersphere head on the first batch of encoded features.
  static Model init(const Hyperparameters& hp, int input_dim, Rng& rng);

  template <class F>
  void visit_params(F&& f) {
    encoder.visit_params([&](const std::string& name, Mat& m) { f("encoder." + name, m); });
    decoder.visit_params([&](const std::string& name, Mat& m) { f("decoder." + name, m); });
    classifier.visit_params([&](const std::string& name, Mat& m) { f("classifier." + name, m); });
  }

  // Trainable tensors in canonical order.
  std::vector<std::pair<std::string, Mat*>> trainable();

  double max_abs_encoder_weight();
};

}  // namespace tsad
