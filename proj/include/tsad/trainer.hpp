#pragma once

#include <limits>
#include <string>
#include <vector>

#include "tsad/autodiff.hpp"
#include "tsad/checkpoint.hpp"
#include "tsad/model.hpp"

namespace tsad {

// How labels (when present) enter the one-class loss. Unsupervised ignores
// them entirely; semi folds labeled margins by their sign and weights the
// unlabeled terms by nu; supervised requires every sequence to be labeled.
enum class TrainMode { Unsupervised, Semi, Supervised };

std::string to_string(TrainMode m);
TrainMode train_mode_from_string(const std::string& s);

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;  // [0] is the pre-training evaluation
  int stopping_epoch = 0;          // number of trained epochs
  int best_epoch = 0;              // epoch of the returned parameters (0 = initial)
  double best_val_loss = std::numeric_limits<double>::infinity();
  Model model;  // best-validation parameters
  Rng rng{0};   // generator state at the end of training
  std::string checkpoint_path;
};

// One-class loss plus alpha times the reconstruction loss over a batch,
// evaluated directly (no tape).
double combined_loss(const Model& model, const std::vector<const IrregularSequence*>& batch,
                     const Hyperparameters& hp, TrainMode mode = TrainMode::Unsupervised);
double combined_loss(const Model& model, const std::vector<IrregularSequence>& batch,
                     const Hyperparameters& hp, TrainMode mode = TrainMode::Unsupervised);

// Current values of the trainable tensors, in canonical order.
std::vector<Mat> collect_params(Model& model);

// Graph of the summed per-sequence losses for a batch; `pvars` are tape
// leaves aligned with collect_params(). Dividing the summed gradients by the
// batch size recovers the batch-mean gradient.
Var batch_loss_graph(Tape& tape, Model& model, const std::vector<Var>& pvars,
                     const std::vector<const IrregularSequence*>& batch, const Hyperparameters& hp,
                     TrainMode mode = TrainMode::Unsupervised);

// Convenience: build the batch graph from the model's own parameters and run
// the backward pass. Returns summed gradients; *sum_loss receives the summed
// loss value when non-null.
std::vector<Mat> loss_gradients(Model& model, const std::vector<const IrregularSequence*>& batch,
                                const Hyperparameters& hp, TrainMode mode = TrainMode::Unsupervised,
                                double* sum_loss = nullptr);

// theta <- theta - mu * (grad_sum / batch_size), after capping the global
// norm of the averaged gradient at `clip` (<= 0 disables capping).
void sgd_update(Model& model, const std::vector<Mat>& grad_sum, double mu, int batch_size,
                double clip);

struct AdamState {
  std::vector<Mat> m, v;
  long t = 0;
};

void adam_update(Model& model, const std::vector<Mat>& grad_sum, AdamState& state, double mu,
                 int batch_size, double clip);

// Joint batch training with per-epoch validation and early stopping after
// `patience` epochs without improvement. Returns the best-validation
// parameters. Divergence aborts with a NumericError diagnostic.
TrainReport train_offline(const std::vector<IrregularSequence>& train,
                          const std::vector<IrregularSequence>& validation,
                          const Hyperparameters& hp, TrainMode mode = TrainMode::Unsupervised);

// Trains every candidate and picks the winner by validation loss, with ties
// broken by smaller p then smaller B. Candidates that differ only in alpha
// compete by validation reconstruction loss first, since alpha rescales what
// the combined numbers mean.
Hyperparameters select_hyperparameters(const std::vector<Hyperparameters>& candidates,
                                       const std::vector<IrregularSequence>& train,
                                       const std::vector<IrregularSequence>& validation,
                                       TrainMode mode = TrainMode::Unsupervised);

}  // namespace tsad
