#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "tsad/rng.hpp"
#include "tsad/sequence.hpp"

namespace tsad {

// ---------------------------------------------------------------------------
// Interchange format: one JSON object per line with fields id, label
// (optional), t (array of timestamps) and x (array of per-step sample
// arrays). Stream-friendly and diffable.
// ---------------------------------------------------------------------------

IrregularSequence parse_sequence_json(const std::string& line);
std::string sequence_to_json(const IrregularSequence& seq);

Dataset load_dataset(const std::filesystem::path& path);
Dataset read_dataset(std::istream& is, const std::string& origin);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

// ---------------------------------------------------------------------------
// Preprocessing.
// ---------------------------------------------------------------------------

// Per-step differences; the k-th output sample is x[k+1] - x[k] stamped at
// t[k+1]. Output is one element shorter.
IrregularSequence first_difference(const IrregularSequence& seq);
Dataset first_difference(const Dataset& dataset);

// Keeps each element independently with probability 1 - rate, preserving the
// original timestamps (this is what makes the gaps irregular). At least two
// elements always survive, topping up from the earliest dropped ones.
IrregularSequence random_drop(const IrregularSequence& seq, double rate, Rng& rng);
Dataset random_drop(const Dataset& dataset, double rate, Rng& rng);

// Cuts a long recording into non-overlapping windows with lengths drawn
// uniformly from [len_min, len_max], left to right; a tail shorter than
// len_min is discarded.
std::vector<IrregularSequence> subsample_windows(const IrregularSequence& seq, int len_min,
                                                 int len_max, Rng& rng);
Dataset subsample_windows(const Dataset& dataset, int len_min, int len_max, Rng& rng);

// Per-feature standardization over the whole dataset (optional, off by
// default in the pipelines).
Dataset normalize(const Dataset& dataset);

struct SplitResult {
  Dataset train, validation, test;
};

// Seed-reproducible disjoint partition. When the fractions sum to one, every
// sequence lands in some split.
SplitResult split(const Dataset& dataset, double train_fraction, double validation_fraction,
                  double test_fraction, uint64_t seed);

struct RelabelResult {
  Dataset dataset;
  double negative_class_ratio = 0.0;  // fraction labeled -1
};

// Maps raw class ids to -1 (nominal) / +1 (anomaly); sequences in neither
// group are dropped, overlapping groups are an error.
RelabelResult relabel_binary(const Dataset& dataset, const std::vector<int>& nominal_classes,
                             const std::vector<int>& anomaly_classes);

// ---------------------------------------------------------------------------
// Synthetic data: labeled nominal/anomalous sequences with a known ground
// truth, for desk-scale experiments. Nominal sequences are noisy damped
// sinusoids; anomalies are regime-switched noise with a similar amplitude but
// different temporal structure.
// ---------------------------------------------------------------------------

struct SynthConfig {
  int count = 500;
  double anomaly_fraction = 0.1;
  int feature_dim = 1;
  double period = 1.0;
  int len_min = 40;
  int len_max = 60;

  // nominal family
  double freq_min = 0.04;
  double freq_max = 0.07;
  double amp_min = 0.8;
  double amp_max = 1.2;
  double damping = 0.002;
  double noise = 0.05;

  // anomaly family
  double quiet_sigma = 0.1;
  double burst_sigma = 1.0;
  int regime_min = 5;
  int regime_max = 15;

  void validate() const;
};

Dataset synth_generate(const SynthConfig& config, Rng& rng);

}  // namespace tsad
