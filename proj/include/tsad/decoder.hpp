#pragma once

#include <string>
#include <vector>

#include "tsad/rng.hpp"
#include "tsad/sequence.hpp"
#include "tsad/tensor.hpp"

namespace tsad {

// Whether reconstructions target the sample that produced the state
// (autoencode) or the next sample from the previous state (predict).
enum class ReconMode { Autoencode, Predict };

std::string to_string(ReconMode m);
ReconMode recon_mode_from_string(const std::string& s);

template <class T>
struct DenseLayer {
  T w, b;
};

// Dense stack mapping a state vector back to sample space: ReLU between
// layers, linear output so signed targets stay reachable.
struct DecoderParams {
  std::vector<DenseLayer<Mat>> layers;

  static DecoderParams init(int in_dim, int out_dim, int depth, Rng& rng);

  int in_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().w.cols()); }
  int out_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().w.rows()); }

  template <class F>
  void visit_params(F&& f) {
    for (size_t d = 0; d < layers.size(); ++d) {
      f(cat("layer", d, ".w"), layers[d].w);
      f(cat("layer", d, ".b"), layers[d].b);
    }
  }
};

template <class Ops, class T = typename Ops::Value>
T run_decoder(Ops& ops, const std::vector<DenseLayer<T>>& layers, T h) {
  for (size_t d = 0; d < layers.size(); ++d) {
    h = ops.add(ops.matmul(layers[d].w, h), layers[d].b);
    if (d + 1 < layers.size()) h = ops.relu(h);
  }
  return h;
}

Vec decode(const DecoderParams& params, const Vec& h);

// Sum over steps of the squared reconstruction error for one sequence.
// Targets are the rows of seq.values; in predict mode step k is reconstructed
// from the previous state, with a zero state of dim `state_dim` before the
// first step.
template <class Ops, class T = typename Ops::Value>
T seq_recon_loss(Ops& ops, const std::vector<DenseLayer<T>>& layers, const std::vector<T>& states,
                 const IrregularSequence& seq, ReconMode mode, int state_dim) {
  const int K = static_cast<int>(states.size());
  T zero_state;
  if (mode == ReconMode::Predict) {
    zero_state = ops.constant(Mat::Zero(state_dim, 1));
  }
  T total;
  for (int k = 0; k < K; ++k) {
    const T& state = mode == ReconMode::Autoencode ? states[k] : (k == 0 ? zero_state : states[k - 1]);
    T rec = run_decoder(ops, layers, state);
    T err = ops.sum(ops.square(ops.add(rec, ops.scale(ops.constant(seq.values.row(k).transpose()), -1.0))));
    total = k == 0 ? err : ops.add(total, err);
  }
  return total;
}

struct EncodingResult;  // encoder.hpp

// Mean over sequences of the per-sequence squared-error sums.
double reconstruction_loss(const DecoderParams& params, const std::vector<EncodingResult>& encodings,
                           const std::vector<const IrregularSequence*>& sequences, ReconMode mode);

}  // namespace tsad
