#include "tsad/decoder.hpp"

#include "tsad/encoder.hpp"

namespace tsad {

std::string to_string(ReconMode m) { return m == ReconMode::Autoencode ? "autoencode" : "predict"; }

ReconMode recon_mode_from_string(const std::string& s) {
  if (s == "autoencode") return ReconMode::Autoencode;
  if (s == "predict") return ReconMode::Predict;
  throw ConfigError(cat("unknown reconstruction mode '", s, "' (expected autoencode or predict)"));
}

DecoderParams DecoderParams::init(int in_dim, int out_dim, int depth, Rng& rng) {
  if (in_dim < 1 || out_dim < 1) {
    throw ConfigError(cat("decoder: dims must be >= 1, got ", in_dim, " -> ", out_dim));
  }
  if (depth < 1) throw ConfigError(cat("decoder: depth must be >= 1, got ", depth));

  DecoderParams out;
  int prev = in_dim;
  for (int d = 0; d < depth; ++d) {
    const int next = d + 1 == depth ? out_dim : in_dim;  // hidden width = state dim
    const double bound = 1.0 / std::sqrt(static_cast<double>(prev));
    DenseLayer<Mat> layer;
    layer.w = Mat(next, prev);
    for (Eigen::Index r = 0; r < next; ++r) {
      for (Eigen::Index c = 0; c < prev; ++c) layer.w(r, c) = rng.uniform(-bound, bound);
    }
    // Small positive bias keeps narrow hidden layers from starting with
    // every rectifier dead; the linear output layer starts at zero.
    layer.b = d + 1 == depth ? Mat::Zero(next, 1) : Mat::Constant(next, 1, 0.1);
    out.layers.push_back(std::move(layer));
    prev = next;
  }
  return out;
}

Vec decode(const DecoderParams& params, const Vec& h) {
  if (params.layers.empty()) throw Error("decode: decoder has no layers");
  EigenOps ops;
  return run_decoder(ops, params.layers, Vec(h));
}

double reconstruction_loss(const DecoderParams& params, const std::vector<EncodingResult>& encodings,
                           const std::vector<const IrregularSequence*>& sequences, ReconMode mode) {
  if (encodings.empty()) throw Error("reconstruction_loss: empty batch");
  if (encodings.size() != sequences.size()) {
    throw Error(cat("reconstruction_loss: ", encodings.size(), " encodings vs ", sequences.size(),
                    " sequences"));
  }
  EigenOps ops;
  double total = 0.0;
  for (size_t i = 0; i < encodings.size(); ++i) {
    Mat loss = seq_recon_loss(ops, params.layers, encodings[i].states, *sequences[i], mode,
                               params.in_dim());
    total += loss(0, 0);
  }
  return total / static_cast<double>(encodings.size());
}

}  // namespace tsad
