#pragma once

#include <string>
#include <vector>

#include "tsad/cells.hpp"
#include "tsad/rng.hpp"
#include "tsad/sequence.hpp"

namespace tsad {

enum class CellVariant { Lstm, ALstm, DLstm, MLstm, MRnn, MGru };
enum class Pooling { Last, Mean };

std::string to_string(CellVariant v);
CellVariant cell_variant_from_string(const std::string& s);
std::string to_string(Pooling p);
Pooling pooling_from_string(const std::string& s);

// Structural description of an encoder, separate from its weights so the
// graph-building code can pair it with either matrices or tape vars.
struct EncoderConfig {
  CellVariant variant = CellVariant::Lstm;
  int state_dim = 0;   // p
  int input_dim = 0;   // M
  int tau = 0;         // gap-power features run m = 0..tau
  double decay_rate = 0.0;        // gamma, DLstm only
  bool decay_cell_state = false;  // DLstm: also decay c, not just h
  double nominal_period = 1.0;    // typical gap; first step uses it, powers normalize by it

  // A-LSTM feeds the gap as one extra input column.
  int gate_input_dim() const { return variant == CellVariant::ALstm ? input_dim + 1 : input_dim; }
};

template <class T>
struct EncoderWeights {
  LstmWeights<T> lstm;    // Lstm, ALstm, DLstm, MLstm
  TimeGateWeights<T> tg;  // MLstm
  RnnWeights<T> rnn;      // MRnn
  GruWeights<T> gru;      // MGru

  template <class F>
  void visit(CellVariant variant, F&& f) {
    switch (variant) {
      case CellVariant::Lstm:
      case CellVariant::ALstm:
      case CellVariant::DLstm:
        lstm.visit(f);
        break;
      case CellVariant::MLstm:
        lstm.visit(f);
        tg.visit(f);
        break;
      case CellVariant::MRnn:
        rnn.visit(f);
        break;
      case CellVariant::MGru:
        gru.visit(f);
        break;
    }
  }
};

struct EncoderParams {
  EncoderConfig cfg;
  EncoderWeights<Mat> weights;

  // Uniform init in [-1/sqrt(p), 1/sqrt(p)]; LSTM forget bias starts at 1.
  static EncoderParams init(const EncoderConfig& cfg, Rng& rng);

  template <class F>
  void visit_params(F&& f) {
    weights.visit(cfg.variant, f);
  }
};

struct EncodingResult {
  std::vector<Vec> states;  // h per step
  std::vector<Vec> cells;   // c per step (LSTM family; empty otherwise)
  Vec pooled;
};

// [1, d, d^2, ..., d^tau]; d must be >= 0 (gaps of a time-ordered sequence).
Vec delta_features(double delta, int tau);

// Single-step cell evaluations on plain matrices.
std::pair<Vec, Vec> lstm_step(const EncoderParams& params, const Vec& x, const Vec& h_prev,
                              const Vec& c_prev);
std::pair<Vec, Vec> alstm_step(const EncoderParams& params, const Vec& x, double delta,
                               const Vec& h_prev, const Vec& c_prev);
std::pair<Vec, Vec> dlstm_step(const EncoderParams& params, const Vec& x, double delta,
                               const Vec& h_prev, const Vec& c_prev);
std::pair<Vec, Vec> mlstm_step(const EncoderParams& params, const Vec& x, double delta,
                               const Vec& h_prev, const Vec& c_prev);
Vec mrnn_step(const EncoderParams& params, const Vec& x, double delta, const Vec& h_prev);
Vec mgru_step(const EncoderParams& params, const Vec& x, double delta, const Vec& h_prev);

// Runs the configured cell over a whole sequence and pools the states.
EncodingResult encode(const EncoderParams& params, const IrregularSequence& seq, Pooling pooling);

// ---------------------------------------------------------------------------
// Generic single-step and whole-sequence drivers shared by the direct path
// above and the training graph.
// ---------------------------------------------------------------------------

template <class Ops, class T = typename Ops::Value>
struct EncodeOut {
  std::vector<T> states;
  std::vector<T> cells;
  T pooled;
};

namespace detail {

// One step of the configured variant. `delta` is the raw gap to the previous
// observation; modulated variants consume its powers normalized by the
// nominal period, the additive and decaying variants consume it as-is.
template <class Ops, class T = typename Ops::Value>
void encoder_step(Ops& ops, const EncoderConfig& cfg, const EncoderWeights<T>& w, const T& x,
                  double delta, T& h, T& c, const T& ones) {
  switch (cfg.variant) {
    case CellVariant::Lstm: {
      auto [nh, nc] = lstm_cell(ops, w.lstm, x, h, c);
      h = nh;
      c = nc;
      break;
    }
    case CellVariant::ALstm: {
      T aug = ops.concat(x, ops.constant(scalar_mat(delta)));
      auto [nh, nc] = lstm_cell(ops, w.lstm, aug, h, c);
      h = nh;
      c = nc;
      break;
    }
    case CellVariant::DLstm: {
      const double decay = std::exp(-cfg.decay_rate * delta);
      T hd = ops.scale(h, decay);
      T cd = cfg.decay_cell_state ? ops.scale(c, decay) : c;
      auto [nh, nc] = lstm_cell(ops, w.lstm, x, hd, cd);
      h = nh;
      c = nc;
      break;
    }
    case CellVariant::MLstm: {
      T df = ops.constant(delta_features(delta / cfg.nominal_period, cfg.tau));
      auto [nh, nc] = mlstm_cell(ops, w.lstm, w.tg, x, df, h, c);
      h = nh;
      c = nc;
      break;
    }
    case CellVariant::MRnn: {
      T df = ops.constant(delta_features(delta / cfg.nominal_period, cfg.tau));
      h = mrnn_cell(ops, w.rnn, x, df, h);
      break;
    }
    case CellVariant::MGru: {
      T df = ops.constant(delta_features(delta / cfg.nominal_period, cfg.tau));
      h = mgru_cell(ops, w.gru, x, df, h, ones);
      break;
    }
  }
}

}  // namespace detail

template <class Ops, class T = typename Ops::Value>
EncodeOut<Ops> run_encoder(Ops& ops, const EncoderConfig& cfg, const EncoderWeights<T>& w,
                           const IrregularSequence& seq, Pooling pooling) {
  seq.validate();
  if (seq.dim() != cfg.input_dim) {
    throw ShapeError(cat("encode: sequence '", seq.id, "' has dim ", seq.dim(), ", encoder expects ",
                         cfg.input_dim));
  }
  const int K = seq.length();
  const int p = cfg.state_dim;
  const bool has_cell = cfg.variant != CellVariant::MRnn && cfg.variant != CellVariant::MGru;

  EncodeOut<Ops> out;
  out.states.reserve(K);
  if (has_cell) out.cells.reserve(K);

  T zero = ops.constant(Mat::Zero(p, 1));
  T ones = ops.constant(Mat::Ones(p, 1));
  T h = zero;
  T c = zero;
  for (int k = 0; k < K; ++k) {
    // The paper leaves the very first gap undefined; use the nominal period.
    const double delta =
        k == 0 ? cfg.nominal_period : seq.timestamps[k] - seq.timestamps[k - 1];
    T x = ops.constant(seq.values.row(k).transpose());
    try {
      detail::encoder_step(ops, cfg, w, x, delta, h, c, ones);
    } catch (const NumericError& e) {
      throw NumericError(cat("encode: sequence '", seq.id, "' step ", k + 1, ": ", e.what()));
    }
    out.states.push_back(h);
    if (has_cell) out.cells.push_back(c);
  }

  if (pooling == Pooling::Last) {
    out.pooled = out.states.back();
  } else {
    T acc = out.states[0];
    for (int k = 1; k < K; ++k) acc = ops.add(acc, out.states[k]);
    out.pooled = ops.scale(acc, 1.0 / static_cast<double>(K));
  }
  return out;
}

}  // namespace tsad
