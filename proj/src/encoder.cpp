#include "tsad/encoder.hpp"

namespace tsad {

std::string to_string(CellVariant v) {
  switch (v) {
    case CellVariant::Lstm: return "LSTM";
    case CellVariant::ALstm: return "A-LSTM";
    case CellVariant::DLstm: return "D-LSTM";
    case CellVariant::MLstm: return "M-LSTM";
    case CellVariant::MRnn: return "M-RNN";
    case CellVariant::MGru: return "M-GRU";
  }
  return "?";
}

CellVariant cell_variant_from_string(const std::string& s) {
  if (s == "LSTM") return CellVariant::Lstm;
  if (s == "A-LSTM") return CellVariant::ALstm;
  if (s == "D-LSTM") return CellVariant::DLstm;
  if (s == "M-LSTM") return CellVariant::MLstm;
  if (s == "M-RNN") return CellVariant::MRnn;
  if (s == "M-GRU") return CellVariant::MGru;
  throw ConfigError(cat("unknown cell variant '", s,
                        "' (expected LSTM, A-LSTM, D-LSTM, M-LSTM, M-RNN or M-GRU)"));
}

std::string to_string(Pooling p) { return p == Pooling::Last ? "last" : "mean"; }

Pooling pooling_from_string(const std::string& s) {
  if (s == "last") return Pooling::Last;
  if (s == "mean") return Pooling::Mean;
  throw ConfigError(cat("unknown pooling '", s, "' (expected last or mean)"));
}

Vec delta_features(double delta, int tau) {
  if (delta < 0.0) {
    throw Error(cat("delta_features: gap must be >= 0 (timestamps increase), got ", delta));
  }
  if (tau < 0) throw Error(cat("delta_features: tau must be >= 0, got ", tau));
  Vec out(tau + 1, 1);
  double v = 1.0;  // delta^0, also for delta == 0
  for (int m = 0; m <= tau; ++m) {
    out(m, 0) = v;
    v *= delta;
  }
  return out;
}

namespace {

Mat uniform_mat(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
  }
  return m;
}

}  // namespace

EncoderParams EncoderParams::init(const EncoderConfig& cfg, Rng& rng) {
  if (cfg.state_dim < 1) throw ConfigError(cat("encoder: state dim must be >= 1, got ", cfg.state_dim));
  if (cfg.input_dim < 1) throw ConfigError(cat("encoder: input dim must be >= 1, got ", cfg.input_dim));
  if (cfg.tau < 0) throw ConfigError(cat("encoder: tau must be >= 0, got ", cfg.tau));
  if (cfg.variant == CellVariant::DLstm && !(cfg.decay_rate > 0.0)) {
    throw ConfigError(cat("encoder: D-LSTM needs decay rate > 0, got ", cfg.decay_rate));
  }
  if (!(cfg.nominal_period > 0.0)) {
    throw ConfigError(cat("encoder: nominal period must be > 0, got ", cfg.nominal_period));
  }

  EncoderParams out;
  out.cfg = cfg;
  const int p = cfg.state_dim;
  const int mx = cfg.gate_input_dim();
  const int td = cfg.tau + 1;
  const double bound = 1.0 / std::sqrt(static_cast<double>(p));

  auto w_in = [&] { return uniform_mat(p, mx, bound, rng); };
  auto w_rec = [&] { return uniform_mat(p, p, bound, rng); };
  // The first gap power is the constant 1, so column 0 acts as the bias of
  // the time gate. Starting it at 2 opens the gates (sigma ~ 0.88); at 0 they
  // would halve every gate product and cripple the cell's memory from the
  // first step.
  auto w_mod = [&] {
    Mat w = uniform_mat(p, td, bound, rng);
    w.col(0).array() += 2.0;
    return w;
  };
  auto b0 = [&] { return Mat::Zero(p, 1); };

  switch (cfg.variant) {
    case CellVariant::Lstm:
    case CellVariant::ALstm:
    case CellVariant::DLstm:
    case CellVariant::MLstm: {
      auto& l = out.weights.lstm;
      l.w_fx = w_in(); l.w_ix = w_in(); l.w_gx = w_in(); l.w_ox = w_in();
      l.w_fh = w_rec(); l.w_ih = w_rec(); l.w_gh = w_rec(); l.w_oh = w_rec();
      l.b_f = Mat::Ones(p, 1);  // start remembering
      l.b_i = b0(); l.b_g = b0(); l.b_o = b0();
      if (cfg.variant == CellVariant::MLstm) {
        out.weights.tg.w_ft = w_mod();
        out.weights.tg.w_it = w_mod();
        out.weights.tg.w_ot = w_mod();
      }
      break;
    }
    case CellVariant::MRnn: {
      auto& r = out.weights.rnn;
      r.w_x = w_in();
      r.w_h = w_rec();
      r.b = b0();
      r.w_t = w_mod();
      break;
    }
    case CellVariant::MGru: {
      auto& g = out.weights.gru;
      g.w_zx = w_in(); g.w_zh = w_rec(); g.b_z = b0();
      g.w_rx = w_in(); g.w_rh = w_rec(); g.b_r = b0();
      g.w_hh = w_rec(); g.w_hx = w_in();
      g.w_ht = w_mod(); g.w_it = w_mod();
      break;
    }
  }
  return out;
}

namespace {

EigenOps g_eigen_ops;

void expect_variant(const EncoderParams& params, CellVariant v, const char* op) {
  if (params.cfg.variant != v) {
    throw Error(cat(op, ": encoder is configured as ", to_string(params.cfg.variant)));
  }
}

}  // namespace

std::pair<Vec, Vec> lstm_step(const EncoderParams& params, const Vec& x, const Vec& h_prev,
                              const Vec& c_prev) {
  return lstm_cell(g_eigen_ops, params.weights.lstm, x, h_prev, c_prev);
}

std::pair<Vec, Vec> alstm_step(const EncoderParams& params, const Vec& x, double delta,
                               const Vec& h_prev, const Vec& c_prev) {
  expect_variant(params, CellVariant::ALstm, "alstm_step");
  Vec aug = g_eigen_ops.concat(x, scalar_mat(delta));
  return lstm_cell(g_eigen_ops, params.weights.lstm, aug, h_prev, c_prev);
}

std::pair<Vec, Vec> dlstm_step(const EncoderParams& params, const Vec& x, double delta,
                               const Vec& h_prev, const Vec& c_prev) {
  expect_variant(params, CellVariant::DLstm, "dlstm_step");
  if (delta < 0.0) throw Error(cat("dlstm_step: gap must be >= 0, got ", delta));
  const double decay = std::exp(-params.cfg.decay_rate * delta);
  Vec hd = h_prev * decay;
  Vec cd = params.cfg.decay_cell_state ? Vec(c_prev * decay) : c_prev;
  return lstm_cell(g_eigen_ops, params.weights.lstm, x, hd, cd);
}

std::pair<Vec, Vec> mlstm_step(const EncoderParams& params, const Vec& x, double delta,
                               const Vec& h_prev, const Vec& c_prev) {
  expect_variant(params, CellVariant::MLstm, "mlstm_step");
  Vec df = delta_features(delta / params.cfg.nominal_period, params.cfg.tau);
  return mlstm_cell(g_eigen_ops, params.weights.lstm, params.weights.tg, x, df, h_prev, c_prev);
}

Vec mrnn_step(const EncoderParams& params, const Vec& x, double delta, const Vec& h_prev) {
  expect_variant(params, CellVariant::MRnn, "mrnn_step");
  Vec df = delta_features(delta / params.cfg.nominal_period, params.cfg.tau);
  return mrnn_cell(g_eigen_ops, params.weights.rnn, x, df, h_prev);
}

Vec mgru_step(const EncoderParams& params, const Vec& x, double delta, const Vec& h_prev) {
  expect_variant(params, CellVariant::MGru, "mgru_step");
  Vec df = delta_features(delta / params.cfg.nominal_period, params.cfg.tau);
  Vec ones = Mat::Ones(params.cfg.state_dim, 1);
  return mgru_cell(g_eigen_ops, params.weights.gru, x, df, h_prev, ones);
}

EncodingResult encode(const EncoderParams& params, const IrregularSequence& seq, Pooling pooling) {
  EigenOps ops;
  EncodeOut<EigenOps> out = run_encoder(ops, params.cfg, params.weights, seq, pooling);
  EncodingResult res;
  res.states = std::move(out.states);
  res.cells = std::move(out.cells);
  res.pooled = std::move(out.pooled);
  return res;
}

}  // namespace tsad
