#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <tsad/encoder.hpp>
#include <tsad/rng.hpp>

using namespace tsad;

namespace {

Mat random_mat(Eigen::Index r, Eigen::Index c, Rng& rng, double bound = 0.8) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(-bound, bound);
  return m;
}

EncoderParams make_params(CellVariant v, int p, int m, int tau, Rng& rng, double gamma = 0.1,
                          double period = 1.0) {
  EncoderConfig cfg;
  cfg.variant = v;
  cfg.state_dim = p;
  cfg.input_dim = m;
  cfg.tau = tau;
  cfg.decay_rate = gamma;
  cfg.nominal_period = period;
  return EncoderParams::init(cfg, rng);
}

void zero_params(EncoderParams& params) {
  params.visit_params([](const std::string&, Mat& m) { m.setZero(); });
}

IrregularSequence make_seq(const std::vector<double>& ts, const Mat& values) {
  IrregularSequence s;
  s.id = "t";
  s.timestamps = ts;
  s.values = values;
  return s;
}

// ---------------------------------------------------------------------------
// Straight-line re-evaluations of the cell equations: scalar loops, no tape,
// no shared helpers. These are the oracles the library implementations are
// held to, entrywise at 1e-12.
// ---------------------------------------------------------------------------

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Mat affine(const Mat& wx, const Mat& x, const Mat& wh, const Mat& h, const Mat& b) {
  const int p = static_cast<int>(b.rows());
  Mat out(p, 1);
  for (int r = 0; r < p; ++r) {
    double a = b(r, 0);
    for (int j = 0; j < wx.cols(); ++j) a += wx(r, j) * x(j, 0);
    for (int j = 0; j < wh.cols(); ++j) a += wh(r, j) * h(j, 0);
    out(r, 0) = a;
  }
  return out;
}

std::pair<Mat, Mat> oracle_lstm(const LstmWeights<Mat>& w, const Mat& x, const Mat& h0,
                                const Mat& c0) {
  const int p = static_cast<int>(w.b_f.rows());
  Mat f = affine(w.w_fx, x, w.w_fh, h0, w.b_f);
  Mat i = affine(w.w_ix, x, w.w_ih, h0, w.b_i);
  Mat g = affine(w.w_gx, x, w.w_gh, h0, w.b_g);
  Mat o = affine(w.w_ox, x, w.w_oh, h0, w.b_o);
  Mat c(p, 1), h(p, 1);
  for (int r = 0; r < p; ++r) {
    c(r, 0) = c0(r, 0) * sig(f(r, 0)) + std::tanh(g(r, 0)) * sig(i(r, 0));
    h(r, 0) = std::tanh(c(r, 0)) * sig(o(r, 0));
  }
  return {h, c};
}

Mat oracle_powers(double delta, int tau) {
  Mat out(tau + 1, 1);
  for (int m = 0; m <= tau; ++m) out(m, 0) = std::pow(delta, m);
  if (delta == 0.0) out(0, 0) = 1.0;
  return out;
}

std::pair<Mat, Mat> oracle_mlstm(const LstmWeights<Mat>& w, const TimeGateWeights<Mat>& tg,
                                 const Mat& x, double delta_norm, int tau, const Mat& h0,
                                 const Mat& c0) {
  const int p = static_cast<int>(w.b_f.rows());
  Mat df = oracle_powers(delta_norm, tau);
  Mat f = affine(w.w_fx, x, w.w_fh, h0, w.b_f);
  Mat i = affine(w.w_ix, x, w.w_ih, h0, w.b_i);
  Mat g = affine(w.w_gx, x, w.w_gh, h0, w.b_g);
  Mat o = affine(w.w_ox, x, w.w_oh, h0, w.b_o);
  Mat c(p, 1), h(p, 1);
  for (int r = 0; r < p; ++r) {
    double tf = 0.0, ti = 0.0, to = 0.0;
    for (int j = 0; j <= tau; ++j) {
      tf += tg.w_ft(r, j) * df(j, 0);
      ti += tg.w_it(r, j) * df(j, 0);
      to += tg.w_ot(r, j) * df(j, 0);
    }
    c(r, 0) = c0(r, 0) * sig(f(r, 0)) * sig(tf) + std::tanh(g(r, 0)) * sig(i(r, 0)) * sig(ti);
    h(r, 0) = std::tanh(c(r, 0)) * sig(o(r, 0)) * sig(to);
  }
  return {h, c};
}

Mat oracle_mrnn(const RnnWeights<Mat>& w, const Mat& x, double delta_norm, int tau, const Mat& h0) {
  const int p = static_cast<int>(w.b.rows());
  Mat df = oracle_powers(delta_norm, tau);
  Mat pre = affine(w.w_x, x, w.w_h, h0, w.b);
  Mat h(p, 1);
  for (int r = 0; r < p; ++r) {
    double m = 0.0;
    for (int j = 0; j <= tau; ++j) m += w.w_t(r, j) * df(j, 0);
    h(r, 0) = std::tanh(pre(r, 0)) * sig(m);
  }
  return h;
}

Mat oracle_mgru(const GruWeights<Mat>& w, const Mat& x, double delta_norm, int tau, const Mat& h0) {
  const int p = static_cast<int>(w.b_z.rows());
  Mat df = oracle_powers(delta_norm, tau);
  Mat z = affine(w.w_zx, x, w.w_zh, h0, w.b_z);
  Mat r = affine(w.w_rx, x, w.w_rh, h0, w.b_r);
  Mat h(p, 1);
  Mat rh(p, 1);
  for (int k = 0; k < p; ++k) rh(k, 0) = sig(r(k, 0)) * h0(k, 0);
  for (int k = 0; k < p; ++k) {
    double cand = 0.0;
    for (int j = 0; j < p; ++j) cand += w.w_hh(k, j) * rh(j, 0);
    for (int j = 0; j < w.w_hx.cols(); ++j) cand += w.w_hx(k, j) * x(j, 0);
    double th = 0.0, tu = 0.0;
    for (int j = 0; j <= tau; ++j) {
      th += w.w_ht(k, j) * df(j, 0);
      tu += w.w_it(k, j) * df(j, 0);
    }
    const double zk = sig(z(k, 0));
    h(k, 0) = (1.0 - zk) * h0(k, 0) * sig(th) + zk * std::tanh(cand) * sig(tu);
  }
  return h;
}

}  // namespace

TEST_CASE("delta_features returns the gap powers") {
  Vec f = delta_features(2.0, 3);
  REQUIRE(f.rows() == 4);
  CHECK(f(0, 0) == 1.0);
  CHECK(f(1, 0) == 2.0);
  CHECK(f(2, 0) == 4.0);
  CHECK(f(3, 0) == 8.0);

  Vec z = delta_features(0.0, 5);
  REQUIRE(z.rows() == 6);
  CHECK(z(0, 0) == 1.0);  // 0^0 defined as 1
  for (int m = 1; m <= 5; ++m) CHECK(z(m, 0) == 0.0);

  Vec half = delta_features(0.5, 10);
  REQUIRE(half.rows() == 11);
  CHECK(half(10, 0) == doctest::Approx(9.765625e-4).epsilon(1e-12));

  CHECK_THROWS_AS(delta_features(-0.1, 3), Error);
}

TEST_CASE("lstm_step with zero parameters") {
  Rng rng(1);
  EncoderParams params = make_params(CellVariant::Lstm, 3, 2, 0, rng);
  zero_params(params);
  Mat x = random_mat(2, 1, rng);
  Mat zero = Mat::Zero(3, 1);

  auto [h, c] = lstm_step(params, x, zero, zero);
  CHECK(h.isZero(0));
  CHECK(c.isZero(0));

  // f = i = o = 0.5, g = 0: c = 0.5 c_prev, h = tanh(0.5 c_prev) * 0.5.
  Mat ones = Mat::Ones(3, 1);
  auto [h1, c1] = lstm_step(params, x, zero, ones);
  for (int r = 0; r < 3; ++r) {
    CHECK(c1(r, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(h1(r, 0) == doctest::Approx(std::tanh(0.5) * 0.5).epsilon(1e-9));
    CHECK(h1(r, 0) == doctest::Approx(0.2311).epsilon(1e-3));
  }
}

TEST_CASE("lstm_step matches the straight-line oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    EncoderParams params = make_params(CellVariant::Lstm, 2, 1, 0, rng);
    params.visit_params([&](const std::string&, Mat& m) { m = random_mat(m.rows(), m.cols(), rng); });
    Mat x = random_mat(1, 1, rng);
    Mat h0 = random_mat(2, 1, rng);
    Mat c0 = random_mat(2, 1, rng);
    auto [h, c] = lstm_step(params, x, h0, c0);
    auto [oh, oc] = oracle_lstm(params.weights.lstm, x, h0, c0);
    for (int r = 0; r < 2; ++r) {
      CHECK(h(r, 0) == doctest::Approx(oh(r, 0)).epsilon(1e-12));
      CHECK(c(r, 0) == doctest::Approx(oc(r, 0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("alstm_step feeds the gap as an extra input column") {
  Rng rng(3);
  EncoderParams params = make_params(CellVariant::ALstm, 3, 2, 0, rng);

  SUBCASE("zero gap with zero gap-column weights reduces to the plain cell") {
    auto zero_gap_col = [&](Mat& m) { m.col(2).setZero(); };
    zero_gap_col(params.weights.lstm.w_fx);
    zero_gap_col(params.weights.lstm.w_ix);
    zero_gap_col(params.weights.lstm.w_gx);
    zero_gap_col(params.weights.lstm.w_ox);

    EncoderParams plain = make_params(CellVariant::Lstm, 3, 2, 0, rng);
    plain.weights.lstm = params.weights.lstm;
    plain.weights.lstm.w_fx = params.weights.lstm.w_fx.leftCols(2);
    plain.weights.lstm.w_ix = params.weights.lstm.w_ix.leftCols(2);
    plain.weights.lstm.w_gx = params.weights.lstm.w_gx.leftCols(2);
    plain.weights.lstm.w_ox = params.weights.lstm.w_ox.leftCols(2);

    Mat x = random_mat(2, 1, rng);
    Mat h0 = random_mat(3, 1, rng);
    Mat c0 = random_mat(3, 1, rng);
    auto [ha, ca] = alstm_step(params, x, 0.0, h0, c0);
    auto [hl, cl] = lstm_step(plain, x, h0, c0);
    CHECK((ha - hl).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ca - cl).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("zero parameters give zero state for any gap") {
    zero_params(params);
    Mat x = random_mat(2, 1, rng);
    Mat zero = Mat::Zero(3, 1);
    for (double delta : {0.0, 1.0, 17.5}) {
      auto [h, c] = alstm_step(params, x, delta, zero, zero);
      CHECK(h.isZero(0));
      CHECK(c.isZero(0));
    }
  }

  SUBCASE("random parameters match the oracle on the augmented input") {
    for (int trial = 0; trial < 10; ++trial) {
      EncoderParams p = make_params(CellVariant::ALstm, 2, 1, 0, rng);
      Mat x = random_mat(1, 1, rng);
      Mat h0 = random_mat(2, 1, rng);
      Mat c0 = random_mat(2, 1, rng);
      const double delta = rng.uniform(0.0, 3.0);
      Mat aug(2, 1);
      aug << x(0, 0), delta;
      auto [h, c] = alstm_step(p, x, delta, h0, c0);
      auto [oh, oc] = oracle_lstm(p.weights.lstm, aug, h0, c0);
      CHECK((h - oh).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((c - oc).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("dlstm_step decays the previous state before gating") {
  Rng rng(4);

  SUBCASE("zero gap means no decay: identical to the plain cell") {
    EncoderParams params = make_params(CellVariant::DLstm, 3, 2, 0, rng);
    Mat x = random_mat(2, 1, rng);
    Mat h0 = random_mat(3, 1, rng);
    Mat c0 = random_mat(3, 1, rng);
    auto [hd, cd] = dlstm_step(params, x, 0.0, h0, c0);
    auto [hl, cl] = lstm_step(params, x, h0, c0);
    CHECK((hd - hl).cwiseAbs().maxCoeff() == 0.0);
    CHECK((cd - cl).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("gamma=0.1, gap=10 shrinks h_prev by e^-1 before the gates") {
    // Route the decayed state through the candidate gate where it is visible.
    EncoderParams params = make_params(CellVariant::DLstm, 1, 1, 0, rng);
    zero_params(params);
    params.weights.lstm.w_gh(0, 0) = 1.0;
    params.weights.lstm.b_i(0, 0) = 100.0;  // input gate ~ 1
    Mat x = Mat::Zero(1, 1), h0 = Mat::Ones(1, 1), c0 = Mat::Zero(1, 1);
    auto [h, c] = dlstm_step(params, x, 10.0, h0, c0);
    const double decayed = std::exp(-1.0);
    CHECK(decayed == doctest::Approx(0.36788).epsilon(1e-4));
    CHECK(c(0, 0) == doctest::Approx(std::tanh(decayed) * sig(100.0)).epsilon(1e-12));
    (void)h;
  }

  SUBCASE("random parameters match a straight-line oracle") {
    for (int trial = 0; trial < 10; ++trial) {
      EncoderParams p = make_params(CellVariant::DLstm, 2, 1, 0, rng, 0.3);
      Mat x = random_mat(1, 1, rng);
      Mat h0 = random_mat(2, 1, rng);
      Mat c0 = random_mat(2, 1, rng);
      const double delta = rng.uniform(0.0, 5.0);
      auto [h, c] = dlstm_step(p, x, delta, h0, c0);
      Mat h0d = h0 * std::exp(-0.3 * delta);
      auto [oh, oc] = oracle_lstm(p.weights.lstm, x, h0d, c0);  // default: h decays, c does not
      CHECK((h - oh).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((c - oc).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  SUBCASE("the cell-state decay flag also shrinks c_prev") {
    EncoderParams p = make_params(CellVariant::DLstm, 2, 1, 0, rng, 0.3);
    p.cfg.decay_cell_state = true;
    Mat x = random_mat(1, 1, rng);
    Mat h0 = random_mat(2, 1, rng);
    Mat c0 = random_mat(2, 1, rng);
    auto [h, c] = dlstm_step(p, x, 2.0, h0, c0);
    const double d = std::exp(-0.3 * 2.0);
    auto [oh, oc] = oracle_lstm(p.weights.lstm, x, Mat(h0 * d), Mat(c0 * d));
    CHECK((h - oh).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((c - oc).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("mlstm_step applies learned time gates") {
  Rng rng(5);

  SUBCASE("zero modulation weights halve every gate product") {
    EncoderParams params = make_params(CellVariant::MLstm, 3, 2, 2, rng);
    params.weights.tg.w_ft.setZero();
    params.weights.tg.w_it.setZero();
    params.weights.tg.w_ot.setZero();
    Mat x = random_mat(2, 1, rng);
    Mat h0 = random_mat(3, 1, rng);
    Mat c0 = random_mat(3, 1, rng);
    auto [hm, cm] = mlstm_step(params, x, 0.7, h0, c0);

    // Expected: the plain gates with each product scaled by sigma(0) = 0.5.
    Mat f = affine(params.weights.lstm.w_fx, x, params.weights.lstm.w_fh, h0, params.weights.lstm.b_f);
    Mat i = affine(params.weights.lstm.w_ix, x, params.weights.lstm.w_ih, h0, params.weights.lstm.b_i);
    Mat g = affine(params.weights.lstm.w_gx, x, params.weights.lstm.w_gh, h0, params.weights.lstm.b_g);
    Mat o = affine(params.weights.lstm.w_ox, x, params.weights.lstm.w_oh, h0, params.weights.lstm.b_o);
    for (int r = 0; r < 3; ++r) {
      const double ce = 0.5 * c0(r, 0) * sig(f(r, 0)) + 0.5 * std::tanh(g(r, 0)) * sig(i(r, 0));
      CHECK(cm(r, 0) == doctest::Approx(ce).epsilon(1e-12));
      CHECK(hm(r, 0) == doctest::Approx(0.5 * std::tanh(ce) * sig(o(r, 0))).epsilon(1e-12));
    }
  }

  SUBCASE("all parameters zero give zero state") {
    EncoderParams params = make_params(CellVariant::MLstm, 3, 2, 2, rng);
    zero_params(params);
    auto [h, c] = mlstm_step(params, random_mat(2, 1, rng), 1.3, Mat::Zero(3, 1), Mat::Zero(3, 1));
    CHECK(h.isZero(0));
    CHECK(c.isZero(0));
  }

  SUBCASE("random parameters, gap 0.5, tau 2 match the oracle") {
    for (int trial = 0; trial < 10; ++trial) {
      EncoderParams p = make_params(CellVariant::MLstm, 2, 1, 2, rng);
      Mat x = random_mat(1, 1, rng);
      Mat h0 = random_mat(2, 1, rng);
      Mat c0 = random_mat(2, 1, rng);
      auto [h, c] = mlstm_step(p, x, 0.5, h0, c0);
      auto [oh, oc] = oracle_mlstm(p.weights.lstm, p.weights.tg, x, 0.5, 2, h0, c0);
      CHECK((h - oh).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((c - oc).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("mrnn_step and mgru_step follow the modulated update equations") {
  Rng rng(6);

  SUBCASE("zero-weight M-RNN returns zero") {
    EncoderParams p = make_params(CellVariant::MRnn, 3, 2, 1, rng);
    zero_params(p);
    Vec h = mrnn_step(p, random_mat(2, 1, rng), 0.9, random_mat(3, 1, rng));
    CHECK(h.isZero(0));
  }

  SUBCASE("zero-weight M-GRU keeps a quarter of the previous state") {
    // z = r = 0.5, candidate = 0, carry gate = 0.5: h = 0.25 h_prev.
    EncoderParams p = make_params(CellVariant::MGru, 2, 1, 1, rng);
    zero_params(p);
    Mat h0(2, 1);
    h0 << 0.8, -0.4;
    Vec h = mgru_step(p, Mat::Zero(1, 1), 2.0, h0);
    CHECK(h(0, 0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(h(1, 0) == doctest::Approx(-0.1).epsilon(1e-12));
  }

  SUBCASE("random parameters match the oracles") {
    for (int trial = 0; trial < 10; ++trial) {
      EncoderParams pr = make_params(CellVariant::MRnn, 2, 2, 2, rng);
      Mat x = random_mat(2, 1, rng);
      Mat h0 = random_mat(2, 1, rng);
      const double delta = rng.uniform(0.0, 2.0);
      Vec h = mrnn_step(pr, x, delta, h0);
      Mat oh = oracle_mrnn(pr.weights.rnn, x, delta, 2, h0);
      CHECK((h - oh).cwiseAbs().maxCoeff() < 1e-12);

      EncoderParams pg = make_params(CellVariant::MGru, 2, 2, 2, rng);
      Vec hg = mgru_step(pg, x, delta, h0);
      Mat og = oracle_mgru(pg.weights.gru, x, delta, 2, h0);
      CHECK((hg - og).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("encode iterates the cell and pools the states") {
  Rng rng(7);

  SUBCASE("length-2 sequence with zero weights pools to zero either way") {
    EncoderParams p = make_params(CellVariant::Lstm, 3, 1, 0, rng);
    zero_params(p);
    auto seq = make_seq({0.0, 1.0}, random_mat(2, 1, rng));
    CHECK(encode(p, seq, Pooling::Last).pooled.isZero(0));
    CHECK(encode(p, seq, Pooling::Mean).pooled.isZero(0));
  }

  SUBCASE("mean pooling averages the states, last pooling takes the final one") {
    EncoderParams p = make_params(CellVariant::MLstm, 3, 2, 2, rng);
    auto seq = make_seq({0.0, 0.4, 1.7, 2.0}, random_mat(4, 2, rng));
    auto last = encode(p, seq, Pooling::Last);
    auto mean = encode(p, seq, Pooling::Mean);
    REQUIRE(last.states.size() == 4);
    REQUIRE(last.cells.size() == 4);
    CHECK((last.pooled - last.states.back()).cwiseAbs().maxCoeff() == 0.0);
    Mat avg = (mean.states[0] + mean.states[1] + mean.states[2] + mean.states[3]) / 4.0;
    CHECK((mean.pooled - avg).cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("sequences shorter than 2 are rejected") {
    EncoderParams p = make_params(CellVariant::Lstm, 2, 1, 0, rng);
    auto seq = make_seq({0.0}, Mat::Ones(1, 1));
    CHECK_THROWS_AS(encode(p, seq, Pooling::Last), DataError);
  }

  SUBCASE("shifting every timestamp by a constant changes nothing") {
    // Dyadic timestamps so the shifted differences are bit-identical.
    for (CellVariant v : {CellVariant::ALstm, CellVariant::DLstm, CellVariant::MLstm,
                          CellVariant::MRnn, CellVariant::MGru}) {
      EncoderParams p = make_params(v, 3, 2, 2, rng);
      Mat values = random_mat(5, 2, rng);
      auto seq = make_seq({0.0, 0.25, 1.0, 1.5, 4.0}, values);
      auto shifted = make_seq({128.0, 128.25, 129.0, 129.5, 132.0}, values);
      Mat a = encode(p, seq, Pooling::Mean).pooled;
      Mat b = encode(p, shifted, Pooling::Mean).pooled;
      CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("D-LSTM with vanishing gaps equals the plain LSTM exactly") {
    EncoderParams d = make_params(CellVariant::DLstm, 3, 2, 0, rng);
    EncoderParams l = make_params(CellVariant::Lstm, 3, 2, 0, rng);
    l.weights.lstm = d.weights.lstm;
    Mat values = random_mat(4, 2, rng);
    // Gaps so small that exp(-gamma * gap) rounds to exactly 1.
    auto seq = make_seq({1e-300, 2e-300, 3e-300, 4e-300}, values);
    Mat hd = encode(d, seq, Pooling::Last).pooled;
    Mat hl = encode(l, seq, Pooling::Last).pooled;
    CHECK((hd - hl).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("state entries stay inside (-1, 1) for the LSTM family") {
    for (CellVariant v : {CellVariant::Lstm, CellVariant::ALstm, CellVariant::DLstm,
                          CellVariant::MLstm}) {
      EncoderParams p = make_params(v, 4, 2, 2, rng);
      auto seq = make_seq({0.0, 0.5, 2.0, 2.1, 3.7, 9.0}, random_mat(6, 2, rng));
      auto enc = encode(p, seq, Pooling::Mean);
      for (const Vec& h : enc.states) {
        CHECK(h.cwiseAbs().maxCoeff() < 1.0);
      }
    }
  }

  SUBCASE("dimension mismatches are rejected") {
    EncoderParams p = make_params(CellVariant::Lstm, 2, 3, 0, rng);
    auto seq = make_seq({0.0, 1.0}, Mat::Ones(2, 2));
    CHECK_THROWS_AS(encode(p, seq, Pooling::Last), ShapeError);
  }
}

TEST_CASE("parameter initialization follows the stated scheme") {
  Rng rng(8);
  EncoderParams p = make_params(CellVariant::MLstm, 16, 3, 4, rng);
  const double bound = 1.0 / 4.0;  // 1/sqrt(16)
  CHECK(p.weights.lstm.w_fx.cwiseAbs().maxCoeff() <= bound);
  CHECK(p.weights.lstm.w_oh.cwiseAbs().maxCoeff() <= bound);
  CHECK((p.weights.lstm.b_f.array() == 1.0).all());
  CHECK(p.weights.lstm.b_i.isZero(0));
  CHECK(p.weights.tg.w_ft.rows() == 16);
  CHECK(p.weights.tg.w_ft.cols() == 5);  // tau + 1 gap features
}
