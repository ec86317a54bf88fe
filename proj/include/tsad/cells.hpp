#pragma once

#include <utility>

#include "tsad/tensor.hpp"

namespace tsad {

// ---------------------------------------------------------------------------
// Weight bundles, templated on the value type so the same cell equations run
// directly on matrices (EigenOps) or record a differentiable graph (TapeOps).
// The visit() order is the canonical parameter order used by updates,
// checkpoints and gradient plumbing.
// ---------------------------------------------------------------------------

template <class T>
struct LstmWeights {
  T w_fx, w_ix, w_gx, w_ox;  // input weights, p x M'
  T w_fh, w_ih, w_gh, w_oh;  // recurrent weights, p x p
  T b_f, b_i, b_g, b_o;      // biases, p x 1

  template <class F>
  void visit(F&& f) {
    f("w_fx", w_fx); f("w_ix", w_ix); f("w_gx", w_gx); f("w_ox", w_ox);
    f("w_fh", w_fh); f("w_ih", w_ih); f("w_gh", w_gh); f("w_oh", w_oh);
    f("b_f", b_f); f("b_i", b_i); f("b_g", b_g); f("b_o", b_o);
  }
};

// Per-gate time modulation weights, p x (tau + 1).
template <class T>
struct TimeGateWeights {
  T w_ft, w_it, w_ot;

  template <class F>
  void visit(F&& f) {
    f("w_ft", w_ft); f("w_it", w_it); f("w_ot", w_ot);
  }
};

template <class T>
struct RnnWeights {
  T w_x, w_h, b;  // p x M, p x p, p x 1
  T w_t;          // modulation, p x (tau + 1)

  template <class F>
  void visit(F&& f) {
    f("w_x", w_x); f("w_h", w_h); f("b", b); f("w_t", w_t);
  }
};

template <class T>
struct GruWeights {
  T w_zx, w_zh, b_z;  // update gate
  T w_rx, w_rh, b_r;  // reset gate
  T w_hh, w_hx;       // candidate state (no bias)
  T w_ht, w_it;       // modulation for the carry and update paths

  template <class F>
  void visit(F&& f) {
    f("w_zx", w_zx); f("w_zh", w_zh); f("b_z", b_z);
    f("w_rx", w_rx); f("w_rh", w_rh); f("b_r", b_r);
    f("w_hh", w_hh); f("w_hx", w_hx);
    f("w_ht", w_ht); f("w_it", w_it);
  }
};

// ---------------------------------------------------------------------------
// Cell equations.
// ---------------------------------------------------------------------------

template <class Ops, class T = typename Ops::Value>
std::pair<T, T> lstm_cell(Ops& ops, const LstmWeights<T>& w, const T& x, const T& h_prev,
                          const T& c_prev) {
  auto gate = [&](const T& wx, const T& wh, const T& b) {
    return ops.add(ops.add(ops.matmul(wx, x), ops.matmul(wh, h_prev)), b);
  };
  T f = ops.sigmoid(gate(w.w_fx, w.w_fh, w.b_f));
  T i = ops.sigmoid(gate(w.w_ix, w.w_ih, w.b_i));
  T g = ops.tanh(gate(w.w_gx, w.w_gh, w.b_g));
  T o = ops.sigmoid(gate(w.w_ox, w.w_oh, w.b_o));
  T c = ops.add(ops.mul(c_prev, f), ops.mul(g, i));
  T h = ops.mul(ops.tanh(c), o);
  return {h, c};
}

// Time-modulated LSTM: each gate product additionally carries a learned gate
// sigma(W_t * dfeat), where dfeat is the vector of powers of the step gap.
template <class Ops, class T = typename Ops::Value>
std::pair<T, T> mlstm_cell(Ops& ops, const LstmWeights<T>& w, const TimeGateWeights<T>& tg,
                           const T& x, const T& dfeat, const T& h_prev, const T& c_prev) {
  auto gate = [&](const T& wx, const T& wh, const T& b) {
    return ops.add(ops.add(ops.matmul(wx, x), ops.matmul(wh, h_prev)), b);
  };
  T f = ops.sigmoid(gate(w.w_fx, w.w_fh, w.b_f));
  T i = ops.sigmoid(gate(w.w_ix, w.w_ih, w.b_i));
  T g = ops.tanh(gate(w.w_gx, w.w_gh, w.b_g));
  T o = ops.sigmoid(gate(w.w_ox, w.w_oh, w.b_o));
  T tf = ops.sigmoid(ops.matmul(tg.w_ft, dfeat));
  T ti = ops.sigmoid(ops.matmul(tg.w_it, dfeat));
  T to = ops.sigmoid(ops.matmul(tg.w_ot, dfeat));
  T c = ops.add(ops.mul(ops.mul(c_prev, f), tf), ops.mul(ops.mul(g, i), ti));
  T h = ops.mul(ops.mul(ops.tanh(c), o), to);
  return {h, c};
}

template <class Ops, class T = typename Ops::Value>
T mrnn_cell(Ops& ops, const RnnWeights<T>& w, const T& x, const T& dfeat, const T& h_prev) {
  T pre = ops.add(ops.add(ops.matmul(w.w_x, x), ops.matmul(w.w_h, h_prev)), w.b);
  T mod = ops.sigmoid(ops.matmul(w.w_t, dfeat));
  return ops.mul(ops.tanh(pre), mod);
}

template <class Ops, class T = typename Ops::Value>
T mgru_cell(Ops& ops, const GruWeights<T>& w, const T& x, const T& dfeat, const T& h_prev,
            const T& ones) {
  auto gate = [&](const T& wx, const T& wh, const T& b) {
    return ops.sigmoid(ops.add(ops.add(ops.matmul(wx, x), ops.matmul(wh, h_prev)), b));
  };
  T z = gate(w.w_zx, w.w_zh, w.b_z);
  T r = gate(w.w_rx, w.w_rh, w.b_r);
  T cand = ops.tanh(ops.add(ops.matmul(w.w_hh, ops.mul(r, h_prev)), ops.matmul(w.w_hx, x)));
  T th = ops.sigmoid(ops.matmul(w.w_ht, dfeat));
  T tu = ops.sigmoid(ops.matmul(w.w_it, dfeat));
  T carry = ops.mul(ops.mul(ops.add(ones, ops.scale(z, -1.0)), h_prev), th);
  T update = ops.mul(ops.mul(z, cand), tu);
  return ops.add(carry, update);
}

}  // namespace tsad
