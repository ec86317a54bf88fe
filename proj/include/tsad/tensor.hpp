#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "tsad/errors.hpp"

namespace tsad {

// All numerics run in 64-bit floats; gradient checks at 1e-4 are not
// reliable in 32-bit.
using Scalar = double;

// Tensors are rank <= 2, row-major, dynamically sized. Vectors are n x 1.
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Mat;

inline std::string shape_str(const Mat& m) {
  return cat(m.rows(), "x", m.cols());
}

inline Mat scalar_mat(Scalar v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return m;
}

inline void require_finite(const Mat& m, const char* where) {
  if (!m.allFinite()) {
    throw NumericError(cat(where, ": non-finite value in ", shape_str(m), " tensor"));
  }
}

// ---------------------------------------------------------------------------
// Scalar kernels. The tape and the direct Eigen path share these so that the
// two evaluation routes agree bit-for-bit.
// ---------------------------------------------------------------------------

inline Scalar sigmoid_s(Scalar z) { return 1.0 / (1.0 + std::exp(-z)); }

inline Scalar tanh_s(Scalar z) { return std::tanh(z); }

inline Scalar relu_s(Scalar z) { return z > 0.0 ? z : 0.0; }

// psi(z; beta) = (1/beta) log(1 + exp(beta z)), computed as
// max(z, 0) + (1/beta) log1p(exp(-beta |z|)) so beta = 100 cannot overflow.
inline Scalar softplus_s(Scalar z, Scalar beta) {
  return (z > 0.0 ? z : 0.0) + std::log1p(std::exp(-beta * std::abs(z))) / beta;
}

// x^m for integer m >= 0 by repeated multiplication; powi(0, 0) == 1.
inline Scalar powi(Scalar x, int m) {
  Scalar r = 1.0;
  for (int i = 0; i < m; ++i) r *= x;
  return r;
}

// ---------------------------------------------------------------------------
// EigenOps: the immediate-evaluation context. Model equations are written as
// free functions templated on an ops context; instantiating them with
// EigenOps evaluates directly, instantiating with TapeOps (autodiff.hpp)
// records a differentiable graph.
// ---------------------------------------------------------------------------

struct EigenOps {
  using Value = Mat;

  Mat constant(const Mat& m) { return m; }

  Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) {
      throw ShapeError(cat("matmul: inner dimensions differ: ", shape_str(a), " * ", shape_str(b)));
    }
    return a * b;
  }

  Mat add(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
      throw ShapeError(cat("add: shape mismatch: ", shape_str(a), " vs ", shape_str(b)));
    }
    return a + b;
  }

  Mat mul(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
      throw ShapeError(cat("mul: shape mismatch: ", shape_str(a), " vs ", shape_str(b)));
    }
    return a.cwiseProduct(b);
  }

  Mat sigmoid(const Mat& a) { return a.unaryExpr([](Scalar z) { return sigmoid_s(z); }); }
  Mat tanh(const Mat& a) { return a.unaryExpr([](Scalar z) { return tanh_s(z); }); }
  Mat relu(const Mat& a) { return a.unaryExpr([](Scalar z) { return relu_s(z); }); }

  Mat softplus(const Mat& a, Scalar beta) {
    if (!(beta > 0.0)) throw Error(cat("softplus: beta must be positive, got ", beta));
    return a.unaryExpr([beta](Scalar z) { return softplus_s(z, beta); });
  }

  Mat square(const Mat& a) { return a.cwiseProduct(a); }

  Mat sum(const Mat& a) { return scalar_mat(a.sum()); }

  Mat scale(const Mat& a, Scalar k) { return a * k; }

  Mat concat(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) {
      throw ShapeError(cat("concat: column counts differ: ", shape_str(a), " vs ", shape_str(b)));
    }
    Mat out(a.rows() + b.rows(), a.cols());
    out.topRows(a.rows()) = a;
    out.bottomRows(b.rows()) = b;
    return out;
  }

  Mat power(const Mat& a, int m) {
    if (m < 0) throw Error(cat("power: exponent must be >= 0, got ", m));
    return a.unaryExpr([m](Scalar z) { return powi(z, m); });
  }
};

}  // namespace tsad
