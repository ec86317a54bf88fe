#include "tsad/autodiff.hpp"

namespace tsad {

Var Tape::check(Var v, const char* op) const {
  if (!v.valid() || static_cast<size_t>(v.id) >= nodes_.size()) {
    throw Error(cat(op, ": operand is not a node on this tape"));
  }
  return v;
}

Var Tape::push(Node n, const char* op) {
  require_finite(n.value, op);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(const Mat& v) {
  Node n;
  n.op = Op::Leaf;
  n.value = v;
  return push(std::move(n), "leaf");
}

Var Tape::matmul(Var a, Var b) {
  check(a, "matmul");
  check(b, "matmul");
  const Mat& va = nodes_[a.id].value;
  const Mat& vb = nodes_[b.id].value;
  if (va.cols() != vb.rows()) {
    throw ShapeError(cat("matmul: inner dimensions differ: ", shape_str(va), " * ", shape_str(vb)));
  }
  Node n;
  n.op = Op::MatMul;
  n.a = a.id;
  n.b = b.id;
  n.value = va * vb;
  return push(std::move(n), "matmul");
}

Var Tape::add(Var a, Var b) {
  check(a, "add");
  check(b, "add");
  const Mat& va = nodes_[a.id].value;
  const Mat& vb = nodes_[b.id].value;
  if (va.rows() != vb.rows() || va.cols() != vb.cols()) {
    throw ShapeError(cat("add: shape mismatch: ", shape_str(va), " vs ", shape_str(vb)));
  }
  Node n;
  n.op = Op::Add;
  n.a = a.id;
  n.b = b.id;
  n.value = va + vb;
  return push(std::move(n), "add");
}

Var Tape::mul(Var a, Var b) {
  check(a, "mul");
  check(b, "mul");
  const Mat& va = nodes_[a.id].value;
  const Mat& vb = nodes_[b.id].value;
  if (va.rows() != vb.rows() || va.cols() != vb.cols()) {
    throw ShapeError(cat("mul: shape mismatch: ", shape_str(va), " vs ", shape_str(vb)));
  }
  Node n;
  n.op = Op::Mul;
  n.a = a.id;
  n.b = b.id;
  n.value = va.cwiseProduct(vb);
  return push(std::move(n), "mul");
}

Var Tape::sigmoid(Var a) {
  check(a, "sigmoid");
  Node n;
  n.op = Op::Sigmoid;
  n.a = a.id;
  n.value = nodes_[a.id].value.unaryExpr([](Scalar z) { return sigmoid_s(z); });
  return push(std::move(n), "sigmoid");
}

Var Tape::tanh(Var a) {
  check(a, "tanh");
  Node n;
  n.op = Op::Tanh;
  n.a = a.id;
  n.value = nodes_[a.id].value.unaryExpr([](Scalar z) { return tanh_s(z); });
  return push(std::move(n), "tanh");
}

Var Tape::relu(Var a) {
  check(a, "relu");
  Node n;
  n.op = Op::Relu;
  n.a = a.id;
  n.value = nodes_[a.id].value.unaryExpr([](Scalar z) { return relu_s(z); });
  return push(std::move(n), "relu");
}

Var Tape::softplus(Var a, Scalar beta) {
  check(a, "softplus");
  if (!(beta > 0.0)) throw Error(cat("softplus: beta must be positive, got ", beta));
  Node n;
  n.op = Op::Softplus;
  n.a = a.id;
  n.k = beta;
  n.value = nodes_[a.id].value.unaryExpr([beta](Scalar z) { return softplus_s(z, beta); });
  return push(std::move(n), "softplus");
}

Var Tape::square(Var a) {
  check(a, "square");
  const Mat& va = nodes_[a.id].value;
  Node n;
  n.op = Op::Square;
  n.a = a.id;
  n.value = va.cwiseProduct(va);
  return push(std::move(n), "square");
}

Var Tape::sum(Var a) {
  check(a, "sum");
  Node n;
  n.op = Op::Sum;
  n.a = a.id;
  n.value = scalar_mat(nodes_[a.id].value.sum());
  return push(std::move(n), "sum");
}

Var Tape::scale(Var a, Scalar k) {
  check(a, "scale");
  if (!std::isfinite(k)) throw Error("scale: factor must be finite");
  Node n;
  n.op = Op::Scale;
  n.a = a.id;
  n.k = k;
  n.value = nodes_[a.id].value * k;
  return push(std::move(n), "scale");
}

Var Tape::concat(Var a, Var b) {
  check(a, "concat");
  check(b, "concat");
  const Mat& va = nodes_[a.id].value;
  const Mat& vb = nodes_[b.id].value;
  if (va.cols() != vb.cols()) {
    throw ShapeError(cat("concat: column counts differ: ", shape_str(va), " vs ", shape_str(vb)));
  }
  Node n;
  n.op = Op::Concat;
  n.a = a.id;
  n.b = b.id;
  n.value.resize(va.rows() + vb.rows(), va.cols());
  n.value.topRows(va.rows()) = va;
  n.value.bottomRows(vb.rows()) = vb;
  return push(std::move(n), "concat");
}

Var Tape::power(Var a, int m) {
  check(a, "power");
  if (m < 0) throw Error(cat("power: exponent must be >= 0, got ", m));
  Node n;
  n.op = Op::Power;
  n.a = a.id;
  n.m = m;
  n.value = nodes_[a.id].value.unaryExpr([m](Scalar z) { return powi(z, m); });
  return push(std::move(n), "power");
}

const Mat& Tape::value(Var v) const {
  check(v, "value");
  return nodes_[v.id].value;
}

std::vector<Mat> Tape::replay() const {
  std::vector<Mat> out(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::Leaf:
        out[i] = n.value;
        break;
      case Op::MatMul:
        out[i] = out[n.a] * out[n.b];
        break;
      case Op::Add:
        out[i] = out[n.a] + out[n.b];
        break;
      case Op::Mul:
        out[i] = out[n.a].cwiseProduct(out[n.b]);
        break;
      case Op::Sigmoid:
        out[i] = out[n.a].unaryExpr([](Scalar z) { return sigmoid_s(z); });
        break;
      case Op::Tanh:
        out[i] = out[n.a].unaryExpr([](Scalar z) { return tanh_s(z); });
        break;
      case Op::Relu:
        out[i] = out[n.a].unaryExpr([](Scalar z) { return relu_s(z); });
        break;
      case Op::Softplus: {
        const Scalar beta = n.k;
        out[i] = out[n.a].unaryExpr([beta](Scalar z) { return softplus_s(z, beta); });
        break;
      }
      case Op::Square:
        out[i] = out[n.a].cwiseProduct(out[n.a]);
        break;
      case Op::Sum:
        out[i] = scalar_mat(out[n.a].sum());
        break;
      case Op::Scale:
        out[i] = out[n.a] * n.k;
        break;
      case Op::Concat:
        out[i].resize(out[n.a].rows() + out[n.b].rows(), out[n.a].cols());
        out[i].topRows(out[n.a].rows()) = out[n.a];
        out[i].bottomRows(out[n.b].rows()) = out[n.b];
        break;
      case Op::Power: {
        const int m = n.m;
        out[i] = out[n.a].unaryExpr([m](Scalar z) { return powi(z, m); });
        break;
      }
    }
  }
  return out;
}

const Mat& Tape::Gradients::at(Var v) const {
  if (!v.valid() || static_cast<size_t>(v.id) >= grads_.size()) {
    throw Error("gradients: variable is not a node on the differentiated tape");
  }
  Mat& g = grads_[v.id];
  if (g.size() == 0) {
    g = Mat::Zero(dims_[v.id].first, dims_[v.id].second);
  }
  return g;
}

Tape::Gradients Tape::backward(Var output, const Mat& seed) const {
  if (nodes_.empty()) {
    throw Error("backward: no forward computation has been recorded on this tape");
  }
  check(output, "backward");
  const Mat& out_val = nodes_[output.id].value;
  if (seed.rows() != out_val.rows() || seed.cols() != out_val.cols()) {
    throw ShapeError(
        cat("backward: seed shape ", shape_str(seed), " does not match output ", shape_str(out_val)));
  }

  Gradients result;
  result.grads_.assign(nodes_.size(), Mat());
  result.dims_.resize(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    result.dims_[i] = {nodes_[i].value.rows(), nodes_[i].value.cols()};
  }
  std::vector<Mat>& adj = result.grads_;

  auto accum = [&](int id, const Mat& delta) {
    if (adj[id].size() == 0) {
      adj[id] = delta;
    } else {
      adj[id] += delta;
    }
  };

  adj[output.id] = seed;

  for (int i = output.id; i >= 0; --i) {
    if (adj[i].size() == 0) continue;  // node does not reach the output
    const Node& n = nodes_[i];
    const Mat& g = adj[i];
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::MatMul:
        accum(n.a, g * nodes_[n.b].value.transpose());
        accum(n.b, nodes_[n.a].value.transpose() * g);
        break;
      case Op::Add:
        accum(n.a, g);
        accum(n.b, g);
        break;
      case Op::Mul:
        accum(n.a, g.cwiseProduct(nodes_[n.b].value));
        accum(n.b, g.cwiseProduct(nodes_[n.a].value));
        break;
      case Op::Sigmoid: {
        const Mat& y = n.value;
        accum(n.a, g.cwiseProduct(y.cwiseProduct(Mat::Ones(y.rows(), y.cols()) - y)));
        break;
      }
      case Op::Tanh: {
        const Mat& y = n.value;
        accum(n.a, g.cwiseProduct(Mat::Ones(y.rows(), y.cols()) - y.cwiseProduct(y)));
        break;
      }
      case Op::Relu: {
        const Mat& x = nodes_[n.a].value;
        accum(n.a, g.cwiseProduct(x.unaryExpr([](Scalar z) { return z > 0.0 ? 1.0 : 0.0; })));
        break;
      }
      case Op::Softplus: {
        const Scalar beta = n.k;
        const Mat& x = nodes_[n.a].value;
        accum(n.a, g.cwiseProduct(x.unaryExpr([beta](Scalar z) { return sigmoid_s(beta * z); })));
        break;
      }
      case Op::Square: {
        const Mat& x = nodes_[n.a].value;
        accum(n.a, g.cwiseProduct(2.0 * x));
        break;
      }
      case Op::Sum: {
        const Mat& x = nodes_[n.a].value;
        accum(n.a, Mat::Constant(x.rows(), x.cols(), g(0, 0)));
        break;
      }
      case Op::Scale:
        accum(n.a, g * n.k);
        break;
      case Op::Concat: {
        const Eigen::Index ra = nodes_[n.a].value.rows();
        const Eigen::Index rb = nodes_[n.b].value.rows();
        accum(n.a, g.topRows(ra));
        accum(n.b, g.bottomRows(rb));
        break;
      }
      case Op::Power: {
        const int m = n.m;
        const Mat& x = nodes_[n.a].value;
        if (m == 0) break;  // derivative of a constant
        accum(n.a, g.cwiseProduct(
                       x.unaryExpr([m](Scalar z) { return static_cast<Scalar>(m) * powi(z, m - 1); })));
        break;
      }
    }
  }
  return result;
}

}  // namespace tsad
