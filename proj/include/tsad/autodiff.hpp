#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tsad/tensor.hpp"

namespace tsad {

// Handle to a node on a Tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode tape. Primitives evaluate eagerly and record enough to replay
// the forward pass bit-identically and to run the backward pass in exact
// reverse order. A tape is append-only; after the graph is built it may be
// shared read-only across threads (backward() does not mutate it).
class Tape {
 public:
  enum class Op : uint8_t {
    Leaf,
    MatMul,
    Add,
    Mul,
    Sigmoid,
    Tanh,
    Relu,
    Softplus,
    Square,
    Sum,
    Scale,
    Concat,
    Power,
  };

  struct Node {
    Op op = Op::Leaf;
    int a = -1;
    int b = -1;
    Scalar k = 0.0;  // scale factor or softplus beta
    int m = 0;       // power exponent
    Mat value;
  };

  // Leaf input; gradients are reported per leaf by backward().
  Var leaf(const Mat& v);
  // Alias for leaves that only carry data; reads identically to leaf().
  Var constant(const Mat& v) { return leaf(v); }

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  Var softplus(Var a, Scalar beta);
  Var square(Var a);
  Var sum(Var a);  // total reduction to 1x1
  Var scale(Var a, Scalar k);
  Var concat(Var a, Var b);  // stacks rows
  Var power(Var a, int m);   // elementwise x^m, m >= 0

  // a - b as add(a, scale(b, -1)); kept here so call sites stay readable.
  Var sub(Var a, Var b) { return add(a, scale(b, -1.0)); }

  const Mat& value(Var v) const;
  size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }

  // Recompute every node value from the leaves in recording order.
  std::vector<Mat> replay() const;

  // Gradients of a backward pass, keyed by Var. Unreached nodes read as zero.
  class Gradients {
   public:
    const Mat& at(Var v) const;

   private:
    friend class Tape;
    mutable std::vector<Mat> grads_;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> dims_;
  };

  // Seeded reverse pass from `output`. The seed shape must match the output.
  Gradients backward(Var output, const Mat& seed) const;
  // Convenience for scalar outputs: seed with 1.
  Gradients backward(Var output) const { return backward(output, scalar_mat(1.0)); }

 private:
  Var check(Var v, const char* op) const;
  Var push(Node n, const char* op);
  std::vector<Node> nodes_;
};

// Graph-recording ops context; the counterpart of EigenOps in tensor.hpp.
struct TapeOps {
  using Value = Var;
  Tape* tape;

  explicit TapeOps(Tape& t) : tape(&t) {}

  Var constant(const Mat& m) { return tape->constant(m); }
  Var matmul(Var a, Var b) { return tape->matmul(a, b); }
  Var add(Var a, Var b) { return tape->add(a, b); }
  Var mul(Var a, Var b) { return tape->mul(a, b); }
  Var sigmoid(Var a) { return tape->sigmoid(a); }
  Var tanh(Var a) { return tape->tanh(a); }
  Var relu(Var a) { return tape->relu(a); }
  Var softplus(Var a, Scalar beta) { return tape->softplus(a, beta); }
  Var square(Var a) { return tape->square(a); }
  Var sum(Var a) { return tape->sum(a); }
  Var scale(Var a, Scalar k) { return tape->scale(a, k); }
  Var concat(Var a, Var b) { return tape->concat(a, b); }
  Var power(Var a, int m) { return tape->power(a, m); }
};

}  // namespace tsad
