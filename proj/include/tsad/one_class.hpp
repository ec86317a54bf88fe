#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tsad/rng.hpp"
#include "tsad/tensor.hpp"

namespace tsad {

enum class HeadKind { OcSvm, Svdd };

std::string to_string(HeadKind k);
HeadKind head_kind_from_string(const std::string& s);

// Smoothed hinge psi(z; beta) = (1/beta) log(1 + e^{beta z}), overflow-safe.
double softplus(double z, double beta);

// Differentiable one-class head: a separating hyperplane (w, b) or an
// enclosing hypersphere (center, radius). The radius is kept positive by
// storing a raw scalar and mapping it through a unit softplus.
struct ClassifierParams {
  HeadKind kind = HeadKind::Svdd;
  double lambda = 1.0;  // slack weight, > 0
  double beta = 100.0;  // hinge smoothing, > 0
  double nu = 1.0;      // weight of the unlabeled terms in the mixed loss

  Mat w;       // 1 x p   (hyperplane)
  Mat bias;    // 1 x 1   (hyperplane)
  Mat center;  // p x 1   (hypersphere)
  Mat r_raw;   // 1 x 1   (hypersphere)

  // Optional feature transform applied before scoring; identity when empty.
  // Training requires the identity map (the graph path does not trace it).
  std::function<Vec(const Vec&)> feature_map;

  double radius() const { return softplus(r_raw(0, 0), 1.0); }
  Vec transformed(const Vec& feature) const { return feature_map ? feature_map(feature) : feature; }

  static ClassifierParams init_random(HeadKind kind, int dim, double lambda, double beta, Rng& rng);
  // Hypersphere from data: center at the feature mean, radius at the median
  // distance. Hyperplane: small random w, zero bias.
  static ClassifierParams init_from_features(HeadKind kind, const std::vector<Vec>& features,
                                             double lambda, double beta, Rng& rng);

  template <class F>
  void visit_params(F&& f) {
    if (kind == HeadKind::OcSvm) {
      f("w", w);
      f("b", bias);
    } else {
      f("center", center);
      f("r_raw", r_raw);
    }
  }
};

// Positive score means anomalous. Hypersphere: distance outside the surface;
// hyperplane: b - w.f so the sign convention matches the +1 anomaly label.
double anomaly_score(const ClassifierParams& params, const Vec& pooled);

// sign(score) with sign(0) = -1 (on the boundary counts as nominal).
inline int decide(double score) { return score > 0.0 ? +1 : -1; }

double ocsvm_loss(const ClassifierParams& params, const std::vector<Vec>& features);
double svdd_loss(const ClassifierParams& params, const std::vector<Vec>& features);
double one_class_loss(const ClassifierParams& params, const std::vector<Vec>& features);

// Mixed objective over labeled (feature, +/-1) and unlabeled instances.
// The label folds into the margin sign; unlabeled terms carry weight nu and
// everything normalizes by (labeled + unlabeled) counts.
double semi_supervised_loss(const ClassifierParams& params,
                            const std::vector<std::pair<Vec, int>>& labeled,
                            const std::vector<Vec>& unlabeled);

// ---------------------------------------------------------------------------
// Graph-or-direct loss builders. `features` and the parameters are values of
// the ops context; `count_norm` is the divisor of the slack sum (I, or I+J in
// the mixed case). Labels enter as +/-1 margin scalers; empty labels means
// all-unsupervised. These are composed by the public functions above and by
// the trainer's per-sequence losses.
// ---------------------------------------------------------------------------

template <class Ops, class T = typename Ops::Value>
T ocsvm_margin(Ops& ops, const T& w, const T& b, const T& feature) {
  return ops.add(b, ops.scale(ops.matmul(w, feature), -1.0));
}

template <class Ops, class T = typename Ops::Value>
T svdd_margin(Ops& ops, const T& center, const T& r_raw, const T& feature) {
  T diff = ops.add(feature, ops.scale(center, -1.0));
  T dist2 = ops.sum(ops.square(diff));
  T r = ops.softplus(r_raw, 1.0);
  return ops.add(dist2, ops.scale(ops.square(r), -1.0));
}

// ||w||^2 / 2 + (1 / (count_norm * lambda)) * sum_i weight_i * psi(y_i * margin_i) - b
template <class Ops, class T = typename Ops::Value>
T ocsvm_loss_t(Ops& ops, const T& w, const T& b, const std::vector<T>& features,
               const std::vector<double>& margin_scale, const std::vector<double>& term_weight,
               double count_norm, double lambda, double beta) {
  T loss = ops.scale(ops.sum(ops.square(w)), 0.5);
  for (size_t i = 0; i < features.size(); ++i) {
    T margin = ocsvm_margin(ops, w, b, features[i]);
    if (margin_scale[i] != 1.0) margin = ops.scale(margin, margin_scale[i]);
    T slack = ops.softplus(margin, beta);
    loss = ops.add(loss, ops.scale(slack, term_weight[i] / (count_norm * lambda)));
  }
  return ops.add(loss, ops.scale(b, -1.0));
}

// r^2 + (1 / (count_norm * lambda)) * sum_i weight_i * psi(y_i * margin_i)
template <class Ops, class T = typename Ops::Value>
T svdd_loss_t(Ops& ops, const T& center, const T& r_raw, const std::vector<T>& features,
              const std::vector<double>& margin_scale, const std::vector<double>& term_weight,
              double count_norm, double lambda, double beta) {
  T r = ops.softplus(r_raw, 1.0);
  T loss = ops.square(r);
  for (size_t i = 0; i < features.size(); ++i) {
    T margin = svdd_margin(ops, center, r_raw, features[i]);
    if (margin_scale[i] != 1.0) margin = ops.scale(margin, margin_scale[i]);
    T slack = ops.softplus(margin, beta);
    loss = ops.add(loss, ops.scale(slack, term_weight[i] / (count_norm * lambda)));
  }
  return loss;
}

}  // namespace tsad
