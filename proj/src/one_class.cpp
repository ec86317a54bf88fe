#include "tsad/one_class.hpp"

#include <algorithm>

namespace tsad {

std::string to_string(HeadKind k) { return k == HeadKind::OcSvm ? "OCSVM" : "SVDD"; }

HeadKind head_kind_from_string(const std::string& s) {
  if (s == "OCSVM") return HeadKind::OcSvm;
  if (s == "SVDD") return HeadKind::Svdd;
  throw ConfigError(cat("unknown one-class head '", s, "' (expected OCSVM or SVDD)"));
}

double softplus(double z, double beta) {
  if (!(beta > 0.0)) throw Error(cat("softplus: beta must be positive, got ", beta));
  return softplus_s(z, beta);
}

namespace {

void check_params(const ClassifierParams& p, const char* op) {
  if (!(p.lambda > 0.0)) throw Error(cat(op, ": lambda must be > 0, got ", p.lambda));
  if (!(p.beta > 0.0)) throw Error(cat(op, ": beta must be > 0, got ", p.beta));
}

// softplus(r_raw, 1) == r
double softplus_inverse(double r) {
  // log(e^r - 1), stable for both tails
  if (r > 30.0) return r;
  return std::log(std::expm1(std::max(r, 1e-9)));
}

}  // namespace

ClassifierParams ClassifierParams::init_random(HeadKind kind, int dim, double lambda, double beta,
                                               Rng& rng) {
  if (dim < 1) throw ConfigError(cat("classifier: feature dim must be >= 1, got ", dim));
  ClassifierParams out;
  out.kind = kind;
  out.lambda = lambda;
  out.beta = beta;
  check_params(out, "classifier init");
  const double bound = 0.1 / std::sqrt(static_cast<double>(dim));
  if (kind == HeadKind::OcSvm) {
    out.w = Mat(1, dim);
    for (Eigen::Index c = 0; c < dim; ++c) out.w(0, c) = rng.uniform(-bound, bound);
    out.bias = Mat::Zero(1, 1);
  } else {
    out.center = Mat(dim, 1);
    for (Eigen::Index r = 0; r < dim; ++r) out.center(r, 0) = rng.uniform(-bound, bound);
    out.r_raw = scalar_mat(softplus_inverse(1.0));
  }
  return out;
}

ClassifierParams ClassifierParams::init_from_features(HeadKind kind, const std::vector<Vec>& features,
                                                      double lambda, double beta, Rng& rng) {
  if (features.empty()) throw Error("classifier init: empty feature list");
  const int dim = static_cast<int>(features.front().rows());
  if (kind == HeadKind::OcSvm) {
    return init_random(kind, dim, lambda, beta, rng);
  }
  ClassifierParams out;
  out.kind = kind;
  out.lambda = lambda;
  out.beta = beta;
  check_params(out, "classifier init");

  Vec mean = Mat::Zero(dim, 1);
  for (const Vec& f : features) mean += f;
  mean /= static_cast<double>(features.size());

  std::vector<double> dists;
  dists.reserve(features.size());
  for (const Vec& f : features) dists.push_back((f - mean).norm());
  std::sort(dists.begin(), dists.end());
  const double median = dists[dists.size() / 2];

  out.center = mean;
  out.r_raw = scalar_mat(softplus_inverse(std::max(median, 1e-3)));
  return out;
}

double anomaly_score(const ClassifierParams& params, const Vec& pooled) {
  check_params(params, "anomaly_score");
  Vec f = params.transformed(pooled);
  if (params.kind == HeadKind::Svdd) {
    if (f.rows() != params.center.rows()) {
      throw ShapeError(cat("anomaly_score: feature dim ", f.rows(), " vs center dim ",
                           params.center.rows()));
    }
    return (f - params.center).norm() - params.radius();
  }
  if (f.rows() != params.w.cols()) {
    throw ShapeError(cat("anomaly_score: feature dim ", f.rows(), " vs hyperplane dim ",
                         params.w.cols()));
  }
  return params.bias(0, 0) - (params.w * f)(0, 0);
}

namespace {

double unsupervised_loss(const ClassifierParams& params, const std::vector<Vec>& features,
                         const char* op) {
  check_params(params, op);
  if (features.empty()) throw Error(cat(op, ": empty feature list"));
  EigenOps ops;
  std::vector<Mat> feats;
  feats.reserve(features.size());
  for (const Vec& f : features) feats.push_back(params.transformed(f));
  const std::vector<double> ones_scale(features.size(), 1.0);
  const double n = static_cast<double>(features.size());
  Mat loss = params.kind == HeadKind::OcSvm
                 ? ocsvm_loss_t(ops, params.w, params.bias, feats, ones_scale, ones_scale, n,
                                params.lambda, params.beta)
                 : svdd_loss_t(ops, params.center, params.r_raw, feats, ones_scale, ones_scale, n,
                               params.lambda, params.beta);
  return loss(0, 0);
}

}  // namespace

double ocsvm_loss(const ClassifierParams& params, const std::vector<Vec>& features) {
  if (params.kind != HeadKind::OcSvm) throw Error("ocsvm_loss: classifier is not a hyperplane head");
  return unsupervised_loss(params, features, "ocsvm_loss");
}

double svdd_loss(const ClassifierParams& params, const std::vector<Vec>& features) {
  if (params.kind != HeadKind::Svdd) throw Error("svdd_loss: classifier is not a hypersphere head");
  return unsupervised_loss(params, features, "svdd_loss");
}

double one_class_loss(const ClassifierParams& params, const std::vector<Vec>& features) {
  return unsupervised_loss(params, features, "one_class_loss");
}

double semi_supervised_loss(const ClassifierParams& params,
                            const std::vector<std::pair<Vec, int>>& labeled,
                            const std::vector<Vec>& unlabeled) {
  check_params(params, "semi_supervised_loss");
  if (labeled.empty() && unlabeled.empty()) {
    throw Error("semi_supervised_loss: no instances given");
  }
  EigenOps ops;
  std::vector<Mat> feats;
  std::vector<double> margin_scale, term_weight;
  feats.reserve(labeled.size() + unlabeled.size());
  for (const auto& [f, y] : labeled) {
    if (y != -1 && y != +1) throw DataError(cat("semi_supervised_loss: label must be +/-1, got ", y));
    feats.push_back(params.transformed(f));
    margin_scale.push_back(static_cast<double>(y));
    term_weight.push_back(1.0);
  }
  for (const Vec& f : unlabeled) {
    feats.push_back(params.transformed(f));
    margin_scale.push_back(1.0);
    term_weight.push_back(params.nu);
  }
  const double n = static_cast<double>(feats.size());
  Mat loss = params.kind == HeadKind::OcSvm
                 ? ocsvm_loss_t(ops, params.w, params.bias, feats, margin_scale, term_weight, n,
                                params.lambda, params.beta)
                 : svdd_loss_t(ops, params.center, params.r_raw, feats, margin_scale, term_weight, n,
                               params.lambda, params.beta);
  return loss(0, 0);
}

}  // namespace tsad
