#include "tsad/trainer.hpp"

#include <algorithm>
#include <map>

namespace tsad {

std::string to_string(TrainMode m) {
  switch (m) {
    case TrainMode::Unsupervised: return "unsupervised";
    case TrainMode::Semi: return "semi";
    case TrainMode::Supervised: return "supervised";
  }
  return "?";
}

TrainMode train_mode_from_string(const std::string& s) {
  if (s == "unsupervised") return TrainMode::Unsupervised;
  if (s == "semi") return TrainMode::Semi;
  if (s == "supervised") return TrainMode::Supervised;
  throw ConfigError(cat("unknown mode '", s, "' (expected unsupervised, semi or supervised)"));
}

namespace {

// Margin sign and term weight for one sequence under the given mode.
std::pair<double, double> label_terms(const IrregularSequence& seq, const ClassifierParams& cls,
                                      TrainMode mode) {
  if (mode == TrainMode::Unsupervised) return {1.0, 1.0};
  if (seq.label) {
    const int y = *seq.label;
    if (y != -1 && y != +1) {
      throw DataError(cat("sequence '", seq.id, "': label must be +/-1 for ", to_string(mode),
                          " training, got ", y));
    }
    return {static_cast<double>(y), 1.0};
  }
  if (mode == TrainMode::Supervised) {
    throw DataError(cat("sequence '", seq.id, "': supervised training needs a label"));
  }
  return {1.0, cls.nu};
}

void check_batch(const std::vector<const IrregularSequence*>& batch, const char* op) {
  if (batch.empty()) throw Error(cat(op, ": empty batch"));
}

struct ModelVars {
  EncoderWeights<Var> enc;
  std::vector<DenseLayer<Var>> dec;
  Var cls_a, cls_b;  // (w, bias) or (center, r_raw)
};

ModelVars assemble_vars(Model& model, const std::vector<Var>& flat) {
  ModelVars mv;
  size_t i = 0;
  mv.enc.visit(model.encoder.cfg.variant, [&](const auto&, Var& v) { v = flat.at(i++); });
  mv.dec.resize(model.decoder.layers.size());
  for (auto& layer : mv.dec) {
    layer.w = flat.at(i++);
    layer.b = flat.at(i++);
  }
  mv.cls_a = flat.at(i++);
  mv.cls_b = flat.at(i++);
  if (i != flat.size()) throw Error("batch_loss_graph: parameter count mismatch");
  return mv;
}

Var seq_loss_graph(Tape& tape, Model& model, const ModelVars& mv, const IrregularSequence& seq,
                   const Hyperparameters& hp, TrainMode mode) {
  TapeOps ops(tape);
  auto enc = run_encoder(ops, model.encoder.cfg, mv.enc, seq, hp.pooling);
  const auto [margin_scale, term_weight] = label_terms(seq, model.classifier, mode);
  const std::vector<Var> features{enc.pooled};
  const std::vector<double> scales{margin_scale};
  const std::vector<double> weights{term_weight};
  Var oc = model.classifier.kind == HeadKind::OcSvm
               ? ocsvm_loss_t(ops, mv.cls_a, mv.cls_b, features, scales, weights, 1.0,
                              model.classifier.lambda, model.classifier.beta)
               : svdd_loss_t(ops, mv.cls_a, mv.cls_b, features, scales, weights, 1.0,
                             model.classifier.lambda, model.classifier.beta);
  Var recon = seq_recon_loss(ops, mv.dec, enc.states, seq, hp.recon_mode, hp.state_dim);
  return tape.add(oc, tape.scale(recon, hp.alpha));
}

}  // namespace

double combined_loss(const Model& model, const std::vector<const IrregularSequence*>& batch,
                     const Hyperparameters& hp, TrainMode mode) {
  check_batch(batch, "combined_loss");
  if (model.classifier.feature_map) {
    throw Error("combined_loss: training losses require the identity feature map");
  }
  EigenOps ops;
  Model& m = const_cast<Model&>(model);

  std::vector<Mat> features;
  std::vector<double> scales, weights;
  features.reserve(batch.size());
  double recon_total = 0.0;
  for (const IrregularSequence* seq : batch) {
    auto enc = run_encoder(ops, m.encoder.cfg, m.encoder.weights, *seq, hp.pooling);
    features.push_back(enc.pooled);
    const auto [margin_scale, term_weight] = label_terms(*seq, m.classifier, mode);
    scales.push_back(margin_scale);
    weights.push_back(term_weight);
    Mat r = seq_recon_loss(ops, m.decoder.layers, enc.states, *seq, hp.recon_mode, hp.state_dim);
    recon_total += r(0, 0);
  }
  const double n = static_cast<double>(batch.size());
  Mat oc = m.classifier.kind == HeadKind::OcSvm
               ? ocsvm_loss_t(ops, m.classifier.w, m.classifier.bias, features, scales, weights, n,
                              m.classifier.lambda, m.classifier.beta)
               : svdd_loss_t(ops, m.classifier.center, m.classifier.r_raw, features, scales, weights,
                             n, m.classifier.lambda, m.classifier.beta);
  return oc(0, 0) + hp.alpha * (recon_total / n);
}

double combined_loss(const Model& model, const std::vector<IrregularSequence>& batch,
                     const Hyperparameters& hp, TrainMode mode) {
  std::vector<const IrregularSequence*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& s : batch) ptrs.push_back(&s);
  return combined_loss(model, ptrs, hp, mode);
}

std::vector<Mat> collect_params(Model& model) {
  std::vector<Mat> out;
  model.visit_params([&](const std::string&, Mat& m) { out.push_back(m); });
  return out;
}

Var batch_loss_graph(Tape& tape, Model& model, const std::vector<Var>& pvars,
                     const std::vector<const IrregularSequence*>& batch, const Hyperparameters& hp,
                     TrainMode mode) {
  check_batch(batch, "batch_loss_graph");
  if (model.classifier.feature_map) {
    throw Error("batch_loss_graph: training losses require the identity feature map");
  }
  ModelVars mv = assemble_vars(model, pvars);
  Var total;
  for (size_t i = 0; i < batch.size(); ++i) {
    Var l = seq_loss_graph(tape, model, mv, *batch[i], hp, mode);
    total = i == 0 ? l : tape.add(total, l);
  }
  return total;
}

std::vector<Mat> loss_gradients(Model& model, const std::vector<const IrregularSequence*>& batch,
                                const Hyperparameters& hp, TrainMode mode, double* sum_loss) {
  Tape tape;
  std::vector<Var> pvars;
  model.visit_params([&](const std::string&, Mat& m) { pvars.push_back(tape.leaf(m)); });
  Var loss = batch_loss_graph(tape, model, pvars, batch, hp, mode);
  if (sum_loss) *sum_loss = tape.value(loss)(0, 0);
  Tape::Gradients grads = tape.backward(loss);
  std::vector<Mat> out;
  out.reserve(pvars.size());
  for (Var v : pvars) out.push_back(grads.at(v));
  return out;
}

namespace {

// Average, cap the global norm, and hand per-tensor steps to `apply`.
template <class Apply>
void prepared_update(Model& model, const std::vector<Mat>& grad_sum, int batch_size, double clip,
                     Apply&& apply) {
  auto params = model.trainable();
  if (grad_sum.size() != params.size()) {
    throw Error(cat("update: ", grad_sum.size(), " gradients for ", params.size(), " tensors"));
  }
  if (batch_size < 1) throw Error(cat("update: batch size must be >= 1, got ", batch_size));

  std::vector<Mat> g(grad_sum.size());
  double sq_norm = 0.0;
  for (size_t i = 0; i < grad_sum.size(); ++i) {
    if (!grad_sum[i].allFinite()) {
      throw NumericError(cat("update: non-finite gradient for ", params[i].first));
    }
    g[i] = grad_sum[i] / static_cast<double>(batch_size);
    sq_norm += g[i].squaredNorm();
  }
  const double norm = std::sqrt(sq_norm);
  if (clip > 0.0 && norm > clip) {
    const double s = clip / norm;
    for (Mat& gi : g) gi *= s;
  }
  for (size_t i = 0; i < g.size(); ++i) apply(i, *params[i].second, g[i]);
}

}  // namespace

void sgd_update(Model& model, const std::vector<Mat>& grad_sum, double mu, int batch_size,
                double clip) {
  prepared_update(model, grad_sum, batch_size, clip,
                  [mu](size_t, Mat& theta, const Mat& g) { theta -= mu * g; });
}

void adam_update(Model& model, const std::vector<Mat>& grad_sum, AdamState& state, double mu,
                 int batch_size, double clip) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  if (state.m.empty()) {
    auto params = model.trainable();
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      state.m[i] = Mat::Zero(params[i].second->rows(), params[i].second->cols());
      state.v[i] = state.m[i];
    }
  }
  state.t += 1;
  const double corr = std::sqrt(1.0 - std::pow(b2, state.t)) / (1.0 - std::pow(b1, state.t));
  prepared_update(model, grad_sum, batch_size, clip, [&](size_t i, Mat& theta, const Mat& g) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g.cwiseProduct(g);
    theta -= (mu * corr) * state.m[i].cwiseQuotient(
                               state.v[i].cwiseSqrt() + Mat::Constant(g.rows(), g.cols(), eps));
  });
}

TrainReport train_offline(const std::vector<IrregularSequence>& train,
                          const std::vector<IrregularSequence>& validation,
                          const Hyperparameters& hp, TrainMode mode) {
  hp.validate();
  if (train.empty()) throw Error("train_offline: empty training set");
  if (validation.empty()) throw Error("train_offline: empty validation set");

  const int input_dim = train.front().dim();
  Rng rng(hp.seed);
  Model model = Model::init(hp, input_dim, rng);

  // Anchor a hypersphere head on the first batch of encoded features rather
  // than starting from a random center that calls everything anomalous.
  if (hp.head == HeadKind::Svdd) {
    const size_t n0 = std::min<size_t>(hp.batch_size, train.size());
    std::vector<Vec> feats;
    feats.reserve(n0);
    for (size_t i = 0; i < n0; ++i) {
      feats.push_back(encode(model.encoder, train[i], hp.pooling).pooled);
    }
    model.classifier = ClassifierParams::init_from_features(HeadKind::Svdd, feats, hp.lambda,
                                                            hp.beta, rng);
    model.classifier.nu = hp.nu;
  }

  TrainReport report;
  report.epochs.push_back({combined_loss(model, train, hp, mode),
                           combined_loss(model, validation, hp, mode)});
  report.model = model;

  AdamState adam;
  std::vector<size_t> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  int no_improve = 0;
  for (int epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    int batches = 0;
    for (size_t start = 0; start < order.size(); start += hp.batch_size) {
      const size_t end = std::min(order.size(), start + hp.batch_size);
      std::vector<const IrregularSequence*> batch;
      batch.reserve(end - start);
      for (size_t i = start; i < end; ++i) batch.push_back(&train[order[i]]);

      double batch_sum = 0.0;
      std::vector<Mat> grads;
      try {
        grads = loss_gradients(model, batch, hp, mode, &batch_sum);
      } catch (const NumericError& e) {
        throw NumericError(cat("train_offline: diverged at epoch ", epoch, ", batch ", batches + 1,
                               ": ", e.what()));
      }
      const int b = static_cast<int>(batch.size());
      if (hp.optimizer == OptimizerKind::Adam) {
        adam_update(model, grads, adam, hp.learning_rate, b, hp.grad_clip);
      } else {
        sgd_update(model, grads, hp.learning_rate, b, hp.grad_clip);
      }
      loss_sum += batch_sum / b;
      ++batches;
    }

    const double train_loss = loss_sum / batches;
    const double val_loss = combined_loss(model, validation, hp, mode);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      throw NumericError(cat("train_offline: diverged at epoch ", epoch, " (train ", train_loss,
                             ", validation ", val_loss, ")"));
    }
    report.epochs.push_back({train_loss, val_loss});
    report.stopping_epoch = epoch;

    if (val_loss < report.best_val_loss) {
      report.best_val_loss = val_loss;
      report.best_epoch = epoch;
      report.model = model;
      no_improve = 0;
    } else {
      ++no_improve;
      if (no_improve >= hp.patience) break;
    }
  }

  if (report.best_epoch == 0) {
    report.best_val_loss = report.epochs.front().val_loss;
  }
  report.rng = rng;
  return report;
}

Hyperparameters select_hyperparameters(const std::vector<Hyperparameters>& candidates,
                                       const std::vector<IrregularSequence>& train,
                                       const std::vector<IrregularSequence>& validation,
                                       TrainMode mode) {
  if (candidates.empty()) throw Error("select_hyperparameters: no candidates");

  struct Entry {
    size_t index;
    double val_loss;
    double val_recon;
  };

  // Candidates differing only in alpha are grouped: alpha rescales the
  // combined loss, so within a group the validation reconstruction loss picks
  // the winner, then groups compete on validation loss.
  std::map<std::string, Entry> groups;
  size_t finished = 0;
  for (size_t ci = 0; ci < candidates.size(); ++ci) {
    const Hyperparameters& hp = candidates[ci];
    TrainReport report;
    try {
      report = train_offline(train, validation, hp, mode);
    } catch (const NumericError&) {
      continue;  // diverged candidates lose automatically
    }
    ++finished;

    std::vector<EncodingResult> encs;
    std::vector<const IrregularSequence*> ptrs;
    encs.reserve(validation.size());
    for (const auto& seq : validation) {
      encs.push_back(encode(report.model.encoder, seq, hp.pooling));
      ptrs.push_back(&seq);
    }
    const double val_recon = reconstruction_loss(report.model.decoder, encs, ptrs, hp.recon_mode);

    Hyperparameters key_hp = hp;
    key_hp.alpha = 0.0;
    const std::string key =
        cat(to_string(key_hp.variant), '|', to_string(key_hp.head), '|', to_string(key_hp.pooling),
            '|', to_string(key_hp.recon_mode), '|', to_string(key_hp.optimizer), '|',
            key_hp.state_dim, '|', key_hp.batch_size, '|', key_hp.tau, '|', key_hp.lambda, '|',
            key_hp.decay_rate, '|', key_hp.learning_rate, '|', key_hp.beta, '|', key_hp.nu, '|',
            key_hp.nominal_period, '|', key_hp.grad_clip, '|', key_hp.decoder_depth, '|',
            key_hp.decay_cell_state, '|', key_hp.max_epochs, '|', key_hp.patience, '|', key_hp.seed);

    auto it = groups.find(key);
    if (it == groups.end() || val_recon < it->second.val_recon) {
      groups[key] = Entry{ci, report.best_val_loss, val_recon};
    }
  }
  if (finished == 0) throw NumericError("select_hyperparameters: every candidate diverged");

  const Entry* best = nullptr;
  for (const auto& [key, e] : groups) {
    if (!best) {
      best = &e;
      continue;
    }
    const Hyperparameters& a = candidates[e.index];
    const Hyperparameters& b = candidates[best->index];
    const auto rank = [](const Entry& en, const Hyperparameters& h) {
      return std::make_tuple(en.val_loss, h.state_dim, h.batch_size);
    };
    if (rank(e, a) < rank(*best, b)) best = &e;
  }
  return candidates[best->index];
}

}  // namespace tsad
