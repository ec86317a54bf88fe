#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <tsad/data.hpp>
#include <tsad/gradcheck.hpp>
#include <tsad/trainer.hpp>

using namespace tsad;

namespace {

Hyperparameters tiny_hp() {
  Hyperparameters hp;
  hp.variant = CellVariant::MLstm;
  hp.head = HeadKind::Svdd;
  hp.pooling = Pooling::Mean;
  hp.state_dim = 2;
  hp.batch_size = 4;
  hp.tau = 2;
  hp.lambda = 0.5;
  hp.alpha = 1.0;
  hp.learning_rate = 0.01;
  hp.max_epochs = 5;
  hp.patience = 3;
  hp.seed = 0;
  return hp;
}

std::vector<IrregularSequence> tiny_sequences(int count, int length, int dim, uint64_t seed,
                                              double scale = 1.0) {
  Rng rng(seed);
  std::vector<IrregularSequence> out;
  for (int i = 0; i < count; ++i) {
    IrregularSequence s;
    s.id = cat("seq-", i);
    s.values.resize(length, dim);
    double t = 0.0;
    for (int k = 0; k < length; ++k) {
      t += rng.uniform(0.5, 2.0);
      s.timestamps.push_back(t);
      for (int m = 0; m < dim; ++m) {
        s.values(k, m) = scale * std::sin(0.8 * t + m) + 0.05 * rng.normal();
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<const IrregularSequence*> ptrs(const std::vector<IrregularSequence>& v) {
  std::vector<const IrregularSequence*> out;
  for (const auto& s : v) out.push_back(&s);
  return out;
}

// A model whose hypersphere is anchored on the first batch of features, the
// same way train_offline starts, keeping the hinge in its numerically active
// band for finite-difference comparisons.
Model anchored_model(const Hyperparameters& hp, const std::vector<IrregularSequence>& seqs,
                     uint64_t seed) {
  Rng rng(seed);
  Model model = Model::init(hp, static_cast<int>(seqs.front().dim()), rng);
  if (hp.head == HeadKind::Svdd) {
    std::vector<Vec> feats;
    const size_t n0 = std::min<size_t>(hp.batch_size, seqs.size());
    for (size_t i = 0; i < n0; ++i) {
      feats.push_back(encode(model.encoder, seqs[i], hp.pooling).pooled);
    }
    model.classifier =
        ClassifierParams::init_from_features(HeadKind::Svdd, feats, hp.lambda, hp.beta, rng);
    model.classifier.nu = hp.nu;
  }
  return model;
}

bool models_identical(Model& a, Model& b) {
  auto pa = a.trainable();
  auto pb = b.trainable();
  if (pa.size() != pb.size()) return false;
  for (size_t i = 0; i < pa.size(); ++i) {
    const Mat& ma = *pa[i].second;
    const Mat& mb = *pb[i].second;
    if (ma.rows() != mb.rows() || ma.cols() != mb.cols()) return false;
    for (Eigen::Index r = 0; r < ma.rows(); ++r)
      for (Eigen::Index c = 0; c < ma.cols(); ++c)
        if (ma(r, c) != mb(r, c)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("combined_loss composition") {
  auto hp = tiny_hp();
  auto seqs = tiny_sequences(4, 4, 1, 1);
  Model model = anchored_model(hp, seqs, 7);

  SUBCASE("alpha zero leaves exactly the one-class loss") {
    std::vector<Vec> feats;
    for (const auto& s : seqs) feats.push_back(encode(model.encoder, s, hp.pooling).pooled);
    Hyperparameters hp0 = hp;
    hp0.alpha = 0.0;
    CHECK(combined_loss(model, seqs, hp0) ==
          doctest::Approx(one_class_loss(model.classifier, feats)).epsilon(1e-12));
  }

  SUBCASE("the combination equals the two published losses composed") {
    std::vector<Vec> feats;
    std::vector<EncodingResult> encs;
    for (const auto& s : seqs) {
      encs.push_back(encode(model.encoder, s, hp.pooling));
      feats.push_back(encs.back().pooled);
    }
    Hyperparameters hp1000 = hp;
    hp1000.alpha = 1000.0;
    const double oc = one_class_loss(model.classifier, feats);
    const double recon = reconstruction_loss(model.decoder, encs, ptrs(seqs), hp.recon_mode);
    CHECK(combined_loss(model, seqs, hp1000) == doctest::Approx(oc + 1000.0 * recon).epsilon(1e-12));
  }

  SUBCASE("perfect reconstructions make alpha irrelevant") {
    // All-zero observations with all-zero parameters reconstruct exactly.
    Hyperparameters hpz = tiny_hp();
    std::vector<IrregularSequence> zero_seqs = tiny_sequences(3, 4, 1, 2, 0.0);
    for (auto& s : zero_seqs) s.values.setZero();
    Rng rng(3);
    Model zm = Model::init(hpz, 1, rng);
    zm.visit_params([](const std::string&, Mat& m) { m.setZero(); });
    Hyperparameters a = hpz, b = hpz;
    a.alpha = 0.001;
    b.alpha = 5000.0;
    CHECK(combined_loss(zm, zero_seqs, a) == combined_loss(zm, zero_seqs, b));
  }

  SUBCASE("empty batch is an error") {
    CHECK_THROWS_AS(combined_loss(model, std::vector<const IrregularSequence*>{}, hp), Error);
  }
}

TEST_CASE("the full modulated-LSTM + hypersphere loss passes the gradient check") {
  auto hp = tiny_hp();
  hp.recon_mode = ReconMode::Autoencode;
  hp.lambda = 0.3;  // off the point where the radius gradient cancels
  auto seqs = tiny_sequences(2, 3, 1, 4);
  Model model = anchored_model(hp, seqs, 11);
  auto batch = ptrs(seqs);

  TapeLossFn fn = [&](Tape& t, const std::vector<Var>& vars) {
    return batch_loss_graph(t, model, vars, batch, hp);
  };
  CHECK(finite_diff_check(fn, collect_params(model), 1e-5) < 1e-4);
}

TEST_CASE("gradients flow in predict mode and for the hyperplane head") {
  auto hp = tiny_hp();
  hp.recon_mode = ReconMode::Predict;
  hp.head = HeadKind::OcSvm;
  hp.variant = CellVariant::MGru;
  auto seqs = tiny_sequences(2, 4, 2, 5);
  Model model = anchored_model(hp, seqs, 13);
  auto batch = ptrs(seqs);
  TapeLossFn fn = [&](Tape& t, const std::vector<Var>& vars) {
    return batch_loss_graph(t, model, vars, batch, hp);
  };
  CHECK(finite_diff_check(fn, collect_params(model), 1e-5) < 1e-4);
}

TEST_CASE("sgd_update arithmetic") {
  auto hp = tiny_hp();
  auto seqs = tiny_sequences(2, 3, 1, 6);
  Model model = anchored_model(hp, seqs, 17);
  auto params = model.trainable();

  std::vector<Mat> grads;
  for (auto& [name, mat] : params) grads.push_back(Mat::Zero(mat->rows(), mat->cols()));

  SUBCASE("zero gradients leave parameters unchanged") {
    Model before = model;
    sgd_update(model, grads, 0.1, 1, 5.0);
    CHECK(models_identical(model, before));
  }

  SUBCASE("theta = 1, grad = 2, mu = 0.1 steps to 0.8") {
    (*params[0].second)(0, 0) = 1.0;
    grads[0](0, 0) = 2.0;
    sgd_update(model, grads, 0.1, 1, 5.0);
    CHECK((*params[0].second)(0, 0) == doctest::Approx(0.8).epsilon(1e-15));
  }

  SUBCASE("a batch of two with summed gradients 1 + 3 steps by the mean 2") {
    (*params[0].second)(0, 0) = 1.0;
    grads[0](0, 0) = 4.0;  // per-sequence gradients 1 and 3
    sgd_update(model, grads, 0.1, 2, 5.0);
    CHECK((*params[0].second)(0, 0) == doctest::Approx(0.8).epsilon(1e-15));
  }

  SUBCASE("the global-norm cap rescales big steps") {
    (*params[0].second)(0, 0) = 1.0;
    grads[0](0, 0) = 100.0;
    sgd_update(model, grads, 0.1, 1, 5.0);
    // step = mu * clip = 0.1 * 5
    CHECK((*params[0].second)(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("non-finite gradients are rejected with the tensor name") {
    grads[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(sgd_update(model, grads, 0.1, 1, 5.0),
                         doctest::Contains(params[0].first.c_str()), NumericError);
  }
}

TEST_CASE("a small enough step never increases the batch loss") {
  // 20 random tiny models; if the first step overshoots, retry at mu / 10.
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Hyperparameters hp = tiny_hp();
    hp.variant = seed % 2 == 0 ? CellVariant::MLstm : CellVariant::ALstm;
    hp.head = seed % 3 == 0 ? HeadKind::OcSvm : HeadKind::Svdd;
    auto seqs = tiny_sequences(3, 4, 1, 100 + seed);
    Model model = anchored_model(hp, seqs, 200 + seed);
    auto batch = ptrs(seqs);

    const double before = combined_loss(model, batch, hp);
    double grads_loss = 0.0;
    auto grads = loss_gradients(model, batch, hp, TrainMode::Unsupervised, &grads_loss);
    CHECK(grads_loss / static_cast<double>(batch.size()) == doctest::Approx(before).epsilon(1e-9));

    bool decreased = false;
    double mu = 1e-2;
    for (int attempt = 0; attempt < 6 && !decreased; ++attempt, mu /= 10.0) {
      Model stepped = model;
      sgd_update(stepped, grads, mu, static_cast<int>(batch.size()), 0.0);
      decreased = combined_loss(stepped, batch, hp) <= before;
    }
    CHECK(decreased);
  }
}

TEST_CASE("train_offline") {
  SUBCASE("zero epochs returns the initial parameters") {
    auto hp = tiny_hp();
    hp.max_epochs = 0;
    auto train = tiny_sequences(6, 5, 1, 8);
    auto val = tiny_sequences(3, 5, 1, 9);
    auto report = train_offline(train, val, hp);
    CHECK(report.stopping_epoch == 0);
    CHECK(report.best_epoch == 0);
    REQUIRE(report.epochs.size() == 1);

    // Reconstruct the expected initial model along the same deterministic path.
    Model expect = anchored_model(hp, train, hp.seed);
    CHECK(models_identical(report.model, expect));
  }

  SUBCASE("training reduces the loss on a learnable toy set") {
    auto hp = tiny_hp();
    hp.max_epochs = 5;
    hp.patience = 5;
    hp.batch_size = 10;  // full batch keeps the per-epoch numbers comparable
    hp.learning_rate = 0.1;
    auto train = tiny_sequences(10, 5, 1, 10);
    auto val = tiny_sequences(4, 5, 1, 11);
    auto report = train_offline(train, val, hp);
    REQUIRE(report.epochs.size() == 6);  // pre-training + 5 epochs
    CHECK(report.epochs[5].train_loss < report.epochs[0].train_loss);
  }

  SUBCASE("training is bit-reproducible for a fixed seed") {
    auto hp = tiny_hp();
    hp.max_epochs = 3;
    auto train = tiny_sequences(8, 4, 1, 12);
    auto val = tiny_sequences(3, 4, 1, 13);
    auto a = train_offline(train, val, hp);
    auto b = train_offline(train, val, hp);
    CHECK(models_identical(a.model, b.model));
    CHECK(a.epochs.size() == b.epochs.size());
    for (size_t e = 0; e < a.epochs.size(); ++e) {
      CHECK(a.epochs[e].train_loss == b.epochs[e].train_loss);
      CHECK(a.epochs[e].val_loss == b.epochs[e].val_loss);
    }
  }

  SUBCASE("the returned checkpoint is never worse than the best epoch observed") {
    auto hp = tiny_hp();
    hp.max_epochs = 6;
    hp.patience = 6;
    auto train = tiny_sequences(8, 4, 1, 14);
    auto val = tiny_sequences(4, 4, 1, 15);
    auto report = train_offline(train, val, hp);
    double best = std::numeric_limits<double>::infinity();
    for (size_t e = 1; e < report.epochs.size(); ++e) best = std::min(best, report.epochs[e].val_loss);
    CHECK(report.best_val_loss == best);
    CHECK(combined_loss(report.model, val, hp) == doctest::Approx(best).epsilon(1e-12));
  }

  SUBCASE("divergence aborts with a diagnostic") {
    auto hp = tiny_hp();
    hp.learning_rate = 1e9;
    hp.grad_clip = 0.0;
    hp.max_epochs = 30;
    hp.patience = 30;  // keep early stopping from masking the blow-up
    auto train = tiny_sequences(6, 4, 1, 16);
    auto val = tiny_sequences(3, 4, 1, 17);
    CHECK_THROWS_AS(train_offline(train, val, hp), NumericError);
  }
}

TEST_CASE("early stopping halts after patience epochs without improvement") {
  // Adversarial validation: training sequences are identical two-step
  // constants, so prediction-mode training drives the decodings of both
  // visited states toward +1. The validation sequence shares the prefix but
  // flips the second target to -1, so every training step that helps the
  // training set hurts it and validation loss rises from epoch 1.
  auto make = [](const std::string& id, double x1, double x2) {
    IrregularSequence s;
    s.id = id;
    s.values.resize(2, 1);
    s.timestamps = {1.0, 2.0};
    s.values(0, 0) = x1;
    s.values(1, 0) = x2;
    return s;
  };
  std::vector<IrregularSequence> train;
  for (int i = 0; i < 8; ++i) train.push_back(make(cat("const-", i), 1.0, 1.0));
  std::vector<IrregularSequence> val{make("flipped", 1.0, -1.0)};

  auto hp = tiny_hp();
  hp.recon_mode = ReconMode::Predict;
  hp.alpha = 1000.0;
  hp.optimizer = OptimizerKind::Adam;
  hp.learning_rate = 0.02;
  hp.max_epochs = 50;
  hp.patience = 3;
  auto report = train_offline(train, val, hp);

  for (size_t e = 2; e < report.epochs.size(); ++e) {
    CHECK(report.epochs[e].val_loss > report.epochs[e - 1].val_loss);
  }
  REQUIRE(report.best_epoch == 1);
  CHECK(report.stopping_epoch == 1 + hp.patience);
  CHECK(report.epochs.size() == static_cast<size_t>(2 + hp.patience));
}

TEST_CASE("select_hyperparameters") {
  auto train = tiny_sequences(8, 4, 1, 19);
  auto val = tiny_sequences(4, 4, 1, 20);

  SUBCASE("a single candidate comes back unchanged") {
    auto hp = tiny_hp();
    hp.lambda = 0.37;
    auto best = select_hyperparameters({hp}, train, val);
    CHECK(best.lambda == 0.37);
  }

  SUBCASE("a diverging candidate loses to a finite one") {
    auto good = tiny_hp();
    auto bad = tiny_hp();
    bad.learning_rate = 1e9;
    bad.grad_clip = 0.0;
    bad.max_epochs = 30;
    auto best = select_hyperparameters({bad, good}, train, val);
    CHECK(best.learning_rate == good.learning_rate);
  }

  SUBCASE("the winner of a lambda grid matches re-ranking the recorded losses") {
    auto a = tiny_hp();
    a.lambda = 0.3;
    auto b = tiny_hp();
    b.lambda = 0.4;
    auto best = select_hyperparameters({a, b}, train, val);
    const double loss_a = train_offline(train, val, a).best_val_loss;
    const double loss_b = train_offline(train, val, b).best_val_loss;
    CHECK(best.lambda == (loss_a <= loss_b ? 0.3 : 0.4));
  }

  SUBCASE("candidates differing only in alpha compete on reconstruction loss") {
    auto a = tiny_hp();
    a.alpha = 0.1;
    auto b = tiny_hp();
    b.alpha = 100.0;
    auto best = select_hyperparameters({a, b}, train, val);

    auto recon_of = [&](const Hyperparameters& hp) {
      auto report = train_offline(train, val, hp);
      std::vector<EncodingResult> encs;
      for (const auto& s : val) encs.push_back(encode(report.model.encoder, s, hp.pooling));
      return reconstruction_loss(report.model.decoder, encs, ptrs(val), hp.recon_mode);
    };
    CHECK(best.alpha == (recon_of(a) <= recon_of(b) ? a.alpha : b.alpha));
  }

  SUBCASE("an empty candidate list is an error") {
    CHECK_THROWS_AS(select_hyperparameters({}, train, val), Error);
  }
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  auto hp = tiny_hp();
  hp.max_epochs = 2;
  auto train = tiny_sequences(6, 4, 2, 21);
  auto val = tiny_sequences(3, 4, 2, 22);
  auto report = train_offline(train, val, hp);

  Checkpoint ckpt;
  ckpt.hp = hp;
  ckpt.model = report.model;
  ckpt.rng = report.rng;
  ckpt.epoch = report.best_epoch;
  ckpt.input_dim = 2;
  ckpt.train_file = "train.jsonl";

  const auto dir = std::filesystem::temp_directory_path() / "tsad_test_ckpt";
  std::filesystem::create_directories(dir);
  const auto path = dir / "model.ckpt";
  save_checkpoint(path, ckpt);

  auto back = load_checkpoint(path);
  CHECK(models_identical(back.model, ckpt.model));
  CHECK(back.epoch == ckpt.epoch);
  CHECK(back.input_dim == 2);
  CHECK(back.train_file == "train.jsonl");
  CHECK(back.rng == ckpt.rng);
  CHECK(back.hp.lambda == hp.lambda);
  CHECK(back.hp.variant == hp.variant);

  // Saving the loaded checkpoint again reproduces the file byte for byte.
  const auto path2 = dir / "model2.ckpt";
  save_checkpoint(path2, back);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("adaptive optimizer also reduces the loss") {
  auto hp = tiny_hp();
  hp.optimizer = OptimizerKind::Adam;
  hp.learning_rate = 0.02;
  hp.max_epochs = 5;
  hp.patience = 5;
  auto train = tiny_sequences(10, 5, 1, 23);
  auto val = tiny_sequences(4, 5, 1, 24);
  auto report = train_offline(train, val, hp);
  CHECK(report.epochs.back().train_loss < report.epochs[0].train_loss);
}
