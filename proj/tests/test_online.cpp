#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tsad/data.hpp>
#include <tsad/online.hpp>

using namespace tsad;

namespace {

Hyperparameters online_hp(double mu = 0.02) {
  Hyperparameters hp;
  hp.variant = CellVariant::MLstm;
  hp.head = HeadKind::Svdd;
  hp.pooling = Pooling::Mean;
  hp.state_dim = 3;
  hp.tau = 2;
  hp.lambda = 0.5;
  hp.alpha = 1.0;
  hp.learning_rate = mu;
  hp.optimizer = OptimizerKind::Adam;
  hp.seed = 5;
  return hp;
}

std::vector<IrregularSequence> stream_of(int n, uint64_t seed) {
  SynthConfig cfg;
  cfg.count = n;
  cfg.anomaly_fraction = 0.1;
  cfg.len_min = 8;
  cfg.len_max = 14;
  Rng rng(seed);
  return synth_generate(cfg, rng).sequences;
}

}  // namespace

TEST_CASE("process_sequence is prequential: the emitted score predates the update") {
  auto hp = online_hp();
  auto seqs = stream_of(3, 1);
  OnlineState state = make_online_state(hp, 1);

  // A pure scoring call against a copy of the pre-update parameters.
  Model snapshot = state.model;
  auto res = process_sequence(state, seqs[0]);
  const Vec pooled = encode(snapshot.encoder, seqs[0], hp.pooling).pooled;
  CHECK(res.score == anomaly_score(snapshot.classifier, pooled));
  CHECK(res.decision == decide(res.score));
  CHECK(state.seen == 1);

  // Processing the same sequence again scores with the updated parameters.
  auto res2 = process_sequence(state, seqs[0]);
  CHECK(res2.score != res.score);
}

TEST_CASE("a zero learning rate leaves the parameters untouched") {
  auto hp = online_hp(0.0);
  hp.optimizer = OptimizerKind::Sgd;
  auto seqs = stream_of(2, 2);
  OnlineState state = make_online_state(hp, 1);
  Model before = state.model;
  process_sequence(state, seqs[0]);
  auto pa = before.trainable();
  auto pb = state.model.trainable();
  for (size_t i = 0; i < pa.size(); ++i) {
    CHECK((*pa[i].second - *pb[i].second).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("malformed sequences are rejected without touching the state") {
  auto hp = online_hp();
  OnlineState state = make_online_state(hp, 1);
  IrregularSequence bad;
  bad.id = "bad";
  bad.timestamps = {1.0};
  bad.values = Mat::Ones(1, 1);
  CHECK_THROWS_AS(process_sequence(state, bad), DataError);
  CHECK(state.seen == 0);
}

TEST_CASE("online updates learn a stationary stream") {
  auto hp = online_hp(0.01);
  auto seqs = stream_of(50, 3);
  OnlineState state = make_online_state(hp, 1);
  std::vector<double> losses;
  for (const auto& s : seqs) losses.push_back(process_sequence(state, s).loss);
  double first10 = 0.0, last10 = 0.0;
  for (int i = 0; i < 10; ++i) {
    first10 += losses[i];
    last10 += losses[40 + i];
  }
  CHECK(last10 / 10.0 < first10 / 10.0);
}

TEST_CASE("pso_race rejects degenerate setups") {
  auto seqs = stream_of(10, 4);
  PsoConfig pso;
  pso.n_samples = 5;
  CHECK_THROWS_AS(pso_race({online_hp()}, seqs, pso, 1, 0), ConfigError);
  PsoConfig bad = pso;
  bad.n_samples = 0;
  CHECK_THROWS_AS(pso_race({online_hp(), online_hp()}, seqs, bad, 1, 0), ConfigError);
  CHECK_THROWS_AS(pso_race({online_hp(), online_hp()},
                           std::span<const IrregularSequence>(seqs.data(), 3), pso, 1, 0),
                  DataError);
}

TEST_CASE("the learning candidate wins the race against a frozen one") {
  auto seqs = stream_of(60, 5);
  auto frozen = online_hp(0.0);
  frozen.optimizer = OptimizerKind::Sgd;
  auto learning = online_hp(0.01);
  PsoConfig pso;
  pso.n_samples = 50;
  pso.cadence = 0;  // pure racing, no swarm moves
  auto result = pso_race({frozen, learning}, seqs, pso, 1, 9);
  CHECK(result.committed_index == 1);
  CHECK(result.final_fitness[1] < result.final_fitness[0]);
  CHECK(result.hp.learning_rate == 0.01);
}

TEST_CASE("identical candidates commit to the shared configuration") {
  auto seqs = stream_of(30, 6);
  auto hp = online_hp(0.02);
  PsoConfig pso;
  pso.n_samples = 20;
  pso.cadence = 5;
  auto result = pso_race({hp, hp, hp}, seqs, pso, 1, 10);
  CHECK(result.hp.alpha == doctest::Approx(hp.alpha));
  CHECK(result.hp.lambda == doctest::Approx(hp.lambda));
  CHECK(result.hp.state_dim == hp.state_dim);
  CHECK(result.hp.tau == hp.tau);
}

TEST_CASE("the committed candidate has the minimum running loss at commit time") {
  auto seqs = stream_of(40, 7);
  std::vector<Hyperparameters> candidates{online_hp(0.05), online_hp(0.01), online_hp(0.001)};
  PsoConfig pso;
  pso.n_samples = 30;
  pso.cadence = 0;
  auto result = pso_race(candidates, seqs, pso, 1, 11);
  for (double f : result.final_fitness) {
    CHECK(result.final_fitness[result.committed_index] <= f);
  }
  CHECK(static_cast<long>(result.verdicts.size()) == pso.n_samples);
}

TEST_CASE("a detector with one candidate commits immediately") {
  auto seqs = stream_of(5, 8);
  PsoConfig pso;
  pso.n_samples = 1;
  OnlineDetector detector({online_hp()}, pso, 1, 12);
  CHECK(detector.committed());
  auto v = detector.process(seqs[0]);
  CHECK(v.seen == 1);
  CHECK((v.decision == +1 || v.decision == -1));
}

TEST_CASE("replaying the same stream with the same seed reproduces every verdict") {
  auto seqs = stream_of(40, 9);
  std::vector<Hyperparameters> candidates{online_hp(0.02), online_hp(0.005)};
  PsoConfig pso;
  pso.n_samples = 15;
  pso.cadence = 5;

  auto run = [&] {
    OnlineDetector detector(candidates, pso, 1, 77);
    std::vector<Verdict> out;
    for (const auto& s : seqs) out.push_back(detector.process(s));
    return out;
  };
  auto a = run();
  auto b = run();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].score == b[i].score);  // bitwise
    CHECK(a[i].decision == b[i].decision);
    CHECK(a[i].seen == b[i].seen);
  }
}

TEST_CASE("swarm moves keep positions inside the search box") {
  auto seqs = stream_of(40, 10);
  auto a = online_hp(0.05);
  a.alpha = 10.0;
  auto b = online_hp(0.001);
  b.alpha = 2000.0;
  b.state_dim = 5;
  PsoConfig pso;
  pso.n_samples = 30;
  pso.cadence = 5;
  OnlineDetector detector({a, b}, pso, 1, 13);
  for (const auto& s : seqs) {
    detector.process(s);
    if (detector.committed()) break;
  }
  for (const auto& p : detector.particles()) {
    CHECK(p.position[0] >= 0.0);
    CHECK(p.position[0] <= 5.0);
    CHECK(p.position[3] >= 1.0);
    CHECK(p.position[3] <= 32.0);
    CHECK(p.state.hp.state_dim >= 1);
    CHECK(p.state.hp.tau >= 0);
  }
}
