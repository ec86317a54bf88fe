#include "tsad/online.hpp"

#include <algorithm>
#include <cmath>

namespace tsad {

OnlineState make_online_state(const Hyperparameters& hp, int input_dim) {
  hp.validate();
  OnlineState state;
  state.hp = hp;
  Rng rng(hp.seed);
  state.model = Model::init(hp, input_dim, rng);
  return state;
}

ProcessResult process_sequence(OnlineState& state, const IrregularSequence& seq) {
  seq.validate();
  if (seq.dim() != state.model.encoder.cfg.input_dim) {
    throw DataError(cat("online: sequence '", seq.id, "' has dim ", seq.dim(), ", model expects ",
                        state.model.encoder.cfg.input_dim));
  }

  // Decision first, with the pre-update parameters.
  ProcessResult out;
  Vec pooled = encode(state.model.encoder, seq, state.hp.pooling).pooled;
  out.score = anomaly_score(state.model.classifier, pooled);
  out.decision = decide(out.score);

  // Then one single-sequence gradient step.
  std::vector<const IrregularSequence*> batch{&seq};
  double loss = 0.0;
  auto grads = loss_gradients(state.model, batch, state.hp, TrainMode::Unsupervised, &loss);
  if (state.hp.optimizer == OptimizerKind::Adam) {
    adam_update(state.model, grads, state.adam, state.hp.learning_rate, 1, state.hp.grad_clip);
  } else {
    sgd_update(state.model, grads, state.hp.learning_rate, 1, state.hp.grad_clip);
  }

  out.loss = loss;
  state.seen += 1;
  state.loss_sum += loss;
  state.recent_losses.push_back(loss);
  if (state.recent_losses.size() > state.window) {
    state.recent_losses.erase(state.recent_losses.begin());
  }
  return out;
}

namespace {

// Search-space bounds for (log10 alpha, log10 lambda, log10 mu, p, tau).
constexpr double kLo[5] = {0.0, -3.0, -5.0, 1.0, 0.0};
constexpr double kHi[5] = {5.0, 1.0, 0.0, 32.0, 10.0};

std::vector<double> encode_position(const Hyperparameters& hp) {
  return {std::log10(hp.alpha), std::log10(hp.lambda), std::log10(std::max(hp.learning_rate, 1e-5)),
          static_cast<double>(hp.state_dim), static_cast<double>(hp.tau)};
}

// Integer dimensions evolve continuously and round at decode time.
void decode_position(const std::vector<double>& pos, Hyperparameters& hp) {
  hp.alpha = std::pow(10.0, pos[0]);
  hp.lambda = std::pow(10.0, pos[1]);
  hp.learning_rate = std::pow(10.0, pos[2]);
  hp.state_dim = std::max(1, static_cast<int>(std::lround(pos[3])));
  hp.tau = std::max(0, static_cast<int>(std::lround(pos[4])));
}

}  // namespace

OnlineDetector::OnlineDetector(std::vector<Hyperparameters> candidates, const PsoConfig& pso,
                               int input_dim, uint64_t seed)
    : pso_(pso), input_dim_(input_dim), rng_(seed) {
  if (candidates.empty()) throw ConfigError("online: no hyperparameter candidates");
  if (pso_.n_samples < 1) throw ConfigError(cat("online: racing window must be >= 1, got ",
                                                pso_.n_samples));
  particles_.reserve(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    Particle p;
    Hyperparameters hp = candidates[i];
    hp.seed = rng_.spawn(i).next_u64();
    p.state = make_online_state(hp, input_dim_);
    p.position = encode_position(hp);
    p.velocity.assign(p.position.size(), 0.0);
    p.best_position = p.position;
    particles_.push_back(std::move(p));
  }
  if (particles_.size() == 1) commit();
}

int OnlineDetector::leader() const {
  int best = -1;
  double best_loss = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < particles_.size(); ++i) {
    if (particles_[i].dead) continue;
    const double loss = particles_[i].state.seen > 0 ? particles_[i].state.mean_loss()
                                                     : std::numeric_limits<double>::max();
    if (loss < best_loss) {
      best_loss = loss;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw NumericError("online: every racing candidate diverged");
  return best;
}

void OnlineDetector::swarm_step() {
  // Refresh personal bests from the running mean losses, find the global
  // best, then apply the standard velocity and position updates.
  for (auto& p : particles_) {
    if (p.dead) continue;
    const double fitness = p.state.mean_loss();
    if (fitness < p.best_fitness) {
      p.best_fitness = fitness;
      p.best_position = p.position;
    }
  }
  const Particle* gbest = nullptr;
  for (const auto& p : particles_) {
    if (p.dead) continue;
    if (!gbest || p.best_fitness < gbest->best_fitness) gbest = &p;
  }
  if (!gbest) return;

  for (auto& p : particles_) {
    if (p.dead) continue;
    bool dims_changed = false;
    for (size_t d = 0; d < p.position.size(); ++d) {
      const double r1 = rng_.uniform();
      const double r2 = rng_.uniform();
      p.velocity[d] = pso_.inertia * p.velocity[d] +
                      pso_.cognitive * r1 * (p.best_position[d] - p.position[d]) +
                      pso_.social * r2 * (gbest->best_position[d] - p.position[d]);
      const double moved = std::clamp(p.position[d] + p.velocity[d], kLo[d], kHi[d]);
      if (d >= 3 && std::lround(moved) != std::lround(p.position[d])) dims_changed = true;
      p.position[d] = moved;
    }
    Hyperparameters hp = p.state.hp;
    decode_position(p.position, hp);
    if (dims_changed) {
      // A new state dimension means new tensor shapes: rebuild the model but
      // keep the running fitness, which is what the race scores.
      hp.seed = rng_.next_u64();
      OnlineState fresh = make_online_state(hp, input_dim_);
      fresh.seen = p.state.seen;
      fresh.loss_sum = p.state.loss_sum;
      fresh.recent_losses = p.state.recent_losses;
      p.state = std::move(fresh);
    } else {
      p.state.hp = hp;
      p.state.model.classifier.lambda = hp.lambda;
    }
  }
}

void OnlineDetector::commit() {
  committed_index_ = particles_.empty() ? -1 : leader();
  committed_ = true;
  particles_[committed_index_].state.committed = true;
}

const OnlineState& OnlineDetector::state() const {
  const int idx = committed_ ? committed_index_ : leader();
  return particles_[idx].state;
}

Verdict OnlineDetector::process(const IrregularSequence& seq) {
  seq.validate();  // malformed input leaves every particle untouched
  seen_ += 1;

  Verdict verdict;
  verdict.id = seq.id;
  verdict.seen = seen_;

  if (committed_) {
    auto& state = particles_[committed_index_].state;
    const auto res = process_sequence(state, seq);
    verdict.score = res.score;
    verdict.decision = res.decision;
    stream_losses_.push_back(res.loss);
    return verdict;
  }

  // Racing: the current leader's pre-update parameters produce the verdict,
  // then every live candidate trains on the sequence.
  const int lead = leader();
  {
    const auto& ls = particles_[lead].state;
    const Vec pooled = encode(ls.model.encoder, seq, ls.hp.pooling).pooled;
    verdict.score = anomaly_score(ls.model.classifier, pooled);
    verdict.decision = decide(verdict.score);
  }

  double lead_loss = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < particles_.size(); ++i) {
    auto& p = particles_[i];
    if (p.dead) continue;
    try {
      const auto res = process_sequence(p.state, seq);
      if (static_cast<int>(i) == lead) lead_loss = res.loss;
    } catch (const NumericError&) {
      p.dead = true;
    }
  }
  if (std::all_of(particles_.begin(), particles_.end(), [](const Particle& p) { return p.dead; })) {
    throw NumericError("online: every racing candidate diverged");
  }
  stream_losses_.push_back(lead_loss);

  if (pso_.cadence > 0 && seen_ < pso_.n_samples && seen_ % pso_.cadence == 0) {
    swarm_step();
  }
  if (seen_ >= pso_.n_samples) commit();
  return verdict;
}

RaceResult pso_race(const std::vector<Hyperparameters>& candidates,
                    std::span<const IrregularSequence> stream, const PsoConfig& pso, int input_dim,
                    uint64_t seed) {
  if (candidates.size() < 2) {
    throw ConfigError(cat("pso_race: needs at least 2 candidates, got ", candidates.size()));
  }
  if (pso.n_samples < 1) throw ConfigError("pso_race: racing window must be >= 1");
  if (static_cast<long>(stream.size()) < pso.n_samples) {
    throw DataError(cat("pso_race: stream has ", stream.size(), " sequences, racing needs ",
                        pso.n_samples));
  }

  OnlineDetector detector(candidates, pso, input_dim, seed);
  RaceResult out;
  for (const auto& seq : stream) {
    out.verdicts.push_back(detector.process(seq));
    if (detector.committed()) break;
  }
  out.committed_index = detector.committed_index();
  for (const auto& p : detector.particles()) {
    out.final_fitness.push_back(p.dead ? std::numeric_limits<double>::infinity()
                                       : p.state.mean_loss());
  }
  out.state = detector.state();
  out.hp = out.state.hp;
  return out;
}

}  // namespace tsad
