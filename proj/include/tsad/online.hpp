#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsad/trainer.hpp"

namespace tsad {

struct Verdict {
  std::string id;
  double score = 0.0;
  int decision = -1;
  long seen = 0;  // sequences observed so far, this one included
};

// One prequentially trained model: every arriving sequence is scored with the
// current parameters first, then used for a single-sequence update.
struct OnlineState {
  Hyperparameters hp;
  Model model;
  AdamState adam;
  long seen = 0;
  double loss_sum = 0.0;                // running mean numerator
  std::vector<double> recent_losses;    // sliding window
  size_t window = 50;
  bool committed = false;

  double mean_loss() const { return seen > 0 ? loss_sum / static_cast<double>(seen) : 0.0; }
};

OnlineState make_online_state(const Hyperparameters& hp, int input_dim);

struct ProcessResult {
  int decision = -1;
  double score = 0.0;
  double loss = 0.0;
};

// Score, then update. Malformed sequences throw DataError before anything is
// touched, leaving the state unchanged.
ProcessResult process_sequence(OnlineState& state, const IrregularSequence& seq);

// ---------------------------------------------------------------------------
// Hyperparameter racing: several candidate models process the same stream in
// parallel while a particle swarm nudges their hyperparameters; after the
// racing window the candidate with the least running mean loss is committed
// and the rest are discarded.
// ---------------------------------------------------------------------------

struct PsoConfig {
  long n_samples = 100;  // racing window length
  int cadence = 20;      // swarm update every this many sequences; 0 = pure racing
  double inertia = 0.7;
  double cognitive = 1.4;
  double social = 1.4;
};

// Searched dimensions: (log10 alpha, log10 lambda, log10 mu, p, tau).
struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double best_fitness = std::numeric_limits<double>::infinity();
  OnlineState state;
  bool dead = false;  // diverged; keeps its slot but no longer races
};

class OnlineDetector {
 public:
  // With one candidate there is nothing to race: it commits immediately.
  OnlineDetector(std::vector<Hyperparameters> candidates, const PsoConfig& pso, int input_dim,
                 uint64_t seed);

  Verdict process(const IrregularSequence& seq);

  bool committed() const { return committed_; }
  int committed_index() const { return committed_index_; }
  const OnlineState& state() const;
  const std::vector<Particle>& particles() const { return particles_; }
  const std::vector<double>& stream_losses() const { return stream_losses_; }
  long seen() const { return seen_; }

 private:
  int leader() const;  // alive particle with the least running mean loss
  void swarm_step();
  void commit();

  PsoConfig pso_;
  int input_dim_;
  Rng rng_;
  std::vector<Particle> particles_;
  std::vector<double> stream_losses_;
  long seen_ = 0;
  bool committed_ = false;
  int committed_index_ = -1;
};

struct RaceResult {
  Hyperparameters hp;
  OnlineState state;
  int committed_index = -1;
  std::vector<double> final_fitness;  // running mean loss per particle at commit
  std::vector<Verdict> verdicts;
};

// Runs the racing window over a finite stream and commits. Needs at least
// two candidates and a positive window.
RaceResult pso_race(const std::vector<Hyperparameters>& candidates,
                    std::span<const IrregularSequence> stream, const PsoConfig& pso, int input_dim,
                    uint64_t seed);

}  // namespace tsad
