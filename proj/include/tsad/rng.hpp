#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <vector>

namespace tsad {

// Deterministic RNG used everywhere: a seeded mt19937_64 with hand-rolled
// distributions. std:: distributions are implementation-defined and some
// keep internal state, which would break bit-exact checkpoint round-trips.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(engine_() % span);
  }

  // Box-Muller without the cached second value, so the generator carries no
  // hidden state beyond the engine itself.
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Deterministically derive an independent child generator from the
  // construction seed; valid even after the engine has advanced.
  Rng spawn(uint64_t stream) const {
    uint64_t z = seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

  friend std::ostream& operator<<(std::ostream& os, const Rng& r) {
    return os << r.seed_ << ' ' << r.engine_;
  }
  friend std::istream& operator>>(std::istream& is, Rng& r) {
    return is >> r.seed_ >> r.engine_;
  }

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.engine_ == b.engine_ && a.seed_ == b.seed_;
  }

 private:
  std::mt19937_64 engine_;
  uint64_t seed_ = 0;
};

}  // namespace tsad
