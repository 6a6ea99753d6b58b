#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace mc {

// Seeded random source. Equal seeds give equal draw sequences. Children made by
// split() get seeds derived from (parent seed, split counter, child index), so
// their identities are stable across runs.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  Eigen::VectorXd normal_vector(int n);
  // Uniform index in [0, n).
  std::size_t index(std::size_t n);

  // Draws an index with probability proportional to `weights`. Consumes one
  // uniform, except when there is a single entry (no draw at all).
  std::size_t categorical(const std::vector<double>& weights);
  // Same, with log-weights; -inf entries are never selected.
  std::size_t categorical_log(const std::vector<double>& log_weights);

  std::vector<RandomStream> split(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t splits_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

RandomStream seeded_stream(std::uint64_t seed);
std::vector<RandomStream> split(RandomStream& stream, std::size_t n);

std::uint64_t splitmix64(std::uint64_t x);

// Runs f(i, stream_i) for i in [0, n). With n == 1 the parent stream is used
// directly; otherwise each index gets its own split substream. Multiple-candidate
// samplers and particle filters use this so that candidate i's draws do not
// depend on how the other candidates are generated.
template <class F>
void for_each_stream(RandomStream& rng, std::size_t n, F&& f) {
  if (n == 1) {
    f(std::size_t{0}, rng);
    return;
  }
  auto subs = rng.split(n);
  for (std::size_t i = 0; i < n; ++i) f(i, subs[i]);
}

}  // namespace mc
