#include "mc/random.hpp"

#include <cmath>
#include <limits>

#include "mc/core.hpp"

namespace mc {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() { return gauss_(engine_); }

Eigen::VectorXd RandomStream::normal_vector(int n) {
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = normal();
  return z;
}

std::size_t RandomStream::index(std::size_t n) {
  if (n == 0) throw Error("index: empty range");
  auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return k < n ? k : n - 1;
}

std::size_t RandomStream::categorical(const std::vector<double>& weights) {
  if (weights.empty()) throw Error("categorical: no weights");
  if (weights.size() == 1) return 0;
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total)) throw Error("degenerate weights");
  const double u = uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

std::size_t RandomStream::categorical_log(const std::vector<double>& log_weights) {
  if (log_weights.empty()) throw Error("categorical: no weights");
  if (log_weights.size() == 1) return 0;
  double mx = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) mx = std::max(mx, lw);
  if (!std::isfinite(mx)) throw Error("degenerate weights");
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - mx);
  return categorical(w);
}

std::vector<RandomStream> RandomStream::split(std::size_t n) {
  std::vector<RandomStream> out;
  out.reserve(n);
  const std::uint64_t round = ++splits_;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t s = splitmix64(seed_ ^ splitmix64(round * 0x100000001B3ULL));
    s = splitmix64(s + static_cast<std::uint64_t>(i) * 0xD6E8FEB86659FD93ULL);
    out.emplace_back(s);
  }
  return out;
}

RandomStream seeded_stream(std::uint64_t seed) { return RandomStream(seed); }

std::vector<RandomStream> split(RandomStream& stream, std::size_t n) { return stream.split(n); }

}  // namespace mc
