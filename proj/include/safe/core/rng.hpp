#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace safe {

std::uint64_t splitmix64(std::uint64_t x);

// Combines a run seed with a label into an engine seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

// Deterministic random stream. Distributions are implemented here rather than
// through <random> so sequences are identical across standard libraries.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64() { return engine_(); }
  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal (Box-Muller).
  double normal();
  // Uniform in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

RandomStream seeded_rng(std::uint64_t seed, std::string_view stream_label);

}  // namespace safe
