#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>

namespace gcsl {

// splitmix64 finalizer, used to spread seeds before feeding them to the engine
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Deterministic random stream. Child streams are derived from the seed (not
// the consumed state), so e.g. adding evaluation points does not shift the
// randomness seen by collection or training.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix64(seed)) {}

  Rng child(std::string_view label, std::uint64_t index = 0) const {
    return Rng(mix64(seed_ ^ mix64(fnv1a(label) + 0x632be59bd9b4e019ull * index)));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1) with 53 random bits
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // [0, n), unbiased
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<int>(x % un);
  }

  // index distributed per `probs` (assumed to sum to ~1; rounding slack goes
  // to the last index)
  int categorical(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("categorical: empty distribution");
    const double u = uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace gcsl
