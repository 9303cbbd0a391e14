#pragma once

#include <cstdint>

// Splittable counter-free PRNG (splitmix64 core). Every random quantity in
// the toolkit flows from one user seed through derive() chains, so runs are
// reproducible bit-for-bit across platforms; std:: distributions are avoided
// on purpose (their output is implementation-defined).

namespace abpcap {

class Rng {
 public:
  explicit Rng(std::uint64_t seed)
      : origin_(mix(seed ^ 0x9E3779B97F4A7C15ull)), state_(origin_) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(next() % span);
  }

  // Independent child stream; a pure function of (parent seed material,
  // salt), so sibling streams never depend on consumption order.
  Rng derive(std::uint64_t salt) const {
    Rng child(0);
    child.origin_ = mix(origin_ ^ mix(salt + 0x632BE59BD9B4E019ull));
    child.state_ = child.origin_;
    return child;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t origin_;
  std::uint64_t state_;
};

}  // namespace abpcap
