#ifndef WINDOPT_RNG_HPP
#define WINDOPT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace windopt {

/// Final mixing step of splitmix64 (Steele/Lea/Flood). Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based seed fan-out: child = mix(mix(mix(master ^ STREAM) + a) + b).
/// Adding samples or batches never perturbs seeds already handed out, since
/// every child is keyed on its own (stream, a, b) coordinates.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = mix64(master ^ (0xa0761d6478bd642fULL * (stream + 1)));
  s = mix64(s + a);
  s = mix64(s + b);
  return s;
}

/// Well-known per-purpose stream tags for derive_seed.
namespace seed_stream {
inline constexpr std::uint64_t scenario = 1;   // per (batch, sample) optimizer draws
inline constexpr std::uint64_t evaluate = 2;   // cmd_evaluate Monte Carlo samples
inline constexpr std::uint64_t windrose = 3;   // cmd_windrose joint draws
inline constexpr std::uint64_t turbulence = 4; // spectral noise per (component, mode)
}  // namespace seed_stream

/// Minimal splitmix64 generator. All draws are pure functions of the state
/// sequence, so identical seeds reproduce identical streams on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; two fresh uniforms per call (no cached
  /// spare, so the stream position is a simple function of the call count).
  double normal() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace windopt

#endif  // WINDOPT_RNG_HPP
