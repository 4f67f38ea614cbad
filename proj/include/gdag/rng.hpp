#pragma once

#include <cmath>
#include <cstdint>

namespace gdag {

struct RandomSeed {
  std::uint64_t value = 0;
};

// Counter-based deterministic generator (SplitMix64 output function over a
// per-stream state).  Every sampling operation owns its own (seed, stream)
// pair, so results are bit-reproducible and streams are never shared
// between operations.
class CounterRng {
 public:
  CounterRng(RandomSeed seed, std::uint64_t stream)
      : state_(mix(seed.value ^ mix(stream ^ 0x6a09e667f3bcc909ull))) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // Gamma(shape, scale 1), Marsaglia-Tsang; valid for any shape > 0.
  double gamma(double shape) {
    if (shape < 1.0) {
      return gamma(shape + 1.0) * std::pow(uniform_pos(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
    return z ^ (z >> 33);
  }

  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stream tags; one per sampling operation.
namespace streams {
inline constexpr std::uint64_t kWishart = 0x5749534841525431ull;
inline constexpr std::uint64_t kNormalWishartW = 0x4e575f5749534831ull;
inline constexpr std::uint64_t kNormalWishartMu = 0x4e575f4d55303031ull;
inline constexpr std::uint64_t kDataset = 0x4441544153455431ull;
inline constexpr std::uint64_t kCharacterize = 0x4348415241435431ull;
inline constexpr std::uint64_t kMixture = 0x4d49585455524531ull;
inline constexpr std::uint64_t kLocalPilot = 0x4c4f43414c504c54ull;
inline constexpr std::uint64_t kLocalTest = 0x4c4f43414c545354ull;
inline constexpr std::uint64_t kSearchRestart = 0x5253545254535231ull;
inline constexpr std::uint64_t kPriorParams = 0x5052494f52505253ull;
}  // namespace streams

}  // namespace gdag
