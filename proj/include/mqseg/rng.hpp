// Deterministic random-number streams for simulation.
//
// Reproducibility contract: every draw is a pure function of (master_seed,
// replicate_index, draw sequence). The engine is std::mt19937_64, whose
// seeding and output sequence are fully specified by the C++ standard, so
// streams are bit-exact across platforms and compilers. Distribution
// transforms are written out explicitly below (std::*_distribution is
// implementation-defined and must not be used here).
#ifndef MQSEG_RNG_HPP
#define MQSEG_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mqseg {

// splitmix64 finalizer (Steele, Lea, Flood 2014); used only to spread
// (master seed, substream index) into well-separated engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  // Two rounds: one to decorrelate consecutive masters, one to split by index.
  return splitmix64(splitmix64(master) + index);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  RngStream(std::uint64_t master, std::uint64_t substream)
      : engine_(substream_seed(master, substream)) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard normal via the Box-Muller pair; the second member of each pair
  // is cached so draw order stays well-defined.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Standard Cauchy (location 0, scale 1).
  double cauchy() {
    return std::tan(std::numbers::pi * (uniform01() - 0.5));
  }

  // Student t with 3 degrees of freedom: Z0 / sqrt(chi2_3 / 3).
  double student_t3() {
    const double z0 = normal();
    const double c = chi2_3();
    if (c <= 0.0) return 0.0;  // unreachable in practice, keeps the math total
    return z0 / std::sqrt(c / 3.0);
  }

  // Chi-square with 3 degrees of freedom as a sum of squared normals.
  double chi2_3() {
    const double a = normal(), b = normal(), c = normal();
    return a * a + b * b + c * c;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace mqseg

#endif  // MQSEG_RNG_HPP
