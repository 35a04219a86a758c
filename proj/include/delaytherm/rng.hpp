#pragma once

#include <cstdint>
#include <random>

#include "delaytherm/linalg.hpp"

namespace delaytherm {

/// Seeded uniform generator with a fixed bit-to-double mapping, so that
/// randomized suites reproduce exactly for a given seed.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  Complex complex_in_box(double half_width) {
    const double re = uniform(-half_width, half_width);
    const double im = uniform(-half_width, half_width);
    return Complex{re, im};
  }

  /// Dense matrix with entries uniform in [-half_width, half_width]
  /// (real by default).
  CMatrix matrix(std::size_t n, double half_width, bool complex_entries = false) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) = complex_entries ? complex_in_box(half_width)
                                  : Complex{uniform(-half_width, half_width), 0.0};
      }
    }
    return m;
  }

  CVector vector(std::size_t n, double half_width, bool complex_entries = false) {
    CVector v(n);
    for (auto& x : v) {
      x = complex_entries ? complex_in_box(half_width)
                          : Complex{uniform(-half_width, half_width), 0.0};
    }
    return v;
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace delaytherm
