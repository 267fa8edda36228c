#pragma once

// Small helpers shared by the unit tests: a deterministic generator for
// property checks and a composite Simpson rule used as an independent
// integration reference.

#include <cmath>
#include <cstdint>
#include <functional>

namespace qdeph_test {

// xorshift64*; fixed seeds keep every property run reproducible.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next() {
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    return s_ * 0x2545f4914f6cdd1dULL;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::uint64_t s_;
};

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace qdeph_test
