#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flocksim {

using Real = double;
using Vec = std::vector<Real>;
using ConstSpan = std::span<const Real>;
using MutSpan = std::span<Real>;

// Thrown when a simulation state stops being finite (overflow, bad input data).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Precondition/invariant check that survives NDEBUG builds.
inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void check_internal(bool cond, const char* msg) {
  if (!cond) throw std::logic_error(msg);
}

inline Real sq(Real x) { return x * x; }

inline Real norm2(ConstSpan v) {
  Real s = 0;
  for (Real x : v) s += x * x;
  return s;
}

inline Real norm(ConstSpan v) { return std::sqrt(norm2(v)); }

// The bracket <v> = (1 + |v|^2)^{1/2}.
inline Real bracket(ConstSpan v) { return std::sqrt(1.0 + norm2(v)); }

inline Real bracket_pow(ConstSpan v, Real exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(1.0 + norm2(v), 0.5 * exponent);
}

inline bool all_finite(ConstSpan v) {
  for (Real x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline Vec sub(ConstSpan a, ConstSpan b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace flocksim
