#pragma once

#include <cmath>
#include <functional>

#include "flocksim/common.hpp"

namespace flocksim {

namespace detail {

inline Real simpson(Real a, Real b, Real fa, Real fm, Real fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline Real adaptive_simpson_rec(const std::function<Real(Real)>& f, Real a,
                                 Real b, Real fa, Real fm, Real fb, Real whole,
                                 Real tol, int depth) {
  const Real m = 0.5 * (a + b);
  const Real lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const Real flm = f(lm), frm = f(rm);
  const Real left = simpson(a, m, fa, flm, fm);
  const Real right = simpson(m, b, fm, frm, fb);
  const Real delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature on [a,b]; tol is an absolute tolerance.
inline Real integrate(const std::function<Real(Real)>& f, Real a, Real b,
                      Real tol = 1e-12, int max_depth = 40) {
  const Real m = 0.5 * (a + b);
  const Real fa = f(a), fm = f(m), fb = f(b);
  const Real whole = detail::simpson(a, b, fa, fm, fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol,
                                      max_depth);
}

// Pre-splits [a,b] into fixed panels before adapting, so narrow features
// cannot slip between the top-level sample points.
inline Real integrate_composite(const std::function<Real(Real)>& f, Real a,
                                Real b, Real tol = 1e-12, int panels = 64,
                                int max_depth = 40) {
  Real acc = 0;
  const Real h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    acc += integrate(f, a + i * h, a + (i + 1) * h, tol / panels, max_depth);
  }
  return acc;
}

}  // namespace flocksim
