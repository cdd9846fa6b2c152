#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "flocksim/common.hpp"

namespace flocksim::test {

// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 l^2).
inline Real kolmogorov_q(Real lambda) {
  if (lambda < 1e-3) return 1.0;
  Real sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const Real term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

// One-sample KS test against a CDF; returns the asymptotic p-value
// (Stephens' finite-n correction).
inline Real ks_test(std::vector<Real> xs, const std::function<Real(Real)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const Real n = static_cast<Real>(xs.size());
  Real d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Real f = cdf(xs[i]);
    d = std::max(d, std::fabs(f - static_cast<Real>(i) / n));
    d = std::max(d, std::fabs(static_cast<Real>(i + 1) / n - f));
  }
  const Real sn = std::sqrt(n);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

// Two-sample KS test p-value.
inline Real ks_test_2sample(std::vector<Real> a, std::vector<Real> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  Real d = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::fabs(static_cast<Real>(i) / a.size() -
                              static_cast<Real>(j) / b.size()));
  }
  const Real ne = static_cast<Real>(a.size()) * b.size() /
                  (a.size() + b.size());
  const Real sn = std::sqrt(ne);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

struct MeanStderr {
  Real mean = 0;
  Real stderr_mean = 0;
};

inline MeanStderr mean_stderr(const std::vector<Real>& xs) {
  Real mean = 0;
  for (Real x : xs) mean += x;
  mean /= xs.size();
  Real var = 0;
  for (Real x : xs) var += (x - mean) * (x - mean);
  var = xs.size() > 1 ? var / (xs.size() - 1) : 0.0;
  return {mean, std::sqrt(var / xs.size())};
}

}  // namespace flocksim::test
