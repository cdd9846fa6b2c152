#include "flocksim/ineq_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace flocksim {

namespace {

Real pow2p(Real x2, Real p) { return std::pow(x2, p); }  // x2 = |x|^2

// E_u f(v_j + u) under the two-atom noise: (f(v+u0) + f(v-u0)) / 2.
template <typename F>
Real atom_mean(ConstSpan v, ConstSpan u0, F&& f) {
  Vec plus(v.size()), minus(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    plus[i] = v[i] + u0[i];
    minus[i] = v[i] - u0[i];
  }
  return 0.5 * (f(ConstSpan(plus)) + f(ConstSpan(minus)));
}

Real lambda_2p(const ConfigSample& cs) {
  return std::pow(norm2(cs.u0), cs.p);
}

}  // namespace

CheckResult check_drift_inequality(const ConfigSample& cs, Real C) {
  require(cs.p >= 2, "drift estimate requires p >= 2");
  const auto& s = cs.state;
  const int n = s.n;
  const Real p = cs.p;

  Real lhs = 0;
  for (int k = 0; k < n; ++k) {
    const Real vk2p = pow2p(norm2(s.v(k)), p);
    for (int j = 0; j < n; ++j) {
      const Real rate = cs.psi.value(sub(s.r(k), s.r(j))) *
                        cs.sigma.value(sub(s.v(k), s.v(j)));
      if (rate == 0) continue;
      const Real jump = atom_mean(s.v(j), cs.u0, [&](ConstSpan w) {
        return pow2p(norm2(w), p);
      });
      lhs += rate * (jump - vk2p);
    }
  }
  lhs /= static_cast<Real>(n) * n;

  Real moment_sum = 0;
  for (int j = 0; j < n; ++j)
    moment_sum += bracket_pow(s.v(j), 2 * p - 2 + cs.sigma.gamma());
  const Real rhs =
      lambda_2p(cs) * std::pow(2.0, 3.0 * p) * C / n * moment_sum;
  return {lhs, rhs, lhs <= rhs};
}

CheckResult check_abs_inequality(const ConfigSample& cs, Real C) {
  require(cs.p >= 0.5, "absolute estimate requires p >= 1/2");
  const auto& s = cs.state;
  const int n = s.n;
  const Real p = cs.p;

  Real lhs = 0;
  for (int k = 0; k < n; ++k) {
    const Real vk2p = bracket_pow(s.v(k), 2 * p);
    for (int j = 0; j < n; ++j) {
      const Real rate = cs.psi.value(sub(s.r(k), s.r(j))) *
                        cs.sigma.value(sub(s.v(k), s.v(j)));
      if (rate == 0) continue;
      const Real jump = atom_mean(s.v(j), cs.u0, [&](ConstSpan w) {
        return std::fabs(bracket_pow(w, 2 * p) - vk2p);
      });
      lhs += rate * jump;
    }
  }
  lhs /= static_cast<Real>(n) * n;

  Real moment_sum = 0;
  for (int j = 0; j < n; ++j)
    moment_sum += bracket_pow(s.v(j), 2 * p + cs.sigma.gamma());
  const Real rhs =
      lambda_2p(cs) * std::pow(2.0, 2.0 * p) * C / n * moment_sum;
  return {lhs, rhs, lhs <= rhs};
}

CheckResult check_exp_inequality(const ConfigSample& cs) {
  require(cs.sigma.gamma() == 0, "exponential estimate requires gamma = 0");
  const auto& s = cs.state;
  const int n = s.n;
  const Real delta = cs.delta, kappa = cs.kappa;
  require(delta > 0 && kappa > 0 && kappa <= 1,
          "exponential estimate needs delta > 0, kappa in (0,1]");

  auto e_bracket = [&](ConstSpan v) {
    return std::exp(delta * std::pow(bracket(v), kappa));
  };

  Real lhs = 0;
  for (int k = 0; k < n; ++k) {
    const Real ek = e_bracket(s.v(k));
    for (int j = 0; j < n; ++j) {
      const Real rate = cs.sigma.value(sub(s.v(k), s.v(j)));
      if (rate == 0) continue;
      const Real jump = atom_mean(s.v(j), cs.u0, [&](ConstSpan w) {
        return std::fabs(e_bracket(w) - ek);
      });
      lhs += rate * jump;
    }
  }
  lhs /= static_cast<Real>(n) * n;

  // c(delta, kappa) is exact for the two-atom law.
  const Real c_dk = std::exp(delta * std::pow(norm2(cs.u0), 0.5 * kappa));
  Real sum_exp = 0;
  for (int j = 0; j < n; ++j) sum_exp += e_bracket(s.v(j));
  const Real rhs =
      cs.sigma.c_sigma() * (1.0 + std::exp(delta) * c_dk) / n * sum_exp;
  return {lhs, rhs, lhs <= rhs};
}

CancellationResult check_cancellation(const ConfigSample& cs) {
  const auto& s = cs.state;
  const int n = s.n;
  const Real p = cs.p;

  Real residual = 0, positive = 0;
  for (int k = 0; k < n; ++k) {
    const Real vk2p = pow2p(norm2(s.v(k)), p);
    for (int j = 0; j < n; ++j) {
      const Real rate = cs.psi.value(sub(s.r(k), s.r(j))) *
                        cs.sigma.value(sub(s.v(k), s.v(j)));
      const Real diff = pow2p(norm2(s.v(j)), p) - vk2p;
      residual += rate * diff;
      if (diff > 0) positive += rate * diff;
    }
  }
  CancellationResult res;
  res.residual = residual;
  res.positive_part = positive;
  res.holds = std::fabs(residual) <= 1e-9 * std::max(positive, 1e-300);
  if (positive == 0) res.holds = residual == 0;
  return res;
}

CheckResult check_young(const ConfigSample& cs) {
  const auto& s = cs.state;
  const Real p = cs.p, gamma = cs.sigma.gamma();
  Real worst = 0;
  for (int k = 0; k < s.n; ++k) {
    for (int j = 0; j < s.n; ++j) {
      const Real lhs =
          bracket_pow(s.v(j), 2 * p) * bracket_pow(s.v(k), gamma);
      const Real rhs =
          2 * p / (2 * p + gamma) * bracket_pow(s.v(j), 2 * p + gamma) +
          gamma / (2 * p + gamma) * bracket_pow(s.v(k), 2 * p + gamma);
      worst = std::max(worst, lhs / rhs);
    }
  }
  return {worst, 1.0, worst <= 1.0 + 1e-12};
}

ConfigSample random_config(Rng& rng, Real p, Real gamma,
                           const SampleRanges& ranges) {
  const int n =
      ranges.n_min + static_cast<int>(rng.uniform_index(
                         static_cast<std::uint64_t>(ranges.n_max - ranges.n_min + 1)));
  const int d =
      ranges.d_min + static_cast<int>(rng.uniform_index(
                         static_cast<std::uint64_t>(ranges.d_max - ranges.d_min + 1)));

  ParticleState state = ParticleState::zeros(n, d);
  for (auto& x : state.positions) x = rng.uniform(-ranges.coord_max, ranges.coord_max);
  for (auto& x : state.velocities) x = rng.uniform(-ranges.coord_max, ranges.coord_max);

  PsiKernel psi = rng.bernoulli(0.5)
                      ? PsiKernel::constant(rng.uniform(0.1, 1.0))
                      : PsiKernel::rational(rng.uniform(0.1, 2.0),
                                            rng.uniform(0.5, 3.0));
  SigmaKernel sigma =
      gamma == 0.0 ? SigmaKernel::constant(rng.uniform(0.1, 1.0))
                   : SigmaKernel::bracket_power(rng.uniform(0.1, 1.0), gamma);

  // Atom with norm in [atom_norm_min, atom_norm_max], random direction.
  Vec u0(d);
  Real n2 = 0;
  do {
    for (auto& x : u0) x = rng.gaussian();
    n2 = norm2(u0);
  } while (n2 == 0);
  const Real target = rng.uniform(ranges.atom_norm_min, ranges.atom_norm_max);
  for (auto& x : u0) x *= target / std::sqrt(n2);

  ConfigSample cs{std::move(state), psi, sigma, std::move(u0), p,
                  rng.uniform(0.2, 1.0), rng.uniform(0.3, 1.0)};
  return cs;
}

namespace {

template <typename RatioFn>
Real calibrate(std::size_t n_samples, std::uint64_t seed, Real p, Real gamma,
               const SampleRanges& ranges, RatioFn&& ratio) {
  Rng rng(seed);
  Real worst = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const ConfigSample cs = random_config(rng, p, gamma, ranges);
    worst = std::max(worst, ratio(cs));
  }
  // Guard against an all-nonpositive calibration batch.
  return 10.0 * std::max(worst, 1e-12);
}

}  // namespace

Real calibrate_drift_constant(Real p, Real gamma, std::size_t n_samples,
                              std::uint64_t seed, const SampleRanges& ranges) {
  return calibrate(n_samples, seed, p, gamma, ranges,
                   [](const ConfigSample& cs) {
                     const CheckResult r = check_drift_inequality(cs, 1.0);
                     return r.rhs > 0 ? r.lhs / r.rhs : 0.0;
                   });
}

Real calibrate_abs_constant(Real p, Real gamma, std::size_t n_samples,
                            std::uint64_t seed, const SampleRanges& ranges) {
  return calibrate(n_samples, seed, p, gamma, ranges,
                   [](const ConfigSample& cs) {
                     const CheckResult r = check_abs_inequality(cs, 1.0);
                     return r.rhs > 0 ? r.lhs / r.rhs : 0.0;
                   });
}

std::string lemma_name(Lemma lemma) {
  switch (lemma) {
    case Lemma::kDrift:
      return "moment_drift";
    case Lemma::kAbs:
      return "moment_absolute";
    case Lemma::kExp:
      return "exponential";
    case Lemma::kCancellation:
      return "cancellation";
    case Lemma::kYoung:
      return "young";
  }
  return "?";
}

CertificationReport certify_lemma(Lemma lemma, Real p, Real gamma,
                                  std::size_t n_calibrate,
                                  std::size_t n_verify, std::uint64_t seed,
                                  const SampleRanges& ranges) {
  CertificationReport rep;
  rep.lemma = lemma_name(lemma);
  rep.p = p;
  rep.gamma = gamma;
  rep.samples = n_verify;

  Real C = 0;
  const std::uint64_t calib_seed = derive_seed(seed, 1);
  const std::uint64_t verify_seed = derive_seed(seed, 2);
  if (lemma == Lemma::kDrift) {
    C = calibrate_drift_constant(p, gamma, n_calibrate, calib_seed, ranges);
  } else if (lemma == Lemma::kAbs) {
    C = calibrate_abs_constant(p, gamma, n_calibrate, calib_seed, ranges);
  }
  rep.calibrated_C = C;

  Rng rng(verify_seed);
  for (std::size_t i = 0; i < n_verify; ++i) {
    const ConfigSample cs = random_config(rng, p, gamma, ranges);
    bool holds = true;
    Real margin = 0;
    switch (lemma) {
      case Lemma::kDrift: {
        const CheckResult r = check_drift_inequality(cs, C);
        holds = r.holds;
        margin = r.rhs > 0 ? r.lhs / r.rhs : 0.0;
        break;
      }
      case Lemma::kAbs: {
        const CheckResult r = check_abs_inequality(cs, C);
        holds = r.holds;
        margin = r.rhs > 0 ? r.lhs / r.rhs : 0.0;
        break;
      }
      case Lemma::kExp: {
        const CheckResult r = check_exp_inequality(cs);
        holds = r.holds;
        margin = r.rhs > 0 ? r.lhs / r.rhs : 0.0;
        break;
      }
      case Lemma::kCancellation: {
        const CancellationResult r = check_cancellation(cs);
        holds = r.holds;
        margin = r.positive_part > 0
                     ? std::fabs(r.residual) / r.positive_part
                     : 0.0;
        break;
      }
      case Lemma::kYoung: {
        const CheckResult r = check_young(cs);
        holds = r.holds;
        margin = r.lhs;
        break;
      }
    }
    if (!holds) ++rep.violations;
    rep.max_margin = std::max(rep.max_margin, margin);
  }
  return rep;
}

}  // namespace flocksim
