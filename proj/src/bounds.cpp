#include "flocksim/bounds.hpp"

#include <cmath>
#include <cstdio>

namespace flocksim {

Real gronwall_linear(Real a0, Real K, Real t) {
  require(a0 >= 0 && K >= 0 && t >= 0, "gronwall_linear needs a0, K, t >= 0");
  return a0 * std::exp(K * t);
}

Real bihari_lasalle(Real f0, Real K, Real alpha, Real t) {
  require(alpha > 0 && alpha < 1, "bihari alpha must lie in (0,1)");
  require(f0 >= 0 && K >= 0 && t >= 0, "bihari needs f0, K, t >= 0");
  return std::pow(std::pow(f0, alpha) + alpha * K * t, 1.0 / alpha);
}

Real bihari_lasalle_relaxed(Real f0, Real K, Real alpha, Real t) {
  require(alpha > 0 && alpha < 1, "bihari alpha must lie in (0,1)");
  require(f0 >= 0 && K >= 0 && t >= 0, "bihari needs f0, K, t >= 0");
  return std::pow(2.0, 1.0 / alpha - 1.0) * f0 +
         0.5 * std::pow(2.0 * alpha * K, 1.0 / alpha) * std::pow(t, 1.0 / alpha);
}

Real moment_envelope(Real p, Real gamma, Real lambda_2p, Real C, Real init_2p,
                     Real t) {
  require(gamma >= 0 && gamma <= 2, "moment_envelope gamma must lie in [0,2]");
  require(p >= 2, "moment_envelope requires p >= 2");
  require(lambda_2p >= 0 && C >= 0 && init_2p >= 0 && t >= 0,
          "moment_envelope needs nonnegative parameters");
  const Real c_p = C * lambda_2p * std::pow(2.0, 5.0 * p);
  if (gamma == 2.0) {
    return std::pow(2.0, 2.0 * p) * init_2p * std::exp(c_p * t);
  }
  const Real expo = 2.0 * p / (2.0 - gamma);
  return std::pow(2.0, 4.0 * p * p / (2.0 - gamma)) * init_2p +
         std::pow(c_p * (2.0 - gamma) / (2.0 * p), expo) * std::pow(t, expo);
}

Real tv_envelope_bounded(Real tv0, Real psi_max, Real sigma_max, Real t) {
  require(tv0 >= 0 && tv0 <= 2, "tv0 must lie in [0,2]");
  require(psi_max >= 0 && sigma_max >= 0 && t >= 0,
          "tv_envelope needs nonnegative parameters");
  return tv0 * std::exp(4.0 * psi_max * sigma_max * t);
}

Real osgood_closed_form(Real rho0, Real C, Real t) {
  require(rho0 > 0 && rho0 < 1, "osgood rho0 must lie in (0,1)");
  require(C > 0 && t >= 0, "osgood needs C > 0, t >= 0");
  return std::exp(1.0 - (1.0 - std::log(rho0)) * std::exp(-C * t));
}

Real osgood_envelope(Real rho0, Real C, Real t) {
  require(rho0 > 0 && rho0 < 1, "osgood rho0 must lie in (0,1)");
  require(C > 0 && t >= 0, "osgood needs C > 0, t >= 0");
  // The closed form reaches 1 when (1 - ln rho0) e^{-C t} = 1; past that the
  // |ln rho| branch flips and 1 + ln rho <= 2 gives the rate-2C extension.
  const Real t_star = std::log(1.0 - std::log(rho0)) / C;
  if (t <= t_star) return osgood_closed_form(rho0, C, t);
  return std::exp(2.0 * C * (t - t_star));
}

Real exp_moment_envelope(Real init, Real C, Real t) {
  require(init >= 1, "exp moment initial value must be >= 1");
  require(C >= 0 && t >= 0, "exp_moment_envelope needs C, t >= 0");
  return init * std::exp(C * t);
}

BoundEnvelope BoundEnvelope::gronwall(Real a0, Real K) {
  BoundEnvelope e(Family::kGronwall, "gronwall_linear");
  e.p0_ = a0;
  e.p1_ = K;
  return e;
}

BoundEnvelope BoundEnvelope::bihari(Real f0, Real K, Real alpha) {
  BoundEnvelope e(Family::kBihari, "bihari_lasalle");
  e.p0_ = f0;
  e.p1_ = K;
  e.p2_ = alpha;
  return e;
}

BoundEnvelope BoundEnvelope::moment(Real p, Real gamma, Real lambda_2p, Real C,
                                    Real init_2p) {
  BoundEnvelope e(Family::kMoment, "moment_envelope");
  e.p0_ = p;
  e.p1_ = gamma;
  e.p2_ = lambda_2p;
  e.p3_ = C;
  e.p4_ = init_2p;
  return e;
}

BoundEnvelope BoundEnvelope::tv_bounded(Real tv0, Real psi_max,
                                        Real sigma_max) {
  BoundEnvelope e(Family::kTvBounded, "tv_envelope_bounded");
  e.p0_ = tv0;
  e.p1_ = psi_max;
  e.p2_ = sigma_max;
  return e;
}

BoundEnvelope BoundEnvelope::osgood(Real rho0, Real C) {
  BoundEnvelope e(Family::kOsgood, "osgood_envelope");
  e.p0_ = rho0;
  e.p1_ = C;
  return e;
}

BoundEnvelope BoundEnvelope::exp_moment(Real init, Real C) {
  BoundEnvelope e(Family::kExp, "exp_moment_envelope");
  e.p0_ = init;
  e.p1_ = C;
  return e;
}

Real BoundEnvelope::operator()(Real t) const {
  switch (family_) {
    case Family::kGronwall:
      return gronwall_linear(p0_, p1_, t);
    case Family::kBihari:
      return bihari_lasalle(p0_, p1_, p2_, t);
    case Family::kMoment:
      return moment_envelope(p0_, p1_, p2_, p3_, p4_, t);
    case Family::kTvBounded:
      return tv_envelope_bounded(p0_, p1_, p2_, t);
    case Family::kOsgood:
      return osgood_envelope(p0_, p1_, t);
    case Family::kExp:
      return exp_moment_envelope(p0_, p1_, t);
  }
  return 0;
}

}  // namespace flocksim
