#pragma once

#include <string>

#include "flocksim/common.hpp"

namespace flocksim {

// Closed-form upper-bound curves. The multiplicative constants C are
// existential in the source estimates; callers supply values calibrated
// against data (see ineq_oracle) and the envelopes assemble the rest.

// a0 * exp(K t).
Real gronwall_linear(Real a0, Real K, Real t);

// Solution envelope of f(t) <= f(0) + K int f^{1-alpha}:
// (f0^alpha + alpha K t)^{1/alpha}.
Real bihari_lasalle(Real f0, Real K, Real alpha, Real t);

// Relaxed additive form 2^{1/alpha - 1} f0 + (2 alpha K)^{1/alpha}/2 t^{1/alpha};
// always >= the primary form.
Real bihari_lasalle_relaxed(Real f0, Real K, Real alpha, Real t);

// Upper bound for the 2p-th bracket velocity moment at time t:
//   gamma = 2:   2^{2p} init e^{C_p t}
//   gamma < 2:   2^{4p^2/(2-gamma)} init
//                + (C_p (2-gamma)/(2p))^{2p/(2-gamma)} t^{2p/(2-gamma)}
// with C_p = C lambda_{2p} 2^{5p}.
Real moment_envelope(Real p, Real gamma, Real lambda_2p, Real C, Real init_2p,
                     Real t);

// tv0 * exp(4 psi_max sigma_max t); caller may cap at 2 (the TV range).
Real tv_envelope_bounded(Real tv0, Real psi_max, Real sigma_max, Real t);

// Exact solution of the comparison ODE rho' = C rho (1 - ln rho), rho(0) =
// rho0 in (0,1): exp(1 - (1 - ln rho0) e^{-C t}). Defined while rho < e.
Real osgood_closed_form(Real rho0, Real C, Real t);

// Upper bound for rho(t) <= rho0 + C int rho (1 + |ln rho|):
// the closed form above while it stays <= 1 (where |ln rho| = -ln rho),
// then a linear Gronwall continuation at rate 2C (valid while rho <= e,
// which covers the TV range [0,2]). Requires rho0 in (0,1).
Real osgood_envelope(Real rho0, Real C, Real t);

// init * exp(C t), init >= 1.
Real exp_moment_envelope(Real init, Real C, Real t);

// Uniform handle over the envelope families, for curve export and overlay.
class BoundEnvelope {
 public:
  static BoundEnvelope gronwall(Real a0, Real K);
  static BoundEnvelope bihari(Real f0, Real K, Real alpha);
  static BoundEnvelope moment(Real p, Real gamma, Real lambda_2p, Real C,
                              Real init_2p);
  static BoundEnvelope tv_bounded(Real tv0, Real psi_max, Real sigma_max);
  static BoundEnvelope osgood(Real rho0, Real C);
  static BoundEnvelope exp_moment(Real init, Real C);

  Real operator()(Real t) const;
  const std::string& name() const { return name_; }

 private:
  enum class Family { kGronwall, kBihari, kMoment, kTvBounded, kOsgood, kExp };
  BoundEnvelope(Family f, std::string name) : family_(f), name_(std::move(name)) {}

  Family family_;
  std::string name_;
  Real p0_ = 0, p1_ = 0, p2_ = 0, p3_ = 0, p4_ = 0;
};

}  // namespace flocksim
