#pragma once

#include <string>
#include <vector>

#include "flocksim/common.hpp"
#include "flocksim/rng.hpp"

namespace flocksim {

// Communication rate psi: nonnegative, bounded, symmetric (psi(r) = psi(-r)).
// Families:
//   constant(c)            psi(r) = c
//   rational(a, b)         psi(r) = a / (1 + |r|^2)^{b/2}
// The singular family a/|r|^b is deliberately not offered: it is unbounded at
// the origin and every estimate used downstream needs a finite sup norm.
class PsiKernel {
 public:
  enum class Family { kConstant, kRational };

  static PsiKernel constant(Real c);
  static PsiKernel rational(Real a_coef, Real b_exp);

  Real value(ConstSpan r) const;
  Real max() const { return psi_max_; }  // sup norm
  Family family() const { return family_; }
  std::string describe() const;

 private:
  PsiKernel(Family f, Real a, Real b, Real m)
      : family_(f), a_(a), b_(b), psi_max_(m) {}

  Family family_;
  Real a_ = 0;  // constant value or rational numerator
  Real b_ = 0;  // rational decay exponent
  Real psi_max_ = 0;
};

// Velocity kernel sigma: nonnegative, symmetric, with growth bound
// sigma(u) <= c_sigma * <u>^gamma, gamma in [0,2].
// Families:
//   constant(c)                   sigma(u) = c             (gamma = 0)
//   bracket_power(c, gamma)       sigma(u) = c * <u>^gamma (bound is sharp)
class SigmaKernel {
 public:
  enum class Family { kConstant, kBracketPower };

  static SigmaKernel constant(Real c);
  static SigmaKernel bracket_power(Real c_sigma, Real gamma);

  Real value(ConstSpan u) const;
  Real c_sigma() const { return c_sigma_; }
  Real gamma() const { return gamma_; }
  bool bounded() const { return gamma_ == 0.0; }
  // Growth envelope c_sigma * <u>^gamma at the point u.
  Real growth_bound(ConstSpan u) const;
  Family family() const { return family_; }
  std::string describe() const;

 private:
  SigmaKernel(Family f, Real c, Real g)
      : family_(f), c_sigma_(c), gamma_(g) {}

  Family family_;
  Real c_sigma_ = 0;
  Real gamma_ = 0;
};

// Velocity noise law a(u)du, symmetric under u -> -u, total mass 1.
//
// gaussian and uniform_ball are genuine densities. symmetric_discrete (atoms
// +-u0 with weight 1/2 each) and degenerate_zero are not densities; they are
// admitted because they make every u-integral an exact finite sum, and are
// flagged as such via is_density().
class NoiseDensity {
 public:
  enum class Family {
    kGaussian,        // isotropic N(0, sd^2 I_d)
    kUniformBall,     // uniform on {|u| <= radius}
    kSymmetricDiscrete,
    kDegenerateZero,
  };

  static NoiseDensity gaussian(int dim, Real sd);
  static NoiseDensity uniform_ball(int dim, Real radius);
  static NoiseDensity symmetric_discrete(Vec atom);
  static NoiseDensity degenerate_zero(int dim);

  int dim() const { return dim_; }
  Family family() const { return family_; }
  bool is_density() const {
    return family_ == Family::kGaussian || family_ == Family::kUniformBall;
  }
  const Vec& atom() const { return atom_; }

  Vec sample(Rng& rng) const;
  void sample_into(Rng& rng, MutSpan out) const;

  // lambda_{2p} = integral of |u|^{2p} a(u) du, for real p >= 0.
  // Exact closed forms for the discrete families and the uniform ball;
  // adaptive radial quadrature (relative tolerance 1e-10) for the Gaussian.
  Real moment(Real p) const;

  // c(delta, kappa) = integral of exp(delta |u|^kappa) a(u) du.
  // Exact for the discrete families, radial quadrature otherwise.
  // Finite for kappa in (0,1]; for the Gaussian also for kappa < 2.
  Real exp_moment(Real delta, Real kappa) const;

  std::string describe() const;

 private:
  NoiseDensity(Family f, int dim) : family_(f), dim_(dim) {}

  Family family_;
  int dim_;
  Real sd_ = 0;
  Real radius_ = 0;
  Vec atom_;
};

// The model triple (psi, sigma, a).
struct KernelSet {
  PsiKernel psi;
  SigmaKernel sigma;
  NoiseDensity noise;
};

// Interaction rate of an (unordered) particle pair:
// psi(r_k - r_j) * sigma(v_k - v_j). Symmetric in the two arguments.
Real pair_rate(const KernelSet& ks, ConstSpan r_k, ConstSpan v_k,
               ConstSpan r_j, ConstSpan v_j);

}  // namespace flocksim
