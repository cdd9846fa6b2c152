#include "flocksim/kernels.hpp"

#include <cmath>

#include "flocksim/quadrature.hpp"

namespace flocksim {

PsiKernel PsiKernel::constant(Real c) {
  require(c >= 0, "psi constant must be >= 0");
  return PsiKernel(Family::kConstant, c, 0, c);
}

PsiKernel PsiKernel::rational(Real a_coef, Real b_exp) {
  require(a_coef > 0, "psi rational a_coef must be > 0");
  require(b_exp > 0, "psi rational b_exp must be > 0");
  return PsiKernel(Family::kRational, a_coef, b_exp, a_coef);
}

Real PsiKernel::value(ConstSpan r) const {
  switch (family_) {
    case Family::kConstant:
      return a_;
    case Family::kRational:
      return a_ * std::pow(1.0 + norm2(r), -0.5 * b_);
  }
  return 0;
}

std::string PsiKernel::describe() const {
  char buf[96];
  if (family_ == Family::kConstant) {
    std::snprintf(buf, sizeof(buf), "psi=constant(%g)", a_);
  } else {
    std::snprintf(buf, sizeof(buf), "psi=rational(%g,%g)", a_, b_);
  }
  return buf;
}

SigmaKernel SigmaKernel::constant(Real c) {
  require(c >= 0, "sigma constant must be >= 0");
  return SigmaKernel(Family::kConstant, c, 0.0);
}

SigmaKernel SigmaKernel::bracket_power(Real c_sigma, Real gamma) {
  require(c_sigma > 0, "sigma c_sigma must be > 0");
  require(gamma >= 0 && gamma <= 2, "sigma gamma must lie in [0,2]");
  return SigmaKernel(Family::kBracketPower, c_sigma, gamma);
}

Real SigmaKernel::value(ConstSpan u) const {
  switch (family_) {
    case Family::kConstant:
      return c_sigma_;
    case Family::kBracketPower:
      return c_sigma_ * bracket_pow(u, gamma_);
  }
  return 0;
}

Real SigmaKernel::growth_bound(ConstSpan u) const {
  return c_sigma_ * bracket_pow(u, gamma_);
}

std::string SigmaKernel::describe() const {
  char buf[96];
  if (family_ == Family::kConstant) {
    std::snprintf(buf, sizeof(buf), "sigma=constant(%g)", c_sigma_);
  } else {
    std::snprintf(buf, sizeof(buf), "sigma=bracket_power(%g,%g)", c_sigma_,
                  gamma_);
  }
  return buf;
}

NoiseDensity NoiseDensity::gaussian(int dim, Real sd) {
  require(dim >= 1, "noise dimension must be >= 1");
  require(sd > 0, "gaussian sd must be > 0");
  NoiseDensity a(Family::kGaussian, dim);
  a.sd_ = sd;
  return a;
}

NoiseDensity NoiseDensity::uniform_ball(int dim, Real radius) {
  require(dim >= 1, "noise dimension must be >= 1");
  require(radius > 0, "uniform_ball radius must be > 0");
  NoiseDensity a(Family::kUniformBall, dim);
  a.radius_ = radius;
  return a;
}

NoiseDensity NoiseDensity::symmetric_discrete(Vec atom) {
  require(!atom.empty(), "symmetric_discrete atom must be nonempty");
  NoiseDensity a(Family::kSymmetricDiscrete, static_cast<int>(atom.size()));
  a.atom_ = std::move(atom);
  return a;
}

NoiseDensity NoiseDensity::degenerate_zero(int dim) {
  require(dim >= 1, "noise dimension must be >= 1");
  return NoiseDensity(Family::kDegenerateZero, dim);
}

void NoiseDensity::sample_into(Rng& rng, MutSpan out) const {
  check_internal(out.size() == static_cast<std::size_t>(dim_),
                 "noise sample span has wrong dimension");
  switch (family_) {
    case Family::kGaussian:
      for (int i = 0; i < dim_; ++i) out[i] = sd_ * rng.gaussian();
      return;
    case Family::kUniformBall: {
      // Direction from a normalized Gaussian, radius R * U^{1/d}.
      Real n2 = 0;
      do {
        for (int i = 0; i < dim_; ++i) out[i] = rng.gaussian();
        n2 = norm2(out);
      } while (n2 == 0);
      const Real r =
          radius_ * std::pow(rng.uniform01_pos(), 1.0 / dim_) / std::sqrt(n2);
      for (int i = 0; i < dim_; ++i) out[i] *= r;
      return;
    }
    case Family::kSymmetricDiscrete: {
      const Real sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
      for (int i = 0; i < dim_; ++i) out[i] = sign * atom_[i];
      return;
    }
    case Family::kDegenerateZero:
      for (int i = 0; i < dim_; ++i) out[i] = 0;
      return;
  }
}

Vec NoiseDensity::sample(Rng& rng) const {
  Vec out(dim_);
  sample_into(rng, out);
  return out;
}

Real NoiseDensity::moment(Real p) const {
  require(p >= 0, "moment order p must be >= 0");
  if (p == 0) return 1.0;  // total mass, every family
  switch (family_) {
    case Family::kDegenerateZero:
      return 0.0;
    case Family::kSymmetricDiscrete:
      return std::pow(norm2(atom_), p);
    case Family::kUniformBall:
      // E|u|^{2p} = d/(d+2p) * R^{2p}.
      return dim_ / (dim_ + 2.0 * p) * std::pow(radius_, 2.0 * p);
    case Family::kGaussian: {
      // Radial integral of r^{2p} against the chi density of |u|, u ~ N(0,
      // sd^2 I_d). Normalization handled by dividing out the p = 0 integral.
      const Real d = dim_;
      auto radial = [&](Real expo) {
        auto f = [&](Real r) {
          return std::pow(r, expo + d - 1.0) *
                 std::exp(-0.5 * sq(r / sd_));
        };
        const Real r_max = sd_ * (2.0 * std::sqrt(d + 2.0 * p) + 16.0);
        return integrate_composite(f, 0.0, r_max,
                                   1e-11 * std::pow(sd_, expo + d));
      };
      return radial(2.0 * p) / radial(0.0);
    }
  }
  return 0;
}

Real NoiseDensity::exp_moment(Real delta, Real kappa) const {
  require(delta >= 0, "exp_moment delta must be >= 0");
  require(kappa > 0 && kappa <= 2, "exp_moment kappa must lie in (0,2]");
  if (delta == 0) return 1.0;
  switch (family_) {
    case Family::kDegenerateZero:
      return 1.0;
    case Family::kSymmetricDiscrete:
      return std::exp(delta * std::pow(norm2(atom_), 0.5 * kappa));
    case Family::kUniformBall: {
      const Real d = dim_;
      auto f = [&](Real r) {
        return std::exp(delta * std::pow(r, kappa)) * std::pow(r, d - 1.0);
      };
      const Real num = integrate_composite(f, 0.0, radius_, 1e-12);
      return num * d / std::pow(radius_, d);
    }
    case Family::kGaussian: {
      require(kappa < 2 || delta < 0.5 / sq(sd_),
              "gaussian exp_moment diverges for kappa=2 with delta >= 1/(2 sd^2)");
      const Real d = dim_;
      auto radial = [&](bool with_exp) {
        auto f = [&](Real r) {
          const Real e = with_exp ? delta * std::pow(r, kappa) : 0.0;
          return std::exp(e - 0.5 * sq(r / sd_)) * std::pow(r, d - 1.0);
        };
        // Tail cutoff: the Gaussian decay dominates the kappa < 2 growth.
        const Real r_max =
            sd_ * 24.0 +
            std::pow(4.0 * delta * sq(sd_) + 4.0, 1.0 / (2.0 - kappa + 1e-12));
        return integrate_composite(f, 0.0, r_max, 1e-12 * std::pow(sd_, d));
      };
      return radial(true) / radial(false);
    }
  }
  return 1.0;
}

std::string NoiseDensity::describe() const {
  char buf[128];
  switch (family_) {
    case Family::kGaussian:
      std::snprintf(buf, sizeof(buf), "noise=gaussian(d=%d,sd=%g)", dim_, sd_);
      break;
    case Family::kUniformBall:
      std::snprintf(buf, sizeof(buf), "noise=uniform_ball(d=%d,R=%g)", dim_,
                    radius_);
      break;
    case Family::kSymmetricDiscrete:
      std::snprintf(buf, sizeof(buf), "noise=symmetric_discrete(d=%d,|u0|=%g)",
                    dim_, norm(atom_));
      break;
    case Family::kDegenerateZero:
      std::snprintf(buf, sizeof(buf), "noise=degenerate_zero(d=%d)", dim_);
      break;
  }
  return buf;
}

Real pair_rate(const KernelSet& ks, ConstSpan r_k, ConstSpan v_k,
               ConstSpan r_j, ConstSpan v_j) {
  const Vec dr = sub(r_k, r_j);
  const Vec dv = sub(v_k, v_j);
  return ks.psi.value(dr) * ks.sigma.value(dv);
}

}  // namespace flocksim
