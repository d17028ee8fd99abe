#include "qdho/response.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdho/errors.hpp"

namespace qdho {

namespace {

constexpr complex kI{0.0, 1.0};

}  // namespace

GreenFunction::GreenFunction(SusceptibilitySource src, QuadratureConfig cfg)
    : src_(std::move(src)), cfg_(cfg) {
  cfg_.validate();
  if (const auto* p = std::get_if<ModelParams>(&src_)) p->validate();
  if (const auto* t = std::get_if<TabulatedChi>(&src_)) {
    dispersion_ = std::make_shared<const DispersionTable>(*t, cfg_);
  }
}

complex GreenFunction::chi(double omega) const {
  if (const auto* p = std::get_if<ModelParams>(&src_)) return chi_model(omega, *p);
  // Re chi is even in omega, Im chi odd
  return {dispersion_->re_chi(omega), im_chi(omega, src_)};
}

complex GreenFunction::chi(complex omega) const {
  if (const auto* p = std::get_if<ModelParams>(&src_)) return chi_model(omega, *p);
  if (omega.imag() != 0.0) {
    throw DomainError("tabulated susceptibility is only known on the real axis");
  }
  return chi(omega.real());
}

complex GreenFunction::dchi(double omega, double relative_step) const {
  if (const auto* p = std::get_if<ModelParams>(&src_)) return dchi_model(omega, *p);
  const double h = relative_step * std::max(std::abs(omega), 1e-3 * omega0());
  return (chi(omega + h) - chi(omega - h)) / (2.0 * h);
}

complex GreenFunction::denominator(complex omega) const {
  const double w0 = omega0();
  return omega * omega - w0 * w0 * (1.0 - chi(omega));
}

complex GreenFunction::operator()(complex omega) const {
  if (const auto* p = std::get_if<ModelParams>(&src_)) {
    const PoleSet poles = model_poles(*p);
    const double scale = std::max(p->omega0, p->pole_rate());
    for (const complex& pole : poles.poles) {
      if (std::abs(omega - pole) <= 1e-14 * scale) {
        // -i g1 is not a pole of G when g2 = 0 (it cancels against chi)
        if (p->gamma2 == 0.0 && pole == poles.poles[0]) continue;
        std::ostringstream os;
        os << "Green function evaluated at its pole " << pole;
        throw PoleError(os.str(), pole);
      }
    }
  }
  const complex d = denominator(omega);
  if (d == complex(0.0, 0.0)) throw PoleError("Green function evaluated at a pole", omega);
  return -1.0 / d;
}

double GreenFunction::im(double omega) const {
  const double w0 = omega0();
  const complex c = chi(omega);
  const complex d = omega * omega - w0 * w0 * (1.0 - c);
  const double mag2 = std::norm(d);
  if (mag2 == 0.0) throw PoleError("Im G evaluated at a real pole", omega);
  return w0 * w0 * c.imag() / mag2;
}

complex green(complex omega, const GreenFunction& g) { return g(omega); }

PoleSet model_poles(const ModelParams& p) {
  p.validate();
  const double radicand = p.omega0 * p.omega0 - p.gamma2 * (2.0 * p.gamma1 + p.gamma2);
  PoleSet set;
  set.omega1 = std::sqrt(complex(radicand, 0.0));
  set.overdamped = radicand < 0.0;
  set.poles = {complex(0.0, -p.gamma1), complex(0.0, -p.gamma2) + set.omega1,
               complex(0.0, -p.gamma2) - set.omega1};
  return set;
}

PoleVerification verify_poles(const ModelParams& p) {
  const PoleSet analytic = model_poles(p);
  const double w0sq = p.omega0 * p.omega0;
  const double a = p.pole_rate();
  const double c = p.coupling_strength() * w0sq;
  const double scale = std::max(p.omega0, a);

  // (w^2 - w0^2)(a - i w) + c
  const auto cubic = [&](complex w) { return (w * w - w0sq) * (a - kI * w) + c; };
  const auto cubic_prime = [&](complex w) {
    return 2.0 * w * (a - kI * w) - kI * (w * w - w0sq);
  };

  PoleVerification out;
  const complex shift = 1e-3 * scale * complex(1.0, 1.0);
  for (std::size_t k = 0; k < 3; ++k) {
    complex w = analytic.poles[k] + shift;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
      const complex fp = cubic_prime(w);
      if (fp == complex(0.0, 0.0)) break;
      const complex step = cubic(w) / fp;
      w -= step;
      ++out.iterations;
      if (std::abs(step) <= 1e-15 * scale) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      // Newton is linear at a double root; accept if the cubic vanishes.
      if (std::abs(cubic(w)) > 1e-12 * scale * scale * scale) {
        std::ostringstream os;
        os << "Newton iteration for pole " << analytic.poles[k] << " did not converge";
        throw ConvergenceError(os.str());
      }
    }
    out.refined[k] = w;
    out.max_residual = std::max(out.max_residual, std::abs(w - analytic.poles[k]));

    if (p.gamma2 == 0.0 && k == 0) continue;
    const complex inv_g = analytic.poles[k] * analytic.poles[k] - w0sq +
                          w0sq * chi_model(analytic.poles[k], p);
    out.max_inverse_green = std::max(out.max_inverse_green, std::abs(inv_g));
  }
  return out;
}

}  // namespace qdho
