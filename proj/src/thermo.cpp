#include "qdho/thermo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qdho/errors.hpp"

namespace qdho {

using std::numbers::pi;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

// ---------------------------------------------------------------- state

ThermalState ThermalState::finite(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("temperature must be positive and finite");
  }
  return ThermalState(theta);
}

double ThermalState::theta() const {
  if (is_zero()) throw DomainError("zero-temperature state has no finite theta");
  return theta_;
}

double ThermalState::weight(double omega) const {
  if (is_zero()) return 1.0;
  const double x = omega / (2.0 * theta_);
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return 1.0 / x + x / 3.0 - x * x2 / 45.0;
  }
  return 1.0 / std::tanh(x);
}

std::string_view to_string(EvaluationPath path) {
  switch (path) {
    case EvaluationPath::Quadrature:
      return "quadrature";
    case EvaluationPath::ClosedForm:
      return "closed-form";
    case EvaluationPath::Matsubara:
      return "matsubara";
    case EvaluationPath::Oracle:
      return "oracle";
  }
  return "unknown";
}

double Observables::delta_q() const { return std::sqrt(q2); }
double Observables::delta_p() const { return std::sqrt(pi2); }

complex bracket_term(double omega, complex chi, complex dchi, double omega0) {
  return omega0 * omega0 * (omega * dchi - chi + 1.0) + omega * omega;
}

Observables free_oscillator(double omega0, const ThermalState& state) {
  const double c = state.weight(omega0);
  Observables out;
  out.q2 = c / (2.0 * omega0);
  out.pi2 = omega0 * c / 2.0;
  out.energy = omega0 * c / 2.0;
  out.path = EvaluationPath::ClosedForm;
  return out;
}

// ---------------------------------------------------------------- quadrature

namespace {

void require_stable(const SusceptibilitySource& src, const QuadratureConfig& cfg) {
  const DiagonalizabilityReport report = check_diagonalizable(src, cfg);
  if (!report.diagonalizable) {
    std::ostringstream os;
    os << "coupled system is not diagonalizable (margin " << report.margin << ")";
    throw NotDiagonalizableError(os.str());
  }
}

// Points that split [0, cutoff] so every piece sees at most one decade of a
// resonance line shape.
std::vector<double> resonance_breakpoints(const ModelParams& p, double cutoff) {
  std::vector<double> points;
  const PoleSet poles = model_poles(p);
  const auto add = [&](double x) {
    if (x > 0.0 && x < cutoff) points.push_back(x);
  };
  for (const complex& pole : poles.poles) {
    const double centre = std::abs(pole.real());
    const double width = std::abs(pole.imag());
    if (width == 0.0) continue;
    add(centre);
    for (double step = width; step < cutoff; step *= 10.0) {
      add(centre - step);
      add(centre + step);
    }
  }
  add(p.pole_rate());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

double declared_tail(Moment moment, double im_decay) {
  switch (moment) {
    case Moment::Position:
      return 4.0 + im_decay;
    case Moment::Momentum:
      return 2.0 + im_decay;
    case Moment::Energy:
      return im_decay <= 2.0 ? 2.0 + im_decay : 0.0;
  }
  return 0.0;
}

}  // namespace

Estimate spectral_integral(const SusceptibilitySource& src, Moment moment,
                           const ThermalState& state, const QuadratureConfig& cfg) {
  cfg.validate();
  if (is_undamped(src)) {
    throw PoleError("Im G of the undamped oscillator is a delta function at omega0",
                    complex(omega0_of(src), 0.0));
  }
  require_stable(src, cfg);
  return spectral_integral(GreenFunction(src, cfg), moment, state);
}

Estimate spectral_integral(const GreenFunction& g, Moment moment, const ThermalState& state) {
  const SusceptibilitySource& src = g.source();
  const QuadratureConfig& cfg = g.config();
  if (is_undamped(src)) {
    throw PoleError("Im G of the undamped oscillator is a delta function at omega0",
                    complex(omega0_of(src), 0.0));
  }
  const double w0 = omega0_of(src);
  const double w0sq = w0 * w0;
  const auto integrand = [&](double w) -> double {
    const double weight = state.weight(w);
    const complex c = g.chi(w);
    const double re_d = w * w - w0sq * (1.0 - c.real());
    const double im_d = w0sq * c.imag();
    const double mag2 = re_d * re_d + im_d * im_d;
    const double im_g = im_d / mag2;
    switch (moment) {
      case Moment::Position:
        return weight * im_g;
      case Moment::Momentum:
        return weight * w * w * im_g;
      case Moment::Energy: {
        const complex green_value(-re_d / mag2, im_g);
        const complex b = bracket_term(w, c, g.dchi(w), w0);
        return weight * (b * green_value).imag();
      }
    }
    return 0.0;
  };

  double scale = frequency_scale(src);
  if (!state.is_zero()) scale = std::max(scale, 2.0 * state.theta());
  const double cutoff = cfg.cutoff_factor * scale;

  std::vector<double> points{0.0};
  if (const auto* p = std::get_if<ModelParams>(&src)) {
    for (double x : resonance_breakpoints(*p, cutoff)) points.push_back(x);
  } else if (const DispersionTable* table = g.dispersion()) {
    // the interpolants are only piecewise smooth; break at every node
    for (double u : table->log_nodes()) {
      const double x = std::exp(u);
      if (x < cutoff) points.push_back(x);
    }
  }
  points.push_back(cutoff);

  Estimate total;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Estimate piece = integrate_adaptive(integrand, points[i], points[i + 1], cfg);
    total.value += piece.value;
    total.error += piece.error;
    total.evaluations += piece.evaluations;
  }
  QuadratureConfig tail_cfg = cfg.with_tail_order(declared_tail(moment, im_chi_decay(src)));
  tail_cfg.abs_tol = std::max(cfg.abs_tol, 0.1 * cfg.rel_tol * std::abs(total.value));
  const Estimate tail = integrate_semi_infinite(integrand, cutoff, tail_cfg, scale);
  total.value += tail.value;
  total.error += tail.error;
  total.evaluations += tail.evaluations;

  const double prefactor = moment == Moment::Energy ? 1.0 / (2.0 * pi) : 1.0 / pi;
  total.value *= prefactor;
  total.error *= prefactor;
  return total;
}

namespace {

Estimate exact_free(const SusceptibilitySource& src, const ThermalState& state,
                    double Observables::*field) {
  const Observables free = free_oscillator(omega0_of(src), state);
  return {free.*field, 0.0, 0};
}

}  // namespace

Estimate q2_thermal(const SusceptibilitySource& src, const ThermalState& state,
                    const QuadratureConfig& cfg) {
  if (is_undamped(src)) return exact_free(src, state, &Observables::q2);
  return spectral_integral(src, Moment::Position, state, cfg);
}

Estimate pi2_thermal(const SusceptibilitySource& src, const ThermalState& state,
                     const QuadratureConfig& cfg) {
  if (is_undamped(src)) return exact_free(src, state, &Observables::pi2);
  return spectral_integral(src, Moment::Momentum, state, cfg);
}

Estimate energy_thermal(const SusceptibilitySource& src, const ThermalState& state,
                        const QuadratureConfig& cfg) {
  if (is_undamped(src)) return exact_free(src, state, &Observables::energy);
  return spectral_integral(src, Moment::Energy, state, cfg);
}

Observables thermal_observables(const SusceptibilitySource& src, const ThermalState& state,
                                const QuadratureConfig& cfg) {
  if (is_undamped(src)) return free_oscillator(omega0_of(src), state);
  cfg.validate();
  require_stable(src, cfg);
  return thermal_observables(GreenFunction(src, cfg), state);
}

Observables thermal_observables(const GreenFunction& g, const ThermalState& state) {
  const SusceptibilitySource& src = g.source();
  if (is_undamped(src)) return free_oscillator(omega0_of(src), state);
  const Estimate q2 = spectral_integral(g, Moment::Position, state);
  const Estimate pi2 = spectral_integral(g, Moment::Momentum, state);
  const Estimate energy = spectral_integral(g, Moment::Energy, state);
  Observables out;
  out.q2 = q2.value;
  out.pi2 = pi2.value;
  out.energy = energy.value;
  out.path = EvaluationPath::Quadrature;
  out.error = {q2.error, pi2.error, energy.error};
  if (std::holds_alternative<TabulatedChi>(src)) {
    out.warnings.emplace_back(
        "energy uses a finite-difference derivative of the reconstructed chi; "
        "noise in the table is amplified");
  }
  return out;
}

// ---------------------------------------------------------------- closed form

namespace {

// arctan(w1 / g2) / w1 as a function of w1^2, real on both branches.
// `margin` is w0^2 - 2 g1 g2 = g2^2 + w1^2, used for 1 - |w1|/g2.
double arctan_ratio(double w1sq, double g2, double margin) {
  if (g2 == 0.0) return pi / (2.0 * std::sqrt(w1sq));
  const double u = w1sq / (g2 * g2);
  if (std::abs(u) < 1e-3) {
    // arctan(x)/x = sum (-u)^k / (2k + 1), u = x^2
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 10; ++k) {
      term *= -u;
      sum += term / (2.0 * k + 1.0);
    }
    return sum / g2;
  }
  if (u > 0.0) {
    const double w1 = std::sqrt(w1sq);
    return std::atan2(w1, g2) / w1;
  }
  const double w = std::sqrt(-w1sq);
  const double x = w / g2;
  const double one_minus_x = margin / (g2 * (g2 + w));
  const double artanh = 0.5 * (std::log1p(x) - std::log(one_minus_x));
  return artanh / w;
}

struct Poles3 {
  std::array<complex, 3> s;  // i * pole, all with Re s > 0
};

Poles3 imaginary_axis_poles(const ModelParams& p) {
  const double margin = p.stability_margin();
  const double w1sq = p.omega0 * p.omega0 - p.gamma2 * (2.0 * p.gamma1 + p.gamma2);
  Poles3 out;
  out.s[0] = p.gamma1;
  if (w1sq >= 0.0) {
    const double w1 = std::sqrt(w1sq);
    out.s[1] = complex(p.gamma2, -w1);
    out.s[2] = complex(p.gamma2, w1);
  } else {
    const double w = std::sqrt(-w1sq);
    // g2 - w without cancellation: (g2^2 - w^2) / (g2 + w)
    out.s[1] = margin / (p.gamma2 + w);
    out.s[2] = p.gamma2 + w;
  }
  return out;
}

}  // namespace

complex log_poly_divided_difference(std::span<const complex> nodes,
                                    std::span<const complex> poly) {
  const std::size_t n = nodes.size();
  if (n == 0) throw DomainError("divided difference needs at least one node");
  for (const complex& x : nodes) {
    if (!(x.real() > 0.0)) throw DomainError("divided-difference nodes need Re s > 0");
  }
  if (n == 1) {
    complex value = 0.0;
    for (std::size_t i = poly.size(); i-- > 0;) value = value * nodes[0] + poly[i];
    return value * std::log(nodes[0]);
  }

  complex centroid = 0.0;
  for (const complex& x : nodes) centroid += x;
  centroid /= static_cast<double>(n);
  double diameter = 0.0;
  std::size_t far_i = 0, far_j = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::abs(nodes[i] - nodes[j]);
      if (d > diameter) {
        diameter = d;
        far_i = i;
        far_j = j;
      }
    }
  }

  if (diameter <= 0.2 * std::abs(centroid)) {
    // f[x_0..x_{n-1}] = sum_k f^{(n-1+k)}(m) / (n-1+k)! * h_k(x - m)
    constexpr int kTerms = 48;
    std::array<complex, kTerms> h{};
    h[0] = 1.0;
    for (const complex& x : nodes) {
      const complex d = x - centroid;
      for (int k = 1; k < kTerms; ++k) h[k] += d * h[k - 1];
    }
    // Taylor coefficients of P at the centroid.
    std::vector<complex> t(poly.size(), 0.0);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      double binom = 1.0;
      complex power = 1.0;
      for (std::size_t i = j; i < poly.size(); ++i) {
        t[j] += binom * poly[i] * power;
        binom = binom * static_cast<double>(i + 1) / static_cast<double>(i + 1 - j);
        power *= centroid;
      }
    }
    const auto log_coefficient = [&](int k) -> complex {
      if (k == 0) return std::log(centroid);
      const double sign = (k % 2 == 1) ? 1.0 : -1.0;
      return sign / (static_cast<double>(k) * std::pow(centroid, k));
    };
    complex sum = 0.0;
    for (int k = 0; k < kTerms; ++k) {
      const int m = static_cast<int>(n) - 1 + k;
      complex g = 0.0;
      for (std::size_t j = 0; j < t.size() && static_cast<int>(j) <= m; ++j) {
        g += t[j] * log_coefficient(m - static_cast<int>(j));
      }
      sum += g * h[k];
    }
    return sum;
  }

  std::vector<complex> without_i, without_j;
  for (std::size_t k = 0; k < n; ++k) {
    if (k != far_i) without_i.push_back(nodes[k]);
    if (k != far_j) without_j.push_back(nodes[k]);
  }
  return (log_poly_divided_difference(without_i, poly) -
          log_poly_divided_difference(without_j, poly)) /
         (nodes[far_j] - nodes[far_i]);
}

Observables zero_point_pole_form(const ModelParams& p) {
  p.require_diagonalizable();
  if (p.gamma2 == 0.0) return free_oscillator(p.omega0, ThermalState::zero());
  const double w0sq = p.omega0 * p.omega0;
  const double a = p.pole_rate();
  const double c = p.coupling_strength() * w0sq;
  const double m = p.stability_margin();
  const Poles3 poles = imaginary_axis_poles(p);

  // int_0^inf N(x) / prod (x + s_k) dx = (-1)^n  f[s_1..s_n], f(s) = N(-s) log s
  const std::array<complex, 2> q_poly{a, -1.0};
  const std::array<complex, 2> p_poly{p.gamma1 * m, -w0sq};
  const std::array<complex, 3> e_poly{2.0 * a * p.gamma1 * m, -4.0 * w0sq * a + 3.0 * c,
                                      2.0 * w0sq};
  const std::array<complex, 4> e_nodes{poles.s[0], poles.s[1], poles.s[2], a};

  Observables out;
  out.q2 = -log_poly_divided_difference(poles.s, q_poly).real() / pi;
  out.pi2 = -log_poly_divided_difference(poles.s, p_poly).real() / pi;
  out.energy = log_poly_divided_difference(e_nodes, e_poly).real() / (2.0 * pi);
  out.path = EvaluationPath::ClosedForm;
  out.error = {1e-12 * std::abs(out.q2), 1e-12 * std::abs(out.pi2),
               1e-12 * std::abs(out.energy)};
  return out;
}

Observables zero_point_closed(const ModelParams& p) {
  p.require_diagonalizable();
  if (p.gamma2 == 0.0) return free_oscillator(p.omega0, ThermalState::zero());

  const double w0sq = p.omega0 * p.omega0;
  const double g1 = p.gamma1;
  const double g2 = p.gamma2;
  const double m = p.stability_margin();
  const double w1sq = w0sq - g2 * (2.0 * g1 + g2);
  const double s = arctan_ratio(w1sq, g2, m);
  const double log_m = std::log(m / (g1 * g1));
  const double d = w0sq + g1 * g1 - 4.0 * g1 * g2;

  const double q_a = (w1sq + g1 * g1 - g2 * g2) * s;
  const double q_b = g2 * log_m;
  const double p_a = ((w1sq + g2 * g2) * (w1sq + g2 * g2) + g1 * g1 * (w1sq - g2 * g2)) * s;
  const double p_b = -g1 * g1 * g2 * log_m;
  const double e_a = 2.0 * w1sq * s;
  const double e_b = g1 * std::log1p(2.0 * g2 / g1);
  const double e_c = g2 * std::log((g1 + 2.0 * g2) * (g1 + 2.0 * g2) / m);

  // Relative condition numbers of each arrangement.
  const double kd = (w0sq + g1 * g1 + 4.0 * g1 * g2) / std::abs(d);
  const double kq = (std::abs(q_a) + std::abs(q_b)) / std::abs(q_a + q_b) + kd;
  const double kp = (std::abs(p_a) + std::abs(p_b)) / std::abs(p_a + p_b) + kd;
  const double ke =
      (std::abs(e_a) + std::abs(e_b) + std::abs(e_c)) / std::abs(e_a + e_b + e_c);
  const double worst = std::max({kq, kp, ke});
  if (!(worst < 1e3)) return zero_point_pole_form(p);

  Observables out;
  out.q2 = (q_a + q_b) / (pi * d);
  out.pi2 = (p_a + p_b) / (pi * d);
  out.energy = (e_a + e_b + e_c) / (2.0 * pi);
  out.path = EvaluationPath::ClosedForm;
  out.error = {8.0 * kEps * kq * std::abs(out.q2), 8.0 * kEps * kp * std::abs(out.pi2),
               8.0 * kEps * ke * std::abs(out.energy)};
  return out;
}

// ---------------------------------------------------------------- Matsubara

Estimate q2_matsubara(const ModelParams& p, double theta, long n_max,
                      const QuadratureConfig& cfg) {
  p.require_diagonalizable();
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("Matsubara sum needs a positive temperature");
  }
  if (n_max < 1) throw DomainError("n_max must be at least 1");
  const double w0sq = p.omega0 * p.omega0;
  const double a = p.pole_rate();
  const double c = p.coupling_strength() * w0sq;
  // G(i xi) = (xi + a) / ((xi^2 + w0^2)(xi + a) - c), real on the imaginary axis
  const auto g_imag = [&](double xi) {
    const double value = (xi + a) / ((xi * xi + w0sq) * (xi + a) - c);
    if (!(value > 0.0)) {
      std::ostringstream os;
      os << "G(i xi) = " << value << " <= 0 at xi = " << xi;
      throw DomainError(os.str());
    }
    return value;
  };
  const double step = 2.0 * pi * theta;
  const double zeroth = theta * g_imag(0.0);
  const auto term = [&](double n) { return 2.0 * theta * g_imag(step * n); };
  const Estimate rest = sum_with_integral_tail(term, 1, n_max, cfg.with_tail_order(2.0));
  return {zeroth + rest.value, rest.error, rest.evaluations + 1};
}

// ---------------------------------------------------------------- asymptotics

ModelParams infinite_damping_params(double gamma2, double omega0) {
  if (!(gamma2 > 0.0)) throw DomainError("gamma2 must be > 0");
  ModelParams p{omega0, omega0 * omega0 / (4.0 * gamma2), gamma2};
  p.validate();
  return p;
}

double energy_asymptote(double gamma2, double omega0) {
  if (!(gamma2 > 0.0) || !(omega0 > 0.0)) throw DomainError("need gamma2 > 0, omega0 > 0");
  return omega0 * omega0 / (4.0 * pi * gamma2) *
         (1.0 + 2.0 * std::log(2.0 * std::sqrt(2.0) * gamma2 / omega0));
}

double deltaq_asymptote(double gamma2, double omega0) {
  if (!(gamma2 > 0.0) || !(omega0 > 0.0)) throw DomainError("need gamma2 > 0, omega0 > 0");
  return 2.0 * std::sqrt(gamma2 / pi) / omega0;
}

}  // namespace qdho
