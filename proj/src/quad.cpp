#include "qdho/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qdho/errors.hpp"

namespace qdho {

namespace {

// 21-point Kronrod rule and its embedded 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Segment {
  double a;
  double b;
  double value;
  double error;
  double magnitude;  // integral of |f|
};

double checked(const RealFunction& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream os;
    os << "integrand is not finite at x = " << x;
    throw DomainError(os.str());
  }
  return y;
}

Segment kronrod21(const RealFunction& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked(f, center);
  double resk = fc * kWgk[10];
  double resabs = std::abs(resk);
  double resg = 0.0;
  std::array<double, 10> f1{};
  std::array<double, 10> f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = checked(f, center - dx);
    f2[j] = checked(f, center + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    // odd indices are the Gauss nodes
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  resk *= half;
  resg *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);

  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(err, 50.0 * kEps * resabs);
  }
  return {a, b, resk, err, resabs};
}

bool worse(const Segment& x, const Segment& y) { return x.error < y.error; }

}  // namespace

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw DomainError("quadrature tolerances must be positive");
  }
  if (!(cutoff_factor >= 10.0)) {
    throw DomainError("cutoff_factor must be at least 10");
  }
  if (max_subdivisions == 0) {
    throw DomainError("max_subdivisions must be positive");
  }
  if (tail_order < 0.0) {
    throw DomainError("tail_order must be non-negative");
  }
}

Estimate integrate_adaptive(const RealFunction& f, double a, double b,
                            const QuadratureConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate_adaptive needs finite limits");
  }
  if (a == b) return {};
  if (a > b) {
    Estimate r = integrate_adaptive(f, b, a, cfg);
    r.value = -r.value;
    return r;
  }

  std::vector<Segment> heap;
  heap.reserve(cfg.max_subdivisions + 1);
  heap.push_back(kronrod21(f, a, b));
  double total = heap.front().value;
  double error = heap.front().error;
  double magnitude = heap.front().magnitude;
  std::size_t evaluations = 21;

  // Below 100 eps * int |f| the Kronrod estimate is pure roundoff, so a
  // strict tolerance on a cancelling integral would otherwise never be met.
  const auto target = [&] {
    return std::max({cfg.abs_tol, cfg.rel_tol * std::abs(total), 100.0 * kEps * magnitude});
  };

  while (error > target()) {
    if (heap.size() >= cfg.max_subdivisions) {
      throw ToleranceError("subdivision budget exhausted", total, error);
    }
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 1e3 * kEps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      // interval can no longer be resolved in double precision
      heap.push_back(worst);
      throw ToleranceError("interval too small to subdivide", total, error);
    }
    const Segment left = kronrod21(f, worst.a, mid);
    const Segment right = kronrod21(f, mid, worst.b);
    evaluations += 42;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    magnitude += left.magnitude + right.magnitude - worst.magnitude;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), worse);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), worse);
  }

  // Resum from scratch so the running updates leave no drift.
  double value = 0.0;
  double err = 0.0;
  for (const Segment& s : heap) {
    value += s.value;
    err += s.error;
  }
  return {value, err, evaluations};
}

TailFit fit_power_law_tail(const RealFunction& f, double lo, double hi, int points) {
  TailFit fit;
  if (!(lo > 0.0) || !(hi > lo) || points < 2) return fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int sign = 0;
  for (int i = 0; i < points; ++i) {
    const double x = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    const double y = f(x);
    if (!std::isfinite(y) || y == 0.0) return fit;
    const int s = y > 0.0 ? 1 : -1;
    if (sign != 0 && s != sign) return fit;
    sign = s;
    const double lx = std::log(x);
    const double ly = std::log(std::abs(y));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = points;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  fit.exponent = -slope;
  fit.amplitude = sign * std::exp(intercept);
  fit.valid = true;
  return fit;
}

Estimate integrate_semi_infinite(const RealFunction& f, double a,
                                 const QuadratureConfig& cfg, double scale) {
  cfg.validate();
  if (!std::isfinite(a)) throw DomainError("lower limit must be finite");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("frequency scale must be positive");
  }
  const double cutoff = std::max(a, 0.0) + cfg.cutoff_factor * scale;

  const TailFit fit = fit_power_law_tail(f, cutoff / 10.0, cutoff);
  if (fit.valid) {
    if (cfg.tail_order > 0.0 &&
        std::abs(fit.exponent - cfg.tail_order) > 0.2 * cfg.tail_order) {
      std::ostringstream os;
      os << "integrand decays like x^-" << fit.exponent << " but x^-" << cfg.tail_order
         << " was declared";
      throw TailMismatchError(os.str(), cfg.tail_order, fit.exponent);
    }
    if (fit.exponent <= 1.0) {
      std::ostringstream os;
      os << "integrand decays like x^-" << fit.exponent << "; integral diverges";
      throw DivergenceError(os.str());
    }
  } else if (cfg.tail_order > 0.0 && cfg.tail_order <= 1.0) {
    throw DivergenceError("declared tail order <= 1; integral diverges");
  }

  const Estimate head = integrate_adaptive(f, a, cutoff, cfg);
  const auto mapped = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double x = cutoff / t;
    return f(x) * cutoff / (t * t);
  };
  // The tail is small; judge it against the head magnitude, not its own.
  QuadratureConfig tail_cfg = cfg;
  tail_cfg.abs_tol = std::max(cfg.abs_tol, 0.1 * cfg.rel_tol * std::abs(head.value));
  const Estimate tail = integrate_adaptive(mapped, 0.0, 1.0, tail_cfg);
  return {head.value + tail.value, head.error + tail.error,
          head.evaluations + tail.evaluations};
}

Estimate integrate_principal_value(const RealFunction& f, double pole, double a,
                                   double b, const QuadratureConfig& cfg) {
  if (!(a < pole && pole < b)) {
    throw DomainError("principal value pole must lie strictly inside (a, b)");
  }
  const double half = std::min(pole - a, b - pole);
  const auto folded = [&](double t) { return f(pole + t) + f(pole - t); };
  Estimate window = integrate_adaptive(folded, 0.0, half, cfg);
  window.evaluations *= 2;
  Estimate rest;
  if (pole + half < b) {
    rest = integrate_adaptive(f, pole + half, b, cfg);
  } else if (pole - half > a) {
    rest = integrate_adaptive(f, a, pole - half, cfg);
  }
  return {window.value + rest.value, window.error + rest.error,
          window.evaluations + rest.evaluations};
}

Estimate sum_with_integral_tail(const RealFunction& term, long first, long last,
                                const QuadratureConfig& cfg) {
  if (last < first) throw DomainError("empty summation range");
  double sum = 0.0;
  double compensation = 0.0;
  // Kahan summation; the terms span many orders of magnitude.
  for (long n = last; n >= first; --n) {
    const double y = term(static_cast<double>(n)) - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
  const double start = static_cast<double>(last) + 0.5;
  QuadratureConfig tail_cfg = cfg;
  tail_cfg.abs_tol = std::max(cfg.abs_tol, 0.01 * cfg.rel_tol * std::abs(sum));
  const Estimate tail = integrate_semi_infinite(term, start, tail_cfg, start);
  const double h = 1e-3 * start;
  const double derivative = (term(start + h) - term(start - h)) / (2.0 * h);
  const double correction = derivative / 24.0;
  return {sum + tail.value + correction, std::abs(correction) + tail.error,
          static_cast<std::size_t>(last - first + 1) + tail.evaluations + 2};
}

}  // namespace qdho
