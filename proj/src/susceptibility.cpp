#include "qdho/susceptibility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "qdho/errors.hpp"

namespace qdho {

using std::numbers::pi;

void ModelParams::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw DomainError("omega0 must be > 0");
  if (!(gamma1 > 0.0) || !std::isfinite(gamma1)) throw DomainError("gamma1 must be > 0");
  if (!(gamma2 >= 0.0) || !std::isfinite(gamma2)) throw DomainError("gamma2 must be >= 0");
}

double ModelParams::coupling_strength() const {
  return 2.0 * gamma2 * (gamma1 * gamma1 + omega0 * omega0) / (omega0 * omega0);
}

double ModelParams::pole_rate() const { return gamma1 + 2.0 * gamma2; }

double ModelParams::stability_margin() const {
  return omega0 * omega0 - 2.0 * gamma1 * gamma2;
}

void ModelParams::require_diagonalizable() const {
  validate();
  if (!diagonalizable()) {
    std::ostringstream os;
    os << "omega0^2 > 2 gamma1 gamma2 violated (omega0 = " << omega0
       << ", gamma1 = " << gamma1 << ", gamma2 = " << gamma2 << ")";
    throw NotDiagonalizableError(os.str());
  }
}

// ---------------------------------------------------------------- tabulated

namespace {

// Three-point end slope with the shape-preserving adjustments of Fritsch-Carlson.
double end_slope(double h0, double h1, double d0, double d1) {
  double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (s * d0 <= 0.0) {
    s = 0.0;
  } else if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0)) {
    s = 3.0 * d0;
  }
  return s;
}

}  // namespace

TabulatedChi::TabulatedChi(std::vector<double> grid, std::vector<double> im_chi,
                           double tail_exponent, double omega0)
    : grid_(std::move(grid)),
      values_(std::move(im_chi)),
      tail_exponent_(tail_exponent),
      omega0_(omega0) {
  if (grid_.size() != values_.size()) throw DomainError("grid and im_chi differ in length");
  if (grid_.size() < 2) throw DomainError("tabulated chi needs at least two points");
  if (!(omega0_ > 0.0)) throw DomainError("omega0 must be > 0");
  if (!std::isfinite(tail_exponent_)) throw DomainError("tail exponent must be finite");
  if (!(grid_.front() > 0.0)) throw DomainError("tabulated frequencies must be > 0");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!std::isfinite(grid_[i]) || !std::isfinite(values_[i])) {
      throw DomainError("tabulated chi contains non-finite values");
    }
    if (i > 0 && !(grid_[i] > grid_[i - 1])) {
      throw DomainError("tabulated frequencies must be strictly increasing");
    }
    if (values_[i] < 0.0) {
      std::ostringstream os;
      os << "Im chi = " << values_[i] << " < 0 at omega = " << grid_[i];
      throw PassivityError(os.str());
    }
  }

  const std::size_t n = grid_.size();
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = grid_[i + 1] - grid_[i];
    d[i] = (values_[i + 1] - values_[i]) / h[i];
  }
  slopes_.assign(n, 0.0);
  if (n == 2) {
    slopes_[0] = slopes_[1] = d[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] * d[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    slopes_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
  }
  slopes_[0] = end_slope(h[0], h[1], d[0], d[1]);
  slopes_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

double TabulatedChi::im_chi(double omega) const {
  if (omega < 0.0) return -im_chi(-omega);
  if (omega <= grid_.front()) return values_.front() * omega / grid_.front();
  if (omega >= grid_.back()) {
    return values_.back() * std::pow(grid_.back() / omega, tail_exponent_);
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), omega);
  const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double h = grid_[k + 1] - grid_[k];
  const double t = (omega - grid_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * values_[k] + h10 * h * slopes_[k] + h01 * values_[k + 1] +
         h11 * h * slopes_[k + 1];
}

// ---------------------------------------------------------------- sources

double omega0_of(const SusceptibilitySource& src) {
  return std::visit(
      [](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, ModelParams>) {
          return s.omega0;
        } else {
          return s.omega0();
        }
      },
      src);
}

double frequency_scale(const SusceptibilitySource& src) {
  if (const auto* p = std::get_if<ModelParams>(&src)) {
    return std::max(p->omega0, p->pole_rate());
  }
  const auto& t = std::get<TabulatedChi>(src);
  return t.omega0();
}

double im_chi_decay(const SusceptibilitySource& src) {
  if (std::holds_alternative<ModelParams>(src)) return 1.0;
  return std::get<TabulatedChi>(src).tail_exponent();
}

bool is_undamped(const SusceptibilitySource& src) {
  const auto* p = std::get_if<ModelParams>(&src);
  return p != nullptr && p->gamma2 == 0.0;
}

complex chi_model(complex omega, const ModelParams& p) {
  const complex denom = complex(p.pole_rate(), 0.0) - complex(0.0, 1.0) * omega;
  if (p.gamma2 == 0.0) return {0.0, 0.0};
  if (denom == complex(0.0, 0.0)) {
    throw PoleError("chi evaluated at its pole", complex(0.0, -p.pole_rate()));
  }
  return p.coupling_strength() / denom;
}

complex dchi_model(complex omega, const ModelParams& p) {
  const complex denom = complex(p.pole_rate(), 0.0) - complex(0.0, 1.0) * omega;
  if (p.gamma2 == 0.0) return {0.0, 0.0};
  if (denom == complex(0.0, 0.0)) {
    throw PoleError("chi' evaluated at the pole of chi", complex(0.0, -p.pole_rate()));
  }
  return complex(0.0, p.coupling_strength()) / (denom * denom);
}

double im_chi(double omega, const SusceptibilitySource& src) {
  if (const auto* p = std::get_if<ModelParams>(&src)) {
    const double a = p->pole_rate();
    return p->coupling_strength() * omega / (a * a + omega * omega);
  }
  return std::get<TabulatedChi>(src).im_chi(omega);
}

double coupling_alpha(double omega, const SusceptibilitySource& src) {
  if (omega < 0.0) throw DomainError("coupling function needs omega >= 0");
  const double ic = im_chi(omega, src);
  if (ic < 0.0) {
    std::ostringstream os;
    os << "Im chi(" << omega << ") = " << ic << " < 0";
    throw PassivityError(os.str());
  }
  const double w0 = omega0_of(src);
  return w0 * std::sqrt(2.0 * omega * ic / pi);
}

double coupling_alpha_model(double omega, const ModelParams& p) {
  const double a = p.pole_rate();
  return std::sqrt(4.0 * p.gamma2 * omega * omega * (p.gamma1 * p.gamma1 + p.omega0 * p.omega0) /
                   (pi * (a * a + omega * omega)));
}

// ---------------------------------------------------------------- Kramers-Kronig

KramersKronig kk_reconstruct(double omega, const SusceptibilitySource& src,
                             const QuadratureConfig& cfg) {
  if (!(omega >= 0.0) || !std::isfinite(omega)) {
    throw DomainError("Kramers-Kronig reconstruction needs real omega >= 0");
  }
  if (is_undamped(src)) return {{0.0, 0.0}, 0.0};
  const double p = im_chi_decay(src);
  if (p <= 0.0) {
    throw DivergenceError("Im chi does not decay; Kramers-Kronig integral diverges");
  }

  // x Im chi(x), proportional to alpha^2(x).
  const auto weight = [&](double x) { return x * im_chi(x, src); };
  const double scale = std::max(frequency_scale(src), omega);
  const QuadratureConfig tail_cfg = cfg.with_tail_order(std::min(2.0, 1.0 + p));

  Estimate re;
  if (omega == 0.0) {
    re = integrate_semi_infinite([&](double x) { return im_chi(x, src) / x; }, 0.0,
                                 cfg.with_tail_order(1.0 + p), scale);
  } else {
    const double w_omega = weight(omega);
    const auto regular = [&](double x) {
      return (weight(x) - w_omega) / ((x - omega) * (x + omega));
    };
    const Estimate below = integrate_adaptive(regular, 0.0, omega, cfg);
    const Estimate above = integrate_semi_infinite(regular, omega, tail_cfg, scale);
    re = {below.value + above.value, below.error + above.error,
          below.evaluations + above.evaluations};
  }
  const double factor = 2.0 / pi;
  return {{factor * re.value, im_chi(omega, src)}, factor * re.error};
}

DispersionTable::DispersionTable(const TabulatedChi& table, const QuadratureConfig& cfg) {
  const SusceptibilitySource src = table;
  const std::vector<double>& grid = table.grid();
  constexpr double kMaxStep = 0.025; // in ln w
  constexpr double kStep = 0.1;      // outside the grid
  std::vector<double> u;
  // three decades below the grid, where Im chi is continued linearly
  const double bottom = std::log(grid.front());
  for (int k = 69; k >= 1; --k) u.push_back(bottom - kStep * k);
  for (double w : grid) {
    const double here = std::log(w);
    const double prev = u.back();
    const int pieces = static_cast<int>(std::ceil((here - prev) / kMaxStep));
    for (int k = 1; k < pieces; ++k) u.push_back(prev + (here - prev) * k / pieces);
    u.push_back(here);
  }
  const double far = 100.0 * std::max(grid.back(), cfg.cutoff_factor * table.omega0());
  const double top = std::log(far);
  for (double x = u.back() + kStep; x < top + kStep; x += kStep) u.push_back(x);

  const KramersKronig zero = kk_reconstruct(0.0, src, cfg);
  re_zero_ = zero.chi.real();
  max_error_ = zero.error;
  values_.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const KramersKronig kk = kk_reconstruct(std::exp(u[i]), src, cfg);
    values_[i] = kk.chi.real();
    max_error_ = std::max(max_error_, kk.error);
  }
  log_nodes_ = std::move(u);

  const std::size_t n = log_nodes_.size();
  slopes_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || i + 1 == n) {
      const std::size_t j = i == 0 ? 1 : n - 2;
      slopes_[i] = (values_[std::max(i, j)] - values_[std::min(i, j)]) /
                   (log_nodes_[std::max(i, j)] - log_nodes_[std::min(i, j)]);
      continue;
    }
    // three-point derivative on an uneven grid
    const double h0 = log_nodes_[i] - log_nodes_[i - 1];
    const double h1 = log_nodes_[i + 1] - log_nodes_[i];
    slopes_[i] = (values_[i + 1] - values_[i]) * h0 / (h1 * (h0 + h1)) +
                 (values_[i] - values_[i - 1]) * h1 / (h0 * (h0 + h1));
  }
  const double a = values_[n - 2];
  const double b = values_[n - 1];
  if (a != 0.0 && b != 0.0 && (a > 0.0) == (b > 0.0)) {
    tail_exponent_ = -std::log(b / a) / (log_nodes_[n - 1] - log_nodes_[n - 2]);
  }
}

double DispersionTable::re_chi(double omega) const {
  omega = std::abs(omega);
  if (omega == 0.0) return re_zero_;
  const double u = std::log(omega);
  if (u <= log_nodes_.front()) {
    const double r = omega / std::exp(log_nodes_.front());
    return re_zero_ + (values_.front() - re_zero_) * r * r;
  }
  if (u >= log_nodes_.back()) {
    return values_.back() * std::exp(-tail_exponent_ * (u - log_nodes_.back()));
  }
  const auto it = std::upper_bound(log_nodes_.begin(), log_nodes_.end(), u);
  const std::size_t k = static_cast<std::size_t>(it - log_nodes_.begin()) - 1;
  const double h = log_nodes_[k + 1] - log_nodes_[k];
  const double t = (u - log_nodes_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * values_[k] + (t3 - 2.0 * t2 + t) * h * slopes_[k] +
         (-2.0 * t3 + 3.0 * t2) * values_[k + 1] + (t3 - t2) * h * slopes_[k + 1];
}

// ---------------------------------------------------------------- stability

Estimate coupling_integral(const SusceptibilitySource& src, const QuadratureConfig& cfg) {
  const double w0 = omega0_of(src);
  const double p = im_chi_decay(src);
  if (is_undamped(src)) return {};
  if (p <= 0.0) throw DivergenceError("int alpha^2 / x^2 diverges");
  // alpha^2 / x^2 = (2 w0^2 / pi) Im chi(x) / x
  const auto integrand = [&](double x) { return 2.0 * w0 * w0 / pi * im_chi(x, src) / x; };
  return integrate_semi_infinite(integrand, 0.0, cfg.with_tail_order(1.0 + p),
                                 frequency_scale(src));
}

DiagonalizabilityReport check_diagonalizable(const SusceptibilitySource& src,
                                             const QuadratureConfig& cfg) {
  DiagonalizabilityReport report;
  const double w0 = omega0_of(src);
  if (const auto* p = std::get_if<ModelParams>(&src)) {
    p->validate();
    // The integral is w0^2 chi(0) = 2 g2 (g1^2 + w0^2) / (g1 + 2 g2); the
    // inequality w0^2 > w0^2 chi(0) rearranges to w0^2 > 2 g1 g2.
    report.integral = p->coupling_strength() * w0 * w0 / p->pole_rate();
    report.reduced_margin = p->stability_margin();
  } else {
    try {
      report.integral = coupling_integral(src, cfg).value;
    } catch (const DivergenceError&) {
      report.integral = std::numeric_limits<double>::infinity();
    }
  }
  report.margin = w0 * w0 - report.integral;
  report.diagonalizable = report.margin > 0.0;
  if (report.reduced_margin) report.diagonalizable = *report.reduced_margin > 0.0;
  return report;
}

// ---------------------------------------------------------------- I/O

TabulatedChi tabulate_model(const ModelParams& p, std::vector<double> grid) {
  std::vector<double> values;
  values.reserve(grid.size());
  const SusceptibilitySource src = p;
  for (double w : grid) values.push_back(im_chi(w, src));
  return TabulatedChi(std::move(grid), std::move(values), 1.0, p.omega0);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

TabulatedChi load_chi_table(const std::filesystem::path& path, double tail_exponent,
                            double omega0, double frequency_scale) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open chi table " + path.string());
  std::string line;
  bool header_seen = false;
  std::vector<double> grid, values;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) {
      throw DomainError("chi table line " + std::to_string(line_no) + ": expected two columns");
    }
    const std::string first = trim(t.substr(0, comma));
    const std::string second = trim(t.substr(comma + 1));
    if (!header_seen) {
      if (first != "omega" || second != "im_chi") {
        throw DomainError("chi table must start with the header 'omega,im_chi'");
      }
      header_seen = true;
      continue;
    }
    try {
      std::size_t used1 = 0, used2 = 0;
      const double w = std::stod(first, &used1);
      const double v = std::stod(second, &used2);
      if (used1 != first.size() || used2 != second.size()) throw std::invalid_argument("");
      grid.push_back(w * frequency_scale);
      values.push_back(v);
    } catch (const std::logic_error&) {
      throw DomainError("chi table line " + std::to_string(line_no) + ": not a number");
    }
  }
  if (!header_seen) throw DomainError("chi table is empty");
  return TabulatedChi(std::move(grid), std::move(values), tail_exponent, omega0);
}

}  // namespace qdho
