#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qdho {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or parameter outside the physical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The stability criterion omega0^2 > int alpha^2/xi^2 fails.
class NotDiagonalizableError : public Error {
 public:
  using Error::Error;
};

/// Negative Im chi encountered where a passive medium is required.
class PassivityError : public Error {
 public:
  using Error::Error;
};

/// An integral whose integrand decays too slowly to converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Fitted tail decay disagrees with the declared decay exponent.
class TailMismatchError : public Error {
 public:
  TailMismatchError(const std::string& what, double declared, double fitted)
      : Error(what), declared_(declared), fitted_(fitted) {}
  double declared() const { return declared_; }
  double fitted() const { return fitted_; }

 private:
  double declared_;
  double fitted_;
};

/// Evaluation at (or numerically on top of) a pole.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, std::complex<double> pole)
      : Error(what), pole_(pole) {}
  std::complex<double> pole() const { return pole_; }

 private:
  std::complex<double> pole_;
};

/// Adaptive quadrature ran out of subdivisions; carries the best estimate.
class ToleranceError : public Error {
 public:
  ToleranceError(const std::string& what, double estimate, double error)
      : Error(what), estimate_(estimate), error_(error) {}
  double estimate() const { return estimate_; }
  double error() const { return error_; }

 private:
  double estimate_;
  double error_;
};

/// Iterative root finding did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdho
