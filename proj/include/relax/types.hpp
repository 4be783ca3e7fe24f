#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace relax {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// A point in physical space (size d) or a wave-vector (size d).
using Point = Eigen::VectorXd;

/// Axis-aligned box of states, used wherever a hypothesis is certified locally.
struct StateBox {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& u, double slack = 0.0) const {
    return ((u.array() >= lower.array() - slack) && (u.array() <= upper.array() + slack)).all();
  }
  static StateBox uniform(int k, double lo, double hi) {
    return {Vector::Constant(k, lo), Vector::Constant(k, hi)};
  }
};

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Block sizes or array shapes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A caller-side precondition was violated (bad ladder, non-positive data, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be invertible (or positive definite) is not.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double smallest)
      : Error(what), smallest_(smallest) {}
  double smallest() const { return smallest_; }

 private:
  double smallest_;
};

/// Time-integration failures: Newton divergence, CFL violation, non-finite state.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Formats a vector as "[a b c]" with full precision, no commas.
std::string format_vector(const Vector& v);

/// Locale-independent shortest-round-trip style formatting with 17 significant digits.
std::string format_double(double value);

}  // namespace relax
