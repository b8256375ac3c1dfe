#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gafs {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXr = Eigen::VectorXd;

// Error hierarchy. Everything derives from gafs::Error so callers can catch
// one type; the CLI maps UsageError -> exit 2 and NumericalError -> exit 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public UsageError {
 public:
  using UsageError::UsageError;
};

class InvalidParameter : public UsageError {
 public:
  using UsageError::UsageError;
};

/// A closed-form precondition was violated; the message names the inequality.
class DomainError : public UsageError {
 public:
  using UsageError::UsageError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class PoleProximityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The argument-principle count could not be rounded reliably; the caller
/// should perturb the contour.
class ContourIndeterminateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct Disk {
  Complex center{0.0, 0.0};
  double radius = 1.0;

  bool contains(Complex z) const { return std::abs(z - center) < radius; }
};

enum class Provenance { Eigensolver, Rootfinder, GAF };

const char* to_string(Provenance p);

/// Finite multiset of complex points; multiplicities are explicit repeats.
struct PointSet {
  std::vector<Complex> points;
  Provenance provenance = Provenance::Eigensolver;

  std::size_t size() const { return points.size(); }
  std::size_t count_in(const Disk& d) const;
  PointSet restricted_to(const Disk& d) const;
};

/// Symmetric Hausdorff distance; +inf if exactly one side is empty.
double hausdorff_distance(const PointSet& a, const PointSet& b);

}  // namespace gafs
