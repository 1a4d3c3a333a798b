#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace curllab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedRank : public Error {
 public:
  using Error::Error;
};

/// A metric sample failed the symmetric-positive-definite check.
class DegenerateMetric : public Error {
 public:
  DegenerateMetric(const std::string& what, std::array<double, 3> point)
      : Error(what), point_(point) {}
  const std::array<double, 3>& point() const { return point_; }

 private:
  std::array<double, 3> point_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue continuation could not resolve a crossing.
class BranchAmbiguity : public Error {
 public:
  BranchAmbiguity(const std::string& what, double s) : Error(what), s_(s) {}
  double s() const { return s_; }

 private:
  double s_;
};

class StiffnessError : public Error {
 public:
  using Error::Error;
};

class CausticError : public Error {
 public:
  using Error::Error;
};

class NotContact : public Error {
 public:
  using Error::Error;
};

class HasZeros : public Error {
 public:
  using Error::Error;
};

class ReebMismatch : public Error {
 public:
  using Error::Error;
};

class IncompatibleStructure : public Error {
 public:
  using Error::Error;
};

class DegenerateOrbit : public Error {
 public:
  using Error::Error;
};

class EpsilonTooLarge : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace curllab
