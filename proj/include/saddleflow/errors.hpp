#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace saddleflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The requested operation needs an oracle the problem does not provide.
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An inner iterative solve hit its iteration cap. Carries the best iterate.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, Eigen::VectorXd best, double residual)
      : Error(what), best_iterate(std::move(best)), best_residual(residual) {}
  Eigen::VectorXd best_iterate;
  double best_residual;
};

/// Virtual and original variables have not aligned.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, double x_gap, double y_gap)
      : Error(what), primal_gap(x_gap), dual_gap(y_gap) {}
  double primal_gap;
  double dual_gap;
};

class InvalidInit : public Error {
 public:
  using Error::Error;
};

/// A vector field produced a non-finite value.
class Diverged : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class UnsupportedScale : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace saddleflow
