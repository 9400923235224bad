#ifndef SADDLE_TYPES_H_
#define SADDLE_TYPES_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace saddle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A schedule whose derived quantities are undefined (Gamma_k = 0, bad window).
class ScheduleError : public Error {
 public:
  using Error::Error;
};

// Non-finite or exploding iterates. Carries the iteration index.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::int64_t iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::int64_t iteration() const { return iteration_; }

 private:
  std::int64_t iteration_;
};

// Iterative sub-solver (e.g. Dykstra projection) ran out of budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Closed-loop matrix with spectral radius >= 1: the LQR cost is infinite.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, double spectral_radius)
      : Error(what + " (spectral radius " + std::to_string(spectral_radius) +
              ")"),
        spectral_radius_(spectral_radius) {}
  double spectral_radius() const { return spectral_radius_; }

 private:
  double spectral_radius_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::int64_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::int64_t line() const { return line_; }

 private:
  std::int64_t line_;
};

inline bool AllFinite(const Vec& v) { return v.allFinite(); }

}  // namespace saddle

#endif  // SADDLE_TYPES_H_
