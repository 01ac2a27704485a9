#pragma once

#include <stdexcept>
#include <string>

namespace axivort {

/// A linear solve or node computation did not reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// The advective CFL guard failed during time integration.
class CflViolation : public std::runtime_error {
 public:
  CflViolation(const std::string& what, double time, double courant)
      : std::runtime_error(what), time_(time), courant_(courant) {}
  double time() const { return time_; }
  double courant() const { return courant_; }

 private:
  double time_;
  double courant_;
};

}  // namespace axivort
