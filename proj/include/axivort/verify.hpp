#pragma once

// Acceptance suites. Each criterion runs at desk scale and reports a verdict
// with the measured quantities; trajectories are shared between criteria
// through a Context.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "axivort/evolve.hpp"

namespace axivort::verify {

enum class Suite { basis, linear, nonlinear, corollaries, inequalities, all };

std::string_view to_string(Suite suite);
Suite parse_suite(std::string_view text);

/// Criteria (1-10) executed by a suite, in order.
std::vector<int> criteria_of(Suite suite);

struct Scale {
  Grid grid{12.0, 12.0, 256, 256};
  double dt = 2e-3;
  double t_end = 10.0;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  std::map<std::string, double> metrics;
  double seconds = 0.0;
};

struct BasisResiduals {
  double orthonormality = 0.0;  // max |<psi_a, psi_b> - delta_ab|
  double eigenrelation = 0.0;   // max relative |L psi - lambda psi|
  double weight_sum_error = 0.0;
};

/// Basis invariants for all modes up to max_level with a K-node Gauss rule.
BasisResiduals basis_residuals(unsigned max_level, std::size_t quad_nodes);

/// Named evolution runs, computed on first use.
class Context {
 public:
  explicit Context(Scale scale = {}, std::ostream* log = nullptr);

  const Scale& scale() const { return scale_; }
  std::ostream* log() const { return log_; }

  /// "general": h0 = (1 + 0.1 psi_{0,1}) rho_*; "zero_impulse": 0.1 psi_{0,1} rho_*;
  /// "zero_impulse_even": 0.1 psi_{0,2} rho_*. Nonlinear, traced to level 8.
  const evolve::Trajectory& scenario(const std::string& name);

  /// Linear run from psi_idx rho_* (idx = (0,0) gives rho_*) up to t_end.
  const evolve::Trajectory& linear_mode(basis::EigenIndex idx, double t_end);

 private:
  Scale scale_;
  std::ostream* log_;
  std::map<std::string, evolve::Trajectory> runs_;
};

CriterionResult run_criterion(int id, Context& ctx);

struct SuiteReport {
  Suite suite = Suite::all;
  std::vector<CriterionResult> criteria;
  double seconds = 0.0;

  bool passed() const;
};

SuiteReport run_suite(Suite suite, Context& ctx);

}  // namespace axivort::verify
