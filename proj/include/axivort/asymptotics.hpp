#pragma once

// Post-processing of trajectories: compensated coefficient traces, their
// limits, decay-rate fits, expansion residuals, and numerical checks of the
// functional inequalities used in the long-time analysis.
//
// Coefficients are taken from the projections on the discrete eigenvectors
// (Trajectory::dcoef) and compensated with the rates the scheme applies
// (Trajectory::discrete_rates), unless Projection::continuum is requested.
// Residual norms are computed by Parseval over the traced modes.

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "axivort/basis.hpp"
#include "axivort/biot.hpp"
#include "axivort/evolve.hpp"

namespace axivort::asymptotics {

using basis::EigenIndex;

enum class Projection { discrete, continuum };

struct CoefficientTrace {
  EigenIndex idx;
  double lambda = 0.0;  // compensating rate
  std::vector<double> t;
  std::vector<double> raw;
  std::vector<double> compensated;  // raw * exp(lambda t)
};

/// Throws std::invalid_argument for fewer than two samples or an untraced mode.
CoefficientTrace coefficient_trace(const evolve::Trajectory& traj, EigenIndex idx,
                                   Projection projection = Projection::discrete);

struct Limit {
  double value = 0.0;
  double oscillation = 0.0;  // max - min over the tail window
  double envelope = 0.0;     // predicted O(e^{-t}) size of the tail oscillation
  bool converged = true;
  std::size_t samples = 0;
};

/// Tail average of the compensated trace over t >= tail_start. The envelope is
/// exp(-tail_start) * max |compensated| over the whole trace, and the trace is
/// flagged as non-convergent when the oscillation exceeds ten envelopes.
/// Throws std::invalid_argument if the tail holds fewer than five samples.
Limit extract_limit(const CoefficientTrace& trace, double tail_start);

/// Last two time units of the trace.
Limit extract_limit(const CoefficientTrace& trace);

/// Least-squares fit of a + b exp(-cauchy_rate t) over t >= tail_start; value
/// is a and oscillation is the spread of the fit residuals. Used where the
/// compensated trace approaches its limit slower than the tail window resolves.
Limit extract_limit_with_tail(const CoefficientTrace& trace, double tail_start, double cauchy_rate);

struct RateFit {
  double lambda_hat = 0.0;
  bool log_factor = false;
  double log_power = 0.0;  // exponent p of t^p in the selected model
  double t_min = 0.0;
  double t_max = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log y on {1, t}, and on {1, t, log t} when allowed; the
/// model with the smaller residual variance (adjusted for its parameter count)
/// wins. Points outside [t_min, t_max] are ignored. Throws std::invalid_argument
/// for fewer than four points in the window or non-positive y there.
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, bool allow_log_factor,
                 double t_min, double t_max);
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, bool allow_log_factor);

/// Coefficients a_{m,j} indexed by mode.
using Coefficients = std::map<EigenIndex, double>;

/// ||f - e^{-lambda_n t} sum a_{n,j} psi_{n,j} - e^{-lambda_{n+1} t} sum a_{n+1,j} psi_{n+1,j}||
/// at trajectory sample k, by Parseval over traced modes with eigenvalue <= lambda_max.
double residual_norm(const evolve::Trajectory& traj, std::size_t k, unsigned order,
                     const Coefficients& a, double lambda_max = 4.0);

/// Part of ||f - <f>||_{L^2(mu)} not captured by the traced modes at sample k.
double truncation_norm(const evolve::Trajectory& traj, std::size_t k);

struct FitWindow {
  double t_min = 2.0;
  double t_max = -1.0;  // negative: 0.9 * final time
};

struct ExpansionReport {
  unsigned order = 0;
  std::vector<EigenIndex> modes;      // levels order and order + 1
  Coefficients coefficients;
  Coefficients uncertainties;          // tail oscillations
  bool converged = true;
  std::vector<double> times;
  std::vector<double> residual;
  double max_truncation = 0.0;
  RateFit residual_fit;
};

/// Extracts the level-n limits by tail averaging and the level-(n+1) limits
/// with a Cauchy tail exp(-t/2), then fits the residual decay.
ExpansionReport expansion_report(const evolve::Trajectory& traj, unsigned order,
                                 const FitWindow& window = {});

struct PoincareSlack {
  double lhs = 0.0;            // lambda_{n+1} ||g||^2
  double rhs_gradient = 0.0;   // ||grad g||^2 = <L g, g>
  double slack = 0.0;          // max(0, lhs - rhs_gradient)
};

/// g = f - e^{-lambda_n t} sum a_{n,j} psi_{n,j} at sample k, in coefficient space.
PoincareSlack poincare_slack(const evolve::Trajectory& traj, std::size_t k, unsigned order,
                             const Coefficients& a);

/// Same for explicit coefficients <f, psi_m> (g = f - sum over level n of a).
PoincareSlack poincare_slack(const Coefficients& f, unsigned order, const Coefficients& a);

struct DynamicPoincareReport {
  std::vector<double> times;
  std::vector<double> scaled_slack;  // C(t) exp(2 lambda_{n+2} t)
  double sup_scaled = 0.0;
  bool bounded = true;
};

/// Scaled slack over [t_min, t_max]. Bounded means the supremum over the
/// second half of the window does not exceed ten times the supremum over the
/// first half plus 1e-12 ||f(t_min) - <f>||^2.
DynamicPoincareReport dynamic_poincare_check(const evolve::Trajectory& traj, unsigned order,
                                             const Coefficients& a, double t_min = 1.0,
                                             double t_max = 8.0);

/// A function on the half-plane with its first partial derivatives.
struct Sampler {
  std::function<double(double, double)> value;
  std::function<double(double, double)> d_r;
  std::function<double(double, double)> d_z;
};

struct HardyReport {
  double lhs = 0.0;  // ||psi||_{L^2(rho_* dr dz)}
  double rhs = 0.0;  // ||psi||_{L^2(mu)} + ||d_r psi||_{L^2(mu)}
  double ratio = 0.0;
};

/// Both sides by Gauss quadrature with K nodes per axis.
HardyReport hardy_check(const Sampler& psi, std::size_t K = 24);

enum class GronwallVariant { b, c };

/// RK4 (dt = 1e-3, t in [0, 30]) for F' = -(lambda - C e^{-t}) F + C e^{-mu t}
/// (variant b) or + C e^{-lambda t} (variant c). Returns sup F e^{lambda t} for b
/// and sup F e^{lambda t} / (1 + t) for c. Throws std::invalid_argument unless
/// 0 <= lambda < mu (b) or lambda >= 0 (c), and for C < 0 or F0 < 0.
double gronwall_oracle(double lambda, double mu, double C, double F0, GronwallVariant variant);

struct IbpIdentity {
  double lhs = 0.0;  // 1/2 int g ((r, z) . m) f dmu - int g m . grad f dmu
  double rhs = 0.0;  // int (grad g . m) f dmu + 2 int (m_r / r) g f dmu
};

/// Both sides of the integration-by-parts identity for a velocity on the grid,
/// with trapezoid quadrature over interior nodes.
IbpIdentity ibp_identity(const biot::Velocity& m, const Sampler& g, const Sampler& f);

/// lhs = 1/2 ||f - <f>||^2 and rhs = ||grad f||^2 in coefficient space.
struct PoincareCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};
PoincareCheck poincare_check(const Coefficients& f);

enum class Scenario { general, zero_impulse, zero_impulse_even };

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view text);

/// Thrown when a trajectory does not meet the hypotheses of the scenario.
class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorollaryReport {
  Scenario scenario = Scenario::general;
  ExpansionReport expansion;
  double alpha = 0.0;  // a at (0, 1)
  double beta = 0.0;   // a at (0, 2)
  double gamma = 0.0;  // a at (1, 0)
  /// Odd coefficients a at (0, 1), (0, 3), (1, 1) (used by the even scenario).
  Coefficients odd;
  /// Physical-time exponent: residual ~ log(t+1)^p (t+1)^physical_exponent.
  double physical_exponent = 0.0;
};

/// Tolerances used to test the hypotheses of a scenario.
struct HypothesisTolerance {
  double impulse = 1e-6;  // |I| relative to the initial perturbation size
  double parity = 1e-6;   // initial parity defect relative to sup |h0|
};

/// Order n = 0, 1, 2 for general, zero_impulse, zero_impulse_even. Hypotheses
/// are checked on the initial checkpoint and the impulse trace.
CorollaryReport corollary_report(const evolve::Trajectory& traj, Scenario scenario,
                                 const FitWindow& window = {}, const HypothesisTolerance& tol = {});

}  // namespace axivort::asymptotics
