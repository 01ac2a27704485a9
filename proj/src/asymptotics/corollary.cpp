#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "axivort/asymptotics.hpp"

namespace axivort::asymptotics {

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::general: return "general";
    case Scenario::zero_impulse: return "zero_impulse";
    case Scenario::zero_impulse_even: return "zero_impulse_even";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view text) {
  for (Scenario s : {Scenario::general, Scenario::zero_impulse, Scenario::zero_impulse_even})
    if (to_string(s) == text) return s;
  throw std::invalid_argument("unknown scenario '" + std::string(text) + "'");
}

CorollaryReport corollary_report(const evolve::Trajectory& traj, Scenario scenario, const FitWindow& window,
                                 const HypothesisTolerance& tol) {
  if (traj.times.empty() || traj.checkpoints.empty())
    throw std::invalid_argument("corollary_report: empty trajectory");
  const double scale = traj.l2mu_residual.front();
  if (scenario != Scenario::general && std::abs(traj.impulse.front()) > tol.impulse * scale) {
    std::ostringstream msg;
    msg << "corollary_report: impulse " << traj.impulse.front() << " is not zero for scenario " << to_string(scenario);
    throw HypothesisViolation(msg.str());
  }
  if (scenario == Scenario::zero_impulse_even) {
    const Field& h0 = traj.checkpoints.front();
    double sup = 0.0;
    for (double v : h0.values) sup = std::max(sup, std::abs(v));
    const double defect = parity_defect(h0, 1.0);
    if (defect > tol.parity * sup) {
      std::ostringstream msg;
      msg << "corollary_report: initial datum is not even in z (defect " << defect << ")";
      throw HypothesisViolation(msg.str());
    }
  }

  const unsigned order = scenario == Scenario::general ? 0 : scenario == Scenario::zero_impulse ? 1 : 2;
  CorollaryReport rep;
  rep.scenario = scenario;
  rep.expansion = expansion_report(traj, order, window);
  auto limit = [&](EigenIndex idx) { return extract_limit(coefficient_trace(traj, idx)).value; };
  rep.alpha = limit({0, 1});
  rep.beta = limit({0, 2});
  rep.gamma = limit({1, 0});
  for (EigenIndex idx : {EigenIndex{0, 1}, EigenIndex{0, 3}, EigenIndex{1, 1}}) rep.odd[idx] = limit(idx);
  rep.physical_exponent = -(rep.expansion.residual_fit.lambda_hat + 1.25);
  return rep;
}

}  // namespace axivort::asymptotics
