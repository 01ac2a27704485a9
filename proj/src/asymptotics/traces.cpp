#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "axivort/asymptotics.hpp"

namespace axivort::asymptotics {

namespace {

double lambda_of(EigenIndex idx) { return basis::eigenvalue(idx).value(); }

// Level-n part of `a`, damped to sample k with the trajectory's rates.
Coefficients damped(const evolve::Trajectory& traj, std::size_t k, const Coefficients& a,
                    std::initializer_list<unsigned> levels) {
  Coefficients out;
  for (const auto& [idx, value] : a) {
    if (std::find(levels.begin(), levels.end(), idx.level()) == levels.end()) continue;
    const double rate = traj.discrete_rates.at(traj.mode_index(idx));
    out[idx] = value * std::exp(-rate * traj.times[k]);
  }
  return out;
}

Coefficients sample_coefficients(const evolve::Trajectory& traj, std::size_t k) {
  Coefficients f;
  for (std::size_t m = 0; m < traj.modes.size(); ++m) f[traj.modes[m]] = traj.dcoef[k][m];
  return f;
}

}  // namespace

CoefficientTrace coefficient_trace(const evolve::Trajectory& traj, EigenIndex idx, Projection projection) {
  if (traj.times.size() < 2) throw std::invalid_argument("coefficient_trace: fewer than two samples");
  std::size_t m = 0;
  try {
    m = traj.mode_index(idx);
  } catch (const std::out_of_range& e) {
    throw std::invalid_argument(e.what());
  }
  CoefficientTrace tr;
  tr.idx = idx;
  tr.lambda = projection == Projection::discrete ? traj.discrete_rates[m] : lambda_of(idx);
  const auto& table = projection == Projection::discrete ? traj.dcoef : traj.coef;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double raw = table[k][m];
    tr.t.push_back(traj.times[k]);
    tr.raw.push_back(raw);
    tr.compensated.push_back(raw * std::exp(tr.lambda * traj.times[k]));
  }
  return tr;
}

Limit extract_limit(const CoefficientTrace& trace, double tail_start) {
  Limit lim;
  double lo = INFINITY, hi = -INFINITY, sum = 0.0, scale = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    const double c = trace.compensated[k];
    scale = std::max(scale, std::abs(c));
    if (trace.t[k] < tail_start) continue;
    if (lim.samples == 0) ref = c;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    sum += c - ref;  // deviations keep constant traces exact
    ++lim.samples;
  }
  if (lim.samples < 5) throw std::invalid_argument("extract_limit: fewer than five samples in the tail");
  lim.value = ref + sum / static_cast<double>(lim.samples);
  lim.oscillation = hi - lo;
  lim.envelope = std::exp(-tail_start) * scale;
  lim.converged = std::isfinite(lim.value) && lim.oscillation <= 10.0 * lim.envelope;
  return lim;
}

Limit extract_limit(const CoefficientTrace& trace) {
  if (trace.t.empty()) throw std::invalid_argument("extract_limit: empty trace");
  return extract_limit(trace, trace.t.back() - 2.0);
}

Limit extract_limit_with_tail(const CoefficientTrace& trace, double tail_start, double cauchy_rate) {
  double s0 = 0, s1 = 0, s2 = 0, y0 = 0, y1 = 0, scale = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    scale = std::max(scale, std::abs(trace.compensated[k]));
    if (trace.t[k] < tail_start) continue;
    const double e = std::exp(-cauchy_rate * (trace.t[k] - tail_start));
    s0 += 1.0;
    s1 += e;
    s2 += e * e;
    y0 += trace.compensated[k];
    y1 += e * trace.compensated[k];
    ++n;
  }
  if (n < 5) throw std::invalid_argument("extract_limit_with_tail: fewer than five samples in the tail");
  const double det = s0 * s2 - s1 * s1;
  Limit lim;
  lim.samples = n;
  const double a = (s2 * y0 - s1 * y1) / det, b = (s0 * y1 - s1 * y0) / det;
  lim.value = a;
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    if (trace.t[k] < tail_start) continue;
    const double r = trace.compensated[k] - a - b * std::exp(-cauchy_rate * (trace.t[k] - tail_start));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  lim.oscillation = hi - lo;
  lim.envelope = std::exp(-tail_start) * scale;
  lim.converged = std::isfinite(a) && lim.oscillation <= 10.0 * lim.envelope;
  return lim;
}

double residual_norm(const evolve::Trajectory& traj, std::size_t k, unsigned order, const Coefficients& a,
                     double lambda_max) {
  const Coefficients sub = damped(traj, k, a, {order, order + 1});
  double s = 0.0;
  for (std::size_t m = 0; m < traj.modes.size(); ++m) {
    const EigenIndex idx = traj.modes[m];
    if (lambda_of(idx) > lambda_max) continue;
    const auto it = sub.find(idx);
    const double d = traj.dcoef[k][m] - (it == sub.end() ? 0.0 : it->second);
    s += d * d;
  }
  return std::sqrt(s);
}

double truncation_norm(const evolve::Trajectory& traj, std::size_t k) {
  double captured = 0.0;
  for (std::size_t m = 0; m < traj.modes.size(); ++m)
    if (traj.modes[m] != EigenIndex{0, 0}) captured += traj.dcoef[k][m] * traj.dcoef[k][m];
  const double total = traj.l2mu_residual[k] * traj.l2mu_residual[k];
  return std::sqrt(std::max(0.0, total - captured));
}

ExpansionReport expansion_report(const evolve::Trajectory& traj, unsigned order, const FitWindow& window) {
  ExpansionReport rep;
  rep.order = order;
  for (unsigned level : {order, order + 1})
    for (EigenIndex idx : basis::enumerate_level(level)) rep.modes.push_back(idx);
  for (EigenIndex idx : rep.modes) {
    const CoefficientTrace tr = coefficient_trace(traj, idx);
    const Limit lim = idx.level() == order ? extract_limit(tr) : extract_limit_with_tail(tr, tr.t.back() - 2.0, 0.5);
    rep.coefficients[idx] = lim.value;
    rep.uncertainties[idx] = lim.oscillation;
    rep.converged = rep.converged && lim.converged;
  }
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    rep.times.push_back(traj.times[k]);
    rep.residual.push_back(residual_norm(traj, k, order, rep.coefficients));
    rep.max_truncation = std::max(rep.max_truncation, truncation_norm(traj, k));
  }
  const double t_max = window.t_max < 0.0 ? 0.9 * traj.times.back() : window.t_max;
  rep.residual_fit = fit_rate(rep.times, rep.residual, true, window.t_min, t_max);
  return rep;
}

PoincareSlack poincare_slack(const Coefficients& f, unsigned order, const Coefficients& a) {
  const double gap = 0.5 * static_cast<double>(order + 1);
  PoincareSlack out;
  for (const auto& [idx, value] : f) {
    double g = value;
    if (idx.level() == order) {
      const auto it = a.find(idx);
      if (it != a.end()) g -= it->second;
    }
    out.lhs += gap * g * g;
    out.rhs_gradient += lambda_of(idx) * g * g;
  }
  out.slack = std::max(0.0, out.lhs - out.rhs_gradient);
  return out;
}

PoincareSlack poincare_slack(const evolve::Trajectory& traj, std::size_t k, unsigned order, const Coefficients& a) {
  return poincare_slack(sample_coefficients(traj, k), order, damped(traj, k, a, {order}));
}

DynamicPoincareReport dynamic_poincare_check(const evolve::Trajectory& traj, unsigned order, const Coefficients& a,
                                             double t_min, double t_max) {
  DynamicPoincareReport rep;
  const double growth = 2.0 * 0.5 * static_cast<double>(order + 2);
  double reference = -1.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    if (t < t_min || t > t_max) continue;
    if (reference < 0.0) reference = traj.l2mu_residual[k] * traj.l2mu_residual[k];
    rep.times.push_back(t);
    rep.scaled_slack.push_back(poincare_slack(traj, k, order, a).slack * std::exp(growth * t));
  }
  if (rep.times.size() < 2) throw std::invalid_argument("dynamic_poincare_check: window holds fewer than two samples");
  const double mid = 0.5 * (t_min + t_max);
  double first = 0.0, second = 0.0;
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    double& half = rep.times[k] <= mid ? first : second;
    half = std::max(half, rep.scaled_slack[k]);
    rep.sup_scaled = std::max(rep.sup_scaled, rep.scaled_slack[k]);
  }
  rep.bounded = std::isfinite(rep.sup_scaled) && second <= 10.0 * first + 1e-12 * reference;
  return rep;
}

}  // namespace axivort::asymptotics
