#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "axivort/asymptotics.hpp"
#include "axivort/biot.hpp"
#include "axivort/verify.hpp"

namespace axivort::verify {

namespace {

using asymptotics::Coefficients;
using basis::EigenIndex;
using Clock = std::chrono::steady_clock;

constexpr double kPerturbation = 0.1;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

double sup(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

evolve::EvolveConfig base_config(const Scale& scale, double impulse, std::vector<evolve::ModeAmplitude> modes) {
  evolve::EvolveConfig cfg;
  cfg.grid = scale.grid;
  cfg.dt = scale.dt;
  cfg.t_end = scale.t_end;
  cfg.initial.preset = evolve::Preset::mode_perturbation;
  cfg.initial.impulse = impulse;
  cfg.initial.modes = std::move(modes);
  return cfg;
}

evolve::EvolveConfig scenario_config(const Scale& scale, const std::string& name) {
  if (name == "general") return base_config(scale, 1.0, {{{0, 1}, kPerturbation}});
  if (name == "zero_impulse") return base_config(scale, 0.0, {{{0, 1}, kPerturbation}});
  if (name == "zero_impulse_even") return base_config(scale, 0.0, {{{0, 2}, kPerturbation}});
  throw std::invalid_argument("unknown scenario run '" + name + "'");
}

// Psi = r^2 G, G = exp(-(r^2+z^2)/4), and the vorticity producing it.
double mms_gauss(double r, double z) { return std::exp(-0.25 * (r * r + z * z)); }
double mms_psi(double r, double z) { return r * r * mms_gauss(r, z); }
double mms_h(double r, double z) { return r * (2.5 - 0.25 * (r * r + z * z)) * mms_gauss(r, z); }
double mms_mr(double r, double z) { return 0.5 * r * z * mms_gauss(r, z); }
double mms_mz(double r, double z) { return (2.0 - 0.5 * r * r) * mms_gauss(r, z); }

struct MmsErrors {
  double psi = 0.0, m = 0.0, box = 0.0;
};

MmsErrors mms_errors(std::size_t n, double extent) {
  const Grid g(extent, extent, n, n);
  const Field psi = biot::solve_stream(sample(g, FieldKind::vorticity_h, mms_h));
  const biot::Velocity m = biot::velocity_from_stream(psi);
  MmsErrors e;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      const double r = g.r(i), z = g.z(j);
      e.psi = std::max(e.psi, std::abs(psi(i, j) - mms_psi(r, z)));
      e.m = std::max({e.m, std::abs(m.m_r(i, j) - mms_mr(r, z)), std::abs(m.m_z(i, j) - mms_mz(r, z))});
    }
  e.box = biot::anelastic_residual(m).box_max;
  return e;
}

// sup over the second half of the run against sup over the first half.
std::pair<double, double> halves(const std::vector<double>& t, const std::vector<double>& v) {
  const double mid = 0.5 * (t.front() + t.back());
  double a = 0.0, b = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    double& half = t[k] <= mid ? a : b;
    half = std::max(half, v[k]);
  }
  return {a, b};
}

CriterionResult basis_suite() {
  CriterionResult res;
  const auto t0 = Clock::now();
  const BasisResiduals b = basis_residuals(8, 18);
  const Grid g(12.0, 12.0, 256, 256);
  Field rho = sample(g, FieldKind::vorticity_h, rho_star);
  apply_dirichlet(rho);
  const double grid_impulse = impulse(rho);
  const double quad_impulse =
      basis::build_profile_quadrature(18).integrate([](double r, double) { return r * r; });
  res.seconds = seconds_since(t0);
  res.metrics = {{"orthonormality", b.orthonormality},
                 {"eigenrelation", b.eigenrelation},
                 {"weight_sum_error", b.weight_sum_error},
                 {"impulse_grid_error", std::abs(grid_impulse - 1.0)},
                 {"impulse_quadrature_error", std::abs(quad_impulse - 1.0)},
                 {"seconds", res.seconds}};
  res.passed = b.orthonormality <= 1e-10 && b.eigenrelation <= 1e-6 && b.weight_sum_error <= 1e-12 &&
               std::abs(grid_impulse - 1.0) <= 1e-8 && std::abs(quad_impulse - 1.0) <= 1e-8 && res.seconds <= 10.0;
  res.detail = "orthonormality " + fmt(b.orthonormality) + ", eigenrelation " + fmt(b.eigenrelation) +
               ", weights " + fmt(b.weight_sum_error) + ", I(rho*) grid " + fmt(grid_impulse - 1.0) + " quad " +
               fmt(quad_impulse - 1.0);
  return res;
}

CriterionResult linear_suite(Context& ctx) {
  CriterionResult res;
  constexpr double horizon = 6.0;
  double worst = 0.0;
  std::string worst_mode;
  for (unsigned level = 1; level <= 4; ++level)
    for (EigenIndex idx : basis::enumerate_level(level)) {
      const auto& traj = ctx.linear_mode(idx, horizon);
      const auto tr = asymptotics::coefficient_trace(traj, idx, asymptotics::Projection::continuum);
      double var = 0.0;
      for (std::size_t k = 0; k < tr.t.size(); ++k)
        var = std::max(var, std::abs(tr.compensated[k] / tr.compensated.front() - 1.0));
      res.metrics["variation_" + basis::to_string(idx)] = var;
      if (var >= worst) worst = var, worst_mode = basis::to_string(idx);
    }
  const auto& rho_run = ctx.linear_mode({0, 0}, horizon);
  double drift = 0.0;
  for (std::size_t i = 0; i < rho_run.checkpoints.front().values.size(); ++i)
    drift = std::max(drift, std::abs(rho_run.checkpoints.back().values[i] - rho_run.checkpoints.front().values[i]));
  drift /= sup(rho_run.checkpoints.front());
  res.metrics["rho_star_drift"] = drift;
  res.metrics["worst_variation"] = worst;
  res.passed = worst <= 0.01 && drift <= 1e-4;
  res.detail = "worst compensated variation " + fmt(worst) + " (mode " + worst_mode + "), rho* drift " + fmt(drift);
  return res;
}

CriterionResult conservation(Context& ctx) {
  CriterionResult res;
  const auto& traj = ctx.scenario("general");
  double drift = 0.0;
  for (double I : traj.impulse) drift = std::max(drift, std::abs(I - traj.impulse.front()));
  drift /= std::abs(traj.impulse.front());
  res.metrics["impulse_drift"] = drift;
  res.passed = drift <= 1e-5;
  res.detail = "relative impulse drift " + fmt(drift);
  return res;
}

CriterionResult l2_decay(Context& ctx) {
  CriterionResult res;
  const auto& traj = ctx.scenario("general");
  const auto fit = asymptotics::fit_rate(traj.times, traj.l2mu_residual, false, 2.0, 9.0);
  res.metrics = {{"rate", fit.lambda_hat}, {"r_squared", fit.r_squared}};
  res.passed = fit.lambda_hat >= 0.45 && fit.lambda_hat <= 0.55;
  res.detail = "rate of ||f - <f>|| on [2, 9]: " + fmt(fit.lambda_hat);
  return res;
}

void add_fit(CriterionResult& res, const asymptotics::RateFit& fit) {
  res.metrics["rate"] = fit.lambda_hat;
  res.metrics["log_factor"] = fit.log_factor ? 1.0 : 0.0;
  res.metrics["log_power"] = fit.log_power;
  res.metrics["r_squared"] = fit.r_squared;
}

std::string fit_text(const asymptotics::RateFit& fit) {
  return "residual rate " + fmt(fit.lambda_hat) + (fit.log_factor ? " (t^" + fmt(fit.log_power) + " factor)" : "");
}

CriterionResult higher_order(Context& ctx) {
  CriterionResult res;
  const auto rep = asymptotics::expansion_report(ctx.scenario("general"), 0);
  add_fit(res, rep.residual_fit);
  res.metrics["alpha"] = rep.coefficients.at({0, 1});
  res.passed = rep.residual_fit.lambda_hat >= 0.9 && rep.residual_fit.lambda_hat <= 1.1;
  res.detail = fit_text(rep.residual_fit) + ", alpha " + fmt(rep.coefficients.at({0, 1}));
  return res;
}

CriterionResult zero_impulse(Context& ctx) {
  CriterionResult res;
  const auto rep = asymptotics::corollary_report(ctx.scenario("zero_impulse"), asymptotics::Scenario::zero_impulse);
  const auto& fit = rep.expansion.residual_fit;
  add_fit(res, fit);
  res.metrics["alpha"] = rep.alpha;
  res.metrics["beta"] = rep.beta;
  res.metrics["gamma"] = rep.gamma;
  res.passed = fit.lambda_hat >= 1.35 && fit.lambda_hat <= 1.65;
  res.detail = fit_text(fit) + ", alpha " + fmt(rep.alpha) + " beta " + fmt(rep.beta) + " gamma " + fmt(rep.gamma);
  return res;
}

CriterionResult even_data(Context& ctx) {
  CriterionResult res;
  const auto rep =
      asymptotics::corollary_report(ctx.scenario("zero_impulse_even"), asymptotics::Scenario::zero_impulse_even);
  const auto& fit = rep.expansion.residual_fit;
  add_fit(res, fit);
  double odd = 0.0;
  for (const auto& [idx, a] : rep.odd) {
    res.metrics["a_" + basis::to_string(idx)] = a;
    odd = std::max(odd, std::abs(a));
  }
  const double bound = 1e-8 * kPerturbation;
  res.metrics["max_odd"] = odd;
  res.passed = odd <= bound && fit.lambda_hat >= 1.8 && fit.lambda_hat <= 2.2;
  res.detail = "max odd coefficient " + fmt(odd) + " (bound " + fmt(bound) + "), " + fit_text(fit);
  return res;
}

CriterionResult elliptic() {
  CriterionResult res;
  const MmsErrors c = mms_errors(128, 12.0), f = mms_errors(256, 12.0);
  const double p_psi = std::log2(c.psi / f.psi), p_m = std::log2(c.m / f.m), p_div = std::log2(c.box / f.box);
  res.metrics = {{"order_psi", p_psi}, {"order_velocity", p_m}, {"order_anelastic", p_div},
                 {"error_psi_256", f.psi}, {"anelastic_256", f.box}};
  res.passed = p_psi >= 1.8 && p_m >= 1.8 && p_div >= 1.8;
  res.detail = "orders psi " + fmt(p_psi) + ", velocity " + fmt(p_m) + ", anelastic residual " + fmt(p_div);
  return res;
}

CriterionResult inequalities(Context& ctx) {
  CriterionResult res;
  bool ok = true;
  std::ostringstream detail;

  // Sharp Poincare for psi_{1,1} by quadrature.
  const basis::Quadrature quad = basis::build_quadrature(18);
  const double norm2 = quad.integrate([](double r, double z) {
    const double v = basis::eigenfunction({0, 1}, r, z);
    return v * v;
  });
  const double grad2 = quad.integrate([](double r, double z) {
    const auto d = basis::eigenfunction_derivatives({0, 1}, r, z);
    return d.d_r * d.d_r + d.d_z * d.d_z;
  });
  const double poincare = std::abs(0.5 * norm2 - grad2);
  res.metrics["poincare_defect"] = poincare;
  ok = ok && poincare <= 1e-10;
  detail << "Poincare defect " << fmt(poincare);

  // Hardy ratio over random polynomials, refined quadrature.
  double hardy = 0.0, hardy_fine = 0.0;
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  auto uniform = [&state] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  for (int draw = 0; draw < 100; ++draw) {
    std::vector<std::array<double, 3>> terms;
    for (int a = 0; a <= 6; ++a)
      for (int b = 0; a + b <= 6; ++b) terms.push_back({uniform(), double(a), double(b)});
    asymptotics::Sampler s;
    s.value = [terms](double r, double z) {
      double v = 0.0;
      for (const auto& [c, a, b] : terms) v += c * std::pow(r, a) * std::pow(z, b);
      return v;
    };
    s.d_r = [terms](double r, double z) {
      double v = 0.0;
      for (const auto& [c, a, b] : terms)
        if (a >= 1) v += c * a * std::pow(r, a - 1) * std::pow(z, b);
      return v;
    };
    s.d_z = [terms](double r, double z) {
      double v = 0.0;
      for (const auto& [c, a, b] : terms)
        if (b >= 1) v += c * b * std::pow(r, a) * std::pow(z, b - 1);
      return v;
    };
    hardy = std::max(hardy, asymptotics::hardy_check(s, 24).ratio);
    hardy_fine = std::max(hardy_fine, asymptotics::hardy_check(s, 30).ratio);
  }
  const double hardy_change = std::abs(hardy_fine / hardy - 1.0);
  res.metrics["hardy_ratio"] = hardy;
  res.metrics["hardy_refinement_change"] = hardy_change;
  ok = ok && std::isfinite(hardy) && hardy_change <= 0.05;
  detail << "; Hardy ratio " << fmt(hardy) << " (refinement change " << fmt(hardy_change) << ")";

  // Dynamic Poincare on the zero-impulse run for n = 0 and n = 1.
  const auto& traj = ctx.scenario("zero_impulse");
  for (unsigned n : {0u, 1u}) {
    Coefficients a;
    for (EigenIndex idx : basis::enumerate_level(n))
      a[idx] = asymptotics::extract_limit(asymptotics::coefficient_trace(traj, idx)).value;
    const auto dp = asymptotics::dynamic_poincare_check(traj, n, a, 1.0, 8.0);
    res.metrics["dynamic_poincare_sup_n" + std::to_string(n)] = dp.sup_scaled;
    ok = ok && dp.bounded;
    detail << "; dynamic Poincare n=" << n << " sup " << fmt(dp.sup_scaled) << (dp.bounded ? " bounded" : " unbounded");
  }

  // Gronwall suprema over the parameter matrix.
  double gron = 0.0;
  for (double lambda : {0.5, 1.0})
    for (double mu : {1.0, 1.5})
      for (double C : {0.5, 1.0, 2.0}) {
        if (lambda < mu) gron = std::max(gron, asymptotics::gronwall_oracle(lambda, mu, C, 1.0, asymptotics::GronwallVariant::b));
        gron = std::max(gron, asymptotics::gronwall_oracle(lambda, mu, C, 1.0, asymptotics::GronwallVariant::c));
      }
  res.metrics["gronwall_sup"] = gron;
  ok = ok && std::isfinite(gron);
  detail << "; Gronwall sup " << fmt(gron);

  res.passed = ok;
  res.detail = detail.str();
  return res;
}

CriterionResult velocity_bound(Context& ctx) {
  CriterionResult res;
  bool ok = true;
  std::ostringstream detail;
  for (const char* name : {"general", "zero_impulse", "zero_impulse_even"}) {
    const auto& traj = ctx.scenario(name);
    const auto [first, second] = halves(traj.times, traj.m_inf);
    const bool bounded = std::isfinite(first) && std::isfinite(second) && second <= 2.0 * first;
    res.metrics[std::string("m_sup_") + name] = std::max(first, second);
    ok = ok && bounded;
    detail << name << " |m| sup " << fmt(std::max(first, second)) << (bounded ? "" : " (growing)") << "; ";
  }
  double worst = 0.0;
  for (const char* name : {"general", "zero_impulse", "zero_impulse_even"}) {
    auto ratio = [&](std::size_t n) {
      Scale s = ctx.scale();
      s.grid = Grid(s.grid.r_max(), s.grid.z_max(), n, n);
      const Field h = evolve::make_initial(s.grid, scenario_config(s, name).initial);
      return biot::velocity_bound_check(h, biot::velocity_from_stream(biot::solve_stream(h))).ratio;
    };
    const double change = std::abs(ratio(256) / ratio(128) - 1.0);
    res.metrics[std::string("ratio_change_") + name] = change;
    worst = std::max(worst, change);
  }
  ok = ok && worst <= 0.05;
  detail << "interpolation ratio change 128->256 " << fmt(worst);
  res.passed = ok;
  res.detail = detail.str();
  return res;
}

const char* title_of(int id) {
  switch (id) {
    case 1: return "basis";
    case 2: return "linear semigroup";
    case 3: return "impulse conservation";
    case 4: return "L2 decay";
    case 5: return "higher-order expansion";
    case 6: return "zero-impulse corollary";
    case 7: return "even-data corollary";
    case 8: return "elliptic solver";
    case 9: return "inequalities";
    case 10: return "velocity bound";
  }
  return "unknown";
}

}  // namespace

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::basis: return "basis";
    case Suite::linear: return "linear";
    case Suite::nonlinear: return "nonlinear";
    case Suite::corollaries: return "corollaries";
    case Suite::inequalities: return "inequalities";
    case Suite::all: return "all";
  }
  return "unknown";
}

Suite parse_suite(std::string_view text) {
  for (Suite s : {Suite::basis, Suite::linear, Suite::nonlinear, Suite::corollaries, Suite::inequalities, Suite::all})
    if (to_string(s) == text) return s;
  throw std::invalid_argument("unknown suite '" + std::string(text) + "'");
}

std::vector<int> criteria_of(Suite suite) {
  switch (suite) {
    case Suite::basis: return {1};
    case Suite::linear: return {2};
    case Suite::nonlinear: return {3, 4, 8, 10};
    case Suite::corollaries: return {5, 6, 7};
    case Suite::inequalities: return {9};
    case Suite::all: return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  }
  return {};
}

BasisResiduals basis_residuals(unsigned max_level, std::size_t quad_nodes) {
  const basis::Quadrature quad = basis::build_quadrature(quad_nodes);
  const auto modes = basis::modes_up_to_level(max_level);
  BasisResiduals out;
  double wsum = 0.0;
  for (double w : quad.weights) wsum += w;
  out.weight_sum_error = std::abs(wsum - 1.0);

  // Tabulate every mode once on the nodes.
  const std::size_t nr = quad.size_r(), nz = quad.size_z();
  std::vector<std::vector<double>> table(modes.size(), std::vector<double>(nr * nz));
  for (std::size_t m = 0; m < modes.size(); ++m)
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nz; ++j) {
        const double r = quad.nodes_r[i], z = quad.nodes_z[j];
        const double v = basis::eigenfunction(modes[m], r, z);
        table[m][i * nz + j] = v;
        const double lv = basis::eigenvalue(modes[m]).value() * v;
        const double scale = std::max(1.0, std::abs(lv));
        out.eigenrelation = std::max(out.eigenrelation, std::abs(basis::apply_operator(modes[m], r, z) - lv) / scale);
      }
  for (std::size_t a = 0; a < modes.size(); ++a)
    for (std::size_t b = a; b < modes.size(); ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < quad.weights.size(); ++k) s += quad.weights[k] * table[a][k] * table[b][k];
      out.orthonormality = std::max(out.orthonormality, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  return out;
}

Context::Context(Scale scale, std::ostream* log) : scale_(scale), log_(log) {}

const evolve::Trajectory& Context::scenario(const std::string& name) {
  if (auto it = runs_.find(name); it != runs_.end()) return it->second;
  const auto t0 = Clock::now();
  if (log_) *log_ << "  running " << name << " (" << scale_.grid.nr() << "x" << scale_.grid.nz() << ", dt "
                  << scale_.dt << ", t_end " << scale_.t_end << ")" << std::endl;
  auto traj = evolve::run(scenario_config(scale_, name));
  if (log_) *log_ << "  " << name << " done in " << fmt(seconds_since(t0)) << " s" << std::endl;
  return runs_.emplace(name, std::move(traj)).first->second;
}

const evolve::Trajectory& Context::linear_mode(EigenIndex idx, double t_end) {
  const std::string key = "linear" + basis::to_string(idx);
  if (auto it = runs_.find(key); it != runs_.end()) return it->second;
  evolve::EvolveConfig cfg = idx == EigenIndex{0, 0} ? base_config(scale_, 1.0, {}) : base_config(scale_, 0.0, {{idx, 1.0}});
  cfg.nonlinear_on = false;
  cfg.t_end = t_end;
  cfg.trace_level = 4;
  if (log_) *log_ << "  linear run " << basis::to_string(idx) << std::endl;
  return runs_.emplace(key, evolve::run(cfg)).first->second;
}

CriterionResult run_criterion(int id, Context& ctx) {
  const auto t0 = Clock::now();
  CriterionResult res;
  try {
    switch (id) {
      case 1: res = basis_suite(); break;
      case 2: res = linear_suite(ctx); break;
      case 3: res = conservation(ctx); break;
      case 4: res = l2_decay(ctx); break;
      case 5: res = higher_order(ctx); break;
      case 6: res = zero_impulse(ctx); break;
      case 7: res = even_data(ctx); break;
      case 8: res = elliptic(); break;
      case 9: res = inequalities(ctx); break;
      case 10: res = velocity_bound(ctx); break;
      default: throw std::invalid_argument("unknown criterion " + std::to_string(id));
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    res.passed = false;
    res.detail = std::string("error: ") + e.what();
  }
  res.id = id;
  res.title = title_of(id);
  res.seconds = seconds_since(t0);
  return res;
}

bool SuiteReport::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
}

SuiteReport run_suite(Suite suite, Context& ctx) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.suite = suite;
  for (int id : criteria_of(suite)) {
    if (ctx.log()) *ctx.log() << "criterion " << id << " (" << title_of(id) << ")" << std::endl;
    rep.criteria.push_back(run_criterion(id, ctx));
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

}  // namespace axivort::verify
