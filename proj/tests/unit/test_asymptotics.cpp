#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "axivort/asymptotics.hpp"
#include "doctest.h"

using namespace axivort;
using namespace axivort::asymptotics;
using evolve::EvolveConfig;
using evolve::ModeAmplitude;
using evolve::Preset;

namespace {

std::vector<double> grid_times(double t0, double t1, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n - 1);
  return t;
}

CoefficientTrace synthetic(const std::vector<double>& t, const std::function<double(double)>& g) {
  CoefficientTrace tr;
  tr.t = t;
  for (double s : t) {
    tr.raw.push_back(g(s));
    tr.compensated.push_back(g(s));
  }
  return tr;
}

evolve::Trajectory linear_run(std::size_t n, double impulse, std::vector<ModeAmplitude> modes, double t_end) {
  EvolveConfig cfg;
  cfg.grid = Grid(12.0, 12.0, n, n);
  cfg.dt = 0.01;
  cfg.t_end = t_end;
  cfg.nonlinear_on = false;
  cfg.trace_level = 4;
  cfg.initial.preset = Preset::mode_perturbation;
  cfg.initial.impulse = impulse;
  cfg.initial.modes = std::move(modes);
  return evolve::run(cfg);
}

// Polynomial sum c_{ab} r^a z^b with exact derivatives.
struct Poly {
  std::vector<std::array<double, 3>> terms;  // {coefficient, a, b}

  Sampler sampler() const {
    auto eval = [terms = terms](int dr, int dz) {
      return [terms, dr, dz](double r, double z) {
        double s = 0.0;
        for (const auto& [c, a, b] : terms) {
          double v = c;
          if (dr) v *= a, v *= (a >= 1 ? std::pow(r, a - 1) : 0.0);
          else v *= std::pow(r, a);
          if (dz) v *= b, v *= (b >= 1 ? std::pow(z, b - 1) : 0.0);
          else v *= std::pow(z, b);
          s += v;
        }
        return s;
      };
    };
    return {eval(0, 0), eval(1, 0), eval(0, 1)};
  }
};

Poly random_poly(std::mt19937& rng, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Poly p;
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b) p.terms.push_back({u(rng), double(a), double(b)});
  return p;
}

}  // namespace

TEST_CASE("fit_rate recovers exponential rates") {
  const auto t = grid_times(0.0, 10.0, 101);
  std::vector<double> y;
  for (double s : t) y.push_back(3.0 * std::exp(-0.5 * s));
  RateFit f = fit_rate(t, y, true);
  CHECK(f.lambda_hat == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_FALSE(f.log_factor);
  CHECK(f.r_squared == doctest::Approx(1.0));

  const auto t2 = grid_times(2.0, 10.0, 81);
  y.clear();
  for (double s : t2) y.push_back(s * std::exp(-s));
  f = fit_rate(t2, y, true);
  CHECK(f.log_factor);
  CHECK(std::abs(f.lambda_hat - 1.0) <= 0.02);
  CHECK(f.log_power == doctest::Approx(1.0).epsilon(1e-8));

  y.assign(t.size(), 2.0);
  CHECK(std::abs(fit_rate(t, y, false).lambda_hat) <= 1e-12);

  CHECK_THROWS_AS(fit_rate({0, 1, 2}, {1, 1, 1}, false), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate(t, std::vector<double>(t.size(), -1.0), false), std::invalid_argument);
  f = fit_rate(t, std::vector<double>(t.size(), 1.0), false, 4.0, 6.0);
  CHECK(f.t_min == doctest::Approx(4.0));
  CHECK(f.t_max == doctest::Approx(6.0));
}

TEST_CASE("extract_limit") {
  const auto t = grid_times(0.0, 10.0, 201);
  Limit lim = extract_limit(synthetic(t, [](double) { return 0.7; }));
  CHECK(lim.value == 0.7);
  CHECK(lim.oscillation == 0.0);
  CHECK(lim.converged);

  lim = extract_limit(synthetic(t, [](double s) { return -1.3 + 0.5 * std::exp(-s); }), 6.0);
  CHECK(std::abs(lim.value + 1.3) <= 1e-3);
  CHECK(lim.converged);

  lim = extract_limit(synthetic(t, [](double s) { return std::exp(s); }), 6.0);
  CHECK_FALSE(lim.converged);

  lim = extract_limit_with_tail(synthetic(t, [](double s) { return 0.2 + 0.3 * std::exp(-0.5 * s); }), 8.0, 0.5);
  CHECK(lim.value == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(lim.oscillation <= 1e-12);

  CHECK_THROWS_AS(extract_limit(synthetic(t, [](double) { return 1.0; }), 9.9), std::invalid_argument);
}

TEST_CASE("coefficient traces of linear runs") {
  const auto traj = linear_run(48, 1.0, {{{1, 0}, 0.3}, {{0, 2}, 0.1}}, 2.0);
  // Discrete projections are compensated with the scheme's own rates.
  for (EigenIndex idx : {EigenIndex{1, 0}, EigenIndex{0, 2}, EigenIndex{0, 0}}) {
    const auto tr = coefficient_trace(traj, idx);
    for (double c : tr.compensated) CHECK(c == doctest::Approx(tr.compensated.front()).epsilon(1e-10));
    for (std::size_t k = 0; k < tr.t.size(); ++k)
      CHECK(tr.compensated[k] == doctest::Approx(tr.raw[k] * std::exp(tr.lambda * tr.t[k])).epsilon(1e-15));
  }
  // Continuum projections: the mean is the impulse and even data has no odd part.
  const auto mean = coefficient_trace(traj, {0, 0}, Projection::continuum);
  for (std::size_t k = 0; k < mean.t.size(); ++k) CHECK(mean.raw[k] == doctest::Approx(traj.impulse[k]).epsilon(1e-14));
  for (double c : coefficient_trace(traj, {0, 1}, Projection::continuum).raw) CHECK(std::abs(c) <= 1e-14);
  const auto psi22 = coefficient_trace(traj, {1, 0}, Projection::continuum);
  CHECK(psi22.compensated.back() == doctest::Approx(psi22.compensated.front()).epsilon(2e-3));
  CHECK(psi22.lambda == 1.0);
  CHECK_THROWS_AS(coefficient_trace(traj, {4, 0}), std::invalid_argument);
}

TEST_CASE("residual of a linear run decays with the first unsubtracted mode") {
  const auto traj = linear_run(64, 1.0, {{{0, 1}, 0.1}, {{0, 2}, 0.05}}, 3.0);
  const ExpansionReport rep = expansion_report(traj, 0, {0.5, 3.0});
  CHECK(rep.coefficients.at({0, 1}) == doctest::Approx(0.1).epsilon(1e-3));
  CHECK(rep.converged);
  const double lam = traj.discrete_rates[traj.mode_index({0, 2})];
  for (std::size_t k = 0; k < rep.times.size(); ++k)
    CHECK(rep.residual[k] == doctest::Approx(0.05 * std::exp(-lam * rep.times[k])).epsilon(5e-3));
  CHECK(rep.residual_fit.lambda_hat == doctest::Approx(1.0).epsilon(5e-3));

  // Subtracting every traced coefficient leaves nothing.
  Coefficients all;
  for (std::size_t m = 0; m < traj.modes.size(); ++m)
    if (traj.modes[m].level() <= 1) all[traj.modes[m]] = traj.dcoef[0][m];
  CHECK(residual_norm(traj, 0, 0, all) == doctest::Approx(rep.residual[0]).epsilon(1e-3));
  CHECK(truncation_norm(traj, traj.times.size() - 1) <= 1e-3 * traj.l2mu_residual.back());
}

TEST_CASE("Poincare checks in coefficient space") {
  const PoincareCheck sharp = poincare_check({{{0, 0}, 1.0}, {{0, 1}, 1.0}});
  CHECK(sharp.lhs == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sharp.rhs == doctest::Approx(0.5).epsilon(1e-15));

  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  for (int draw = 0; draw < 200; ++draw) {
    Coefficients f;
    for (EigenIndex idx : basis::modes_up_to_level(8)) f[idx] = nd(rng);
    const PoincareCheck p = poincare_check(f);
    CHECK(p.lhs <= p.rhs);
  }

  for (unsigned n = 0; n < 4; ++n) {
    const EigenIndex next = basis::enumerate_level(n + 1).front();
    const PoincareSlack s = poincare_slack({{next, 1.0}}, n, {});
    CHECK(s.lhs == doctest::Approx(s.rhs_gradient));
    CHECK(s.slack == 0.0);
  }
  const PoincareSlack psi11 = poincare_slack({{{0, 1}, 1.0}}, 0, {{{0, 0}, 0.0}});
  CHECK(psi11.lhs == doctest::Approx(0.5));
  CHECK(psi11.rhs_gradient == doctest::Approx(0.5));
  CHECK(psi11.slack == 0.0);
  // A level-n component left over makes the slack positive.
  CHECK(poincare_slack({{{0, 1}, 1.0}, {{0, 0}, 0.1}}, 0, {}).slack == doctest::Approx(0.5 * 0.01));
}

TEST_CASE("Hardy inequality") {
  const Sampler one{[](double, double) { return 1.0; }, [](double, double) { return 0.0; },
                    [](double, double) { return 0.0; }};
  HardyReport h = hardy_check(one);
  // int rho_* dr dz = (16 sqrt(pi))^-1 * 2 * 2 sqrt(pi) = 1/4.
  CHECK(h.lhs == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(h.rhs == doctest::Approx(1.0).epsilon(1e-13));

  const Sampler r{[](double r, double) { return r; }, [](double, double) { return 1.0; },
                  [](double, double) { return 0.0; }};
  h = hardy_check(r);
  // int r^2 rho_* = 1, E_mu[r^2] = 8.
  CHECK(h.lhs == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(h.ratio == doctest::Approx(1.0 / (1.0 + std::sqrt(8.0))).epsilon(1e-10));

  std::mt19937 rng(11);
  double worst = 0.0, worst_refined = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const Sampler p = random_poly(rng, 6).sampler();
    worst = std::max(worst, hardy_check(p, 24).ratio);
    worst_refined = std::max(worst_refined, hardy_check(p, 30).ratio);
  }
  MESSAGE("max Hardy ratio " << worst);
  CHECK(std::isfinite(worst));
  CHECK(worst_refined == doctest::Approx(worst).epsilon(0.05));
}

TEST_CASE("Gronwall oracle") {
  CHECK(gronwall_oracle(0.5, 1.0, 0.0, 2.0, GronwallVariant::b) == doctest::Approx(2.0).epsilon(1e-12));
  const double b = gronwall_oracle(0.5, 1.0, 1.0, 1.0, GronwallVariant::b);
  CHECK(std::isfinite(b));
  CHECK(b <= 10.0);
  CHECK(std::isfinite(gronwall_oracle(1.0, 0.0, 1.0, 0.0, GronwallVariant::c)));
  CHECK_THROWS_AS(gronwall_oracle(1.0, 1.0, 1.0, 1.0, GronwallVariant::b), std::invalid_argument);
  CHECK_THROWS_AS(gronwall_oracle(-1.0, 1.0, 1.0, 1.0, GronwallVariant::c), std::invalid_argument);

  // Integrating-factor solution
  //   F(t) = e^{-lambda t + C(1 - e^{-t})} [F0 + C int_0^t e^{(lambda - kappa)s - C(1 - e^{-s})} ds]
  // evaluated with composite Simpson on a fine grid.
  auto closed = [](double lambda, double kappa, double C, double F0, bool c_variant) {
    const int n = 60000;
    const double h = 30.0 / n;
    auto integrand = [&](double s) { return std::exp((lambda - kappa) * s - C * (1.0 - std::exp(-s))); };
    double sup = F0, acc = 0.0;
    for (int k = 0; k < n; k += 2) {
      const double s = k * h;
      acc += h / 3.0 * (integrand(s) + 4.0 * integrand(s + h) + integrand(s + 2 * h));
      const double t = s + 2 * h;
      const double scaled = std::exp(C * (1.0 - std::exp(-t))) * (F0 + C * acc);
      sup = std::max(sup, c_variant ? scaled / (1.0 + t) : scaled);
    }
    return sup;
  };
  for (double lambda : {0.5, 1.0})
    for (double mu : {1.5})
      for (double C : {0.5, 1.0, 2.0}) {
        CHECK(gronwall_oracle(lambda, mu, C, 1.0, GronwallVariant::b) ==
              doctest::Approx(closed(lambda, mu, C, 1.0, false)).epsilon(1e-6));
        CHECK(gronwall_oracle(lambda, mu, C, 1.0, GronwallVariant::c) ==
              doctest::Approx(closed(lambda, lambda, C, 1.0, true)).epsilon(1e-6));
      }
}

TEST_CASE("integration by parts identity holds to second order") {
  std::mt19937 rng(3);
  const Poly g = random_poly(rng, 3), f = random_poly(rng, 3);
  auto defect = [&](std::size_t n) {
    const Grid grid(12.0, 12.0, n, n);
    Field h = sample(grid, FieldKind::vorticity_h, [](double r, double z) {
      return rho_star(r, z) * (1.0 + 0.4 * basis::eigenfunction({0, 1}, r, z) + 0.3 * basis::eigenfunction({1, 0}, r, z));
    });
    apply_dirichlet(h);
    const auto m = biot::velocity_from_stream(biot::solve_stream(h));
    const IbpIdentity id = ibp_identity(m, g.sampler(), f.sampler());
    return std::abs(id.lhs - id.rhs) / std::max(std::abs(id.lhs), 1e-300);
  };
  const double coarse = defect(64), fine = defect(128);
  MESSAGE("IBP relative defect " << coarse << " -> " << fine);
  CHECK(fine <= 1e-2);
  CHECK(std::log2(coarse / fine) >= 1.8);
}

TEST_CASE("corollary report checks hypotheses") {
  CHECK(parse_scenario("zero_impulse_even") == Scenario::zero_impulse_even);
  CHECK_THROWS_AS(parse_scenario("odd"), std::invalid_argument);
  CHECK(to_string(Scenario::general) == "general");

  const auto with_mass = linear_run(32, 1.0, {{{0, 1}, 0.1}}, 3.0);
  CHECK_THROWS_AS(corollary_report(with_mass, Scenario::zero_impulse), HypothesisViolation);
  const auto odd = linear_run(32, 0.0, {{{0, 1}, 0.1}}, 3.0);
  CHECK_THROWS_AS(corollary_report(odd, Scenario::zero_impulse_even), HypothesisViolation);

  const auto rep = corollary_report(with_mass, Scenario::general, {0.5, 3.0});
  CHECK(rep.expansion.order == 0);
  CHECK(rep.alpha == doctest::Approx(0.1).epsilon(5e-3));
  CHECK(rep.physical_exponent == doctest::Approx(-(rep.expansion.residual_fit.lambda_hat + 1.25)));
}
