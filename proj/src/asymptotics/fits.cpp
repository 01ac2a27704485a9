#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "axivort/asymptotics.hpp"

namespace axivort::asymptotics {

namespace {

struct Ls {
  Eigen::VectorXd beta;
  double sse = 0.0;
};

Ls least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  Ls out;
  out.beta = A.colPivHouseholderQr().solve(y);
  out.sse = (A * out.beta - y).squaredNorm();
  return out;
}

}  // namespace

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, bool allow_log_factor, double t_min,
                 double t_max) {
  if (t.size() != y.size()) throw std::invalid_argument("fit_rate: size mismatch");
  std::vector<double> ts, ly;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_min || t[k] > t_max) continue;
    if (!(y[k] > 0.0)) throw std::invalid_argument("fit_rate: non-positive value in the fit window");
    ts.push_back(t[k]);
    ly.push_back(std::log(y[k]));
  }
  const auto n = static_cast<Eigen::Index>(ts.size());
  if (n < 4) throw std::invalid_argument("fit_rate: fewer than four points in the window");
  const bool log_ok = allow_log_factor && ts.front() > 0.0;

  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(ly.data(), n);
  Eigen::MatrixXd A(n, 2), B(n, 3);
  for (Eigen::Index k = 0; k < n; ++k) {
    A(k, 0) = 1.0;
    A(k, 1) = ts[k];
    B(k, 0) = 1.0;
    B(k, 1) = ts[k];
    B(k, 2) = log_ok ? std::log(ts[k]) : 0.0;
  }
  const double mean = rhs.mean();
  const double sst = (rhs.array() - mean).square().sum();

  RateFit fit;
  fit.t_min = ts.front();
  fit.t_max = ts.back();
  const Ls plain = least_squares(A, rhs);
  fit.lambda_hat = -plain.beta(1);
  double sse = plain.sse;
  if (log_ok && n > 4) {
    const Ls withlog = least_squares(B, rhs);
    const double var_plain = plain.sse / static_cast<double>(n - 2);
    const double var_log = withlog.sse / static_cast<double>(n - 3);
    // Ties within round-off keep the simpler model.
    if (var_log < var_plain && plain.sse - withlog.sse > 1e-12 * (sst + 1e-300)) {
      fit.log_factor = true;
      fit.lambda_hat = -withlog.beta(1);
      fit.log_power = withlog.beta(2);
      sse = withlog.sse;
    }
  }
  fit.r_squared = sst > 0.0 ? std::clamp(1.0 - sse / sst, 0.0, 1.0) : 1.0;
  return fit;
}

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, bool allow_log_factor) {
  if (t.empty()) throw std::invalid_argument("fit_rate: empty series");
  return fit_rate(t, y, allow_log_factor, t.front(), t.back());
}

}  // namespace axivort::asymptotics
