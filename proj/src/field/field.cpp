#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "axivort/field.hpp"

namespace axivort {

bool Field::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double rho_star(double r, double z) {
  return r * std::exp(-0.25 * (r * r + z * z)) / (16.0 * std::sqrt(std::numbers::pi));
}

Field sample(const Grid& grid, FieldKind kind, const std::function<double(double, double)>& g) {
  Field out(grid, kind);
  for (std::size_t i = 0; i < grid.rows(); ++i)
    for (std::size_t j = 0; j < grid.cols(); ++j) out(i, j) = g(grid.r(i), grid.z(j));
  return out;
}

void apply_dirichlet(Field& field) {
  const Grid& g = field.grid;
  for (std::size_t j = 0; j < g.cols(); ++j) {
    field(0, j) = 0.0;
    field(g.nr(), j) = 0.0;
  }
  for (std::size_t i = 0; i < g.rows(); ++i) {
    field(i, 0) = 0.0;
    field(i, g.nz()) = 0.0;
  }
}

double norm_lp_H(const Field& field, double p) {
  if (std::isnan(p) || p < 1.0) throw std::invalid_argument("norm_lp_H: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : field.values) m = std::max(m, std::abs(v));
    return m;
  }
  const Grid& g = field.grid;
  double sum = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      sum += g.trapezoid_weight(i, j) * std::pow(std::abs(field(i, j)), p);
  return std::pow(sum, 1.0 / p);
}

double norm_l2_R3(const Field& field) {
  const Grid& g = field.grid;
  double sum = 0.0;
  for (std::size_t i = 1; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      sum += g.trapezoid_weight(i, j) * g.r(i) * field(i, j) * field(i, j);
  return std::sqrt(2.0 * std::numbers::pi * sum);
}

namespace {

void require_relative(const Field& f, const char* who) {
  if (f.kind != FieldKind::relative_f)
    throw std::invalid_argument(std::string(who) + ": field must be of kind relative_f");
}

}  // namespace

double norm_l2_mu(const Field& f) {
  require_relative(f, "norm_l2_mu");
  const Grid& g = f.grid;
  double sum = 0.0;
  for (std::size_t i = 1; i < g.rows(); ++i) {
    const double r = g.r(i);
    for (std::size_t j = 0; j < g.cols(); ++j)
      sum += g.trapezoid_weight(i, j) * r * r * rho_star(r, g.z(j)) * f(i, j) * f(i, j);
  }
  return std::sqrt(sum);
}

double mean_mu(const Field& f) {
  require_relative(f, "mean_mu");
  const Grid& g = f.grid;
  double sum = 0.0;
  for (std::size_t i = 1; i < g.rows(); ++i) {
    const double r = g.r(i);
    for (std::size_t j = 0; j < g.cols(); ++j)
      sum += g.trapezoid_weight(i, j) * r * r * rho_star(r, g.z(j)) * f(i, j);
  }
  return sum;
}

Field h_to_f(const Field& h) {
  if (h.kind != FieldKind::vorticity_h)
    throw std::invalid_argument("h_to_f: field must be of kind vorticity_h");
  const Grid& g = h.grid;
  Field f(g, FieldKind::relative_f);
  for (std::size_t i = 1; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) f(i, j) = h(i, j) / rho_star(g.r(i), g.z(j));
  // f = a + b r^2 through rows 1 and 2.
  for (std::size_t j = 0; j < g.cols(); ++j) f(0, j) = (4.0 * f(1, j) - f(2, j)) / 3.0;
  return f;
}

Field f_to_h(const Field& f) {
  require_relative(f, "f_to_h");
  const Grid& g = f.grid;
  Field h(g, FieldKind::vorticity_h);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) h(i, j) = rho_star(g.r(i), g.z(j)) * f(i, j);
  return h;
}

double impulse(const Field& h) {
  const Grid& g = h.grid;
  double sum = 0.0;
  for (std::size_t i = 1; i < g.rows(); ++i) {
    const double r2 = g.r(i) * g.r(i);
    for (std::size_t j = 0; j < g.cols(); ++j) sum += g.trapezoid_weight(i, j) * r2 * h(i, j);
  }
  return sum;
}

double parity_defect(const Field& field, double parity) {
  const Grid& g = field.grid;
  double d = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      d = std::max(d, std::abs(field(i, j) - parity * field(i, g.mirror_z(j))));
  return d;
}

}  // namespace axivort
