#pragma once

// Scalar fields on the truncated meridional half-plane [0, R] x [-Z, Z] in
// self-similar coordinates, the attractor profile rho_*, and the weighted
// integrals built on the tensor trapezoid rule.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace axivort {

/// Uniform node-centred grid: r_i = i * R / nr (i = 0..nr),
/// z_j = -Z + j * 2Z / nz (j = 0..nz). The axis row i = 0 is included and the
/// z-nodes are closed under negation.
class Grid {
 public:
  Grid() = default;
  Grid(double r_max, double z_max, std::size_t nr, std::size_t nz);

  double r_max() const { return r_max_; }
  double z_max() const { return z_max_; }
  std::size_t nr() const { return nr_; }
  std::size_t nz() const { return nz_; }
  std::size_t rows() const { return nr_ + 1; }
  std::size_t cols() const { return nz_ + 1; }
  std::size_t size() const { return rows() * cols(); }
  double dr() const { return r_max_ / static_cast<double>(nr_); }
  double dz() const { return 2.0 * z_max_ / static_cast<double>(nz_); }
  double r(std::size_t i) const { return r_max_ * static_cast<double>(i) / static_cast<double>(nr_); }
  double z(std::size_t j) const {
    return z_max_ * (2.0 * static_cast<double>(j) - static_cast<double>(nz_)) / static_cast<double>(nz_);
  }
  /// Tensor trapezoid weight of node (i, j) for dr dz.
  double trapezoid_weight(std::size_t i, std::size_t j) const;
  /// Node index mirrored in z.
  std::size_t mirror_z(std::size_t j) const { return nz_ - j; }

  bool operator==(const Grid&) const = default;

 private:
  double r_max_ = 12.0;
  double z_max_ = 12.0;
  std::size_t nr_ = 8;
  std::size_t nz_ = 8;
};

enum class FieldKind : std::uint32_t {
  vorticity_h = 0,
  relative_f = 1,
  stream = 2,
  velocity_r = 3,
  velocity_z = 4,
};

std::string_view to_string(FieldKind kind);

/// Node values over a Grid, row-major in (i, j).
struct Field {
  Grid grid;
  FieldKind kind = FieldKind::vorticity_h;
  std::vector<double> values;

  Field() = default;
  Field(const Grid& g, FieldKind k) : grid(g), kind(k), values(g.size(), 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return values[i * grid.cols() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * grid.cols() + j]; }
  std::span<double> row(std::size_t i) { return {values.data() + i * grid.cols(), grid.cols()}; }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * grid.cols(), grid.cols()};
  }

  bool all_finite() const;
};

/// rho_*(r, z) = (16 sqrt(pi))^-1 r exp(-(r^2 + z^2)/4).
double rho_star(double r, double z);

Field sample(const Grid& grid, FieldKind kind, const std::function<double(double, double)>& g);

/// Sets the axis row and the outer boundary to zero.
void apply_dirichlet(Field& field);

/// Discrete L^p(dr dz) norm with trapezoid weights; p = infinity gives the
/// maximum modulus. Throws std::invalid_argument for p < 1.
double norm_lp_H(const Field& field, double p);

/// L^2 norm for the three-dimensional measure 2 pi r dr dz.
double norm_l2_R3(const Field& field);

/// sqrt(sum w f^2 r^2 rho_*). Requires kind == relative_f.
double norm_l2_mu(const Field& f);

/// Mean of a relative_f field against mu (grid integration).
double mean_mu(const Field& f);

/// f = h / rho_* at nodes with r > 0; the axis row is extrapolated from the
/// first two interior rows assuming f = a + b r^2 near the axis.
Field h_to_f(const Field& h);

/// h = rho_* f.
Field f_to_h(const Field& f);

/// Trapezoid approximation of int r^2 h dr dz.
double impulse(const Field& h);

/// Largest |v(i, j) - parity * v(i, mirror(j))| over the grid.
double parity_defect(const Field& field, double parity);

// Binary checkpoint: "AXIV", u32 version, f64 R, f64 Z, u32 nr, u32 nz,
// f64 time, u32 kind, then (nr+1)(nz+1) little-endian f64 in row-major order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Field field;
  double time = 0.0;
};

void write_checkpoint(std::ostream& out, const Field& field, double time);
void write_checkpoint(const std::string& path, const Field& field, double time);
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::string& path);

/// "r,z,value" rows with 17 significant digits.
void write_field_csv(std::ostream& out, const Field& field);

}  // namespace axivort
