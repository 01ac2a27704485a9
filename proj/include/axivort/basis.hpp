#pragma once

// Laguerre-Hermite eigenbasis of the self-adjoint operator
//   L f = -Lap f + (r/2, z/2) . grad f - (3/r) d_r f
// on the meridional half-plane, together with Gauss rules that are exact for
// the probability measure
//   dmu = (16 sqrt(pi))^-1 r^3 exp(-(r^2+z^2)/4) dr dz.
//
// Eigenfunctions are psi_{l,n}(r, z) = c_{l,n} L_l^(1)(r^2/4) H_n(z/2) with
// eigenvalue l + n/2. Signs follow the convention that the coefficient of the
// top monomial r^(2l) z^n is positive.

#include <compare>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace axivort::basis {

struct EigenIndex {
  unsigned ell = 0;  // Laguerre degree
  unsigned n = 0;    // Hermite degree

  auto operator<=>(const EigenIndex&) const = default;
  /// Level k such that the eigenvalue equals k/2.
  unsigned level() const { return 2 * ell + n; }
};

std::string to_string(const EigenIndex& idx);

/// Exact non-negative half-integer k/2.
struct HalfInteger {
  unsigned twice = 0;

  auto operator<=>(const HalfInteger&) const = default;
  double value() const { return 0.5 * static_cast<double>(twice); }
};

/// Physicists' Hermite polynomial H_n(y).
double hermite(unsigned n, double y);

/// Generalized Laguerre polynomial L_l^(alpha)(s), alpha > -1.
double laguerre(unsigned ell, double alpha, double s);

/// Associated Laguerre polynomial L_l^(1)(s). Throws std::domain_error for s < 0.
double laguerre1(unsigned ell, double s);

/// Positive L^2(mu) normalization factor |c_{l,n}| = ((l+1) 2^n n!)^-1/2.
double normalization(EigenIndex idx);

/// Sign applied on top of normalization(): (-1)^l.
int sign_convention(EigenIndex idx);

/// psi_{l,n}(r, z). Throws std::domain_error for r < 0.
double eigenfunction(EigenIndex idx, double r, double z);

struct EigenDerivatives {
  double value = 0.0;
  double d_r = 0.0;
  double d_z = 0.0;
  double d_rr = 0.0;
  double d_zz = 0.0;
};

/// psi and its first/second partial derivatives, from the derivative
/// identities of the underlying polynomial families.
EigenDerivatives eigenfunction_derivatives(EigenIndex idx, double r, double z);

/// Strong-form (L psi)(r, z) for r > 0.
double apply_operator(EigenIndex idx, double r, double z);

HalfInteger eigenvalue(EigenIndex idx);

/// All (l, n) with l + n/2 = k/2, ordered by l ascending.
std::vector<EigenIndex> enumerate_level(unsigned k);

/// All indices with level <= max_level, ordered by level then l.
std::vector<EigenIndex> modes_up_to_level(unsigned max_level);

/// Tensor Gauss rule. weights[i * nodes_z.size() + j] belongs to node
/// (nodes_r[i], nodes_z[j]).
struct Quadrature {
  std::vector<double> nodes_r;
  std::vector<double> nodes_z;
  std::vector<double> weights;
  /// Largest Newton correction (relative) left after node polishing.
  double node_residual = 0.0;

  std::size_t size_r() const { return nodes_r.size(); }
  std::size_t size_z() const { return nodes_z.size(); }
  double weight(std::size_t i, std::size_t j) const { return weights[i * nodes_z.size() + j]; }

  /// Sum over nodes of weight * g(r, z).
  double integrate(const std::function<double(double, double)>& g) const;
};

/// Gauss rule for mu with K nodes per axis: generalized Laguerre (alpha = 1)
/// in s = r^2/4, Hermite in y = z/2. Exact for polynomials in (r^2, z) of
/// degree <= 2K-1 per variable. Throws std::runtime_error if the nodes cannot
/// be polished to 1e-14.
Quadrature build_quadrature(std::size_t K);

/// Gauss rule for the (non-normalized) measure rho_* dr dz, alpha = 0 in s.
/// Its total mass is computed from the moments, not normalized to one.
Quadrature build_profile_quadrature(std::size_t K);

/// Sum of weights * sampler(node) * psi_idx(node).
double project(const std::function<double(double, double)>& sampler, EigenIndex idx,
               const Quadrature& quad);

/// |c_{l,n}| recovered by integrating the unnormalized product under `quad`.
double normalization_by_quadrature(EigenIndex idx, const Quadrature& quad);

/// Truncated spectral coefficients <f, psi_idx>_mu.
struct EigenCoeffs {
  unsigned truncation_level = 0;
  std::map<EigenIndex, double> coeffs;

  double sum_of_squares() const;
};

/// Projects `sampler` on every mode of level <= max_level.
EigenCoeffs decompose(const std::function<double(double, double)>& sampler,
                      unsigned max_level, const Quadrature& quad);

/// (L f)_{l,n} = (l + n/2) <f, psi_{l,n}>.
EigenCoeffs apply_operator_spectral(const EigenCoeffs& coeffs);

/// Writes "r,z,weight" rows with 17 significant digits.
void write_quadrature_csv(std::ostream& out, const Quadrature& quad);

/// Writes "ell,n,lambda,c" rows with 17 significant digits.
void write_mode_table_csv(std::ostream& out, unsigned max_level);

}  // namespace axivort::basis
