#pragma once

#include <span>
#include <vector>

#include "zonalstab/matrix.hpp"

namespace zonal::basis {

/// Off-diagonal couplings a_l of multiplication by x3 on the sector V_k,
///   x3 zeta_l = a_l zeta_{l-1} + a_{l+1} zeta_{l+1},
///   a_l^2 = (l+k)(l-k) / ((2l+1)(2l-1)).
struct LadderCoefficients {
  int k = 1;
  int ell_max = 1;
  std::vector<double> values;  // values[l - k] = a_l, l = k..ell_max

  /// a_l for k <= l <= ell_max. Degrees below k map to 0.
  double operator()(int ell) const;
};

LadderCoefficients ladder_coefficients(int k, int ell_max);

/// Closed form a_l for any k >= 0; zero when l <= k.
double ladder_value(int k, int ell);

/// lambda_l = l(l+1), the eigenvalue of -Laplacian on degree l.
constexpr double eigen_degree(int ell) { return static_cast<double>(ell) * (ell + 1); }

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule with n nodes on [-1, 1], nodes ascending.
QuadratureRule gauss_rule(int n);

/// Basis description for a sector V_k. Column j of any sector matrix
/// corresponds to degree ell_min + j; every row/column <-> degree mapping
/// goes through ell(j).
struct SectorBasisSpec {
  int k = 1;
  int ell_min = 1;
  int size = 0;
  /// zeta_l = norms[l - ell_min] * P^k_l, with P^k_l = (1-x^2)^{k/2} d^k P_l/dx^k.
  std::vector<double> norms;

  int ell(int index) const { return ell_min + index; }
  int index(int ell) const { return ell - ell_min; }
  int ell_last() const { return ell_min + size - 1; }
};

/// k >= 0, n >= 1. ell_min = max(k, 1) so the zonal sector excludes constants.
SectorBasisSpec sector_basis(int k, int n);

/// Values zeta_l(x_i) with unit norm in L^2([-1,1], dx); the full sector
/// function is zeta_l(x3) e^{ik psi} / sqrt(2 pi). Sign fixed so zeta_l > 0
/// as x -> 1-. Rows index abscissas, columns index degrees.
Matrix evaluate_sector_basis(const SectorBasisSpec& spec, std::span<const double> x);

/// Normalized associated Legendre values Pbar_l^m(x) for l = m..lmax (positive
/// near x = 1, unit norm in dx on [-1,1]). Written into out[0..lmax-m].
void normalized_legendre_column(int m, int lmax, double x, std::span<double> out);

}  // namespace zonal::basis
