#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zonalstab/basis.hpp"
#include "zonalstab/geometry.hpp"
#include "zonalstab/matrix.hpp"
#include "zonalstab/polynomial.hpp"

namespace zonal::ops {

using poly::Poly;

enum class ModelKind {
  legendre,       // f' proportional to the derivative of P_nu
  general_zonal,  // arbitrary polynomial stream function f(x3)
  custom,         // A and B given directly (criteria experiments)
};

/// Zonal base flow linearized on the sphere: M = A + B Delta^{-1} restricted
/// to a sector, with A = f' and B = Omega - w', w = Delta f.
struct ZonalModel {
  ModelKind kind = ModelKind::legendre;
  int nu = 2;
  double alpha = 1.0;
  Poly f;
  double Omega = 0.0;
  Poly custom_a;
  Poly custom_b;  // B without the Omega term

  Poly A() const;
  /// Derivative of the vorticity profile.
  Poly w_prime() const;
  Poly B() const;
  std::string name() const;
};

/// Normalized A for nu = 2, 3, 4: x, x^2 - 1/5, x^3 - 3x/7.
Poly legendre_a(int nu);
ZonalModel legendre_model(int nu, double Omega = 0.0, double alpha = 1.0);
ZonalModel general_zonal(Poly f, double Omega = 0.0);
/// B = Omega + b.
ZonalModel custom_model(Poly a, Poly b, double Omega = 0.0);
ZonalModel with_omega(ZonalModel m, double Omega);

/// Leading L x L block of poly(X) on sector k, where X is the infinite
/// tridiagonal matrix of multiplication by x3. Built on an (L + d) ladder so
/// every retained entry is exact.
Matrix mult_matrix(int k, const Poly& p, int L);

struct SectorOperator {
  int k = 1;
  basis::SectorBasisSpec spec;
  ZonalModel model;
  Matrix entries;
};

/// N x N truncation of M_k = A_X - B_X diag(1 / lambda_l).
SectorOperator sector_operator(const ZonalModel& model, int k, int N);

constexpr double kSignTolerance = 1e-12;

struct CheckResult {
  bool holds = false;
  /// Abscissas (or K values) that certify the answer.
  std::vector<double> witnesses;
};

/// Uniform interior grid of n points in (-1, 1).
std::vector<double> interior_grid(int n = 4001);
/// n points spanning [min A - 1, max A + 1] on [-1, 1], plus A(s0) at every
/// zero s0 of B in [-1, 1].
std::vector<double> k_grid(const ZonalModel& model, int n = 2001);

/// B takes both signs on the grid. Witnesses: {s_negative, s_positive}.
CheckResult rayleigh_check(const ZonalModel& model, std::span<const double> grid);
/// For every K there is s with B(s)(K - A(s)) < 0 (and B(s) clear of zero).
/// Witness on failure: the K with no admissible s.
CheckResult fjortoft_check(const ZonalModel& model, std::span<const double> grid, std::span<const double> K_grid);
/// Omega chi' - w' keeps one sign and stays clear of zero on the geometry grid.
/// Witness on failure: the abscissa of smallest |Omega chi' - w'|.
CheckResult arnold_check(const ZonalModel& model, const geometry::ZonalGeometry& geo);

/// Smallest Omega >= 0 above which B cannot change sign on [-1, 1].
double rayleigh_bound(const ZonalModel& model);
/// Smallest Omega >= 0 above which Omega chi' - w' > 0 on the geometry grid.
double arnold_bound(const ZonalModel& model, const geometry::ZonalGeometry& geo);

struct GuardCertificate {
  std::string clause;  // "no_sign_change" or "lambda_nu_le_lambda_k"
  std::string detail;
};

/// Closed-form sufficient conditions for a real spectrum of M_k.
std::optional<GuardCertificate> real_spectrum_guard(const ZonalModel& model, int k);

struct CriterionReport {
  CheckResult rayleigh;
  CheckResult fjortoft;
  CheckResult arnold;
  std::optional<GuardCertificate> guard;
  double rayleigh_bound = 0.0;
  double arnold_bound = 0.0;
};

CriterionReport criteria(const ZonalModel& model, int k, const geometry::ZonalGeometry& geo);

/// Row-major text, one row per line, 17 significant digits.
void write_matrix_text(std::ostream& out, const Matrix& m);

}  // namespace zonal::ops
