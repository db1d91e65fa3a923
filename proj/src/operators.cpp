#include "zonalstab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "zonalstab/eigensolver.hpp"

namespace zonal::ops {

Poly legendre_a(int nu) {
  switch (nu) {
    case 2: return {0.0, 1.0};
    case 3: return {-1.0 / 5.0, 0.0, 1.0};
    case 4: return {0.0, -3.0 / 7.0, 0.0, 1.0};
    default: throw std::invalid_argument("legendre model: nu must be 2, 3 or 4");
  }
}

Poly ZonalModel::A() const {
  switch (kind) {
    case ModelKind::legendre: return poly::scale(legendre_a(nu), alpha);
    case ModelKind::general_zonal: return poly::derivative(f);
    case ModelKind::custom: return custom_a;
  }
  return {};
}

Poly ZonalModel::w_prime() const {
  switch (kind) {
    case ModelKind::legendre: return poly::scale(legendre_a(nu), -basis::eigen_degree(nu) * alpha);
    case ModelKind::general_zonal: return poly::derivative(poly::zonal_laplacian(f));
    case ModelKind::custom: return poly::scale(custom_b, -1.0);
  }
  return {};
}

Poly ZonalModel::B() const { return poly::add(Poly{Omega}, poly::scale(w_prime(), -1.0)); }

std::string ZonalModel::name() const {
  switch (kind) {
    case ModelKind::legendre: return "p" + std::to_string(nu);
    case ModelKind::general_zonal: return "zonal";
    case ModelKind::custom: return "custom";
  }
  return "";
}

ZonalModel legendre_model(int nu, double Omega, double alpha) {
  ZonalModel m;
  m.kind = ModelKind::legendre;
  m.nu = nu;
  m.alpha = alpha;
  m.f = poly::integral(poly::scale(legendre_a(nu), alpha));
  m.Omega = Omega;
  return m;
}

ZonalModel general_zonal(Poly f, double Omega) {
  ZonalModel m;
  m.kind = ModelKind::general_zonal;
  m.f = std::move(f);
  m.Omega = Omega;
  return m;
}

ZonalModel custom_model(Poly a, Poly b, double Omega) {
  ZonalModel m;
  m.kind = ModelKind::custom;
  m.custom_a = std::move(a);
  m.custom_b = std::move(b);
  m.Omega = Omega;
  return m;
}

ZonalModel with_omega(ZonalModel m, double Omega) {
  m.Omega = Omega;
  return m;
}

Matrix mult_matrix(int k, const Poly& p, int L) {
  if (k < 0) throw std::invalid_argument("mult_matrix: k must be >= 0");
  if (L < 1) throw std::invalid_argument("mult_matrix: L must be >= 1");
  const Poly c = poly::trimmed(p);
  const int d = std::max(static_cast<int>(c.size()) - 1, 0);
  const int n = L + d;
  const int ell_min = std::max(k, 1);
  // off[i] couples rows i and i + 1, i.e. a_{ell(i + 1)}.
  std::vector<double> off(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i + 1 < n; ++i) off[i] = basis::ladder_value(k, ell_min + i + 1);

  const std::size_t nn = static_cast<std::size_t>(n);
  Matrix P(nn, nn);
  if (c.empty()) return P.leading_block(L, L);
  for (std::size_t i = 0; i < nn; ++i) P(i, i) = c.back();
  // Horner: P <- P X + c_j I, exploiting the tridiagonal X.
  Matrix next(nn, nn);
  for (int j = d - 1; j >= 0; --j) {
    for (std::size_t r = 0; r < nn; ++r) {
      for (std::size_t col = 0; col < nn; ++col) {
        double s = 0.0;
        if (col > 0) s += P(r, col - 1) * off[col - 1];
        if (col + 1 < nn) s += P(r, col + 1) * off[col];
        next(r, col) = s;
      }
      next(r, r) += c[static_cast<std::size_t>(j)];
    }
    std::swap(P, next);
  }
  return P.leading_block(L, L);
}

SectorOperator sector_operator(const ZonalModel& model, int k, int N) {
  if (k < 1) throw std::invalid_argument("sector_operator: k must be >= 1 (the zonal sector operator vanishes)");
  if (N < 1) throw std::invalid_argument("sector_operator: N must be >= 1");
  SectorOperator op;
  op.k = k;
  op.spec = basis::sector_basis(k, N);
  op.model = model;
  const Matrix a = mult_matrix(k, model.A(), N);
  const Matrix b = mult_matrix(k, model.B(), N);
  op.entries = Matrix(static_cast<std::size_t>(N), static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    const double inv_lambda = 1.0 / basis::eigen_degree(op.spec.ell(j));
    for (int i = 0; i < N; ++i) op.entries(i, j) = a(i, j) - b(i, j) * inv_lambda;
  }
  return op;
}

std::vector<double> interior_grid(int n) {
  if (n < 1) throw std::invalid_argument("interior_grid: n must be >= 1");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = -1.0 + 2.0 * (i + 1) / (n + 1);
  return g;
}

std::vector<double> k_grid(const ZonalModel& model, int n) {
  if (n < 2) throw std::invalid_argument("k_grid: n must be >= 2");
  const auto [lo, hi] = poly::range(model.A(), -1.0, 1.0);
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = lo - 1.0;
  const double b = hi + 1.0;
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  // The classical Fjortoft witnesses K = A(s0) at zeros of B are single
  // points that a uniform grid would miss.
  const Poly B = poly::trimmed(model.B());
  if (poly::degree(B) >= 1)
    for (double z : spectra::real_roots(B, -1.0, 1.0)) g.push_back(poly::eval(model.A(), z));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

CheckResult rayleigh_check(const ZonalModel& model, std::span<const double> grid) {
  const Poly B = model.B();
  CheckResult r;
  double neg = std::numeric_limits<double>::quiet_NaN();
  double pos = std::numeric_limits<double>::quiet_NaN();
  for (double s : grid) {
    const double v = poly::eval(B, s);
    if (v < -kSignTolerance && std::isnan(neg)) neg = s;
    if (v > kSignTolerance && std::isnan(pos)) pos = s;
  }
  r.holds = !std::isnan(neg) && !std::isnan(pos);
  if (r.holds) r.witnesses = {neg, pos};
  return r;
}

CheckResult fjortoft_check(const ZonalModel& model, std::span<const double> grid, std::span<const double> K_grid) {
  const Poly A = model.A();
  const Poly B = model.B();
  std::vector<double> a(grid.size()), b(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    a[i] = poly::eval(A, grid[i]);
    b[i] = poly::eval(B, grid[i]);
  }
  CheckResult r;
  r.holds = true;
  for (double K : K_grid) {
    bool found = false;
    for (std::size_t i = 0; i < grid.size() && !found; ++i)
      found = std::abs(b[i]) > kSignTolerance && b[i] * (K - a[i]) < -kSignTolerance;
    if (!found) {
      r.holds = false;
      r.witnesses = {K};
      return r;
    }
  }
  return r;
}

CheckResult arnold_check(const ZonalModel& model, const geometry::ZonalGeometry& geo) {
  const Poly wp = model.w_prime();
  CheckResult r;
  bool pos = false;
  bool neg = false;
  double smallest = std::numeric_limits<double>::infinity();
  double where = 0.0;
  for (std::size_t i = 0; i < geo.x.size(); ++i) {
    const double q = model.Omega * geo.chi_prime[i] - poly::eval(wp, geo.x[i]);
    if (q > 0) pos = true;
    if (q < 0) neg = true;
    if (std::abs(q) < smallest) {
      smallest = std::abs(q);
      where = geo.x[i];
    }
  }
  r.holds = !(pos && neg) && smallest > 1e-10;
  r.witnesses = {where};
  return r;
}

double rayleigh_bound(const ZonalModel& model) {
  const auto [lo, hi] = poly::range(poly::scale(model.w_prime(), -1.0), -1.0, 1.0);
  (void)hi;
  return std::max(0.0, -lo);
}

double arnold_bound(const ZonalModel& model, const geometry::ZonalGeometry& geo) {
  const Poly wp = model.w_prime();
  double best = 0.0;
  for (std::size_t i = 0; i < geo.x.size(); ++i) {
    const double cp = geo.chi_prime[i];
    if (cp <= 0.0) return std::numeric_limits<double>::infinity();
    best = std::max(best, poly::eval(wp, geo.x[i]) / cp);
  }
  return best;
}

std::optional<GuardCertificate> real_spectrum_guard(const ZonalModel& model, int k) {
  if (k < 1) throw std::invalid_argument("real_spectrum_guard: k must be >= 1");
  const auto [lo, hi] = poly::range(model.B(), -1.0, 1.0);
  if (lo >= -kSignTolerance || hi <= kSignTolerance) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "B ranges over [%.17g, %.17g] on [-1, 1]", lo, hi);
    return GuardCertificate{"no_sign_change", buf};
  }
  if (model.kind == ModelKind::legendre && model.nu <= k) {
    return GuardCertificate{"lambda_nu_le_lambda_k", "lambda_" + std::to_string(model.nu) + " <= lambda_" +
                                                         std::to_string(k)};
  }
  return std::nullopt;
}

CriterionReport criteria(const ZonalModel& model, int k, const geometry::ZonalGeometry& geo) {
  CriterionReport rep;
  const auto grid = interior_grid();
  rep.rayleigh = rayleigh_check(model, grid);
  rep.fjortoft = fjortoft_check(model, grid, k_grid(model));
  rep.arnold = arnold_check(model, geo);
  rep.guard = real_spectrum_guard(model, k);
  rep.rayleigh_bound = rayleigh_bound(model);
  rep.arnold_bound = arnold_bound(model, geo);
  return rep;
}

void write_matrix_text(std::ostream& out, const Matrix& m) {
  char buf[40];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace zonal::ops
