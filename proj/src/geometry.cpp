#include "zonalstab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "zonalstab/basis.hpp"

namespace zonal::geometry {

namespace {

constexpr double kDegenerate = 1e-14;

double radicand(const SurfaceProfile& p, double x) {
  const double r = p.rho(x);
  const double d = p.drho(x);
  return 4.0 * r + d * d;
}

void check_inside(const SurfaceProfile& p, double x) {
  if (!(std::abs(x) <= p.a * (1.0 + 1e-14)))
    throw std::domain_error("abscissa outside [-a, a] of the surface profile");
}

// Not-a-knot cubic spline through (x_i, y_i); evaluation of value and the
// first two derivatives.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 4) throw std::invalid_argument("tabulated profile needs at least 4 rows");
    // Unknowns: second derivatives M_i. Dense solve is fine at these sizes,
    // but the system is banded; use Gaussian elimination with partial pivoting
    // on the full matrix for simplicity of the not-a-knot rows.
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    // Not-a-knot at the left: third derivative continuous at x_1.
    a[0][0] = h[1];
    a[0][1] = -(h[0] + h[1]);
    a[0][2] = h[0];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      a[i][i - 1] = h[i - 1];
      a[i][i] = 2.0 * (h[i - 1] + h[i]);
      a[i][i + 1] = h[i];
      a[i][n] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    a[n - 1][n - 3] = h[n - 2];
    a[n - 1][n - 2] = -(h[n - 3] + h[n - 2]);
    a[n - 1][n - 1] = h[n - 3];
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      std::swap(a[c], a[piv]);
      if (a[c][c] == 0.0) throw std::runtime_error("spline system singular");
      for (std::size_t r = c + 1; r < n; ++r) {
        const double f = a[r][c] / a[c][c];
        if (f == 0.0) continue;
        for (std::size_t q = c; q <= n; ++q) a[r][q] -= f * a[c][q];
      }
    }
    m_.assign(n, 0.0);
    for (std::size_t c = n; c-- > 0;) {
      double s = a[c][n];
      for (std::size_t q = c + 1; q < n; ++q) s -= a[c][q] * m_[q];
      m_[c] = s / a[c][c];
    }
  }

  double eval(double x, int derivative) const {
    std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - x) / h;
    const double B = (x - x_[i]) / h;
    switch (derivative) {
      case 0:
        return A * y_[i] + B * y_[i + 1] + ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
      case 1:
        return (y_[i + 1] - y_[i]) / h - (3.0 * A * A - 1.0) / 6.0 * h * m_[i] + (3.0 * B * B - 1.0) / 6.0 * h * m_[i + 1];
      default:
        return A * m_[i] + B * m_[i + 1];
    }
  }

 private:
  std::size_t interval(double x) const {
    std::size_t lo = 0;
    std::size_t hi = x_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (x_[mid] > x) hi = mid; else lo = mid;
    }
    return lo;
  }

  std::vector<double> x_, y_, m_;
};

}  // namespace

SurfaceProfile sphere_profile() {
  SurfaceProfile p;
  p.kind = ProfileKind::sphere;
  p.a = 1.0;
  p.beta = 0.0;
  p.rho = [](double x) { return 1.0 - x * x; };
  p.drho = [](double x) { return -2.0 * x; };
  p.d2rho = [](double) { return -2.0; };
  return p;
}

SurfaceProfile ellipsoid_profile(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("ellipsoid_profile: a must be > 0");
  if (a == 1.0) return sphere_profile();
  SurfaceProfile p;
  p.kind = ProfileKind::ellipsoid;
  p.a = a;
  const double inv_a2 = 1.0 / (a * a);
  p.beta = inv_a2 - inv_a2 * inv_a2;
  p.rho = [inv_a2](double x) { return 1.0 - x * x * inv_a2; };
  p.drho = [inv_a2](double x) { return -2.0 * x * inv_a2; };
  p.d2rho = [inv_a2](double) { return -2.0 * inv_a2; };
  return p;
}

SurfaceProfile tabulated_profile(std::istream& csv) {
  std::string line;
  if (!std::getline(csv, line)) throw std::invalid_argument("profile CSV: missing header row");
  std::vector<double> xs, ys;
  int lineno = 1;
  while (std::getline(csv, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x = 0.0, y = 0.0;
    if (!(ss >> x >> y)) throw std::invalid_argument("profile CSV: malformed row " + std::to_string(lineno));
    if (!xs.empty() && !(x > xs.back()))
      throw std::invalid_argument("profile CSV: x3 must be strictly increasing (row " + std::to_string(lineno) + ")");
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.size() < 4) throw std::invalid_argument("profile CSV: need at least 4 data rows");
  const double a = xs.back();
  if (!(a > 0.0) || std::abs(xs.front() + a) > 1e-9 * a)
    throw std::invalid_argument("profile CSV: x3 range must be [-a, a] with a > 0");
  if (std::abs(ys.front()) > 1e-9 || std::abs(ys.back()) > 1e-9)
    throw std::invalid_argument("profile CSV: rho must vanish at both poles");
  for (std::size_t i = 1; i + 1 < ys.size(); ++i)
    if (!(ys[i] > 0.0)) throw std::invalid_argument("profile CSV: rho must be positive inside (-a, a)");

  auto spline = std::make_shared<CubicSpline>(xs, ys);
  SurfaceProfile p;
  p.kind = ProfileKind::tabulated;
  p.a = a;
  p.beta = 0.0;
  p.rho = [spline](double x) { return spline->eval(x, 0); };
  p.drho = [spline](double x) { return spline->eval(x, 1); };
  p.d2rho = [spline](double x) { return spline->eval(x, 2); };
  if (!(p.drho(-a) > 0.0) || !(p.drho(a) < 0.0))
    throw std::invalid_argument("profile CSV: rho'(-a) > 0 and rho'(a) < 0 required at the poles");
  return p;
}

SurfaceProfile load_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open profile CSV: " + path);
  return tabulated_profile(in);
}

double chi(const SurfaceProfile& p, double x) {
  check_inside(p, x);
  const double q = radicand(p, x);
  if (q < kDegenerate) throw std::domain_error("degenerate surface profile: 4 rho + rho'^2 vanishes");
  return -p.drho(x) / std::sqrt(q);
}

double chi_prime(const SurfaceProfile& p, double x) {
  check_inside(p, x);
  const double q = radicand(p, x);
  if (q < kDegenerate) throw std::domain_error("degenerate surface profile: 4 rho + rho'^2 vanishes");
  const double d = p.drho(x);
  return (2.0 * d * d - 4.0 * p.rho(x) * p.d2rho(x)) / (q * std::sqrt(q));
}

double xi_prime(const SurfaceProfile& p, double x) {
  check_inside(p, x);
  const double q = radicand(p, x);
  if (q < kDegenerate) throw std::domain_error("degenerate surface profile: 4 rho + rho'^2 vanishes");
  return 0.5 * std::sqrt(q);
}

double chi_r_form(const SurfaceProfile& p, double x) {
  const double r = std::sqrt(p.rho(x));
  const double rp = 0.5 * p.drho(x) / r;
  return -rp / std::sqrt(1.0 + rp * rp);
}

double xi_prime_r_form(const SurfaceProfile& p, double x) {
  const double r = std::sqrt(p.rho(x));
  const double rp = 0.5 * p.drho(x) / r;
  return r * std::sqrt(1.0 + rp * rp);
}

std::vector<double> uniform_grid(const SurfaceProfile& p, int n) {
  if (n < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = -p.a + 2.0 * p.a * i / (n - 1);
  g.front() = -p.a;
  g.back() = p.a;
  return g;
}

ZonalGeometry xi(const SurfaceProfile& p, std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("xi: grid needs at least 2 points");
  const double tol = 1e-12 * p.a;
  if (std::abs(grid.front() + p.a) > tol || std::abs(grid.back() - p.a) > tol)
    throw std::invalid_argument("xi: grid must span [-a, a]");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("xi: grid must be strictly increasing");

  static const basis::QuadratureRule panel_rule = basis::gauss_rule(16);
  ZonalGeometry g;
  g.x.assign(grid.begin(), grid.end());
  const std::size_t n = grid.size();
  g.chi.resize(n);
  g.chi_prime.resize(n);
  g.xi.resize(n);
  g.xi_prime.resize(n);

  std::vector<double> cumulative(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double lo = grid[i - 1];
    const double hi = grid[i];
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double s = 0.0;
    for (std::size_t q = 0; q < panel_rule.size(); ++q)
      s += panel_rule.weights[q] * xi_prime(p, mid + half * panel_rule.nodes[q]);
    cumulative[i] = cumulative[i - 1] + half * s;
  }
  const double total = cumulative.back();
  g.area = 2.0 * std::numbers::pi * total;

  bool chi_monotone = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::clamp(grid[i], -p.a, p.a);
    g.chi[i] = chi(p, x);
    g.chi_prime[i] = chi_prime(p, x);
    g.xi_prime[i] = xi_prime(p, x);
    g.xi[i] = cumulative[i] - 0.5 * total;
    if (!(g.xi_prime[i] > 0.0) && i > 0 && i + 1 < n)
      throw std::domain_error("xi: xi' must be positive inside (-a, a)");
    if (!(g.chi_prime[i] > 0.0)) chi_monotone = false;
  }
  g.warnings = p.warnings;
  if (!chi_monotone)
    g.warnings.push_back("chi is not strictly increasing on the grid (profile may lack positive curvature)");
  return g;
}

}  // namespace zonal::geometry
