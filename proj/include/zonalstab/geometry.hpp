#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace zonal::geometry {

enum class ProfileKind { sphere, ellipsoid, tabulated };

/// Surface of revolution x1^2 + x2^2 = rho(x3), x3 in [-a, a].
struct SurfaceProfile {
  ProfileKind kind = ProfileKind::sphere;
  double a = 1.0;
  /// beta = 1/a^2 - 1/a^4 for the ellipsoid family; 0 otherwise.
  double beta = 0.0;
  std::function<double(double)> rho;
  std::function<double(double)> drho;
  std::function<double(double)> d2rho;
  /// Non-fatal validation notes (e.g. non-monotone chi on tabulated data).
  std::vector<std::string> warnings;
};

SurfaceProfile sphere_profile();
/// rho(x) = 1 - x^2/a^2; a == 1 yields the sphere kind.
SurfaceProfile ellipsoid_profile(double a);

/// Two-column CSV (x3, rho) with a header row and strictly increasing x3.
/// The interval is [x_first, x_last]; a = x_last and the data must be
/// symmetric in extent (x_first = -a). Interpolated by a not-a-knot cubic
/// spline.
SurfaceProfile tabulated_profile(std::istream& csv);
SurfaceProfile load_profile_csv(const std::string& path);

/// Coriolis factor chi = e3 . normal = -rho'/sqrt(4 rho + rho'^2).
double chi(const SurfaceProfile& p, double x);
/// d chi / d x3 = (2 rho'^2 - 4 rho rho'') / (4 rho + rho'^2)^{3/2}.
double chi_prime(const SurfaceProfile& p, double x);
/// d xi / d x3 = sqrt(4 rho + rho'^2) / 2.
double xi_prime(const SurfaceProfile& p, double x);

/// Same quantities through r = sqrt(rho); singular at the poles.
double chi_r_form(const SurfaceProfile& p, double x);
double xi_prime_r_form(const SurfaceProfile& p, double x);

struct ZonalGeometry {
  std::vector<double> x;
  std::vector<double> chi;
  std::vector<double> xi;
  std::vector<double> chi_prime;
  std::vector<double> xi_prime;
  /// 2 pi (xi(a) - xi(-a)).
  double area = 0.0;
  std::vector<std::string> warnings;
};

/// Tabulates chi, xi and their x3-derivatives on a grid spanning [-a, a].
/// xi is integrated panel by panel with Gauss quadrature and shifted so its
/// surface mean vanishes, which for a surface of revolution means
/// xi(-a) = -xi(a).
ZonalGeometry xi(const SurfaceProfile& p, std::span<const double> grid);

/// Uniform grid of n points on [-a, a], endpoints included.
std::vector<double> uniform_grid(const SurfaceProfile& p, int n);

}  // namespace zonal::geometry
