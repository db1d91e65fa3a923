#pragma once

#include <span>
#include <vector>

#include "zonalstab/basis.hpp"
#include "zonalstab/spectral_field.hpp"

namespace zonal {

/// Grid <-> spectral transforms on a Gauss (latitude) x uniform (longitude)
/// grid. Grid values are stored latitude-major: value(j, i) at
/// x3 = nodes[j], psi = 2 pi i / nlon. Transforms assume real fields and use
/// the m >= 0 half of the coefficients.
class SphereTransform {
 public:
  /// Smallest grid that integrates triple products at truncation L exactly:
  /// nlon = 3L + 1, nlat = ceil((3L + 2) / 2).
  explicit SphereTransform(int L);
  SphereTransform(int L, int nlat, int nlon);

  static int min_nlat(int L) { return (3 * L + 3) / 2; }
  static int min_nlon(int L) { return 3 * L + 1; }

  int truncation() const { return L_; }
  int nlat() const { return nlat_; }
  int nlon() const { return nlon_; }
  std::size_t grid_size() const { return static_cast<std::size_t>(nlat_) * nlon_; }
  const basis::QuadratureRule& rule() const { return rule_; }
  double longitude(int i) const;

  std::vector<double> synthesize(const SpectralField& f) const;
  /// d/dpsi and d/dx3 of the field on the grid (x3 derivative at fixed psi).
  void synthesize_gradient(const SpectralField& f, std::span<double> dpsi, std::span<double> dx) const;
  SpectralField analyze(std::span<const double> grid) const;

  /// Integral over S^2 of a grid function by the product rule.
  double integrate(std::span<const double> grid) const;

 private:
  double plm(int m, int j, int ell) const { return p_[offset(m, j) + static_cast<std::size_t>(ell - m)]; }
  double dplm(int m, int j, int ell) const { return dp_[offset(m, j) + static_cast<std::size_t>(ell - m)]; }
  std::size_t offset(int m, int j) const {
    return m_offset_[static_cast<std::size_t>(m)] + static_cast<std::size_t>(j) * static_cast<std::size_t>(L_ + 1 - m);
  }
  void legendre_sums(const SpectralField& f, bool derivative, std::vector<double>& re,
                     std::vector<double>& im) const;
  void fourier_synthesis(const std::vector<double>& re, const std::vector<double>& im, bool dpsi,
                         std::span<double> out) const;

  int L_;
  int nlat_;
  int nlon_;
  basis::QuadratureRule rule_;
  std::vector<std::size_t> m_offset_;
  std::vector<double> p_;   // (-1)^m Pbar_l^m(x_j) / sqrt(2 pi)
  std::vector<double> dp_;  // x3-derivative of the above
  std::vector<double> cos_;  // [i][m]
  std::vector<double> sin_;  // [i][m]
};

}  // namespace zonal
