#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace zonal {

using cplx = std::complex<double>;

/// Triangular-truncation spherical-harmonic coefficients c_{l,m}, 0 <= l <= L,
/// |m| <= l, against orthonormal harmonics on the unit sphere
///   Y_l^m = (-1)^m Pbar_l^m(x3) e^{i m psi} / sqrt(2 pi),  m >= 0,
///   Y_l^{-m} = (-1)^m conj(Y_l^m),
/// so real fields satisfy c_{l,-m} = (-1)^m conj(c_{l,m}).
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(int L) : L_(L), c_(static_cast<std::size_t>((L + 1) * (L + 1))) {
    if (L < 0) throw std::invalid_argument("SpectralField: truncation must be >= 0");
  }

  int truncation() const { return L_; }
  std::size_t size() const { return c_.size(); }

  static std::size_t index(int ell, int m) { return static_cast<std::size_t>(ell * (ell + 1) + m); }

  cplx& operator()(int ell, int m) { return c_[checked(ell, m)]; }
  cplx operator()(int ell, int m) const { return c_[checked(ell, m)]; }

  /// Sets c_{l,m} and its conjugate partner c_{l,-m} so the field stays real.
  void set_real_pair(int ell, int m, cplx value);

  std::vector<cplx>& coefficients() { return c_; }
  const std::vector<cplx>& coefficients() const { return c_; }

  bool is_real(double tol = 1e-12) const;
  /// Sum of |c|^2 over every stored coefficient (the L^2 norm squared on S^2).
  double norm2() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  /// a += s * b
  void axpy(double s, const SpectralField& b);

  double max_abs_difference(const SpectralField& o) const;

 private:
  std::size_t checked(int ell, int m) const {
    if (ell < 0 || ell > L_ || m < -ell || m > ell)
      throw std::out_of_range("SpectralField: (l, m) outside triangular truncation");
    return index(ell, m);
  }
  void check_same(const SpectralField& o) const {
    if (o.L_ != L_) throw std::invalid_argument("SpectralField: truncation mismatch");
  }

  int L_ = 0;
  std::vector<cplx> c_;
};

}  // namespace zonal
