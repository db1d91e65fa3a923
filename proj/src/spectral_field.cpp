#include "zonalstab/spectral_field.hpp"

#include <algorithm>
#include <cmath>

namespace zonal {

void SpectralField::set_real_pair(int ell, int m, cplx value) {
  if (m == 0) {
    (*this)(ell, 0) = {value.real(), 0.0};
    return;
  }
  const int am = std::abs(m);
  const cplx pos = m > 0 ? value : ((am % 2 == 0) ? std::conj(value) : -std::conj(value));
  (*this)(ell, am) = pos;
  (*this)(ell, -am) = (am % 2 == 0) ? std::conj(pos) : -std::conj(pos);
}

bool SpectralField::is_real(double tol) const {
  for (int ell = 0; ell <= L_; ++ell) {
    if (std::abs(c_[index(ell, 0)].imag()) > tol) return false;
    for (int m = 1; m <= ell; ++m) {
      const cplx expected = (m % 2 == 0) ? std::conj(c_[index(ell, m)]) : -std::conj(c_[index(ell, m)]);
      if (std::abs(c_[index(ell, -m)] - expected) > tol) return false;
    }
  }
  return true;
}

double SpectralField::norm2() const {
  double s = 0.0;
  for (const cplx& v : c_) s += std::norm(v);
  return s;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  check_same(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  check_same(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (cplx& v : c_) v *= s;
  return *this;
}

void SpectralField::axpy(double s, const SpectralField& b) {
  check_same(b);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += s * b.c_[i];
}

double SpectralField::max_abs_difference(const SpectralField& o) const {
  check_same(o);
  double m = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) m = std::max(m, std::abs(c_[i] - o.c_[i]));
  return m;
}

}  // namespace zonal
