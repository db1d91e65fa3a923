#include "zonalstab/sphere_transform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace zonal {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SphereTransform::SphereTransform(int L) : SphereTransform(L, min_nlat(L), min_nlon(L)) {}

SphereTransform::SphereTransform(int L, int nlat, int nlon) : L_(L), nlat_(nlat), nlon_(nlon) {
  if (L < 0) throw std::invalid_argument("SphereTransform: truncation must be >= 0");
  if (nlat < min_nlat(L) || nlon < min_nlon(L))
    throw std::invalid_argument("SphereTransform: grid " + std::to_string(nlat) + "x" + std::to_string(nlon) +
                                " too coarse for dealiased truncation L=" + std::to_string(L) + " (need " +
                                std::to_string(min_nlat(L)) + "x" + std::to_string(min_nlon(L)) + ")");
  rule_ = basis::gauss_rule(nlat);

  m_offset_.resize(static_cast<std::size_t>(L + 2));
  std::size_t total = 0;
  for (int m = 0; m <= L; ++m) {
    m_offset_[static_cast<std::size_t>(m)] = total;
    total += static_cast<std::size_t>(nlat) * static_cast<std::size_t>(L + 1 - m);
  }
  m_offset_[static_cast<std::size_t>(L + 1)] = total;
  p_.assign(total, 0.0);
  dp_.assign(total, 0.0);

  const double inv_sqrt_2pi = 1.0 / std::sqrt(kTwoPi);
  std::vector<double> col(static_cast<std::size_t>(L + 1));
  for (int m = 0; m <= L; ++m) {
    const double sign = (m % 2 == 0) ? inv_sqrt_2pi : -inv_sqrt_2pi;
    for (int j = 0; j < nlat; ++j) {
      const double x = rule_.nodes[static_cast<std::size_t>(j)];
      basis::normalized_legendre_column(m, L, x, col);
      const double one_minus_x2 = 1.0 - x * x;
      const std::size_t base = offset(m, j);
      for (int ell = m; ell <= L; ++ell) {
        const double pl = col[static_cast<std::size_t>(ell - m)];
        const double plm1 = ell > m ? col[static_cast<std::size_t>(ell - m - 1)] : 0.0;
        // (1 - x^2) dPbar_l/dx = -l x Pbar_l + (2l + 1) a_l Pbar_{l-1}
        const double d = (-ell * x * pl + (2.0 * ell + 1.0) * basis::ladder_value(m, ell) * plm1) / one_minus_x2;
        p_[base + static_cast<std::size_t>(ell - m)] = sign * pl;
        dp_[base + static_cast<std::size_t>(ell - m)] = sign * d;
      }
    }
  }

  cos_.resize(static_cast<std::size_t>(nlon) * (L + 1));
  sin_.resize(static_cast<std::size_t>(nlon) * (L + 1));
  for (int i = 0; i < nlon; ++i) {
    for (int m = 0; m <= L; ++m) {
      // Reduce the angle exactly in integer arithmetic before the trig call.
      const long long k = (static_cast<long long>(m) * i) % nlon;
      const double ang = kTwoPi * static_cast<double>(k) / nlon;
      cos_[static_cast<std::size_t>(i) * (L + 1) + m] = std::cos(ang);
      sin_[static_cast<std::size_t>(i) * (L + 1) + m] = std::sin(ang);
    }
  }
}

double SphereTransform::longitude(int i) const { return kTwoPi * i / nlon_; }

void SphereTransform::legendre_sums(const SpectralField& f, bool derivative, std::vector<double>& re,
                                    std::vector<double>& im) const {
  if (f.truncation() != L_) throw std::invalid_argument("SphereTransform: field truncation mismatch");
  const std::size_t stride = static_cast<std::size_t>(L_ + 1);
  re.assign(static_cast<std::size_t>(nlat_) * stride, 0.0);
  im.assign(static_cast<std::size_t>(nlat_) * stride, 0.0);
  std::vector<double> cre(stride), cim(stride);
  const auto& c = f.coefficients();
  const std::vector<double>& table = derivative ? dp_ : p_;
  for (int m = 0; m <= L_; ++m) {
    const int n = L_ + 1 - m;
    for (int ell = m; ell <= L_; ++ell) {
      const cplx v = c[SpectralField::index(ell, m)];
      cre[static_cast<std::size_t>(ell - m)] = v.real();
      cim[static_cast<std::size_t>(ell - m)] = v.imag();
    }
    for (int j = 0; j < nlat_; ++j) {
      const double* row = table.data() + offset(m, j);
      double sr = 0.0;
      double si = 0.0;
      for (int q = 0; q < n; ++q) {
        sr += row[q] * cre[static_cast<std::size_t>(q)];
        si += row[q] * cim[static_cast<std::size_t>(q)];
      }
      re[static_cast<std::size_t>(j) * stride + m] = sr;
      im[static_cast<std::size_t>(j) * stride + m] = si;
    }
  }
}

void SphereTransform::fourier_synthesis(const std::vector<double>& re, const std::vector<double>& im, bool dpsi,
                                        std::span<double> out) const {
  const std::size_t stride = static_cast<std::size_t>(L_ + 1);
  std::vector<double> ar(stride), ai(stride);
  for (int j = 0; j < nlat_; ++j) {
    const double* fr = re.data() + static_cast<std::size_t>(j) * stride;
    const double* fi = im.data() + static_cast<std::size_t>(j) * stride;
    // g = F_0 + 2 Re sum_{m>0} F_m e^{i m psi}; d/dpsi multiplies F_m by i m.
    for (int m = 0; m <= L_; ++m) {
      const double scale = (m == 0) ? 1.0 : 2.0;
      if (dpsi) {
        ar[static_cast<std::size_t>(m)] = -scale * m * fi[m];
        ai[static_cast<std::size_t>(m)] = scale * m * fr[m];
      } else {
        ar[static_cast<std::size_t>(m)] = scale * fr[m];
        ai[static_cast<std::size_t>(m)] = scale * fi[m];
      }
    }
    double* dst = out.data() + static_cast<std::size_t>(j) * nlon_;
    for (int i = 0; i < nlon_; ++i) {
      const double* cs = cos_.data() + static_cast<std::size_t>(i) * stride;
      const double* sn = sin_.data() + static_cast<std::size_t>(i) * stride;
      double s = 0.0;
      for (std::size_t m = 0; m < stride; ++m) s += ar[m] * cs[m] - ai[m] * sn[m];
      dst[i] = s;
    }
  }
}

std::vector<double> SphereTransform::synthesize(const SpectralField& f) const {
  std::vector<double> re, im;
  legendre_sums(f, false, re, im);
  std::vector<double> out(grid_size());
  fourier_synthesis(re, im, false, out);
  return out;
}

void SphereTransform::synthesize_gradient(const SpectralField& f, std::span<double> dpsi,
                                          std::span<double> dx) const {
  if (dpsi.size() != grid_size() || dx.size() != grid_size())
    throw std::invalid_argument("SphereTransform: gradient output size mismatch");
  std::vector<double> re, im;
  legendre_sums(f, false, re, im);
  fourier_synthesis(re, im, true, dpsi);
  legendre_sums(f, true, re, im);
  fourier_synthesis(re, im, false, dx);
}

SpectralField SphereTransform::analyze(std::span<const double> grid) const {
  if (grid.size() != grid_size()) throw std::invalid_argument("SphereTransform: grid size mismatch");
  const std::size_t stride = static_cast<std::size_t>(L_ + 1);
  std::vector<double> gr(static_cast<std::size_t>(nlat_) * stride), gi(gr.size());
  const double dpsi = kTwoPi / nlon_;
  for (int j = 0; j < nlat_; ++j) {
    const double* src = grid.data() + static_cast<std::size_t>(j) * nlon_;
    double* ar = gr.data() + static_cast<std::size_t>(j) * stride;
    double* ai = gi.data() + static_cast<std::size_t>(j) * stride;
    for (int i = 0; i < nlon_; ++i) {
      const double v = src[i];
      const double* cs = cos_.data() + static_cast<std::size_t>(i) * stride;
      const double* sn = sin_.data() + static_cast<std::size_t>(i) * stride;
      for (std::size_t m = 0; m < stride; ++m) {
        ar[m] += v * cs[m];
        ai[m] -= v * sn[m];
      }
    }
    const double wj = rule_.weights[static_cast<std::size_t>(j)] * dpsi;
    for (std::size_t m = 0; m < stride; ++m) {
      ar[m] *= wj;
      ai[m] *= wj;
    }
  }
  SpectralField out(L_);
  auto& c = out.coefficients();
  for (int m = 0; m <= L_; ++m) {
    for (int ell = m; ell <= L_; ++ell) {
      double sr = 0.0;
      double si = 0.0;
      for (int j = 0; j < nlat_; ++j) {
        const double p = plm(m, j, ell);
        sr += p * gr[static_cast<std::size_t>(j) * stride + m];
        si += p * gi[static_cast<std::size_t>(j) * stride + m];
      }
      c[SpectralField::index(ell, m)] = {sr, si};
      if (m > 0) {
        const cplx partner = (m % 2 == 0) ? cplx(sr, -si) : cplx(-sr, si);
        c[SpectralField::index(ell, -m)] = partner;
      } else {
        c[SpectralField::index(ell, 0)] = {sr, 0.0};
      }
    }
  }
  return out;
}

double SphereTransform::integrate(std::span<const double> grid) const {
  if (grid.size() != grid_size()) throw std::invalid_argument("SphereTransform: grid size mismatch");
  double total = 0.0;
  for (int j = 0; j < nlat_; ++j) {
    double s = 0.0;
    for (int i = 0; i < nlon_; ++i) s += grid[static_cast<std::size_t>(j) * nlon_ + i];
    total += rule_.weights[static_cast<std::size_t>(j)] * s;
  }
  return total * kTwoPi / nlon_;
}

}  // namespace zonal
