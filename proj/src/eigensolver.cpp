#include "zonalstab/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace zonal::spectra {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Balanced {
  Matrix a;
  int low = 0;
  int high = 0;
  std::vector<double> scale;
  std::vector<std::pair<int, int>> swaps;
};

void swap_symmetric(Matrix& a, int i, int j) {
  if (i == j) return;
  const int n = static_cast<int>(a.rows());
  for (int c = 0; c < n; ++c) std::swap(a(i, c), a(j, c));
  for (int r = 0; r < n; ++r) std::swap(a(r, i), a(r, j));
}

// Permutes isolated eigenvalues to the ends and scales the remaining block by
// powers of two so row and column norms are comparable.
Balanced balance(Matrix a) {
  const int n = static_cast<int>(a.rows());
  Balanced b;
  b.scale.assign(static_cast<std::size_t>(n), 1.0);
  int low = 0;
  int high = n - 1;

  // Rows whose off-diagonal part (within the active window) vanishes go last.
  for (bool found = true; found && high > 0;) {
    found = false;
    for (int j = high; j >= 0; --j) {
      bool zero = true;
      for (int c = 0; c <= high && zero; ++c)
        if (c != j && a(j, c) != 0.0) zero = false;
      if (zero) {
        swap_symmetric(a, j, high);
        b.swaps.emplace_back(j, high);
        --high;
        found = true;
        break;
      }
    }
  }
  // Columns whose off-diagonal part vanishes go first.
  for (bool found = true; found && low < high;) {
    found = false;
    for (int j = low; j <= high; ++j) {
      bool zero = true;
      for (int r = low; r <= high && zero; ++r)
        if (r != j && a(r, j) != 0.0) zero = false;
      if (zero) {
        swap_symmetric(a, j, low);
        b.swaps.emplace_back(j, low);
        ++low;
        found = true;
        break;
      }
    }
  }

  constexpr double radix = 2.0;
  constexpr double radix2 = radix * radix;
  for (bool noconv = true; noconv;) {
    noconv = false;
    for (int i = low; i <= high; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (int j = low; j <= high; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix2;
      }
      g = r * radix;
      while (c >= g) {
        f /= radix;
        c /= radix2;
      }
      if ((c + r) / f < 0.95 * s) {
        b.scale[static_cast<std::size_t>(i)] *= f;
        noconv = true;
        for (int j = 0; j < n; ++j) a(i, j) /= f;
        for (int j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
  b.a = std::move(a);
  b.low = low;
  b.high = high;
  return b;
}

// Householder reduction of rows/columns low..high to upper Hessenberg form.
// When q is given it receives the accumulated orthogonal transformation.
void hessenberg(Matrix& h, int low, int high, Matrix* q) {
  const int n = static_cast<int>(h.rows());
  std::vector<double> ort(static_cast<std::size_t>(n), 0.0);
  for (int m = low + 1; m <= high - 1; ++m) {
    double scale = 0.0;
    for (int i = m; i <= high; ++i) scale += std::abs(h(i, m - 1));
    if (scale == 0.0) continue;
    double hh = 0.0;
    for (int i = high; i >= m; --i) {
      ort[i] = h(i, m - 1) / scale;
      hh += ort[i] * ort[i];
    }
    double g = std::sqrt(hh);
    if (ort[m] > 0) g = -g;
    hh -= ort[m] * g;
    ort[m] -= g;
    for (int j = m; j < n; ++j) {
      double f = 0.0;
      for (int i = high; i >= m; --i) f += ort[i] * h(i, j);
      f /= hh;
      for (int i = m; i <= high; ++i) h(i, j) -= f * ort[i];
    }
    for (int i = 0; i <= high; ++i) {
      double f = 0.0;
      for (int j = high; j >= m; --j) f += ort[j] * h(i, j);
      f /= hh;
      for (int j = m; j <= high; ++j) h(i, j) -= f * ort[j];
    }
    ort[m] *= scale;
    h(m, m - 1) = scale * g;
  }

  if (q) {
    *q = Matrix::identity(static_cast<std::size_t>(n));
    for (int m = high - 1; m >= low + 1; --m) {
      if (h(m, m - 1) == 0.0) continue;
      for (int i = m + 1; i <= high; ++i) ort[i] = h(i, m - 1);
      for (int j = m; j <= high; ++j) {
        double g = 0.0;
        for (int i = m; i <= high; ++i) g += ort[i] * (*q)(i, j);
        g = (g / ort[m]) / h(m, m - 1);
        for (int i = m; i <= high; ++i) (*q)(i, j) += g * ort[i];
      }
    }
  }
  for (int i = 2; i < n; ++i)
    for (int j = 0; j < i - 1; ++j) h(i, j) = 0.0;
}

// Eigenvalues of a 2x2 block [[a, b], [c, d]].
std::pair<cplx, cplx> eig2(double a, double b, double c, double d) {
  const double p = 0.5 * (a - d);
  const double bc = b * c;
  const double disc = p * p + bc;
  const double mid = d + p;
  if (disc >= 0.0) {
    const double z = std::sqrt(disc);
    // Avoid cancellation: take the root of larger magnitude first.
    const double zz = p >= 0 ? p + z : p - z;
    const double big = d + zz;
    const double small = zz != 0.0 ? d - bc / zz : d;
    return {cplx(big, 0.0), cplx(small, 0.0)};
  }
  const double z = std::sqrt(-disc);
  return {cplx(mid, z), cplx(mid, -z)};
}

// Francis double-shift QR on an upper Hessenberg matrix. Only the active
// window is updated since the Schur form itself is not needed.
void hqr(Matrix& h, int low, int high, int max_iter, std::vector<cplx>& out, const std::string& context) {
  const int nn = static_cast<int>(h.rows());
  out.assign(static_cast<std::size_t>(nn), cplx(std::numeric_limits<double>::quiet_NaN(), 0.0));
  double norm = 0.0;
  for (int i = 0; i < nn; ++i) {
    if (i < low || i > high) out[i] = h(i, i);
    for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(h(i, j));
  }
  int n = high;
  int iter = 0;
  double exshift = 0.0;
  double p = 0, q = 0, r = 0, s = 0, z = 0, w = 0, x = 0, y = 0;

  while (n >= low) {
    int l = n;
    while (l > low) {
      s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(h(l, l - 1)) < kEps * s) break;
      --l;
    }

    if (l == n) {
      out[n] = h(n, n) + exshift;
      --n;
      iter = 0;
    } else if (l == n - 1) {
      auto [e1, e2] = eig2(h(n - 1, n - 1), h(n - 1, n), h(n, n - 1), h(n, n));
      out[n - 1] = e1 + exshift;
      out[n] = e2 + exshift;
      n -= 2;
      iter = 0;
    } else {
      if (iter >= max_iter) {
        SpectrumResult partial;
        partial.eigenvalues = out;
        throw EigenError("eig: QR iteration did not converge" + context, std::move(partial));
      }
      x = h(n, n);
      y = h(n - 1, n - 1);
      w = h(n, n - 1) * h(n - 1, n);
      if (iter == 10 || iter == 40) {
        exshift += x;
        for (int i = low; i <= n; ++i) h(i, i) -= x;
        s = std::abs(h(n, n - 1)) + std::abs(h(n - 1, n - 2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      if (iter == 20 || iter == 50) {
        s = (y - x) / 2.0;
        s = s * s + w;
        if (s > 0) {
          s = std::sqrt(s);
          if (y < x) s = -s;
          s = x - w / ((y - x) / 2.0 + s);
          for (int i = low; i <= n; ++i) h(i, i) -= s;
          exshift += s;
          x = y = w = 0.964;
        }
      }
      ++iter;

      int m = n - 2;
      while (m >= l) {
        z = h(m, m);
        r = x - z;
        s = y - z;
        p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
        q = h(m + 1, m + 1) - z - r - s;
        r = h(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        if (std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r)) <
            kEps * (std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) + std::abs(h(m + 1, m + 1)))))
          break;
        --m;
      }
      for (int i = m + 2; i <= n; ++i) {
        h(i, i - 2) = 0.0;
        if (i > m + 2) h(i, i - 3) = 0.0;
      }

      for (int k = m; k <= n - 1; ++k) {
        const bool notlast = (k != n - 1);
        if (k != m) {
          p = h(k, k - 1);
          q = h(k + 1, k - 1);
          r = notlast ? h(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        s = std::sqrt(p * p + q * q + r * r);
        if (p < 0) s = -s;
        if (s == 0.0) continue;
        if (k != m) {
          h(k, k - 1) = -s * x;
        } else if (l != m) {
          h(k, k - 1) = -h(k, k - 1);
        }
        p += s;
        x = p / s;
        y = q / s;
        z = r / s;
        q /= p;
        r /= p;
        for (int j = k; j <= n; ++j) {
          p = h(k, j) + q * h(k + 1, j);
          if (notlast) {
            p += r * h(k + 2, j);
            h(k + 2, j) -= p * z;
          }
          h(k, j) -= p * x;
          h(k + 1, j) -= p * y;
        }
        const int imax = std::min(n, k + 3);
        for (int i = l; i <= imax; ++i) {
          p = x * h(i, k) + y * h(i, k + 1);
          if (notlast) {
            p += z * h(i, k + 2);
            h(i, k + 2) -= p * r;
          }
          h(i, k) -= p;
          h(i, k + 1) -= p * q;
        }
      }
    }
  }
}

// One eigenvector of an upper Hessenberg matrix by two steps of inverse
// iteration with a complex shift.
std::vector<cplx> inverse_iteration(const Matrix& h, cplx lambda, double norm, std::vector<cplx>& u) {
  const int n = static_cast<int>(h.rows());
  const std::size_t nz = static_cast<std::size_t>(n);
  u.assign(nz * nz, cplx(0.0, 0.0));
  auto U = [&](int i, int j) -> cplx& { return u[static_cast<std::size_t>(i) * nz + static_cast<std::size_t>(j)]; };
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) U(i, j) = h(i, j);
  for (int i = 0; i < n; ++i) U(i, i) -= lambda;

  const double tiny = std::max(norm, 1e-300) * kEps;
  std::vector<cplx> mult(nz, 0.0);
  std::vector<char> swapped(nz, 0);
  for (int j = 0; j + 1 < n; ++j) {
    if (std::abs(U(j + 1, j)) > std::abs(U(j, j))) {
      for (int c = j; c < n; ++c) std::swap(U(j, c), U(j + 1, c));
      swapped[j] = 1;
    }
    if (U(j, j) == 0.0) U(j, j) = tiny;
    const cplx l = U(j + 1, j) / U(j, j);
    mult[j] = l;
    if (l != 0.0)
      for (int c = j + 1; c < n; ++c) U(j + 1, c) -= l * U(j, c);
    U(j + 1, j) = 0.0;
  }
  if (U(n - 1, n - 1) == 0.0) U(n - 1, n - 1) = tiny;

  auto back_substitute = [&](std::vector<cplx>& b) {
    for (int i = n - 1; i >= 0; --i) {
      cplx s = b[i];
      for (int c = i + 1; c < n; ++c) s -= U(i, c) * b[c];
      b[i] = s / U(i, i);
    }
  };
  auto normalize = [&](std::vector<cplx>& b) {
    double mx = 0.0;
    for (const cplx& v : b) mx = std::max(mx, std::abs(v));
    if (mx > 0 && std::isfinite(mx))
      for (cplx& v : b) v /= mx;
  };

  std::vector<cplx> y(nz, cplx(1.0, 0.0));
  back_substitute(y);
  normalize(y);
  for (int j = 0; j + 1 < n; ++j) {
    if (swapped[j]) std::swap(y[j], y[j + 1]);
    y[j + 1] -= mult[j] * y[j];
  }
  back_substitute(y);
  normalize(y);
  return y;
}

// Eigenvalues (and optionally the residual bound) of one decoupled block.
void solve_block(const Matrix& block, const EigOptions& opts, double full_norm, std::vector<cplx>& values,
                 double& residual) {
  const int n = static_cast<int>(block.rows());
  Balanced bal = balance(block);
  Matrix q;
  hessenberg(bal.a, bal.low, bal.high, opts.residual ? &q : nullptr);
  Matrix hess = opts.residual ? bal.a : Matrix();
  hqr(bal.a, bal.low, bal.high, opts.max_iterations, values,
      " (block of size " + std::to_string(n) + ")");
  if (!opts.residual) return;

  const double hnorm = hess.frobenius_norm();
  std::vector<cplx> work;
  std::vector<cplx> x(static_cast<std::size_t>(n));
  std::vector<cplx> r(static_cast<std::size_t>(n));
  for (const cplx& lambda : values) {
    std::vector<cplx> y = inverse_iteration(hess, lambda, hnorm, work);
    for (int i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (int j = 0; j < n; ++j) s += q(i, j) * y[j];
      x[i] = s * bal.scale[i];
    }
    for (auto it = bal.swaps.rbegin(); it != bal.swaps.rend(); ++it) std::swap(x[it->first], x[it->second]);
    double xn = 0.0;
    double rn = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx s = -lambda * x[i];
      for (int j = 0; j < n; ++j) s += block(i, j) * x[j];
      r[i] = s;
      rn += std::norm(s);
      xn += std::norm(x[i]);
    }
    const double denom = full_norm * std::sqrt(xn);
    const double rel = denom > 0 ? std::sqrt(rn) / denom : std::sqrt(rn);
    residual = std::max(residual, rel);
  }
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

SpectrumResult eig(const Matrix& m, const EigOptions& opts) {
  if (!m.square()) throw std::invalid_argument("eig: matrix must be square");
  if (m.rows() == 0) throw std::invalid_argument("eig: matrix must be non-empty");
  if (!m.all_finite()) throw std::invalid_argument("eig: matrix has non-finite entries");
  const int n = static_cast<int>(m.rows());

  SpectrumResult res;
  res.matrix_norm = m.frobenius_norm();
  res.eigenvalues.assign(static_cast<std::size_t>(n), cplx(std::numeric_limits<double>::quiet_NaN(), 0.0));
  if (opts.residual) res.residual_bound = 0.0;

  // Connected components of the coupling graph give decoupled blocks.
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (m(i, j) != 0.0 || m(j, i) != 0.0) {
        const int a = find_root(parent, i);
        const int b = find_root(parent, j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) groups[find_root(parent, i)].push_back(i);

  for (const auto& g : groups) {
    if (g.empty()) continue;
    const std::size_t sz = g.size();
    if (sz == 1) {
      res.eigenvalues[g[0]] = m(g[0], g[0]);
      continue;
    }
    Matrix block(sz, sz);
    for (std::size_t a = 0; a < sz; ++a)
      for (std::size_t b = 0; b < sz; ++b) block(a, b) = m(g[a], g[b]);
    std::vector<cplx> values;
    try {
      solve_block(block, opts, res.matrix_norm, values, res.residual_bound);
    } catch (const EigenError& e) {
      const auto& part = e.partial().eigenvalues;
      for (std::size_t a = 0; a < sz && a < part.size(); ++a) res.eigenvalues[g[a]] = part[a];
      throw EigenError(e.what(), res);
    }
    for (std::size_t a = 0; a < sz; ++a) res.eigenvalues[g[a]] = values[a];
  }
  return res;
}

std::vector<double> real_roots(const std::vector<double>& coeffs, double lo, double hi) {
  std::vector<double> c = coeffs;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  std::vector<double> roots;
  if (c.size() < 2) return roots;
  const int d = static_cast<int>(c.size()) - 1;
  Matrix comp(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) comp(0, j) = -c[static_cast<std::size_t>(d - 1 - j)] / c.back();
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  EigOptions o;
  o.residual = false;
  const SpectrumResult r = eig(comp, o);
  auto eval = [&](double x, double& dp) {
    double p = 0.0;
    dp = 0.0;
    for (int i = d; i >= 0; --i) {
      dp = dp * x + p;
      p = p * x + c[static_cast<std::size_t>(i)];
    }
    return p;
  };
  for (const cplx& z : r.eigenvalues) {
    if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z))) continue;
    double x = z.real();
    for (int it = 0; it < 4; ++it) {
      double dp = 0.0;
      const double p = eval(x, dp);
      if (dp == 0.0) break;
      x -= p / dp;
    }
    if (x >= lo && x <= hi) roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace zonal::spectra
