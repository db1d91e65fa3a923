#include "zonalstab/polynomial.hpp"

#include <algorithm>
#include <cstdio>

#include "zonalstab/eigensolver.hpp"

namespace zonal::poly {

double eval(const Poly& p, double x) {
  double s = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
  return s;
}

Poly derivative(const Poly& p) {
  if (p.size() <= 1) return {};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
  return d;
}

Poly integral(const Poly& p) {
  Poly q(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) q[i + 1] = p[i] / static_cast<double>(i + 1);
  return q;
}

Poly add(const Poly& a, const Poly& b) {
  Poly s(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) s[i] += b[i];
  return s;
}

Poly scale(const Poly& a, double s) {
  Poly out = a;
  for (double& c : out) c *= s;
  return out;
}

Poly multiply(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly trimmed(Poly p) {
  while (!p.empty() && p.back() == 0.0) p.pop_back();
  return p;
}

int degree(const Poly& p) { return static_cast<int>(trimmed(p).size()) - 1; }

Poly zonal_laplacian(const Poly& f) {
  return derivative(multiply(Poly{1.0, 0.0, -1.0}, derivative(f)));
}

std::pair<double, double> range(const Poly& p, double lo, double hi) {
  double mn = std::min(eval(p, lo), eval(p, hi));
  double mx = std::max(eval(p, lo), eval(p, hi));
  for (double x : spectra::real_roots(derivative(p), lo, hi)) {
    const double v = eval(p, x);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return {mn, mx};
}

std::string to_string(const Poly& p) {
  std::string s;
  char buf[64];
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ',';
    std::snprintf(buf, sizeof buf, "%.17g", p[i]);
    s += buf;
  }
  return s;
}

}  // namespace zonal::poly
