#include "zonalstab/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace zonal::basis {

double ladder_value(int k, int ell) {
  if (ell <= k) return 0.0;
  const double l = ell;
  const double kk = k;
  return std::sqrt((l + kk) * (l - kk) / ((2.0 * l + 1.0) * (2.0 * l - 1.0)));
}

double LadderCoefficients::operator()(int ell) const {
  if (ell <= k) return 0.0;
  if (ell > ell_max)
    throw std::out_of_range("ladder coefficient a_" + std::to_string(ell) + " beyond ell_max " +
                            std::to_string(ell_max));
  return values[static_cast<std::size_t>(ell - k)];
}

LadderCoefficients ladder_coefficients(int k, int ell_max) {
  if (k < 1) throw std::invalid_argument("ladder_coefficients: k must be >= 1");
  if (ell_max < k) throw std::invalid_argument("ladder_coefficients: ell_max must be >= k");
  LadderCoefficients out;
  out.k = k;
  out.ell_max = ell_max;
  out.values.reserve(static_cast<std::size_t>(ell_max - k + 1));
  for (int ell = k; ell <= ell_max; ++ell) out.values.push_back(ladder_value(k, ell));
  return out;
}

QuadratureRule gauss_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_rule: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Largest root first; mirrored below.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) throw std::runtime_error("gauss_rule: Newton iteration did not converge");
    // Recompute derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    } else {
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    rule.weights[static_cast<std::size_t>(i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

SectorBasisSpec sector_basis(int k, int n) {
  if (k < 0) throw std::invalid_argument("sector_basis: k must be >= 0");
  if (n < 1) throw std::invalid_argument("sector_basis: size must be >= 1");
  SectorBasisSpec spec;
  spec.k = k;
  spec.ell_min = std::max(k, 1);
  spec.size = n;
  spec.norms.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int ell = spec.ell(j);
    // n_l^2 = (2l+1)/2 * (l-k)!/(l+k)!
    const double log_n2 = std::log((2.0 * ell + 1.0) / 2.0) + std::lgamma(ell - k + 1.0) -
                          std::lgamma(ell + k + 1.0);
    spec.norms.push_back(std::exp(0.5 * log_n2));
  }
  return spec;
}

void normalized_legendre_column(int m, int lmax, double x, std::span<double> out) {
  if (m < 0 || lmax < m) throw std::invalid_argument("normalized_legendre_column: need 0 <= m <= lmax");
  if (out.size() < static_cast<std::size_t>(lmax - m + 1))
    throw std::invalid_argument("normalized_legendre_column: output too short");
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  double seed = std::sqrt(0.5);
  for (int j = 1; j <= m; ++j) seed *= std::sqrt((2.0 * j + 1.0) / (2.0 * j)) * s;
  out[0] = seed;
  if (lmax == m) return;
  double prev = 0.0;
  double cur = seed;
  for (int ell = m; ell < lmax; ++ell) {
    const double next = (x * cur - ladder_value(m, ell) * prev) / ladder_value(m, ell + 1);
    prev = cur;
    cur = next;
    out[static_cast<std::size_t>(ell + 1 - m)] = cur;
  }
}

Matrix evaluate_sector_basis(const SectorBasisSpec& spec, std::span<const double> x) {
  Matrix out(x.size(), static_cast<std::size_t>(spec.size));
  const int lmax = spec.ell_last();
  std::vector<double> column(static_cast<std::size_t>(lmax - spec.k + 1));
  const int offset = spec.ell_min - spec.k;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(std::abs(x[i]) <= 1.0))
      throw std::domain_error("evaluate_sector_basis: abscissa outside [-1, 1]");
    normalized_legendre_column(spec.k, lmax, x[i], column);
    for (int j = 0; j < spec.size; ++j)
      out(i, static_cast<std::size_t>(j)) = column[static_cast<std::size_t>(j + offset)];
  }
  return out;
}

}  // namespace zonal::basis
