#pragma once

#include <string>
#include <utility>
#include <vector>

namespace zonal::poly {

/// Coefficients in ascending powers of x3: p(x) = sum_i c[i] x^i.
using Poly = std::vector<double>;

double eval(const Poly& p, double x);
Poly derivative(const Poly& p);
/// Antiderivative with zero constant term.
Poly integral(const Poly& p);
Poly add(const Poly& a, const Poly& b);
Poly scale(const Poly& a, double s);
Poly multiply(const Poly& a, const Poly& b);
/// Trailing zero coefficients removed; the zero polynomial becomes {}.
Poly trimmed(Poly p);
int degree(const Poly& p);

/// Zonal Laplacian on the unit sphere, ((1 - x^2) f')'.
Poly zonal_laplacian(const Poly& f);

/// Exact min and max of p on [lo, hi] from endpoints and critical points.
std::pair<double, double> range(const Poly& p, double lo, double hi);

std::string to_string(const Poly& p);

}  // namespace zonal::poly
