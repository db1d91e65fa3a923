#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "zonalstab/matrix.hpp"

namespace zonal::spectra {

using cplx = std::complex<double>;

struct EigOptions {
  /// Compute eigenvectors by inverse iteration and report the residual bound.
  bool residual = true;
  /// QR sweeps allowed per eigenvalue before giving up.
  int max_iterations = 60;
};

struct SpectrumResult {
  std::vector<cplx> eigenvalues;
  /// max over computed pairs of |M v - lambda v| / (|M|_F |v|); NaN when not computed.
  double residual_bound = std::numeric_limits<double>::quiet_NaN();
  double matrix_norm = 0.0;  // Frobenius
};

class EigenError : public std::runtime_error {
 public:
  EigenError(const std::string& what, SpectrumResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  /// Eigenvalues that converged before the failure; the rest are NaN.
  const SpectrumResult& partial() const { return partial_; }

 private:
  SpectrumResult partial_;
};

/// All eigenvalues of a dense real square matrix. The matrix is split into
/// decoupled blocks, balanced (permutation + power-of-two scaling), reduced to
/// Hessenberg form and iterated with Francis double-shift QR.
SpectrumResult eig(const Matrix& m, const EigOptions& opts = {});

/// Real roots of a polynomial (ascending coefficients) inside [lo, hi], via
/// the companion matrix.
std::vector<double> real_roots(const std::vector<double>& coeffs, double lo, double hi);

}  // namespace zonal::spectra
