#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "zonalstab/eigensolver.hpp"
#include "zonalstab/operators.hpp"

namespace zonal::spectra {

/// Imaginary parts at or below tau count as real: tau = 1e-8 |M|_F.
constexpr double kRealCutoff = 1e-8;
inline double tau_real(double frobenius_norm) { return kRealCutoff * frobenius_norm; }

struct ImagSummary {
  double value = 0.0;  // max(0, max Im)
  int count = 0;       // eigenvalues with Im > tau
};

ImagSummary max_imag(const SpectrumResult& r, double tau);

/// Descending imaginary part, ties broken by ascending real part.
std::vector<cplx> sorted_by_imag(std::vector<cplx> values);

struct SweepOptions {
  int threads = 0;
  /// Skip the eigensolve when real_spectrum_guard certifies the sector.
  bool use_guard = true;
  /// Compute eigenvector residuals (slower).
  bool residual = false;
  int top = 8;
};

struct SweepRecord {
  double Omega = 0.0;
  int N = 0;
  double max_imag = 0.0;
  int unstable_count = 0;
  double tau = 0.0;
  double residual_bound = 0.0;  // NaN unless residuals were requested
  std::vector<cplx> top;
  /// "ok", "guarded:<clause>" or "error:<message>".
  std::string status = "ok";
  bool failed() const { return status.rfind("error", 0) == 0; }
};

/// One eigensolve of M_k at the model's Omega.
SweepRecord evaluate(const ops::ZonalModel& model, int k, int N, const SweepOptions& opts = {});

/// Records in input order; solver failures are reported per point.
std::vector<SweepRecord> omega_sweep(const ops::ZonalModel& model, int k, std::span<const double> omegas, int N,
                                     const SweepOptions& opts = {});

struct ConvergenceResult {
  std::vector<SweepRecord> records;  // one per N
  /// |max_imag(N_i) - max_imag(N_{i-1})| < tol; false for the first entry.
  std::vector<bool> step_converged;
  /// First N from which every later step converged; -1 if none.
  int converged_from = -1;
  double tol = 1e-8;
};

ConvergenceResult n_convergence(const ops::ZonalModel& model, int k, std::span<const int> N_list,
                                const SweepOptions& opts = {}, double tol = 1e-8);

struct OmegaRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.1;
  /// start, start + step, ...; the grid point nearest stop (within half a
  /// step) is replaced by stop itself.
  std::vector<double> values() const;
};

/// Parses "start:stop:step".
OmegaRange parse_omega_range(const std::string& text);

struct ThresholdResult {
  double Omega_star = 0.0;
  /// Last unstable and first stable scan points around the final crossing.
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// No instability anywhere in the range: Omega_star = range start.
  bool degenerate = false;
  /// Still unstable at the end of the range: Omega_star = range stop.
  bool unresolved = false;
  std::vector<SweepRecord> scan;
  std::vector<SweepRecord> bisection;
};

/// Largest crossing of (max_imag - tau) on the range, refined by bisection
/// to tol. The scan walks the grid downward from the top and stops at the
/// first unstable point, which is the last unstable grid point of the full
/// grid; points certified by the real-spectrum guard cost nothing.
ThresholdResult threshold(const ops::ZonalModel& model, int k, const OmegaRange& range, int N, double tol = 1e-3,
                          const SweepOptions& opts = {});

/// Dense LU solve A X = B (partial pivoting).
Matrix solve(Matrix a, Matrix b);

/// exp(A) by scaling and squaring with the degree-13 Pade approximant.
/// Throws std::overflow_error when the result is not finite.
Matrix expm(const Matrix& a);

enum class Generator {
  real,         // exp(t M)
  oscillatory,  // exp(i t M), the propagator of Gamma_k = i k M with k absorbed into t
};

/// |exp(t M) v0| (or |exp(i t M) v0|) for each t.
std::vector<double> propagator_growth(const Matrix& m, std::span<const double> v0, std::span<const double> t_list,
                                      Generator gen = Generator::oscillatory);

/// CSV with columns <first>, max_imag, unstable_count, ev1_re, ev1_im, ...,
/// ev8_re, ev8_im, status.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records, const std::string& first,
                     int top = 8);

/// %.17g
std::string format_double(double v);

}  // namespace zonal::spectra
