#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zonalstab/spectral_field.hpp"
#include "zonalstab/sphere_transform.hpp"

namespace zonal::dynamics {

/// Multiply each degree by -lambda_l.
SpectralField laplacian(const SpectralField& f);
/// Divide each degree l >= 1 by -lambda_l. Rejects |c_00| > 1e-12.
SpectralField inv_laplacian(const SpectralField& w);
/// Keeps the m = 0 coefficients (the average over rotations about x3).
SpectralField zonal_project(const SpectralField& f);

/// x3 = sqrt(4 pi / 3) Y_1^0.
SpectralField x3_field(int L);
/// Re Y_l^m for m > 0, Y_l^0 for m = 0.
SpectralField real_harmonic(int L, int ell, int m);
/// Re (x1 + i x2)^k, a degree-k eigenfunction of the Laplacian.
SpectralField sectoral_harmonic(int L, int k);

/// Vorticity w = Delta f of the stationary flow with stream function
/// f = Omega / (lambda_k - 2) x3 + g_k. g_k defaults to Re (x1 + i x2)^k and
/// must be a degree-k harmonic when supplied.
SpectralField stationary_fixture(int k, double Omega, int L, const std::optional<SpectralField>& g_k = std::nullopt);

/// sqrt(sum (1 + lambda_l)^{-s} |c_lm|^2).
double weak_norm(const SpectralField& f, double s);

struct LedgerRow {
  double time = 0.0;
  double energy = 0.0;      // |grad f|^2 integrated
  double xi_moment = 0.0;   // integral of x3 w
  double casimir2 = 0.0;    // integral of (w - Omega chi)^2
  double sup_q = 0.0;       // max over the grid of |w - Omega chi|
};

struct Trajectory {
  double Omega = 0.0;
  double dt = 0.0;  // step actually used
  std::vector<double> times;
  std::vector<SpectralField> snapshots;
  std::vector<LedgerRow> ledger;
  std::vector<std::string> warnings;
};

class CflError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvolveOptions {
  double c_cfl = 0.5;
  int max_halvings = 4;
  bool store_snapshots = true;
};

/// Pseudo-spectral vorticity dynamics on the rotating unit sphere,
///   dw/dt = -J(f, w - Omega chi),  f = Delta^{-1} w,
/// with J(f, g) = f_psi g_x3 - f_x3 g_psi. The grid is large enough for
/// triple products at truncation L to be integrated exactly.
class VorticitySystem {
 public:
  explicit VorticitySystem(int L);

  int truncation() const { return transform_.truncation(); }
  const SphereTransform& transform() const { return transform_; }
  const SpectralField& chi() const { return chi_; }

  SpectralField jacobian(const SpectralField& f, const SpectralField& g) const;
  SpectralField rhs(const SpectralField& w, double Omega, const SpectralField& chi) const;
  SpectralField rhs(const SpectralField& w, double Omega) const { return rhs(w, Omega, chi_); }
  SpectralField step_rk4(const SpectralField& w, double dt, double Omega) const;

  /// max over the grid of |u|, u = J grad f.
  double max_speed(const SpectralField& w) const;
  LedgerRow ledger(double t, const SpectralField& w, double Omega) const;

  /// Fixed-step RK4 from w0 over [0, T]; snapshots and ledger every
  /// sample_every steps and at T.
  Trajectory evolve(const SpectralField& w0, double Omega, double T, double dt, int sample_every,
                    const EvolveOptions& opts = {}) const;

 private:
  SphereTransform transform_;
  SpectralField chi_;
};

/// (1/T) integral over [S, S + T] of the stored snapshots by the trapezoid
/// rule, interpolating linearly at window ends that fall between samples.
SpectralField time_average(const Trajectory& traj, double S, double T);

void write_ledger_csv(std::ostream& out, const std::vector<LedgerRow>& rows);

/// Initial-data description for the rotation-decay experiment.
struct DecayFixture {
  int L = 31;
  double dt = 1e-3;
  double T = 10.0;
  int sample_every = 5;
  double weak_order = 3.0;
  std::vector<double> omegas;
  SpectralField w0;
};

/// key=value lines (L, dt, T, omegas, sample_every, weak_order) and
/// coefficient lines "l,m,re,im" giving c_{l,m} of w for m >= 0; the
/// negative-m partners follow from reality. '#' starts a comment.
DecayFixture parse_fixture(std::istream& in);
DecayFixture load_fixture(const std::string& path);
/// The shipped fixture: w = Re Y_2^1 + 0.5 Re Y_3^2, L = 31, T = 10.
const std::string& canonical_fixture_text();

struct DecayPoint {
  double Omega = 0.0;
  double weak_norm = 0.0;
};

struct DecayResult {
  std::vector<DecayPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<std::string> warnings;
};

/// Least-squares slope of log y against log x.
std::pair<double, double> loglog_fit(std::span<const double> x, std::span<const double> y);

/// For each Omega: evolve, average over [0, T], and measure the non-zonal part
/// with weak_norm of the given order. Runs the Omega values in parallel.
DecayResult omega_decay(const DecayFixture& fx, int threads = 0);

}  // namespace zonal::dynamics
