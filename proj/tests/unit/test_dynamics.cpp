#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "zonalstab/dynamics.hpp"

using namespace zonal;
using namespace zonal::dynamics;

namespace {

SpectralField random_field(int L, int lmax, std::mt19937& rng, bool zonal_only = false) {
  std::normal_distribution<double> nd;
  SpectralField f(L);
  for (int l = 1; l <= lmax; ++l) {
    f(l, 0) = nd(rng) / (l * l);
    if (!zonal_only)
      for (int m = 1; m <= l; ++m) f.set_real_pair(l, m, cplx(nd(rng), nd(rng)) / double(l * l));
  }
  return f;
}

// The fixture used where a nonzero nonlinear term is needed; a single-degree
// field would be stationary.
SpectralField mixed_field(int L) { return real_harmonic(L, 2, 1) + 0.5 * real_harmonic(L, 3, 2); }

}  // namespace

TEST_CASE("laplacian") {
  const int L = 10;
  const auto x3 = x3_field(L);
  CHECK(laplacian(x3).max_abs_difference(-2.0 * x3) == 0.0);
  const auto p2 = real_harmonic(L, 2, 0);
  CHECK(laplacian(p2).max_abs_difference(-6.0 * p2) == 0.0);
  std::mt19937 rng(1);
  const auto f = random_field(L, L, rng);
  CHECK(inv_laplacian(laplacian(f)).max_abs_difference(f) < 1e-13);
  CHECK(inv_laplacian(f)(0, 0) == 0.0);
  SpectralField c(L);
  c(0, 0) = 1.0;
  CHECK_THROWS_AS(inv_laplacian(c), std::invalid_argument);
}

TEST_CASE("zonal projection") {
  const int L = 9;
  std::mt19937 rng(2);
  const auto u = random_field(L, L, rng);
  const auto p = zonal_project(u);
  CHECK(zonal_project(p).max_abs_difference(p) == 0.0);
  CHECK(zonal_project(laplacian(u)).max_abs_difference(laplacian(p)) == 0.0);
  CHECK(std::abs(p.norm2() + (u - p).norm2() - u.norm2()) < 1e-13 * u.norm2());
  CHECK(zonal_project(real_harmonic(L, 2, 2)).norm2() == 0.0);
  const auto z = random_field(L, L, rng, true);
  CHECK(zonal_project(z).max_abs_difference(z) == 0.0);
}

TEST_CASE("harmonics") {
  const int L = 6;
  const auto y = real_harmonic(L, 2, 1);
  CHECK(y.is_real());
  CHECK(y(2, 1) == cplx(0.5, 0.0));
  CHECK(y(2, -1) == cplx(-0.5, 0.0));
  // (x1 + i x2)^k has coefficient (-1)^k sqrt(2 pi) / (2 c_k) on Y_k^k with
  // c_k the normalization of Pbar_k^k; check through |.|^2 = integral.
  const SphereTransform tr(L);
  const auto s = sectoral_harmonic(L, 3);
  const auto g = tr.synthesize(s);
  std::vector<double> want(tr.grid_size());
  for (int j = 0; j < tr.nlat(); ++j)
    for (int i = 0; i < tr.nlon(); ++i) {
      const double x = tr.rule().nodes[j];
      const double r = std::sqrt(1 - x * x);
      want[std::size_t(j) * tr.nlon() + i] = std::pow(r, 3) * std::cos(3 * tr.longitude(i));
    }
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(g[i] - want[i]));
  CHECK(worst < 1e-13);
}

TEST_CASE("jacobian") {
  const int L = 8;
  const VorticitySystem sys(L);
  std::mt19937 rng(3);
  const auto f = random_field(L, 4, rng);
  const auto g = random_field(L, 4, rng);
  CHECK((sys.jacobian(f, g) + sys.jacobian(g, f)).norm2() < 1e-22);
  CHECK(sys.jacobian(f, f).norm2() < 1e-22);
  const auto z1 = random_field(L, L, rng, true);
  const auto z2 = random_field(L, L, rng, true);
  CHECK(sys.jacobian(z1, z2).norm2() < 1e-24);

  // f = x3: J(x3, g) = -d g / d psi
  SpectralField want(L);
  want.set_real_pair(1, 1, cplx(0.0, -0.5));
  CHECK(sys.jacobian(x3_field(L), real_harmonic(L, 1, 1)).max_abs_difference(want) < 1e-11);
}

TEST_CASE("rhs against a brute-force quadrature on a doubled grid") {
  const int L = 8;
  const VorticitySystem sys(L);
  const SphereTransform big(L, 2 * SphereTransform::min_nlat(L), 2 * SphereTransform::min_nlon(L));
  for (double Om : {0.0, 3.0}) {
    const auto w = mixed_field(L);
    const auto got = sys.rhs(w, Om);
    const auto f = inv_laplacian(w);
    const auto q = w - Om * x3_field(L);
    const std::size_t n = big.grid_size();
    std::vector<double> fp(n), fx(n), qp(n), qx(n), prod(n);
    big.synthesize_gradient(f, fp, fx);
    big.synthesize_gradient(q, qp, qx);
    for (std::size_t i = 0; i < n; ++i) prod[i] = -(fp[i] * qx[i] - fx[i] * qp[i]);
    const auto want = big.analyze(prod);
    CHECK(got.max_abs_difference(want) < 1e-12);
    CHECK(std::abs(got.norm2() - want.norm2()) < 1e-10 * want.norm2());
    CHECK(got.norm2() > 1e-4);
    CHECK(std::abs(got(0, 0)) < 1e-14);
  }
}

TEST_CASE("stationary solutions") {
  const int L = 12;
  const VorticitySystem sys(L);
  std::mt19937 rng(4);
  const auto z = random_field(L, L, rng, true);
  for (double Om : {0.0, 5.0}) {
    CHECK(sys.rhs(z, Om).norm2() < 1e-24);
    CHECK(sys.step_rk4(z, 1e-3, Om).max_abs_difference(z) < 1e-12);
  }
  for (auto [k, Om] : {std::pair{2, 4.0}, std::pair{3, 10.0}, std::pair{2, 0.0}, std::pair{4, 1.5}}) {
    const auto w = stationary_fixture(k, Om, L);
    CHECK(std::sqrt(sys.rhs(w, Om).norm2()) < 1e-11);
    CHECK(sys.step_rk4(w, 1e-3, Om).max_abs_difference(w) < 1e-11);
  }
  const auto f3 = inv_laplacian(stationary_fixture(3, 10.0, L));
  CHECK(std::abs(f3(1, 0) - std::sqrt(4 * M_PI / 3)) < 1e-14);
  CHECK_THROWS_AS(stationary_fixture(1, 1.0, L), std::invalid_argument);
  CHECK_THROWS_AS(stationary_fixture(2, 1.0, L, real_harmonic(L, 3, 1)), std::invalid_argument);
  CHECK(std::sqrt(sys.rhs(stationary_fixture(3, 2.0, L, real_harmonic(L, 3, 2)), 2.0).norm2()) < 1e-11);
}

TEST_CASE("weak norm") {
  SpectralField f(3);
  f(1, 1) = 1.0;
  CHECK(std::abs(weak_norm(f, 3) - std::pow(3.0, -1.5)) < 1e-15);
  CHECK(std::abs(weak_norm(f, 3) - 0.192450) < 1e-6);
  CHECK(weak_norm(SpectralField(3), 3) == 0.0);
  std::mt19937 rng(5);
  const auto g = random_field(5, 5, rng);
  CHECK(std::abs(weak_norm(g, 0) - std::sqrt(g.norm2())) < 1e-15);
  CHECK_THROWS(weak_norm(g, -1));
}

TEST_CASE("time average") {
  const int L = 4;
  std::mt19937 rng(6);
  const auto c = random_field(L, L, rng);
  Trajectory tr;
  tr.times = {0.0, 0.5, 1.0, 1.5};
  tr.snapshots = {c, c, c, c};
  CHECK(time_average(tr, 0.2, 1.1).max_abs_difference(c) < 1e-15);

  Trajectory two;
  two.times = {0.0, 1.0};
  two.snapshots = {c, -1.0 * c};
  CHECK(time_average(two, 0.0, 1.0).norm2() < 1e-30);
  // linear in time: average over [0.25, 0.75] of (1 - 2t) c is 0
  CHECK(time_average(two, 0.25, 0.5).norm2() < 1e-30);
  CHECK_THROWS_AS(time_average(two, 0.5, 1.0), std::out_of_range);
  CHECK_THROWS_AS(time_average(Trajectory{}, 0.0, 1.0), std::invalid_argument);

  const VorticitySystem sys(8);
  const auto w = stationary_fixture(2, 4.0, 8);
  const auto traj = sys.evolve(w, 4.0, 0.1, 1e-3, 10);
  const auto avg = time_average(traj, 0.0, 0.1);
  CHECK(avg.max_abs_difference(w) < 1e-11);
  CHECK((avg - zonal_project(avg)).max_abs_difference(w - zonal_project(w)) < 1e-11);
}

TEST_CASE("short evolution conserves the quadratic invariants") {
  const int L = 15;
  const VorticitySystem sys(L);
  std::mt19937 rng(8);
  const auto w0 = random_field(L, 6, rng);
  for (double Om : {0.0, 10.0}) {
    const auto traj = sys.evolve(w0, Om, 0.2, 1e-3, 20);
    REQUIRE(traj.ledger.size() == 11);
    CHECK(traj.times.back() == doctest::Approx(0.2));
    const auto& a = traj.ledger.front();
    const auto& b = traj.ledger.back();
    CHECK(std::abs(b.energy - a.energy) < 1e-10 * a.energy);
    CHECK(std::abs(b.casimir2 - a.casimir2) < 1e-10 * a.casimir2);
    CHECK(std::abs(b.xi_moment - a.xi_moment) < 1e-10 * std::max(1.0, std::abs(a.xi_moment)));
    CHECK(std::abs(b.sup_q - a.sup_q) < 0.02 * a.sup_q);
  }
  std::ostringstream csv;
  write_ledger_csv(csv, sys.evolve(w0, 0.0, 0.01, 1e-3, 5).ledger);
  CHECK(csv.str().rfind("time,energy,xi_moment,casimir2,sup_q\n", 0) == 0);
}

TEST_CASE("CFL control") {
  const int L = 15;
  const VorticitySystem sys(L);
  const auto w = 50.0 * mixed_field(L);
  const double umax = sys.max_speed(w);
  const double dt = 1.5 / (L * umax);
  const auto traj = sys.evolve(w, 0.0, 10 * dt, dt, 2);
  CHECK(traj.dt < dt);
  CHECK_FALSE(traj.warnings.empty());
  EvolveOptions strict;
  strict.max_halvings = 0;
  CHECK_THROWS_AS(sys.evolve(w, 0.0, 10 * dt, dt, 2, strict), CflError);
}

TEST_CASE("fixture parsing") {
  std::istringstream in(canonical_fixture_text());
  const auto fx = parse_fixture(in);
  CHECK(fx.L == 31);
  CHECK(fx.dt == 1e-3);
  CHECK(fx.T == 10.0);
  CHECK(fx.omegas == std::vector<double>{16, 32, 64, 128});
  CHECK(fx.w0.max_abs_difference(mixed_field(31)) == 0.0);

  std::ifstream shipped(ZONALSTAB_SOURCE_DIR "/data/canonical_decay.txt");
  REQUIRE(shipped);
  std::stringstream text;
  text << shipped.rdbuf();
  CHECK(text.str() == canonical_fixture_text());

  auto bad = [](const std::string& s) {
    std::istringstream i(s);
    return parse_fixture(i);
  };
  CHECK_THROWS_AS(bad("dt=1e-3\n2,1,1,0\n"), std::invalid_argument);
  CHECK_THROWS_AS(bad("L=8\nfoo=1\n"), std::invalid_argument);
  CHECK_THROWS_AS(bad("L=8\n2,1,1\n"), std::invalid_argument);
  CHECK_THROWS_AS(bad("L=8\n0,0,1,0\n"), std::invalid_argument);
  CHECK_THROWS_AS(bad("L=8\n2,0,1,1\n"), std::invalid_argument);
  CHECK_THROWS(bad("L=8\n9,1,1,0\n"));
  CHECK_THROWS(bad("L=8\ndt=-1\n"));
  CHECK_THROWS_AS(load_fixture("/nonexistent/fixture.txt"), std::ios_base::failure);
}

TEST_CASE("log-log fit") {
  const std::vector<double> x{1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
  const auto [slope, intercept] = loglog_fit(x, y);
  CHECK(std::abs(slope + 1.5) < 1e-14);
  CHECK(std::abs(intercept - std::log(3.0)) < 1e-14);
  CHECK_THROWS(loglog_fit(std::vector<double>{1}, std::vector<double>{1}));
}
