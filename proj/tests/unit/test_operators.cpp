#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "zonalstab/operators.hpp"

using namespace zonal;
using namespace zonal::ops;

namespace {

double lam(int l) { return double(l) * (l + 1); }

// a_l^2 for k = 1, written out in closed form.
double q(int l) { return double(l + 1) * (l - 1) / ((2.0 * l + 1) * (2.0 * l - 1)); }

double max_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

}  // namespace

TEST_CASE("mult_matrix examples") {
  const Matrix x = mult_matrix(1, {0.0, 1.0}, 3);
  const double a2 = std::sqrt(1.0 / 5), a3 = std::sqrt(8.0 / 35);
  Matrix want(3, 3);
  want(0, 1) = want(1, 0) = a2;
  want(1, 2) = want(2, 1) = a3;
  CHECK(max_diff(x, want) < 1e-15);

  const Matrix x2 = mult_matrix(1, {0.0, 0.0, 1.0}, 1);
  CHECK(std::abs(x2(0, 0) - 0.2) < 1e-15);

  const Matrix one = mult_matrix(2, {1.0}, 4);
  CHECK(max_diff(one, Matrix::identity(4)) == 0.0);
  CHECK_THROWS(mult_matrix(-1, {1.0}, 3));
}

TEST_CASE("sector operator examples for nu = 2") {
  const double a2 = std::sqrt(1.0 / 5), a3 = std::sqrt(8.0 / 35);
  const auto op = sector_operator(legendre_model(2, 0.0), 1, 3);
  Matrix want(3, 3);
  want(1, 0) = -2 * a2;
  want(1, 2) = a3 / 2;
  CHECK(max_diff(op.entries, want) < 1e-15);
  CHECK(std::abs(op.entries(1, 0) + 0.894427191) < 1e-9);

  const double Om = 1.7;
  const auto op2 = sector_operator(legendre_model(2, Om), 1, 2);
  Matrix want2(2, 2);
  want2(0, 0) = -Om / 2;
  want2(1, 0) = -2 * a2;
  want2(1, 1) = -Om / 6;
  CHECK(max_diff(op2.entries, want2) < 1e-15);
  CHECK_THROWS_AS(sector_operator(legendre_model(2), 0, 3), std::invalid_argument);
}

TEST_CASE("closed-form 6x6 truncation for P3(V1)") {
  auto b = [](int l) { return std::sqrt(q(l)) * std::sqrt(double(l) * (l - 2) / ((2.0 * l - 1) * (2.0 * l - 3))); };
  auto c = [](int l) { return q(l) + double(l) * (l + 2) / ((2.0 * l + 1) * (2.0 * l + 3)); };
  for (double Om : {0.0, 0.37, 3.0}) {
    // x^2 in the zeta basis, l = 1..6
    Matrix X2(6, 6);
    for (int l = 1; l <= 6; ++l) {
      X2(l - 1, l - 1) = c(l);
      if (l + 2 <= 6) X2(l - 1, l + 1) = X2(l + 1, l - 1) = b(l + 2);
    }
    Matrix want(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        const double first = X2(i, j) - (i == j ? 0.2 : 0.0);
        const double second = (i == j) ? -(Om - 12.0 / 5) / lam(j + 1) : 0.0;
        const double third = -12.0 * X2(i, j) / lam(j + 1);
        want(i, j) = first + second + third;
      }
    const auto op = sector_operator(legendre_model(3, Om), 1, 6);
    CHECK(max_diff(op.entries, want) < 1e-12);
  }
}

TEST_CASE("closed-form 6x6 truncation for P4(V1)") {
  auto b = [](int l) {
    return std::sqrt(q(l)) * (double(l) * (l - 2) / ((2.0 * l - 1) * (2.0 * l - 3)) + q(l) +
                              double(l + 2) * l / ((2.0 * l + 3) * (2.0 * l + 1)) - 3.0 / 7);
  };
  auto c = [](int l) {
    return std::sqrt(q(l)) * std::sqrt(double(l) * (l - 2) / ((2.0 * l - 1) * (2.0 * l - 3))) *
           std::sqrt(double(l - 1) * (l - 3) / ((2.0 * l - 3) * (2.0 * l - 5)));
  };
  Matrix A(6, 6);
  for (int l = 2; l <= 6; ++l) A(l - 2, l - 1) = A(l - 1, l - 2) = b(l);
  for (int l = 4; l <= 6; ++l) A(l - 4, l - 1) = A(l - 1, l - 4) = c(l);
  for (double Om : {0.0, 0.1, 7.5}) {
    Matrix want(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        want(i, j) = A(i, j) - (i == j ? Om / lam(j + 1) : 0.0) - 20.0 * A(i, j) / lam(j + 1);
    const auto op = sector_operator(legendre_model(4, Om), 1, 6);
    CHECK(max_diff(op.entries, want) < 1e-12);
  }
}

TEST_CASE("column-scaling law, bandwidth and nesting") {
  for (int nu : {2, 3, 4})
    for (int k : {1, 2, 3}) {
      const double Om = 0.9;
      const int N = 24;
      const auto op = sector_operator(legendre_model(nu, Om), k, N);
      const Matrix Am = mult_matrix(k, legendre_a(nu), N);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          const double lj = lam(op.spec.ell(j));
          const double want = Am(i, j) * (1 - lam(nu) / lj) - (i == j ? Om / lj : 0.0);
          CHECK(std::abs(op.entries(i, j) - want) < 1e-14);
          if (i != j && (std::abs(i - j) > nu - 1 || (std::abs(i - j) + nu - 1) % 2)) CHECK(op.entries(i, j) == 0.0);
        }
      const auto small = sector_operator(legendre_model(nu, Om), k, N - 2);
      CHECK(max_diff(op.entries.leading_block(N - 2, N - 2), small.entries) == 0.0);
    }
}

TEST_CASE("general zonal model reproduces the Legendre models") {
  for (int nu : {2, 3, 4}) {
    // f' = A  =>  w' = ((1-x^2) A)'' = -lambda_nu A for Legendre A
    const Poly f = poly::integral(legendre_a(nu));
    const auto gz = general_zonal(f, 0.6);
    const auto lm = legendre_model(nu, 0.6);
    for (double x : {-0.9, -0.2, 0.4, 1.0}) {
      CHECK(std::abs(poly::eval(gz.w_prime(), x) - poly::eval(lm.w_prime(), x)) < 1e-13);
      CHECK(std::abs(poly::eval(gz.B(), x) - poly::eval(lm.B(), x)) < 1e-13);
    }
    const auto a = sector_operator(gz, 1, 12);
    const auto b = sector_operator(lm, 1, 12);
    CHECK(max_diff(a.entries, b.entries) < 1e-13);
  }
  CHECK(std::abs(poly::eval(legendre_model(3).B(), 0.0) - (-2.4)) < 1e-15);
}

TEST_CASE("criteria examples") {
  const auto grid = interior_grid();
  SUBCASE("rayleigh") {
    CHECK(rayleigh_check(legendre_model(2, 3.0), grid).holds);
    CHECK_FALSE(rayleigh_check(legendre_model(2, 7.0), grid).holds);
    CHECK_FALSE(rayleigh_check(legendre_model(3, 9.6), grid).holds);
    CHECK(std::abs(rayleigh_bound(legendre_model(2)) - 6.0) < 1e-12);
    CHECK(std::abs(rayleigh_bound(legendre_model(3)) - 2.4) < 1e-12);
  }
  SUBCASE("fjortoft") {
    const auto m0 = legendre_model(2, 0.0);
    CHECK(fjortoft_check(m0, grid, k_grid(m0)).holds);
    const auto cst = custom_model({0.3}, {0.0, 1.0});
    CHECK_FALSE(fjortoft_check(cst, grid, k_grid(cst)).holds);
    const auto anti = custom_model({0.0, -1.0, 0.5}, {0.0, 1.0, -0.5});
    CHECK_FALSE(fjortoft_check(anti, grid, k_grid(anti)).holds);
    // zero of B away from any uniform K node
    const auto anti2 = custom_model({0.3137, -1.0}, {-0.3137, 1.0});
    const auto kg = k_grid(anti2, 2001);
    CHECK(kg.size() == 2002);
    CHECK_FALSE(fjortoft_check(anti2, grid, kg).holds);
  }
  SUBCASE("arnold") {
    const auto sph = geometry::sphere_profile();
    const auto geo = geometry::xi(sph, geometry::uniform_grid(sph, 2001));
    CHECK(arnold_check(legendre_model(2, 7.0), geo).holds);
    CHECK_FALSE(arnold_check(legendre_model(2, 3.0), geo).holds);
    CHECK(std::abs(arnold_bound(legendre_model(4), geo) - 20.0 * 4.0 / 7) < 1e-6);
    const auto e = geometry::ellipsoid_profile(2.0);
    const auto ge = geometry::xi(e, geometry::uniform_grid(e, 2001));
    CHECK(std::isfinite(arnold_bound(legendre_model(3), ge)));
  }
  SUBCASE("report") {
    const auto sph = geometry::sphere_profile();
    const auto geo = geometry::xi(sph, geometry::uniform_grid(sph, 2001));
    const auto r = criteria(legendre_model(2, 7.0), 1, geo);
    CHECK_FALSE(r.rayleigh.holds);
    CHECK_FALSE(r.fjortoft.holds);
    CHECK(r.arnold.holds);
  }
}

TEST_CASE("fjortoft implies rayleigh on random models") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto grid = interior_grid(801);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Poly f(5);
    for (double& c : f) c = u(rng);
    const auto m = general_zonal(f, 3.0 * u(rng));
    const bool fj = fjortoft_check(m, grid, k_grid(m, 401)).holds;
    const bool ra = rayleigh_check(m, grid).holds;
    violations += fj && !ra;
  }
  CHECK(violations == 0);
}

TEST_CASE("real spectrum guard") {
  auto g = real_spectrum_guard(legendre_model(2, 0.3), 2);
  REQUIRE(g);
  CHECK(g->clause == "lambda_nu_le_lambda_k");
  CHECK(real_spectrum_guard(legendre_model(3, 0.0), 3));
  CHECK(real_spectrum_guard(legendre_model(4, 0.0), 5));
  CHECK_FALSE(real_spectrum_guard(legendre_model(3, 0.0), 1));
  g = real_spectrum_guard(legendre_model(2, 7.0), 1);
  REQUIRE(g);
  CHECK(g->clause == "no_sign_change");
  CHECK_FALSE(real_spectrum_guard(legendre_model(4, 1.0), 2));
}

TEST_CASE("matrix text export") {
  std::ostringstream out;
  Matrix m(2, 2);
  m(0, 0) = 0.1;
  m(1, 1) = -2.0;
  write_matrix_text(out, m);
  CHECK(out.str() == "0.10000000000000001 0\n0 -2\n");
}
