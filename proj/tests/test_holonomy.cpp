#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "catalog.hpp"
#include "larep/boundary.hpp"

using namespace larep;
using namespace larep::testing;

namespace {

double ndiff(const NumMat& a, const NumMat& b) { return gnorm(a - b); }

Superconnection adjoint_superconnection() { return Superconnection(so3_adjoint_connection()); }

/// Trivial flat connection on a rank-2 degree-0 bundle over so(3).
Superconnection trivial_superconnection() {
  GradedBundle b({{0, 2}});
  return Superconnection(EConnection(so3(), b));
}

NumMat simple_body(const GradedBundle& b, double lo) {
  GradedMatrix<double> m(b, b, 0);
  double x = lo;
  for (const auto& [k, r] : b.ranks) {
    Mat<double> blk(r, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) blk(i, j) = (i == j) ? (x += 0.3) : 0.1 * (x - 1);
    m.blocks[k] = blk;
  }
  return NumMat::unit(m);
}

}  // namespace

TEST_CASE("exponential of zero and of a diagonal body") {
  GradedBundle b({{0, 2}, {1, 1}});
  CHECK(ndiff(grassmann_exp(NumMat{}, b), gidentity(b)) < 1e-15);

  GradedMatrix<double> m(b, b, 0);
  Mat<double> d0(2, 2);
  d0(0, 0) = 0.7;
  d0(1, 1) = -1.3;
  Mat<double> d1(1, 1);
  d1(0, 0) = 2.0;
  m.blocks[0] = d0;
  m.blocks[1] = d1;
  NumMat e = grassmann_exp(NumMat::unit(m), b);
  const GradedMatrix<double>* body = e.find_term(0, 0);
  REQUIRE(body);
  CHECK(body->block(0)(0, 0) == doctest::Approx(std::exp(0.7)));
  CHECK(body->block(0)(1, 1) == doctest::Approx(std::exp(-1.3)));
  CHECK(body->block(1)(0, 0) == doctest::Approx(std::exp(2.0)));
}

TEST_CASE("exponential inverts and the inverse routine agrees") {
  GradedBundle b({{0, 2}, {1, 2}});
  NumMat x = simple_body(b, -0.4);
  GradedMatrix<double> odd(b, b, 1);
  Mat<double> o(2, 2);
  o(0, 1) = 0.8;
  o(1, 0) = -0.3;
  odd.blocks[0] = o;
  x += NumMat::term(0b1, odd);
  x += NumMat::term(0b110, 0.5 * odd);

  NumMat e = grassmann_exp(x, b);
  NumMat em = grassmann_exp(NumMat{} - x, b);
  CHECK(ndiff(e * em, gidentity(b)) < 1e-12);
  CHECK(ndiff(grassmann_inverse(e, b), em) < 1e-12);
  CHECK(ndiff(grassmann_inverse(e, b) * e, gidentity(b)) < 1e-12);
}

TEST_CASE("variation of the exponential against finite differences") {
  GradedBundle b({{0, 3}});
  NumMat x = simple_body(b, 0.1);
  GradedMatrix<double> h(b, b, 0);
  Mat<double> hm(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) hm(i, j) = 0.2 * static_cast<double>(i + 2 * j) - 0.5;
  h.blocks[0] = hm;
  NumMat dx = NumMat::unit(h);

  auto [e, de] = grassmann_exp_varied(x, dx, b);
  CHECK(ndiff(e, grassmann_exp(x, b)) < 1e-13);
  double prev = 0;
  for (double eps : {1e-3, 5e-4}) {
    NumMat fd = grassmann_exp(x + eps * dx, b) - e - eps * de;
    double err = gnorm(fd) / (eps * eps);
    if (prev != 0) CHECK(err == doctest::Approx(prev).epsilon(0.2));  // second-order remainder
    prev = err;
    CHECK(gnorm(fd) < 10 * eps * eps);
  }

  // linearity in the variation slot
  auto [e2, de2] = grassmann_exp_varied(x, 2.0 * dx, b);
  CHECK(ndiff(e2, e) < 1e-13);
  CHECK(ndiff(de2, 2.0 * de) < 1e-12);
  // for [x, dx] = 0 the variation is dx * exp(x); use a multiple of x itself
  const GradedMatrix<double>* xb = x.find_term(0, 0);
  REQUIRE(xb);
  NumMat dxc = NumMat::term(0b1, 0.7 * *xb);
  auto [e3, de3] = grassmann_exp_varied(x, dxc, b);
  CHECK(ndiff(de3, dxc * e3) < 1e-11);
}

TEST_CASE("holonomy of the zero and of a constant connection form") {
  Rng rng(201);
  AlgebroidChart chart = so3();
  FieldConfig cfg = random_config(chart, rng);
  // zero connection
  Superconnection zero = trivial_superconnection();
  CHECK(ndiff(holonomy(zero, cfg, 16), gidentity(zero.bundle())) < 1e-14);

  // constant connection coefficients and constant profiles: U = exp(-M)
  for (GrassFun& f : cfg.psi) f = GrassFun::unit(TrigPoly::constant(0.4));
  for (std::size_t I = 0; I < cfg.xi.size(); ++I)
    cfg.xi[I] = GrassFun::term(GrassMask{1} << I, TrigPoly::constant(0.8));
  Superconnection D = adjoint_superconnection();
  GrassMat Mf = connection_M(D, cfg);
  NumMat M0 = at_tau(Mf, 0.37);
  CHECK(ndiff(at_tau(Mf, 0.91), M0) < 1e-13);  // constant in tau
  NumMat U = holonomy(D, cfg, 32);
  CHECK(ndiff(U, grassmann_exp(NumMat{} - M0, D.bundle())) < 1e-12);
}

TEST_CASE("holonomy converges at second order") {
  Rng rng(202);
  FieldConfig cfg = random_config(so3(), rng);
  Superconnection D = adjoint_superconnection();
  NumMat u64 = holonomy(D, cfg, 64);
  NumMat u128 = holonomy(D, cfg, 128);
  NumMat u256 = holonomy(D, cfg, 256);
  double e1 = gnorm(u64 - u256), e2 = gnorm(u128 - u256);
  REQUIRE(e2 > 0);
  double rate = std::log2(e1 / e2);
  CHECK(rate > 1.6);  // ~2 up to the Richardson bias of comparing against N=256
}

TEST_CASE("flat connection: the variation of str U vanishes at second order") {
  Rng rng(203);
  FieldConfig cfg = random_config(so3(), rng);
  Superconnection D = adjoint_superconnection();
  std::vector<int> lattices{64, 128, 256};
  std::vector<double> norms;
  for (int nl : lattices) {
    DeltaStrReport rep = delta_str_holonomy(D, cfg, nl);
    CHECK(gnorm(rep.predicted) < 1e-12);  // integrand vanishes identically
    CHECK(rep.boundary_term < 1e-10);
    norms.push_back(rep.measured_norm);
  }
  for (std::size_t i = 0; i + 1 < norms.size(); ++i) {
    REQUIRE(norms[i + 1] > 0);
    double order = std::log2(norms[i] / norms[i + 1]);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
  }
}

TEST_CASE("flat two-term superconnection: same second-order vanishing") {
  Rng rng(204);
  FieldConfig cfg = random_config(so3(), rng);
  Superconnection D = so3_two_term_flat();
  REQUIRE(flatness_equations(D).passed());
  double n64 = delta_str_holonomy(D, cfg, 64).measured_norm;
  double n128 = delta_str_holonomy(D, cfg, 128).measured_norm;
  REQUIRE(n128 > 0);
  double order = std::log2(n64 / n128);
  CHECK(order > 1.8);
  CHECK(order < 2.2);
}

TEST_CASE("curved connection: measured variation matches the curvature integrand") {
  Rng rng(205);
  FieldConfig cfg = random_config(so3(), rng);
  EConnection conn = so3_adjoint_connection();
  conn.set_coefficient(2, Rational(2) * conn.coefficient(2));  // scale A_3 by 2
  Superconnection D{std::move(conn)};
  REQUIRE(!flatness_equations(D).passed());

  DeltaStrReport r64 = delta_str_holonomy(D, cfg, 64);
  REQUIRE(r64.measured_norm > 1e-6);  // genuinely curved
  double scale = std::max({1.0, r64.integrand_scale, r64.measured_norm});
  double dt = 1.0 / 64;
  CHECK(r64.discrepancy <= 5 * dt * dt * scale);

  DeltaStrReport r128 = delta_str_holonomy(D, cfg, 128);
  REQUIRE(r128.discrepancy > 0);
  CHECK(std::log2(r64.discrepancy / r128.discrepancy) > 1.5);
}

TEST_CASE("generic superconnection: the full residual tower drives the variation") {
  Rng rng(206);
  for (const AlgebroidChart& chart : {so3(), affine_line()}) {
    for (int trial = 0; trial < 2; ++trial) {
      GradedBundle b({{0, 2}, {1, 1}});
      EConnection conn(chart, b);
      for (std::size_t I = 0; I < chart.fiber_rank(); ++I)
        conn.set_coefficient(I, rng.graded_matrix(b, b, 0, chart.base_dim(), 1));
      Superconnection D(std::move(conn));
      D.set_v(rng.graded_matrix(b, b, 1, chart.base_dim(), 1));
      for (int k = 2; k <= static_cast<int>(chart.fiber_rank()); ++k)
        D.set_omega(k, rng.form(chart, b, b, k, 1 - k, 1));

      FieldConfig cfg = random_config(chart, rng);
      DeltaStrReport r64 = delta_str_holonomy(D, cfg, 64);
      DeltaStrReport r128 = delta_str_holonomy(D, cfg, 128);
      double scale = std::max({1.0, r64.integrand_scale, r64.measured_norm});
      CHECK(r64.discrepancy <= 5 * (1.0 / 64) * (1.0 / 64) * scale);
      if (r128.discrepancy > 1e-13 * scale)
        CHECK(std::log2(r64.discrepancy / r128.discrepancy) > 1.5);
    }
  }
}

TEST_CASE("boundary-changing insertion with equal backgrounds") {
  Rng rng(207);
  Superconnection D = adjoint_superconnection();
  const GradedBundle& b = D.bundle();
  FieldConfig cfg = random_config(so3(), rng);
  SuperForm w1 = rng.form(so3(), b, b, 1, 0, 0);
  SuperForm w2 = rng.form(so3(), b, b, 1, 0, 0);
  REQUIRE(!w1.is_zero());
  REQUIRE(!w2.is_zero());
  BoundaryChangingReport r64 = boundary_changing_check(D, D, w1, w2, cfg, 0.5, 64);
  REQUIRE(r64.measured_norm > 1e-8);
  double scale = std::max(1.0, r64.measured_norm);
  CHECK(r64.discrepancy <= 5 * (1.0 / 64) * (1.0 / 64) * scale);
  BoundaryChangingReport r128 = boundary_changing_check(D, D, w1, w2, cfg, 0.5, 128);
  if (r128.discrepancy > 1e-13 * scale)
    CHECK(std::log2(r64.discrepancy / r128.discrepancy) > 1.5);
}

TEST_CASE("boundary-changing insertion between two different flat backgrounds") {
  Rng rng(208);
  Superconnection D1 = adjoint_superconnection();
  Superconnection D2 = quaternion_superconnection();
  REQUIRE(flatness_equations(D2).passed());
  FieldConfig cfg = random_config(so3(), rng);
  // w1 maps V1 to V2, w2 maps back
  SuperForm w1, w2;
  for (int t = 0; t < 20 && w1.is_zero(); ++t)
    w1 = rng.form(so3(), D1.bundle(), D2.bundle(), 1, 0, 0);
  for (int t = 0; t < 20 && w2.is_zero(); ++t)
    w2 = rng.form(so3(), D2.bundle(), D1.bundle(), 1, 0, 0);
  REQUIRE(!w1.is_zero());
  REQUIRE(!w2.is_zero());
  BoundaryChangingReport r64 = boundary_changing_check(D1, D2, w1, w2, cfg, 0.5, 64);
  REQUIRE(r64.measured_norm > 1e-8);
  double scale = std::max(1.0, r64.measured_norm);
  CHECK(r64.discrepancy <= 5 * (1.0 / 64) * (1.0 / 64) * scale);
  BoundaryChangingReport r128 = boundary_changing_check(D1, D2, w1, w2, cfg, 0.5, 128);
  if (r128.discrepancy > 1e-13 * scale)
    CHECK(std::log2(r64.discrepancy / r128.discrepancy) > 1.5);
}
