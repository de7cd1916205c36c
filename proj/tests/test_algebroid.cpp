#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "catalog.hpp"

using namespace larep;
using namespace larep::testing;

namespace {

/// Independent structure-equation oracle: anchor compatibility
/// rho^nu_I d_nu rho^mu_J - rho^nu_J d_nu rho^mu_I - C^K_IJ rho^mu_K = 0
/// and the cyclic Jacobi sum, both checked by brute force.
bool structure_equation_oracle(const AlgebroidChart& chart) {
  const std::size_t n = chart.base_dim(), r = chart.fiber_rank();
  for (std::size_t I = 0; I < r; ++I)
    for (std::size_t J = I + 1; J < r; ++J)
      for (std::size_t mu = 0; mu < n; ++mu) {
        Poly res(n);
        for (std::size_t nu = 0; nu < n; ++nu)
          res += chart.anchor(I, nu) * chart.anchor(J, mu).partial(nu) -
                 chart.anchor(J, nu) * chart.anchor(I, mu).partial(nu);
        for (std::size_t K = 0; K < r; ++K) res -= chart.bracket(K, I, J) * chart.anchor(K, mu);
        if (!res.is_zero()) return false;
      }
  // cyclic Jacobi sum: sum_cyc { rho_I(C^L_JK) + C^L_IM C^M_JK } = 0
  for (std::size_t I = 0; I < r; ++I)
    for (std::size_t J = I + 1; J < r; ++J)
      for (std::size_t K = J + 1; K < r; ++K)
        for (std::size_t L = 0; L < r; ++L) {
          Poly res(n);
          const std::size_t cyc[3][3] = {{I, J, K}, {J, K, I}, {K, I, J}};
          for (const auto& c : cyc) {
            for (std::size_t nu = 0; nu < n; ++nu)
              res += chart.anchor(c[0], nu) * chart.bracket(L, c[1], c[2]).partial(nu);
            for (std::size_t M = 0; M < r; ++M)
              res += chart.bracket(L, c[0], M) * chart.bracket(M, c[1], c[2]);
          }
          if (!res.is_zero()) return false;
        }
  return true;
}

SuperForm scalar_form(const AlgebroidChart& chart, const Poly& f) {
  SuperForm w = SuperForm::scalar(chart.fiber_rank());
  GradedMatrix<Poly> c(GradedBundle::line(0), GradedBundle::line(0), 0);
  Mat<Poly> cell(1, 1);
  cell(0, 0) = f;
  c.set_block(0, cell);
  w.add_component({}, c);
  return w;
}

}  // namespace

TEST_CASE("catalog charts validate") {
  for (const AlgebroidChart& chart : catalog_charts()) {
    CAPTURE(chart.fiber_rank());
    ValidationReport report = validate_algebroid(chart);
    CHECK(report.passed());
    CHECK(structure_equation_oracle(chart));
  }
}

TEST_CASE("d_E matches hand computations") {
  // tangent algebroid: d_E is the de Rham differential
  AlgebroidChart plane = tangent_plane();
  Poly x1 = Poly::variable(2, 0);
  SuperForm w = frame_covector(plane, 1);
  w = wedge(scalar_form(plane, x1), w);  // x1 e^2
  SuperForm dw = d_E_apply(plane, w);
  GradedMatrix<Poly> c12 = dw.component({0, 1}, 0);
  REQUIRE(!c12.is_zero());
  CHECK(c12.block(0)(0, 0) == Poly::constant(2, 1));

  // so(3): d_E e^3 = -e^1 ^ e^2
  AlgebroidChart g = so3();
  SuperForm de3 = d_E_apply(g, frame_covector(g, 2));
  CHECK(de3.component({0, 1}, 0).block(0)(0, 0) == Poly::constant(0, -1));
  CHECK(de3.component({0, 2}, 0).is_zero());
}

TEST_CASE("jacobi failures are reported with residuals") {
  // every single-entry mutation of the so(3) table is classified exactly as
  // the brute-force oracle classifies it, and the Jacobi-breaking ones are
  // rejected with a nonzero residual.  (Mutations that merely rescale an
  // epsilon entry still satisfy Jacobi and must keep passing.)
  int rejected = 0;
  for (std::size_t K = 0; K < 3; ++K)
    for (std::size_t I = 0; I < 3; ++I)
      for (std::size_t J = I + 1; J < 3; ++J)
        for (int value : {0, 1, 2}) {
          AlgebroidChart bad = so3();
          bad.set_bracket(K, I, J, Poly::constant(0, value));
          ValidationReport report = validate_algebroid(bad);
          CHECK(report.passed() == structure_equation_oracle(bad));
          if (!report.passed()) {
            ++rejected;
            REQUIRE(!report.entries.empty());
            CHECK(!report.entries.front().residual.empty());
          }
        }
  CHECK(rejected > 0);

  // a diagonal-slot entry such as C^1_12 breaks Jacobi
  AlgebroidChart diag = so3();
  diag.set_bracket(0, 0, 1, Poly::constant(0, 1));
  CHECK(!validate_algebroid(diag).passed());
  CHECK(!structure_equation_oracle(diag));

  // over a line: C^1_23 = x1 is fine with zero anchor but breaks once e1
  // moves the base point (rho(e1) applied to the structure function survives
  // in the cyclic sum)
  AlgebroidChart ok(1, 3);
  ok.set_bracket(0, 1, 2, Poly::variable(1, 0));
  CHECK(validate_algebroid(ok).passed());
  CHECK(structure_equation_oracle(ok));

  AlgebroidChart bad(1, 3);
  bad.set_bracket(0, 1, 2, Poly::variable(1, 0));
  bad.set_anchor(0, 0, Poly::constant(1, 1));
  CHECK(!validate_algebroid(bad).passed());
  CHECK(!structure_equation_oracle(bad));
}

TEST_CASE("d_E^2 = 0 beyond generators, and Leibniz") {
  Rng rng(8101);
  for (const AlgebroidChart& chart : catalog_charts()) {
    for (int k = 0; k <= static_cast<int>(chart.fiber_rank()); ++k) {
      SuperForm w = rng.form(chart, GradedBundle::line(0), GradedBundle::line(0), k, 0);
      CHECK(d_E_apply(chart, d_E_apply(chart, w)).is_zero());
    }
    Poly f = rng.poly(chart.base_dim(), 2, 3);
    SuperForm w = rng.form(chart, GradedBundle::line(0), GradedBundle::line(0), 1, 0);
    SuperForm lhs = d_E_apply(chart, wedge(scalar_form(chart, f), w));
    SuperForm rhs = wedge(d_E_of_function(chart, f), w) +
                    wedge(scalar_form(chart, f), d_E_apply(chart, w));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("subalgebroid checks in adapted coordinates") {
  CHECK(validate_subalgebroid(tangent_plane_split()).passed());
  CHECK(validate_subalgebroid(so3_boundary_split()).passed());

  // the zero subbundle over a point passes vacuously
  AdaptedSplit trivial{tangent_plane(), {}, {}};
  CHECK(validate_subalgebroid(trivial).passed());

  // solvable [e1,e2]=e1: F = span(e1) closes, so the split passes
  AdaptedSplit solv{solvable2(), {}, {0}};
  CHECK(validate_subalgebroid(solv).passed());

  // so(3): span(e1,e2) is not a subalgebra; C^3_12 = 1 leaks
  AdaptedSplit bad{so3(), {}, {0, 1}};
  ValidationReport report = validate_subalgebroid(bad);
  CHECK(!report.passed());
  CHECK(report.entries.front().what.find("bracket leak") != std::string::npos);

  // anchor leak: tangent plane with F spanning d/dx2 over the x1-axis
  AdaptedSplit leak{tangent_plane(), {0}, {1}};
  ValidationReport r2 = validate_subalgebroid(leak);
  CHECK(!r2.passed());
  CHECK(r2.entries.front().what.find("anchor leak") != std::string::npos);
}
