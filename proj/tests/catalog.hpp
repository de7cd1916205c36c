#ifndef LAREP_TESTS_CATALOG_HPP
#define LAREP_TESTS_CATALOG_HPP

#include <random>

#include "larep/algebroid.hpp"
#include "larep/boundary.hpp"
#include "larep/connection.hpp"
#include "larep/superconnection.hpp"

namespace larep::testing {

/// Tangent algebroid of the plane: anchor = identity, bracket = 0.
inline AlgebroidChart tangent_plane() {
  AlgebroidChart chart(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    chart.set_anchor(i, i, Poly::constant(2, 1));
  return chart;
}

/// Tangent algebroid of the line.
inline AlgebroidChart tangent_line() {
  AlgebroidChart chart(1, 1);
  chart.set_anchor(0, 0, Poly::constant(1, 1));
  return chart;
}

/// Abelian rank-r Lie algebra over a point.
inline AlgebroidChart abelian_point(std::size_t r = 3) { return AlgebroidChart(0, r); }

/// so(3) over a point: C^K_IJ = epsilon_IJK.
inline AlgebroidChart so3() {
  AlgebroidChart chart(0, 3);
  chart.set_bracket(2, 0, 1, Poly::constant(0, 1));
  chart.set_bracket(0, 1, 2, Poly::constant(0, 1));
  chart.set_bracket(1, 2, 0, Poly::constant(0, 1));
  return chart;
}

/// Solvable two-dimensional algebra [e1, e2] = e1 over a point.
inline AlgebroidChart solvable2() {
  AlgebroidChart chart(0, 2);
  chart.set_bracket(0, 0, 1, Poly::constant(0, 1));
  return chart;
}

/// Action algebroid of the affine Lie algebra on the line: rank 2 over one
/// coordinate with rho(e1) = d/dx, rho(e2) = x d/dx, [e1, e2] = e1.  The
/// anchor is non-constant, so derivative terms in the structure equations and
/// BRST rules are exercised.
inline AlgebroidChart affine_line() {
  AlgebroidChart chart(1, 2);
  chart.set_anchor(0, 0, Poly::constant(1, 1));
  chart.set_anchor(1, 0, Poly::variable(1, 0));
  chart.set_bracket(0, 0, 1, Poly::constant(1, 1));
  return chart;
}

/// Tangent plane with the x1-axis as boundary: Y = {x2 = 0}, F = span(d/dx1).
inline AdaptedSplit tangent_plane_split() {
  return AdaptedSplit{tangent_plane(), {0}, {0}};
}

/// Product of the tangent line with so(3): base (x1), fiber rank 4, with the
/// so(3) block tangential; adapted split keeps everything (identity split) or
/// just the so(3) part over the point x1 = 0.
inline AlgebroidChart line_times_so3() {
  AlgebroidChart chart(1, 4);
  chart.set_anchor(0, 0, Poly::constant(1, 1));
  chart.set_bracket(3, 1, 2, Poly::constant(1, 1));
  chart.set_bracket(1, 2, 3, Poly::constant(1, 1));
  chart.set_bracket(2, 3, 1, Poly::constant(1, 1));
  return chart;
}

/// Adapted split of line_times_so3 with Y = {x1 = 0} and F = the so(3) block.
inline AdaptedSplit so3_boundary_split() {
  return AdaptedSplit{line_times_so3(), {}, {1, 2, 3}};
}

/// All validated catalog charts (used by randomized property suites).
inline std::vector<AlgebroidChart> catalog_charts() {
  return {tangent_plane(), tangent_line(), abelian_point(3), so3(), solvable2(), line_times_so3()};
}

/// so(3) adjoint matrices (ad e_I)^K_J = C^K_IJ = epsilon_IJK.
inline Mat<Poly> so3_adjoint(std::size_t I) {
  AlgebroidChart chart = so3();
  Mat<Poly> m(3, 3, Poly(0));
  for (std::size_t K = 0; K < 3; ++K)
    for (std::size_t J = 0; J < 3; ++J) m(K, J) = chart.bracket(K, I, J);
  return m;
}

/// Degree-0 endomorphism concentrated on an ungraded rank-n bundle.
inline GradedMatrix<Poly> plain_matrix(const Mat<Poly>& m) {
  GradedBundle b({{0, m.rows}});
  GradedMatrix<Poly> g(b, b, 0);
  g.set_block(0, m);
  return g;
}

/// The so(3) adjoint connection on the trivially graded rank-3 bundle.
inline EConnection so3_adjoint_connection() {
  EConnection conn(so3(), GradedBundle({{0, 3}}));
  for (std::size_t I = 0; I < 3; ++I) conn.set_coefficient(I, plain_matrix(so3_adjoint(I)));
  return conn;
}

/// so(3) on adjoint-plus-trivial in degrees 0/1, with the structure constants
/// as an ad-valued two-form correction; flat by the Jacobi identity.
inline Superconnection so3_two_term_flat() {
  AlgebroidChart chart = so3();
  GradedBundle b({{0, 3}, {1, 1}});
  EConnection conn(chart, b);
  for (std::size_t I = 0; I < 3; ++I) {
    GradedMatrix<Poly> a(b, b, 0);
    a.set_block(0, so3_adjoint(I));
    conn.set_coefficient(I, a);
  }
  Superconnection D(std::move(conn));
  SuperForm om(3, b, b);
  for (int I = 0; I < 3; ++I)
    for (int J = I + 1; J < 3; ++J) {
      GradedMatrix<Poly> g(b, b, -1);
      Mat<Poly> col(3, 1, Poly(0));
      bool nz = false;
      for (std::size_t K = 0; K < 3; ++K) {
        Poly c = chart.bracket(K, static_cast<std::size_t>(I), static_cast<std::size_t>(J));
        if (!c.is_zero()) {
          col(K, 0) = c;
          nz = true;
        }
      }
      if (nz) {
        g.set_block(1, col);
        om.add_component({I, J}, g);
      }
    }
  D.set_omega(2, om);
  return D;
}

/// The real four-dimensional (quaternion) representation of so(3): flat and
/// not isomorphic to a sum of adjoint blocks.
inline Superconnection quaternion_superconnection() {
  GradedBundle b4({{0, 4}});
  EConnection conn(so3(), b4);
  for (int which = 0; which < 3; ++which) {
    Mat<Poly> m(4, 4, Poly(0));
    auto set = [&](int i, int j, int s) {
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          Poly::constant(0, Rational(s, 2));
    };
    if (which == 0) { set(0, 1, -1); set(1, 0, 1); set(2, 3, -1); set(3, 2, 1); }
    if (which == 1) { set(0, 2, -1); set(2, 0, 1); set(1, 3, 1); set(3, 1, -1); }
    if (which == 2) { set(0, 3, -1); set(3, 0, 1); set(1, 2, -1); set(2, 1, 1); }
    GradedMatrix<Poly> g(b4, b4, 0);
    g.set_block(0, m);
    conn.set_coefficient(static_cast<std::size_t>(which), g);
  }
  return Superconnection(std::move(conn));
}

/// Deterministic generators for property tests.
struct Rng {
  std::mt19937 gen;
  explicit Rng(unsigned seed) : gen(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }

  Rational rational(int mag = 3) {
    int num = uniform(-mag, mag);
    int den = uniform(1, mag);
    return Rational(num, den);
  }

  Poly poly(std::size_t nvars, int max_degree = 2, int terms = 3) {
    Poly p(nvars);
    for (int t = 0; t < terms; ++t) {
      Poly::Exponents e(nvars, 0);
      int budget = uniform(0, max_degree);
      for (int d = 0; d < budget && nvars > 0; ++d)
        e[static_cast<std::size_t>(uniform(0, static_cast<int>(nvars) - 1))] += 1;
      p.add_term(e, rational());
    }
    return p;
  }

  Mat<Poly> matrix(std::size_t rows, std::size_t cols, std::size_t nvars, int max_degree = 2) {
    Mat<Poly> m(rows, cols, Poly(nvars));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = poly(nvars, max_degree, 2);
    return m;
  }

  GradedMatrix<Poly> graded_matrix(const GradedBundle& src, const GradedBundle& tgt, int degree,
                                   std::size_t nvars, int max_degree = 2) {
    GradedMatrix<Poly> g(src, tgt, degree);
    for (const auto& [k, rk] : src.ranks) {
      std::size_t rows = tgt.rank(k + degree);
      if (rows == 0) continue;
      g.set_block(k, matrix(rows, rk, nvars, max_degree));
    }
    return g;
  }

  GradedBundle bundle(int min_deg = -2, int max_deg = 2, int max_rank = 2) {
    std::map<int, std::size_t> ranks;
    int pieces = uniform(1, 3);
    for (int i = 0; i < pieces; ++i)
      ranks[uniform(min_deg, max_deg)] = static_cast<std::size_t>(uniform(1, max_rank));
    return GradedBundle(ranks);
  }

  /// Random form with a handful of homogeneous terms of the given bidegree.
  SuperForm form(const AlgebroidChart& chart, const GradedBundle& src, const GradedBundle& tgt,
                 int form_degree, int coeff_degree, int max_poly_degree = 2) {
    SuperForm w(chart.fiber_rank(), src, tgt);
    int r = static_cast<int>(chart.fiber_rank());
    for_each_increasing(r, form_degree, [&](const MultiIndex& idx) {
      if (uniform(0, 1) == 0) return;
      w.add_component(idx, graded_matrix(src, tgt, coeff_degree, chart.base_dim(), max_poly_degree));
    });
    return w;
  }
};

// ---------------------------------------------------------------------------
// Boundary field configurations.

/// Generator layout for boundary configurations over a chart: bits [0, r) are
/// the ghost +1 directions seeding xi, bits [r, r+n) the ghost -1 directions
/// seeding etap, and `extra` trailing ghost 0 odd generators whose pairwise
/// products seed the even soul parts of phi and psi.
struct BoundaryGens {
  GeneratorTable table;
  std::size_t r = 0, n = 0, extra = 0;

  GrassMask xi_bit(std::size_t I) const { return GrassMask{1} << I; }
  GrassMask eta_bit(std::size_t mu) const { return GrassMask{1} << (r + mu); }
  GrassMask soul_bit(std::size_t j) const { return GrassMask{1} << (r + n + j); }
};

inline BoundaryGens boundary_generators(const AlgebroidChart& chart, std::size_t extra = 2) {
  BoundaryGens g;
  g.r = chart.fiber_rank();
  g.n = chart.base_dim();
  g.extra = extra;
  for (std::size_t I = 0; I < g.r; ++I)
    g.table.gens.push_back({"xi" + std::to_string(I + 1), 1});
  for (std::size_t mu = 0; mu < g.n; ++mu)
    g.table.gens.push_back({"eta" + std::to_string(mu + 1), -1});
  for (std::size_t j = 0; j < extra; ++j)
    g.table.gens.push_back({"s" + std::to_string(j + 1), 0});
  return g;
}

/// Random periodic profile with a nonzero constant part and a few harmonics.
inline TrigPoly random_profile(Rng& rng, int max_harmonic = 1) {
  TrigPoly f = TrigPoly::constant(0.5 * rng.uniform(-3, 3) + 0.25);
  for (int m = 1; m <= max_harmonic; ++m) {
    f += TrigPoly::cosine(m, 0.25 * rng.uniform(-3, 3));
    f += TrigPoly::sine(m, 0.25 * rng.uniform(-3, 3));
  }
  return f;
}

/// Random field configuration over the chart with the standard generator
/// layout: phi and psi are even ghost-0 values (body plus soul products), xi
/// and etap are odd combinations of their dedicated generators.
inline FieldConfig random_config(const AlgebroidChart& chart, Rng& rng, std::size_t extra = 2) {
  BoundaryGens g = boundary_generators(chart, extra);
  FieldConfig cfg{chart, g.table, {}, {}, {}, {}};
  auto even_value = [&] {
    GrassFun v = GrassFun::unit(random_profile(rng));
    if (g.extra >= 2) v.add_term(g.soul_bit(0) | g.soul_bit(1), random_profile(rng));
    if (g.r > 0 && g.n > 0) {
      std::size_t I = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(g.r) - 1));
      std::size_t mu = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(g.n) - 1));
      v.add_term(g.xi_bit(I) | g.eta_bit(mu), random_profile(rng));
    }
    return v;
  };
  for (std::size_t mu = 0; mu < g.n; ++mu) cfg.phi.push_back(even_value());
  for (std::size_t I = 0; I < g.r; ++I) cfg.psi.push_back(even_value());
  for (std::size_t I = 0; I < g.r; ++I) {
    GrassFun v = GrassFun::term(g.xi_bit(I), random_profile(rng));
    std::size_t J = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(g.r) - 1));
    if (J != I) v.add_term(g.xi_bit(J), random_profile(rng));
    cfg.xi.push_back(v);
  }
  for (std::size_t mu = 0; mu < g.n; ++mu) {
    GrassFun v = GrassFun::term(g.eta_bit(mu), random_profile(rng));
    std::size_t nu = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(g.n) - 1));
    if (nu != mu) v.add_term(g.eta_bit(nu), random_profile(rng));
    cfg.etap.push_back(v);
  }
  return cfg;
}

}  // namespace larep::testing

#endif
