#include "larep/connection.hpp"

#include <functional>

namespace larep {

EConnection::EConnection(AlgebroidChart chart, GradedBundle bundle)
    : chart_(std::move(chart)), bundle_(std::move(bundle)) {
  coeffs_.assign(chart_.fiber_rank(), GradedMatrix<Poly>(bundle_, bundle_, 0));
}

void EConnection::set_coefficient(std::size_t I, GradedMatrix<Poly> a) {
  if (I >= coeffs_.size()) throw std::out_of_range("EConnection::set_coefficient");
  if (a.source != bundle_ || a.target != bundle_ || a.degree != 0)
    throw std::invalid_argument("EConnection: coefficient must be a degree-0 endomorphism");
  coeffs_[I] = std::move(a);
}

GradedMatrix<Poly> anchor_partial(const AlgebroidChart& chart, std::size_t I,
                                  const GradedMatrix<Poly>& m) {
  GradedMatrix<Poly> out(m.source, m.target, m.degree);
  for (const auto& [k, block] : m.blocks) {
    Mat<Poly> d(block.rows, block.cols, Poly(chart.base_dim()));
    for (std::size_t a = 0; a < block.a.size(); ++a)
      for (std::size_t mu = 0; mu < chart.base_dim(); ++mu)
        d.a[a] += chart.anchor(I, mu) * block.a[a].partial(mu);
    if (!d.is_zero()) out.blocks[k] = std::move(d);
  }
  return out;
}

GradedMatrix<Poly> covariant_derivative(const EConnection& conn, const GradedMatrix<Poly>& section,
                                        std::size_t I) {
  return anchor_partial(conn.chart(), I, section) + conn.coefficient(I) * section;
}

GradedMatrix<Poly> covariant_derivative_hom(const AlgebroidChart& chart, const EConnection* src_conn,
                                            const EConnection* tgt_conn,
                                            const GradedMatrix<Poly>& m, std::size_t I) {
  GradedMatrix<Poly> out = anchor_partial(chart, I, m);
  if (tgt_conn) out += tgt_conn->coefficient(I) * m;
  if (src_conn) out -= m * src_conn->coefficient(I);
  return out;
}

SuperForm curvature(const EConnection& conn) {
  const AlgebroidChart& chart = conn.chart();
  const std::size_t r = chart.fiber_rank();
  SuperForm F(r, conn.bundle(), conn.bundle());
  for (std::size_t I = 0; I < r; ++I)
    for (std::size_t J = I + 1; J < r; ++J) {
      GradedMatrix<Poly> f = anchor_partial(chart, I, conn.coefficient(J)) -
                             anchor_partial(chart, J, conn.coefficient(I)) +
                             conn.coefficient(I) * conn.coefficient(J) -
                             conn.coefficient(J) * conn.coefficient(I);
      for (std::size_t K = 0; K < r; ++K) {
        Poly c = chart.bracket(K, I, J);
        if (!c.is_zero()) f -= c * conn.coefficient(K);
      }
      f.prune();
      if (!f.is_zero()) F.set_component({static_cast<int>(I), static_cast<int>(J)}, f);
    }
  return F;
}

SuperForm d_E_nabla_apply(const EConnection& conn, const SuperForm& omega,
                          const EConnection* src_conn) {
  const AlgebroidChart& chart = conn.chart();
  const int r = static_cast<int>(chart.fiber_rank());
  if (omega.fiber_rank() != chart.fiber_rank())
    throw std::invalid_argument("d_E_nabla_apply: fiber rank mismatch");
  if (omega.target() != conn.bundle())
    throw std::invalid_argument("d_E_nabla_apply: bundle mismatch");
  if (src_conn && src_conn->bundle() != omega.source())
    throw std::invalid_argument("d_E_nabla_apply: source bundle mismatch");
  bool hom_valued = !(omega.source() == GradedBundle::line(0)) || src_conn;

  SuperForm out(omega.fiber_rank(), omega.source(), omega.target());
  std::map<int, int> degree_hint;
  for (const auto& [idx, m] : omega.terms()) degree_hint[static_cast<int>(idx.size())] = m.degree;

  for (const auto& [k, hint] : degree_hint) {
    for_each_increasing(r, k + 1, [&](const MultiIndex& K) {
      GradedMatrix<Poly> acc(omega.source(), omega.target(), hint);
      for (int i = 0; i < k + 1; ++i) {
        MultiIndex rest;
        for (int t = 0; t < k + 1; ++t)
          if (t != i) rest.push_back(K[t]);
        GradedMatrix<Poly> comp = omega.component(rest, hint);
        if (comp.is_zero()) continue;
        GradedMatrix<Poly> term =
            hom_valued
                ? covariant_derivative_hom(chart, src_conn, &conn, comp, static_cast<std::size_t>(K[i]))
                : covariant_derivative(conn, comp, static_cast<std::size_t>(K[i]));
        if (i % 2 == 1) term = -term;
        acc += term;
      }
      for (int i = 0; i < k + 1; ++i)
        for (int j = i + 1; j < k + 1; ++j) {
          MultiIndex rest;
          for (int t = 0; t < k + 1; ++t)
            if (t != i && t != j) rest.push_back(K[t]);
          for (int J = 0; J < r; ++J) {
            Poly c = chart.bracket(J, K[i], K[j]);
            if (c.is_zero()) continue;
            MultiIndex full;
            full.push_back(J);
            for (int v : rest) full.push_back(v);
            GradedMatrix<Poly> comp = omega.component(full, hint);
            if (comp.is_zero()) continue;
            GradedMatrix<Poly> term = c * comp;
            if ((i + j) % 2 == 1) term = -term;
            acc += term;
          }
        }
      acc.prune();
      if (!acc.is_zero()) out.add_component(K, acc);
    });
  }
  return out;
}

RepresentationVerdict is_representation(const EConnection& conn) {
  SuperForm F = curvature(conn);
  RepresentationVerdict v{F.is_zero(), {}};
  for (const auto& [idx, m] : F.terms()) {
    if (m.is_zero()) continue;
    std::string where = "F_{" + conn.chart().frame().at(static_cast<std::size_t>(idx[0])) + "," +
                        conn.chart().frame().at(static_cast<std::size_t>(idx[1])) + "}";
    std::string residual;
    for (const auto& [k, block] : m.blocks)
      for (const Poly& p : block.a)
        if (!p.is_zero()) {
          residual = p.to_string(conn.chart().coords());
          break;
        }
    v.report.entries.push_back({where, residual});
  }
  return v;
}

}  // namespace larep
