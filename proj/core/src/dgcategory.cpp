#include "larep/dgcategory.hpp"

#include <tuple>

namespace larep {

SuperForm hom_differential(const Superconnection& src, const Superconnection& tgt,
                           const SuperForm& omega) {
  const AlgebroidChart& chart = src.chart();
  if (omega.source() != src.bundle() || omega.target() != tgt.bundle())
    throw std::invalid_argument("hom_differential: omega must be valued in Hom(V, V')");
  auto k = omega.total_degree();
  if (!k && !omega.is_zero())
    throw std::invalid_argument("hom_differential: omega must be total-degree homogeneous");
  int parity = (((k.value_or(0) % 2) + 2) % 2);

  SuperForm out = d_E_apply(chart, omega);
  out += wedge(assemble_alpha(tgt), omega);
  SuperForm right = wedge(omega, assemble_alpha(src));
  if (parity == 0)
    out -= right;
  else
    out += right;
  return out;
}

std::size_t rational_rank(Mat<Rational> m) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols && rank < m.rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < m.rows && m(pivot, col) == 0) ++pivot;
    if (pivot == m.rows) continue;
    if (pivot != rank)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(pivot, j), m(rank, j));
    Rational inv = m(rank, col);
    for (std::size_t i = rank + 1; i < m.rows; ++i) {
      if (m(i, col) == 0) continue;
      Rational f = m(i, col) / inv;
      for (std::size_t j = col; j < m.cols; ++j) m(i, j) -= f * m(rank, j);
    }
    ++rank;
  }
  return rank;
}

PointBasis PointBasis::enumerate(const AlgebroidChart& chart, const GradedBundle& V,
                                 const GradedBundle& W, int m) {
  PointBasis basis;
  const int r = static_cast<int>(chart.fiber_rank());
  for (int s = 0; s <= r; ++s) {
    for_each_increasing(r, s, [&](const MultiIndex& S) {
      for (const auto& [a, ca] : V.ranks) {
        int b = m - s + a;
        std::size_t cb = W.rank(b);
        if (cb == 0) continue;
        for (std::size_t row = 0; row < cb; ++row)
          for (std::size_t col = 0; col < ca; ++col)
            basis.elements.push_back({S, a, b, row, col});
      }
    });
  }
  return basis;
}

SuperForm PointBasis::realize(const AlgebroidChart& chart, const GradedBundle& V,
                              const GradedBundle& W, std::size_t which) const {
  const Element& e = elements.at(which);
  GradedMatrix<Poly> m(V, W, e.tgt_degree - e.src_degree);
  Mat<Poly> block(W.rank(e.tgt_degree), V.rank(e.src_degree), Poly(chart.base_dim()));
  block(e.row, e.col) = Poly::constant(chart.base_dim(), 1);
  m.set_block(e.src_degree, std::move(block));
  SuperForm w(chart.fiber_rank(), V, W);
  w.set_component(e.frame, m);
  return w;
}

namespace {

Rational constant_of(const Poly& p) {
  Rational c = 0;
  for (const auto& [e, coeff] : p.terms()) {
    for (unsigned k : e)
      if (k != 0) throw std::invalid_argument("cohomology_point: non-constant coefficient");
    c = coeff;
  }
  return c;
}

}  // namespace

Mat<Rational> hom_differential_matrix(const Superconnection& src, const Superconnection& tgt,
                                      int m) {
  const AlgebroidChart& chart = src.chart();
  const GradedBundle& V = src.bundle();
  const GradedBundle& W = tgt.bundle();
  PointBasis dom = PointBasis::enumerate(chart, V, W, m);
  PointBasis cod = PointBasis::enumerate(chart, V, W, m + 1);

  using Key = std::tuple<MultiIndex, int, std::size_t, std::size_t>;
  std::map<Key, std::size_t> index;
  for (std::size_t i = 0; i < cod.elements.size(); ++i) {
    const auto& e = cod.elements[i];
    index[{e.frame, e.src_degree, e.row, e.col}] = i;
  }

  Mat<Rational> matrix(cod.elements.size(), dom.elements.size());
  for (std::size_t j = 0; j < dom.elements.size(); ++j) {
    SuperForm image = hom_differential(src, tgt, dom.realize(chart, V, W, j));
    for (const auto& [idx, gm] : image.terms())
      for (const auto& [a, block] : gm.blocks)
        for (std::size_t row = 0; row < block.rows; ++row)
          for (std::size_t col = 0; col < block.cols; ++col) {
            Rational c = constant_of(block(row, col));
            if (c == 0) continue;
            auto it = index.find({idx, a, row, col});
            if (it == index.end())
              throw std::logic_error("hom_differential_matrix: image outside the expected piece");
            matrix(it->second, j) += c;
          }
  }
  return matrix;
}

CohomologyResult cohomology_point(const Superconnection& src, const Superconnection& tgt) {
  const AlgebroidChart& chart = src.chart();
  if (chart.base_dim() != 0)
    throw std::invalid_argument("cohomology_point: only 0-dimensional bases are supported");
  const GradedBundle& V = src.bundle();
  const GradedBundle& W = tgt.bundle();
  const int r = static_cast<int>(chart.fiber_rank());
  int lo = W.min_degree() - V.max_degree();
  int hi = r + W.max_degree() - V.min_degree();

  CohomologyResult out;
  std::map<int, std::size_t> rank;
  for (int m = lo - 1; m <= hi; ++m) rank[m] = rational_rank(hom_differential_matrix(src, tgt, m));
  for (int m = lo; m <= hi; ++m) {
    std::size_t dim = PointBasis::enumerate(chart, V, W, m).elements.size();
    if (dim == 0) continue;
    out.dims[m] = dim;
    out.betti[m] = dim - rank[m] - rank[m - 1];
  }
  return out;
}

}  // namespace larep
