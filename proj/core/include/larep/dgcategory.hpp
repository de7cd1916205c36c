#ifndef LAREP_DGCATEGORY_HPP
#define LAREP_DGCATEGORY_HPP

#include "larep/superconnection.hpp"

namespace larep {

/// Differential on the morphism space between two superconnections:
/// hom_differential(omega) = d_E omega + alpha'^omega - (-1)^k omega^alpha
/// for omega homogeneous of total degree k, valued in Hom(V, V').
SuperForm hom_differential(const Superconnection& src, const Superconnection& tgt,
                           const SuperForm& omega);

/// Rank of an exact rational matrix by Gaussian elimination.
std::size_t rational_rank(Mat<Rational> m);

/// Cohomology of the morphism complex over a 0-dimensional base (Lie algebra
/// case): exact Betti numbers per total degree.
struct CohomologyResult {
  std::map<int, std::size_t> dims;   // dimension of each graded piece
  std::map<int, std::size_t> betti;  // cohomology dimension per degree
  long euler() const {
    long chi = 0;
    for (const auto& [m, b] : betti) chi += (((m % 2) + 2) % 2 == 1) ? -static_cast<long>(b)
                                                                     : static_cast<long>(b);
    return chi;
  }
};
CohomologyResult cohomology_point(const Superconnection& src, const Superconnection& tgt);

/// Basis bookkeeping for the graded pieces over a point; exposed so tests can
/// run independent brute-force rank oracles against the same coordinates.
struct PointBasis {
  struct Element {
    MultiIndex frame;  // increasing multi-index S
    int src_degree;    // a: column degree in V
    int tgt_degree;    // b: row degree in V'
    std::size_t row, col;
  };
  std::vector<Element> elements;  // basis of the degree-m piece

  static PointBasis enumerate(const AlgebroidChart& chart, const GradedBundle& V,
                              const GradedBundle& W, int m);
  SuperForm realize(const AlgebroidChart& chart, const GradedBundle& V, const GradedBundle& W,
                    std::size_t which) const;
};

/// Matrix of hom_differential from the degree-m piece to the degree-(m+1)
/// piece, in the PointBasis coordinates.
Mat<Rational> hom_differential_matrix(const Superconnection& src, const Superconnection& tgt, int m);

}  // namespace larep

#endif
