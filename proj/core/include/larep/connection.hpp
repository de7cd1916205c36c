#ifndef LAREP_CONNECTION_HPP
#define LAREP_CONNECTION_HPP

#include <vector>

#include "larep/algebroid.hpp"
#include "larep/grading.hpp"
#include "larep/superform.hpp"

namespace larep {

/// E-connection on a graded bundle: one degree-0 coefficient matrix A_I per
/// frame index.  Degree-shifting parts belong to the superconnection layer.
class EConnection {
 public:
  EConnection(AlgebroidChart chart, GradedBundle bundle);

  const AlgebroidChart& chart() const { return chart_; }
  const GradedBundle& bundle() const { return bundle_; }

  const GradedMatrix<Poly>& coefficient(std::size_t I) const { return coeffs_.at(I); }
  void set_coefficient(std::size_t I, GradedMatrix<Poly> a);

  /// Trivial connection (all A_I = 0) on the given bundle.
  static EConnection trivial(AlgebroidChart chart, GradedBundle bundle) {
    return EConnection(std::move(chart), std::move(bundle));
  }

 private:
  AlgebroidChart chart_;
  GradedBundle bundle_;
  std::vector<GradedMatrix<Poly>> coeffs_;
};

/// Entrywise rho^mu_I d_mu of a polynomial graded matrix.
GradedMatrix<Poly> anchor_partial(const AlgebroidChart& chart, std::size_t I,
                                  const GradedMatrix<Poly>& m);

/// Covariant derivative of a section (a Hom(line, V)-valued coefficient):
/// nabla_I phi = rho^mu_I d_mu phi + A_I phi.
GradedMatrix<Poly> covariant_derivative(const EConnection& conn, const GradedMatrix<Poly>& section,
                                        std::size_t I);

/// Covariant derivative on Hom(V, W)-valued coefficients:
/// nabla_I m = rho^mu_I d_mu m + A'_I m - m A_I
/// (source and/or target connection may be absent, meaning trivial).
GradedMatrix<Poly> covariant_derivative_hom(const AlgebroidChart& chart, const EConnection* src_conn,
                                            const EConnection* tgt_conn,
                                            const GradedMatrix<Poly>& m, std::size_t I);

/// Curvature components F_IJ = rho_I dA_J - rho_J dA_I + [A_I,A_J] - C^K_IJ A_K,
/// assembled as the bidegree-(2,0) form (ordered components, I<J).
SuperForm curvature(const EConnection& conn);

/// The induced differential d_{E,nabla} on V- or Hom-valued forms.  The
/// source connection participates only for Hom-valued coefficients.
SuperForm d_E_nabla_apply(const EConnection& conn, const SuperForm& omega,
                          const EConnection* src_conn = nullptr);

/// True iff every curvature component vanishes identically; the report names
/// the nonzero components.
struct RepresentationVerdict {
  bool flat;
  ValidationReport report;
};
RepresentationVerdict is_representation(const EConnection& conn);

}  // namespace larep

#endif
