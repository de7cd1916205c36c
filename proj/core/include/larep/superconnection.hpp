#ifndef LAREP_SUPERCONNECTION_HPP
#define LAREP_SUPERCONNECTION_HPP

#include <map>

#include "larep/connection.hpp"

namespace larep {

/// Superconnection D = v + d_{E,nabla} + sum_k Omega^(k) on a graded bundle:
/// an ordinary degree-preserving E-connection plus a degree +1 endomorphism v
/// and higher homotopies Omega^(k) of bidegree (k, 1-k), k >= 2.
class Superconnection {
 public:
  explicit Superconnection(EConnection conn);

  const AlgebroidChart& chart() const { return conn_.chart(); }
  const GradedBundle& bundle() const { return conn_.bundle(); }
  const EConnection& connection() const { return conn_; }
  EConnection& connection() { return conn_; }

  const GradedMatrix<Poly>& v() const { return v_; }
  void set_v(GradedMatrix<Poly> v);

  const std::map<int, SuperForm>& higher() const { return higher_; }
  /// Omega^(k); absent entries read as zero.
  SuperForm omega(int k) const;
  void set_omega(int k, SuperForm w);

  /// Ordered component of Omega^(k) at a k-tuple (antisymmetrized accessor).
  GradedMatrix<Poly> omega_component(int k, const MultiIndex& idx) const;

 private:
  EConnection conn_;
  GradedMatrix<Poly> v_;
  std::map<int, SuperForm> higher_;
};

/// D acting on a V-valued (or End(V)-valued) form:
/// v^omega + d_{E,nabla}omega + sum_k Omega^(k)^omega.
SuperForm superconnection_apply(const Superconnection& D, const SuperForm& omega);

/// The local Maurer-Cartan form alpha = v + A_I e^I + sum_k Omega^(k),
/// assembled as one inhomogeneous total-degree-1 form.
SuperForm assemble_alpha(const Superconnection& D);

/// Splits a total-degree-1 form back into (v, A_I, Omega^(k)) blocks.
Superconnection disassemble_alpha(const AlgebroidChart& chart, const SuperForm& alpha);

/// d_E alpha + alpha^alpha (equal to d_E alpha + (1/2)[alpha,alpha] in total
/// degree 1); identically zero iff (V, D) is a representation up to homotopy.
SuperForm mc_residual(const Superconnection& D);

/// Componentwise flatness system, evaluated equation by equation:
/// v^2 = 0; nabla_I v = 0; v Omega2_IJ + Omega2_IJ v + F_IJ = 0; and the
/// higher tower up to (n+1)-forms of top degree r (all higher forms vanish).
struct FlatnessReport {
  struct Entry {
    std::string equation;
    bool passed;
    std::string residual;  // one nonzero entry, rendered; empty when passed
  };
  std::vector<Entry> entries;
  int truncation_level = 0;  // tower evaluated for n+1 <= truncation_level

  bool passed() const {
    for (const auto& e : entries)
      if (!e.passed) return false;
    return true;
  }
  const Entry* first_failure() const {
    for (const auto& e : entries)
      if (!e.passed) return &e;
    return nullptr;
  }
};
FlatnessReport flatness_equations(const Superconnection& D);

/// The flatness residuals bundled as one l-form per level l = 0..fiber_rank:
/// level 0 is v^2, level 1 is nabla v, level 2 is v Omega2 + Omega2 v + F,
/// higher levels are the tower left-hand sides.  All vanish iff (V, D) is a
/// representation up to homotopy.
std::map<int, SuperForm> flatness_residual_forms(const Superconnection& D);

}  // namespace larep

#endif
