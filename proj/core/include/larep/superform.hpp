#ifndef LAREP_SUPERFORM_HPP
#define LAREP_SUPERFORM_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "larep/grading.hpp"
#include "larep/poly.hpp"

namespace larep {

/// Strictly increasing frame multi-index; the coefficient of
/// e^{I_1} wedge ... wedge e^{I_k} in the ordered-basis convention.
using MultiIndex = std::vector<int>;

/// Sorts a tuple of frame indices into increasing order.
/// Returns the permutation sign, or nullopt when an index repeats.
inline std::optional<int> sort_multi_index(MultiIndex& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
      std::swap(idx[j], idx[j - 1]);
      sign = -sign;
    }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return std::nullopt;
  return sign;
}

/// Visits every strictly increasing k-tuple drawn from {0, ..., r-1}.
template <class Fn>
inline void for_each_increasing(int r, int k, Fn&& fn) {
  if (k < 0 || k > r) return;
  MultiIndex idx(static_cast<std::size_t>(k));
  auto rec = [&](auto&& self, int pos, int start) -> void {
    if (pos == k) {
      fn(const_cast<const MultiIndex&>(idx));
      return;
    }
    for (int v = start; v <= r - (k - pos); ++v) {
      idx[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, v + 1);
    }
  };
  rec(rec, 0, 0);
}

/// Sign of the shuffle merging two disjoint increasing multi-indices
/// (parity of the number of pairs i in I, j in J with i > j).
inline int merge_sign(const MultiIndex& I, const MultiIndex& J) {
  int inv = 0;
  for (int i : I)
    for (int j : J)
      if (i > j) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

/// E-form with graded-matrix coefficients: an element of
/// Omega^*(E, Hom(V, W)).  Stored on the strictly increasing basis; terms of
/// different bidegree may coexist (inhomogeneous forms such as the local
/// connection form are first-class).
class SuperForm {
 public:
  SuperForm() = default;
  SuperForm(std::size_t fiber_rank, GradedBundle source, GradedBundle target)
      : fiber_rank_(fiber_rank), source_(std::move(source)), target_(std::move(target)) {}

  /// Scalar-valued form: coefficients on the trivial line bundle.
  static SuperForm scalar(std::size_t fiber_rank) {
    return SuperForm(fiber_rank, GradedBundle::line(0), GradedBundle::line(0));
  }

  std::size_t fiber_rank() const { return fiber_rank_; }
  const GradedBundle& source() const { return source_; }
  const GradedBundle& target() const { return target_; }
  const std::map<MultiIndex, GradedMatrix<Poly>>& terms() const { return terms_; }

  bool is_zero() const {
    for (const auto& [idx, m] : terms_)
      if (!m.is_zero()) return false;
    return true;
  }

  void set_component(const MultiIndex& idx, const GradedMatrix<Poly>& m) {
    check_index(idx);
    if (m.source != source_ || m.target != target_)
      throw std::invalid_argument("SuperForm::set_component: bundle mismatch");
    if (m.is_zero())
      terms_.erase(idx);
    else
      terms_[idx] = m;
  }

  void add_component(const MultiIndex& idx, const GradedMatrix<Poly>& m) {
    check_index(idx);
    auto it = terms_.find(idx);
    if (it == terms_.end()) {
      if (!m.is_zero()) terms_[idx] = m;
      return;
    }
    if (m.is_zero()) return;
    if (it->second.degree != m.degree) {
      // degree-mixed coefficient at one index is not representable; callers
      // keep bidegrees separated by construction
      throw std::invalid_argument("SuperForm::add_component: mixed coefficient degree at one index");
    }
    it->second += m;
    if (it->second.is_zero()) terms_.erase(it);
  }

  /// Antisymmetrized component for an arbitrary (not necessarily ordered)
  /// index tuple.  `degree_hint` fixes the coefficient degree of the zero
  /// result when the term is absent.
  GradedMatrix<Poly> component(MultiIndex idx, int degree_hint = 0) const {
    auto sign = sort_multi_index(idx);
    if (!sign) return GradedMatrix<Poly>(source_, target_, degree_hint);
    auto it = terms_.find(idx);
    if (it == terms_.end()) return GradedMatrix<Poly>(source_, target_, degree_hint);
    return (*sign == 1) ? it->second : -it->second;
  }

  /// True when every stored term has total degree (form + coefficient) d.
  bool is_homogeneous(int d) const {
    for (const auto& [idx, m] : terms_)
      if (static_cast<int>(idx.size()) + m.degree != d) return false;
    return true;
  }
  /// Total degree of a homogeneous nonzero form.
  std::optional<int> total_degree() const {
    std::optional<int> d;
    for (const auto& [idx, m] : terms_) {
      int t = static_cast<int>(idx.size()) + m.degree;
      if (d && *d != t) return std::nullopt;
      d = t;
    }
    return d;
  }

  SuperForm& operator+=(const SuperForm& o) {
    check_compatible(o);
    for (const auto& [idx, m] : o.terms_) add_component(idx, m);
    return *this;
  }
  SuperForm& operator-=(const SuperForm& o) {
    check_compatible(o);
    for (const auto& [idx, m] : o.terms_) add_component(idx, -m);
    return *this;
  }
  friend SuperForm operator+(SuperForm a, const SuperForm& b) { return a += b; }
  friend SuperForm operator-(SuperForm a, const SuperForm& b) { return a -= b; }
  friend SuperForm operator-(const SuperForm& a) {
    SuperForm r(a.fiber_rank_, a.source_, a.target_);
    for (const auto& [idx, m] : a.terms_) r.terms_[idx] = -m;
    return r;
  }
  friend SuperForm operator*(const Rational& c, const SuperForm& a) {
    SuperForm r(a.fiber_rank_, a.source_, a.target_);
    if (c == 0) return r;
    for (const auto& [idx, m] : a.terms_) r.terms_[idx] = c * m;
    return r;
  }
  friend SuperForm operator*(const Poly& p, const SuperForm& a) {
    SuperForm r(a.fiber_rank_, a.source_, a.target_);
    for (const auto& [idx, m] : a.terms_) {
      GradedMatrix<Poly> s = p * m;
      if (!s.is_zero()) r.terms_[idx] = std::move(s);
    }
    return r;
  }

  bool operator==(const SuperForm& o) const {
    if (fiber_rank_ != o.fiber_rank_ || source_ != o.source_ || target_ != o.target_) return false;
    SuperForm d = *this - o;
    return d.is_zero();
  }
  bool operator!=(const SuperForm& o) const { return !(*this == o); }

 private:
  void check_index(const MultiIndex& idx) const {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0 || idx[i] >= static_cast<int>(fiber_rank_))
        throw std::out_of_range("SuperForm: frame index out of range");
      if (i > 0 && idx[i] <= idx[i - 1])
        throw std::invalid_argument("SuperForm: multi-index must be strictly increasing");
    }
  }
  void check_compatible(const SuperForm& o) const {
    if (fiber_rank_ != o.fiber_rank_ || source_ != o.source_ || target_ != o.target_)
      throw std::invalid_argument("SuperForm: incompatible operands");
  }

  std::size_t fiber_rank_ = 0;
  GradedBundle source_, target_;
  std::map<MultiIndex, GradedMatrix<Poly>> terms_;
};

/// Koszul-signed product: Grassmann multiplication of the frame part, block
/// composition of the coefficients, and the sign (-1)^{p l} for moving the
/// left coefficient (degree p) past the right form part (degree l).
inline SuperForm wedge(const SuperForm& w, const SuperForm& e) {
  if (w.fiber_rank() != e.fiber_rank()) throw std::invalid_argument("wedge: fiber rank mismatch");
  if (e.target() != w.source()) throw std::invalid_argument("wedge: bundle composition mismatch");
  SuperForm r(w.fiber_rank(), e.source(), w.target());
  for (const auto& [I, A] : w.terms())
    for (const auto& [J, B] : e.terms()) {
      bool clash = false;
      for (int i : I)
        if (std::binary_search(J.begin(), J.end(), i)) {
          clash = true;
          break;
        }
      if (clash) continue;
      MultiIndex K;
      K.reserve(I.size() + J.size());
      std::merge(I.begin(), I.end(), J.begin(), J.end(), std::back_inserter(K));
      int sign = merge_sign(I, J);
      if ((A.parity() * static_cast<int>(J.size())) % 2 == 1) sign = -sign;
      GradedMatrix<Poly> prod = A * B;
      if (sign == -1) prod = -prod;
      r.add_component(K, prod);
    }
  return r;
}

/// Graded commutator [w,e] = w^e - (-1)^{|w||e|} e^w on total-degree
/// homogeneous endomorphism-valued forms.
inline SuperForm gcommutator(const SuperForm& w, const SuperForm& e) {
  auto dw = w.total_degree();
  auto de = e.total_degree();
  if ((!w.is_zero() && !dw) || (!e.is_zero() && !de))
    throw std::invalid_argument("gcommutator: operands must be total-degree homogeneous");
  SuperForm r = wedge(w, e);
  SuperForm ew = wedge(e, w);
  int s = (dw && de && ((*dw * *de) % 2 != 0)) ? 1 : -1;
  return (s == 1) ? r + ew : r - ew;
}

/// Block-wise supertrace of an endomorphism-valued form; the result is a
/// scalar-valued form (terms with degree-shifting coefficients trace to zero).
inline SuperForm supertrace_form(const SuperForm& w) {
  if (w.source() != w.target()) throw std::invalid_argument("supertrace_form: not endomorphism-valued");
  SuperForm r = SuperForm::scalar(w.fiber_rank());
  for (const auto& [idx, m] : w.terms()) {
    if (m.degree != 0) continue;
    Poly t = m.supertrace();
    if (t.is_zero()) continue;
    GradedMatrix<Poly> coeff(GradedBundle::line(0), GradedBundle::line(0), 0);
    Mat<Poly> cell(1, 1);
    cell(0, 0) = t;
    coeff.set_block(0, cell);
    r.add_component(idx, coeff);
  }
  return r;
}

}  // namespace larep

#endif
