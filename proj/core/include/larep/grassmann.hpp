#ifndef LAREP_GRASSMANN_HPP
#define LAREP_GRASSMANN_HPP

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "larep/grading.hpp"
#include "larep/trigpoly.hpp"

namespace larep {

/// Bitmask over the generator set; bit i set means generator i is a factor.
using GrassMask = std::uint32_t;

/// Table of odd generators with their ghost numbers.  Field components carry
/// one generator per independent odd direction; even quantities use products
/// of an even number of them.
struct GeneratorTable {
  struct Generator {
    std::string name;
    int ghost = 0;
  };
  std::vector<Generator> gens;

  std::size_t size() const { return gens.size(); }

  int ghost_of_mask(GrassMask m) const {
    int g = 0;
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (m & (GrassMask{1} << i)) g += gens[i].ghost;
    return g;
  }
};

inline int mask_parity(GrassMask m) { return std::popcount(m) & 1; }

/// Sign for sorting the concatenation theta_S theta_T into the canonical
/// increasing order (masks must be disjoint).
inline int reorder_sign(GrassMask s, GrassMask t) {
  int inv = 0;
  for (GrassMask rest = t; rest; rest &= rest - 1) {
    GrassMask bit = rest & ~(rest - 1);
    // generators of s strictly above this generator of t must move past it
    inv += std::popcount(s & ~(bit | (bit - 1)));
  }
  return (inv & 1) ? -1 : 1;
}

// Coefficient trait helpers: degree (Koszul parity source) and zero test.
inline int coeff_degree(double) { return 0; }
inline int coeff_degree(const Poly&) { return 0; }
inline int coeff_degree(const TrigPoly&) { return 0; }
template <class R>
inline int coeff_degree(const GradedMatrix<R>& m) {
  return m.degree;
}
inline bool coeff_is_zero(double x) { return x == 0.0; }
inline bool coeff_is_zero(const Poly& p) { return p.is_zero(); }
inline bool coeff_is_zero(const TrigPoly& f) { return f.is_zero(); }
template <class R>
inline bool coeff_is_zero(const GradedMatrix<R>& m) {
  return m.is_zero();
}

inline double coeff_mul(double a, double b) { return a * b; }
inline Poly coeff_mul(const Poly& a, const Poly& b) { return a * b; }
inline TrigPoly coeff_mul(const TrigPoly& a, const TrigPoly& b) { return a * b; }
template <class R>
inline GradedMatrix<R> coeff_mul(const GradedMatrix<R>& a, const GradedMatrix<R>& b) {
  return a * b;
}
// scalars are central in the coefficient ring, so both mixed orders reduce to
// the scalar-times-matrix product
template <class R>
inline GradedMatrix<R> coeff_mul(const R& a, const GradedMatrix<R>& b) {
  return a * b;
}
template <class R>
inline GradedMatrix<R> coeff_mul(const GradedMatrix<R>& a, const R& b) {
  return b * a;
}

template <class T>
inline constexpr bool is_grassmann_v = false;

/// Element of the Grassmann algebra over an odd generator set, with
/// coefficients in a ring C written to the right of the generator monomial:
///   x = sum_S theta_S c_S.
/// Coefficients may themselves be graded (degree-homogeneous graded
/// matrices); the term key carries the coefficient degree so that terms of
/// different parity at one monomial stay separate.  The Koszul rule applies:
/// an odd coefficient anticommutes with every generator.
template <class C>
class Grassmann {
 public:
  using Key = std::pair<GrassMask, int>;

  Grassmann() = default;

  /// theta_mask * c as a one-term element.
  static Grassmann term(GrassMask mask, const C& c) {
    Grassmann x;
    x.add_term(mask, c);
    return x;
  }
  static Grassmann unit(const C& c) { return term(0, c); }

  const std::map<Key, C>& terms() const { return terms_; }

  void add_term(GrassMask mask, const C& c) {
    if (coeff_is_zero(c)) return;
    Key key{mask, coeff_degree(c)};
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_[key] = c;
    } else {
      it->second += c;
      if (coeff_is_zero(it->second)) terms_.erase(it);
    }
  }

  bool is_zero() const {
    for (const auto& [k, c] : terms_)
      if (!coeff_is_zero(c)) return false;
    return true;
  }

  /// Coefficient at a monomial/degree pair; zero-initialized C when absent
  /// (callers needing a shaped zero matrix should test has_term first).
  const C* find_term(GrassMask mask, int degree) const {
    auto it = terms_.find({mask, degree});
    return it == terms_.end() ? nullptr : &it->second;
  }

  /// Parity of a homogeneous element; nullopt for 0 or mixed parity.
  std::optional<int> parity() const {
    std::optional<int> p;
    for (const auto& [k, c] : terms_) {
      int tp = (std::popcount(k.first) + (k.second & 1)) & 1;
      if (p && *p != tp) return std::nullopt;
      p = tp;
    }
    return p;
  }

  /// Ghost number (generator ghosts plus coefficient degree) of a
  /// ghost-homogeneous element; nullopt for 0 or mixed.
  std::optional<int> ghost(const GeneratorTable& table) const {
    std::optional<int> g;
    for (const auto& [k, c] : terms_) {
      int tg = table.ghost_of_mask(k.first) + k.second;
      if (g && *g != tg) return std::nullopt;
      g = tg;
    }
    return g;
  }

  Grassmann& operator+=(const Grassmann& o) {
    for (const auto& [k, c] : o.terms_) add_term(k.first, c);
    return *this;
  }
  Grassmann& operator-=(const Grassmann& o) {
    for (const auto& [k, c] : o.terms_) add_term(k.first, -c);
    return *this;
  }
  friend Grassmann operator+(Grassmann a, const Grassmann& b) { return a += b; }
  friend Grassmann operator-(Grassmann a, const Grassmann& b) { return a -= b; }
  friend Grassmann operator-(const Grassmann& a) {
    Grassmann r;
    for (const auto& [k, c] : a.terms_) r.terms_[k] = -c;
    return r;
  }

  template <class S>
    requires(!is_grassmann_v<S>)
  friend Grassmann operator*(const S& s, const Grassmann& a) {
    Grassmann r;
    for (const auto& [k, c] : a.terms_) {
      C sc = s * c;
      if (!coeff_is_zero(sc)) r.terms_[k] = std::move(sc);
    }
    return r;
  }

  /// Left derivative with respect to generator g.
  Grassmann partial(std::size_t g) const {
    GrassMask bit = GrassMask{1} << g;
    Grassmann r;
    for (const auto& [k, c] : terms_) {
      if (!(k.first & bit)) continue;
      int before = std::popcount(k.first & (bit - 1));
      r.add_term(k.first & ~bit, (before & 1) ? C(-c) : c);
    }
    return r;
  }

  bool operator==(const Grassmann& o) const {
    Grassmann d = *this - o;
    return d.is_zero();
  }
  bool operator!=(const Grassmann& o) const { return !(*this == o); }

 private:
  std::map<Key, C> terms_;
};

template <class C>
inline constexpr bool is_grassmann_v<Grassmann<C>> = true;

/// Koszul-signed product; mixed coefficient types allowed (scalar versus
/// matrix), the result coefficient type follows the coefficient product.
template <class C1, class C2>
auto operator*(const Grassmann<C1>& a, const Grassmann<C2>& b)
    -> Grassmann<decltype(coeff_mul(std::declval<C1>(), std::declval<C2>()))> {
  Grassmann<decltype(coeff_mul(std::declval<C1>(), std::declval<C2>()))> r;
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      if (ka.first & kb.first) continue;
      int sign = reorder_sign(ka.first, kb.first);
      if ((ka.second & 1) && mask_parity(kb.first)) sign = -sign;
      auto prod = coeff_mul(ca, cb);
      r.add_term(ka.first | kb.first, sign == 1 ? prod : decltype(prod)(-prod));
    }
  return r;
}

/// Graded commutator [a, b] = ab - (-1)^{|a||b|} ba for parity-homogeneous
/// operands.
template <class C1, class C2>
auto gcomm(const Grassmann<C1>& a, const Grassmann<C2>& b) -> decltype(a * b) {
  auto pa = a.parity(), pb = b.parity();
  if ((!a.is_zero() && !pa) || (!b.is_zero() && !pb))
    throw std::invalid_argument("gcomm: operands must be parity-homogeneous");
  auto ab = a * b;
  auto ba = b * a;
  bool plus = pa && pb && (*pa & 1) && (*pb & 1);
  return plus ? ab + ba : ab - ba;
}

/// Entry-wise supertrace: matrix-valued Grassmann element to scalar-valued.
template <class R>
Grassmann<R> gsupertrace(const Grassmann<GradedMatrix<R>>& a) {
  Grassmann<R> r;
  for (const auto& [k, m] : a.terms()) {
    if (m.degree != 0 || m.source != m.target) continue;
    r.add_term(k.first, m.supertrace());
  }
  return r;
}

// Magnitude helpers for numeric (binary64-coefficient) elements.
inline double coeff_norm(double x) { return x < 0 ? -x : x; }
inline double coeff_norm(const TrigPoly& f) { return f.norm(); }
template <class R>
double coeff_norm(const GradedMatrix<R>& m) {
  double n = 0;
  for (const auto& [k, block] : m.blocks)
    for (const auto& x : block.a) n += coeff_norm(x);
  return n;
}
template <class C>
double gnorm(const Grassmann<C>& a) {
  double n = 0;
  for (const auto& [k, c] : a.terms()) {
    double t = coeff_norm(c);
    if (t > n) n = t;
  }
  return n;
}

}  // namespace larep

#endif
