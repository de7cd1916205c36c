#ifndef LAREP_POLY_HPP
#define LAREP_POLY_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace larep {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Thrown by parse_poly; carries the character offset of the failure.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"),
        offset(offset) {}
  std::size_t offset;
};

/// Multivariate polynomial over the rationals in a fixed number of
/// coordinates.  Terms are kept in a canonical map keyed by dense exponent
/// vectors; zero coefficients are never stored, so equality of values is
/// equality of representations.
class Poly {
 public:
  using Exponents = std::vector<unsigned>;

  Poly() = default;
  explicit Poly(std::size_t nvars) : nvars_(nvars) {}

  static Poly constant(std::size_t nvars, const Rational& c) {
    Poly p(nvars);
    if (c != 0) p.terms_[Exponents(nvars, 0)] = c;
    return p;
  }
  static Poly variable(std::size_t nvars, std::size_t idx) {
    if (idx >= nvars) throw std::out_of_range("Poly::variable: index out of range");
    Poly p(nvars);
    Exponents e(nvars, 0);
    e[idx] = 1;
    p.terms_[e] = 1;
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }

  /// Total degree; the zero polynomial has degree -1.
  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
      int t = 0;
      for (unsigned k : e) t += static_cast<int>(k);
      if (t > d) d = t;
    }
    return d;
  }

  const std::map<Exponents, Rational>& terms() const { return terms_; }

  void add_term(const Exponents& e, const Rational& c) {
    if (e.size() != nvars_) throw std::invalid_argument("Poly::add_term: exponent arity mismatch");
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (c != 0) terms_[e] = c;
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    adopt_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    adopt_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(const Poly& a) {
    Poly r(a.nvars_);
    for (const auto& [e, c] : a.terms_) r.terms_[e] = -c;
    return r;
  }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.nvars_ != b.nvars_) {
      // the arity-neutral zero annihilates anything
      if (a.is_zero() && a.nvars_ == 0) return Poly(b.nvars_);
      if (b.is_zero() && b.nvars_ == 0) return Poly(a.nvars_);
      a.check_arity(b);
    }
    Poly r(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(ea);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
        r.add_term(e, ca * cb);
      }
    return r;
  }
  friend Poly operator*(const Rational& c, const Poly& a) {
    Poly r(a.nvars_);
    if (c == 0) return r;
    for (const auto& [e, co] : a.terms_) r.terms_[e] = c * co;
    return r;
  }
  friend Poly operator*(const Poly& a, const Rational& c) { return c * a; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly& operator*=(const Rational& c) { return *this = c * *this; }

  bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  /// Formal partial derivative with respect to coordinate mu.
  Poly partial(std::size_t mu) const {
    if (mu >= nvars_) {
      if (nvars_ == 0 && is_zero()) return Poly();
      throw std::out_of_range("Poly::partial: coordinate index out of range");
    }
    Poly r(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[mu] == 0) continue;
      Exponents d(e);
      d[mu] -= 1;
      r.add_term(d, c * static_cast<int>(e[mu]));
    }
    return r;
  }

  /// Exact evaluation at a rational point.
  Rational eval(const std::vector<Rational>& point) const {
    if (point.size() != nvars_) {
      if (nvars_ == 0 && is_zero()) return 0;
      throw std::invalid_argument("Poly::eval: dimension mismatch");
    }
    Rational acc = 0;
    for (const auto& [e, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < nvars_; ++i)
        for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
      acc += t;
    }
    return acc;
  }

  /// Floating-point evaluation.
  double eval(const std::vector<double>& point) const {
    if (point.size() != nvars_) {
      if (nvars_ == 0 && is_zero()) return 0.0;
      throw std::invalid_argument("Poly::eval: dimension mismatch");
    }
    double acc = 0;
    for (const auto& [e, c] : terms_) {
      double t = static_cast<double>(c);
      for (std::size_t i = 0; i < nvars_; ++i)
        for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
      acc += t;
    }
    return acc;
  }

  /// Canonical text form in the parse_poly grammar.  parse(print(p)) == p.
  std::string to_string(const std::vector<std::string>& coords) const;
  std::string to_string() const;  // default coordinate names x1..xn

 private:
  void check_arity(const Poly& o) const {
    if (nvars_ != o.nvars_) throw std::invalid_argument("Poly: mixed coordinate arities");
  }
  /// Default-constructed zeros (0 variables, no terms) act as arity-neutral
  /// accumulator seeds; everything else must match exactly.
  void adopt_arity(const Poly& o) {
    if (nvars_ == o.nvars_) return;
    if (is_zero() && nvars_ == 0) {
      nvars_ = o.nvars_;
      return;
    }
    if (o.is_zero() && o.nvars_ == 0) return;
    throw std::invalid_argument("Poly: mixed coordinate arities");
  }

  std::size_t nvars_ = 0;
  std::map<Exponents, Rational> terms_;
};

/// Parses the polynomial grammar: sum of terms, each an optional rational
/// coefficient (`a` or `a/b`; decimals rejected) joined by `*` to powers
/// `name^k`.  Unary minus is allowed, whitespace is insignificant.
Poly parse_poly(const std::string& text, const std::vector<std::string>& coords);

}  // namespace larep

#endif
