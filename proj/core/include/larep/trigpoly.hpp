#ifndef LAREP_TRIGPOLY_HPP
#define LAREP_TRIGPOLY_HPP

#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "larep/grading.hpp"

namespace larep {

/// Real trigonometric polynomial of period 1, stored on the complex
/// exponential basis: f(tau) = sum_m c_m exp(2 pi i m tau) with
/// c_{-m} = conj(c_m).  Closed under sums, products and d/dtau, so
/// compositions of polynomial structure functions with periodic profiles stay
/// in this class and tau-derivatives are exact.
class TrigPoly {
 public:
  TrigPoly() = default;

  static TrigPoly constant(double a) {
    TrigPoly f;
    f.add_harmonic(0, {a, 0.0});
    return f;
  }
  /// amp * cos(2 pi m tau)
  static TrigPoly cosine(int m, double amp) {
    TrigPoly f;
    f.add_harmonic(m, {amp / 2, 0.0});
    f.add_harmonic(-m, {amp / 2, 0.0});
    return f;
  }
  /// amp * sin(2 pi m tau)
  static TrigPoly sine(int m, double amp) {
    TrigPoly f;
    f.add_harmonic(m, {0.0, -amp / 2});
    f.add_harmonic(-m, {0.0, amp / 2});
    return f;
  }

  const std::map<int, std::complex<double>>& harmonics() const { return c_; }

  void add_harmonic(int m, std::complex<double> c) {
    if (c == std::complex<double>{}) return;
    auto it = c_.find(m);
    if (it == c_.end()) {
      c_[m] = c;
    } else {
      it->second += c;
      if (it->second == std::complex<double>{}) c_.erase(it);
    }
  }

  bool is_zero() const { return c_.empty(); }

  double eval(double tau) const {
    double acc = 0;
    for (const auto& [m, c] : c_) {
      double ang = 2 * std::numbers::pi * m * tau;
      acc += c.real() * std::cos(ang) - c.imag() * std::sin(ang);
    }
    return acc;
  }

  /// Exact derivative: c_m -> 2 pi i m c_m.
  TrigPoly derivative() const {
    TrigPoly f;
    for (const auto& [m, c] : c_)
      if (m != 0) f.c_[m] = std::complex<double>(0.0, 2 * std::numbers::pi * m) * c;
    return f;
  }

  /// Sum of harmonic magnitudes; an upper bound for sup |f|.
  double norm() const {
    double n = 0;
    for (const auto& [m, c] : c_) n += std::abs(c);
    return n;
  }

  int max_harmonic() const { return c_.empty() ? 0 : std::max(std::abs(c_.begin()->first), std::abs(c_.rbegin()->first)); }

  TrigPoly& operator+=(const TrigPoly& o) {
    for (const auto& [m, c] : o.c_) add_harmonic(m, c);
    return *this;
  }
  TrigPoly& operator-=(const TrigPoly& o) {
    for (const auto& [m, c] : o.c_) add_harmonic(m, -c);
    return *this;
  }
  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
  friend TrigPoly operator-(const TrigPoly& a) {
    TrigPoly f;
    for (const auto& [m, c] : a.c_) f.c_[m] = -c;
    return f;
  }
  friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
    TrigPoly f;
    for (const auto& [m, ca] : a.c_)
      for (const auto& [k, cb] : b.c_) f.add_harmonic(m + k, ca * cb);
    return f;
  }
  friend TrigPoly operator*(double s, const TrigPoly& a) {
    TrigPoly f;
    if (s == 0.0) return f;
    for (const auto& [m, c] : a.c_) f.c_[m] = s * c;
    return f;
  }
  friend TrigPoly operator*(const TrigPoly& a, double s) { return s * a; }
  TrigPoly& operator*=(const TrigPoly& o) { return *this = *this * o; }

  bool operator==(const TrigPoly& o) const { return c_ == o.c_; }
  bool operator!=(const TrigPoly& o) const { return !(*this == o); }

 private:
  std::map<int, std::complex<double>> c_;
};

inline bool ring_is_zero(const TrigPoly& f) { return f.is_zero(); }

}  // namespace larep

#endif
