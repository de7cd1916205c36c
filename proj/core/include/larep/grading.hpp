#ifndef LAREP_GRADING_HPP
#define LAREP_GRADING_HPP

#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "larep/poly.hpp"

namespace larep {

inline bool ring_is_zero(const Rational& x) { return x == 0; }
inline bool ring_is_zero(const Poly& x) { return x.is_zero(); }
inline bool ring_is_zero(double x) { return x == 0.0; }

/// Z-graded vector bundle: rank per integer degree, finitely many nonzero.
struct GradedBundle {
  std::map<int, std::size_t> ranks;

  GradedBundle() = default;
  GradedBundle(std::initializer_list<std::pair<const int, std::size_t>> r)
      : GradedBundle(std::map<int, std::size_t>(r)) {}
  explicit GradedBundle(std::map<int, std::size_t> r) : ranks(std::move(r)) {
    for (auto it = ranks.begin(); it != ranks.end();)
      it = (it->second == 0) ? ranks.erase(it) : std::next(it);
  }

  /// Rank-1 bundle concentrated in a single degree.
  static GradedBundle line(int degree = 0) {
    return GradedBundle(std::map<int, std::size_t>{{degree, 1}});
  }

  std::size_t rank(int k) const {
    auto it = ranks.find(k);
    return it == ranks.end() ? 0 : it->second;
  }
  std::size_t total_rank() const {
    std::size_t t = 0;
    for (const auto& [k, r] : ranks) t += r;
    return t;
  }
  int min_degree() const { return ranks.empty() ? 0 : ranks.begin()->first; }
  int max_degree() const { return ranks.empty() ? 0 : ranks.rbegin()->first; }

  bool operator==(const GradedBundle& o) const { return ranks == o.ranks; }
  bool operator!=(const GradedBundle& o) const { return !(*this == o); }
};

/// Dense row-major matrix over a ring R.
template <class R>
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<R> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, const R& fill = R{}) : rows(r), cols(c), a(r * c, fill) {}

  static Mat identity(std::size_t n, const R& one) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }

  R& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const R& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  bool is_zero() const {
    for (const R& x : a)
      if (!ring_is_zero(x)) return false;
    return true;
  }

  Mat& operator+=(const Mat& o) {
    if (rows != o.rows || cols != o.cols) throw std::invalid_argument("Mat: shape mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    if (rows != o.rows || cols != o.cols) throw std::invalid_argument("Mat: shape mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
    return *this;
  }
  friend Mat operator+(Mat x, const Mat& y) { return x += y; }
  friend Mat operator-(Mat x, const Mat& y) { return x -= y; }
  friend Mat operator-(const Mat& x) {
    Mat r(x.rows, x.cols);
    for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = -x.a[i];
    return r;
  }
  friend Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("Mat: product shape mismatch");
    Mat r(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t k = 0; k < x.cols; ++k) {
        const R& xik = x(i, k);
        if (ring_is_zero(xik)) continue;
        for (std::size_t j = 0; j < y.cols; ++j) r(i, j) += xik * y(k, j);
      }
    return r;
  }
  template <class S>
  friend Mat operator*(const S& c, const Mat& x) {
    Mat r(x.rows, x.cols);
    for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = c * x.a[i];
    return r;
  }

  R trace() const {
    if (rows != cols) throw std::invalid_argument("Mat::trace: non-square");
    R t{};
    for (std::size_t i = 0; i < rows; ++i) t += (*this)(i, i);
    return t;
  }

  bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

/// Degree-p homogeneous map of graded bundles: one block per source degree k,
/// mapping the V^k fiber into the W^{k+p} fiber.  Blocks whose source or
/// target rank is zero are not stored.
template <class R>
struct GradedMatrix {
  GradedBundle source, target;
  int degree = 0;
  std::map<int, Mat<R>> blocks;  // keyed by source degree

  GradedMatrix() = default;
  GradedMatrix(GradedBundle src, GradedBundle tgt, int p)
      : source(std::move(src)), target(std::move(tgt)), degree(p) {}

  static GradedMatrix zero(const GradedBundle& src, const GradedBundle& tgt, int p) {
    return GradedMatrix(src, tgt, p);
  }
  static GradedMatrix identity(const GradedBundle& b, const R& one) {
    GradedMatrix m(b, b, 0);
    for (const auto& [k, r] : b.ranks) m.blocks[k] = Mat<R>::identity(r, one);
    return m;
  }

  int parity() const { return ((degree % 2) + 2) % 2; }

  /// Block for source degree k, materialized as zero when absent.
  Mat<R> block(int k) const {
    auto it = blocks.find(k);
    if (it != blocks.end()) return it->second;
    return Mat<R>(target.rank(k + degree), source.rank(k));
  }

  void set_block(int k, Mat<R> m) {
    if (m.rows != target.rank(k + degree) || m.cols != source.rank(k))
      throw std::invalid_argument("GradedMatrix::set_block: shape mismatch");
    if (m.rows == 0 || m.cols == 0) return;
    blocks[k] = std::move(m);
  }

  void prune() {
    for (auto it = blocks.begin(); it != blocks.end();)
      it = it->second.is_zero() ? blocks.erase(it) : std::next(it);
  }

  bool is_zero() const {
    for (const auto& [k, m] : blocks)
      if (!m.is_zero()) return false;
    return true;
  }

  GradedMatrix& operator+=(const GradedMatrix& o) {
    if (source != o.source || target != o.target || degree != o.degree)
      throw std::invalid_argument("GradedMatrix: incompatible sum");
    for (const auto& [k, m] : o.blocks) {
      auto it = blocks.find(k);
      if (it == blocks.end())
        blocks[k] = m;
      else
        it->second += m;
    }
    return *this;
  }
  GradedMatrix& operator-=(const GradedMatrix& o) { return *this += -o; }
  friend GradedMatrix operator+(GradedMatrix x, const GradedMatrix& y) { return x += y; }
  friend GradedMatrix operator-(GradedMatrix x, const GradedMatrix& y) { return x += -y; }
  friend GradedMatrix operator-(const GradedMatrix& x) {
    GradedMatrix r(x.source, x.target, x.degree);
    for (const auto& [k, m] : x.blocks) r.blocks[k] = -m;
    return r;
  }

  /// Composition x after y.
  friend GradedMatrix operator*(const GradedMatrix& x, const GradedMatrix& y) {
    if (y.target != x.source) throw std::invalid_argument("GradedMatrix: composition mismatch");
    GradedMatrix r(y.source, x.target, x.degree + y.degree);
    for (const auto& [k, ym] : y.blocks) {
      auto it = x.blocks.find(k + y.degree);
      if (it == x.blocks.end()) continue;
      Mat<R> prod = it->second * ym;
      if (prod.rows == 0 || prod.cols == 0 || prod.is_zero()) continue;
      auto rit = r.blocks.find(k);
      if (rit == r.blocks.end())
        r.blocks[k] = std::move(prod);
      else
        rit->second += prod;
    }
    return r;
  }
  template <class S>
  friend GradedMatrix operator*(const S& c, const GradedMatrix& x) {
    GradedMatrix r(x.source, x.target, x.degree);
    for (const auto& [k, m] : x.blocks) r.blocks[k] = c * m;
    return r;
  }

  /// Degree-alternating trace; zero for any degree-shifting map.
  R supertrace() const {
    if (source != target) throw std::invalid_argument("supertrace: source != target");
    R t{};
    if (degree != 0) return t;
    for (const auto& [k, m] : blocks) {
      R tr = m.trace();
      if ((((k % 2) + 2) % 2) == 1)
        t -= tr;
      else
        t += tr;
    }
    return t;
  }

  bool operator==(const GradedMatrix& o) const {
    if (source != o.source || target != o.target || degree != o.degree) return false;
    GradedMatrix d = *this - o;
    return d.is_zero();
  }
};

}  // namespace larep

#endif
