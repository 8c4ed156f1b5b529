#pragma once

#include <cmath>
#include <vector>

#include "wrp/space.hpp"

namespace wrp {

/// Arguments whose total dimension exceeds this are refused by the exact operator norm.
inline constexpr int kOpNormBudget = 16;

/// A multilinear map A_1 x ... x A_l -> Out stored densely. entries[o][a_1]...[a_l] is the image
/// of the basis tuple, row-major with the output index slowest.
class MultilinearMap {
 public:
  MultilinearMap() = default;
  MultilinearMap(Space out, std::vector<Space> args, Vec entries)
      : out_(std::move(out)), args_(std::move(args)), e_(std::move(entries)) {
    require(static_cast<long>(e_.size()) == expected_size(), ErrorKind::precondition, "multilinear entry count mismatch");
  }

  static MultilinearMap zeros(Space out, std::vector<Space> args) {
    MultilinearMap m;
    m.out_ = std::move(out);
    m.args_ = std::move(args);
    m.e_.assign(m.expected_size(), 0.0);
    return m;
  }

  int order() const { return static_cast<int>(args_.size()); }
  const Space& out() const { return out_; }
  const std::vector<Space>& args() const { return args_; }
  const Vec& entries() const { return e_; }
  Vec& entries() { return e_; }

  /// Stride of the basis tuple for argument positions; the output index has stride block_size().
  long block_size() const {
    long s = 1;
    for (const auto& a : args_) s *= a.dim();
    return s;
  }

  Vec apply(const std::vector<Vec>& xs) const {
    require(xs.size() == args_.size(), ErrorKind::precondition, "multilinear arity mismatch");
    Vec cur = e_;
    long width = block_size();
    for (std::size_t k = 0; k < args_.size(); ++k) {
      const int m = args_[k].dim();
      require(static_cast<int>(xs[k].size()) == m, ErrorKind::precondition, "multilinear argument size mismatch");
      long rest = width / m;
      long rows = static_cast<long>(cur.size()) / width;
      Vec next(rows * rest, 0.0);
      for (long r = 0; r < rows; ++r)
        for (int a = 0; a < m; ++a) {
          double x = xs[k][a];
          if (x == 0.0) continue;
          const double* src = cur.data() + r * width + a * rest;
          double* dst = next.data() + r * rest;
          for (long t = 0; t < rest; ++t) dst[t] += x * src[t];
        }
      cur = std::move(next);
      width = rest;
    }
    return cur;
  }

  MultilinearMap operator-(const MultilinearMap& o) const {
    require(o.out_ == out_ && o.args_ == args_, ErrorKind::precondition, "difference of incompatible multilinear maps");
    MultilinearMap r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] -= o.e_[i];
    return r;
  }

  MultilinearMap operator+(const MultilinearMap& o) const {
    require(o.out_ == out_ && o.args_ == args_, ErrorKind::precondition, "sum of incompatible multilinear maps");
    MultilinearMap r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
    return r;
  }

  MultilinearMap scaled(double s) const {
    MultilinearMap r = *this;
    for (double& x : r.e_) x *= s;
    return r;
  }

  /// Largest deviation from symmetry under swapping two argument slots of equal space.
  double asymmetry() const {
    double worst = 0.0;
    const int l = order();
    if (l < 2) return 0.0;
    const int m = args_[0].dim();
    for (const auto& a : args_)
      if (!(a == args_[0])) return 0.0;
    const long width = block_size();
    const long rows = static_cast<long>(e_.size()) / width;
    std::vector<int> idx(l), sw(l);
    for (long t = 0; t < width; ++t) {
      long q = t;
      for (int k = l - 1; k >= 0; --k) {
        idx[k] = static_cast<int>(q % m);
        q /= m;
      }
      for (int a = 0; a + 1 < l; ++a) {
        sw = idx;
        std::swap(sw[a], sw[a + 1]);
        long u = 0;
        for (int k = 0; k < l; ++k) u = u * m + sw[k];
        for (long r = 0; r < rows; ++r) worst = std::max(worst, std::abs(e_[r * width + t] - e_[r * width + u]));
      }
    }
    return worst;
  }

 private:
  long expected_size() const { return static_cast<long>(out_.dim()) * block_size(); }

  Space out_;
  std::vector<Space> args_;
  Vec e_;
};

namespace detail {

/// Norm of the output-valued linear functional rows C[o][*] acting on the last argument space.
inline double last_argument_norm(const Space& out, const Vec& C, const Space& last) {
  const int p = last.dim();
  double best = 0.0;
  int off = 0;
  for (const auto& b : out.blocks()) {
    if (b.kind == Block::Kind::sup) {
      for (int r = 0; r < b.rows; ++r) best = std::max(best, last.dual_norm(std::span<const double>(C.data() + (off + r) * p, p)));
    } else if (b.kind == Block::Kind::op) {
      // |A|_op = max_r max_s sum_c s_c A_rc over sign vectors s; fixing s_0 = +1 covers all by symmetry
      Vec w(p);
      const long signs = 1L << (b.cols - 1);
      for (int r = 0; r < b.rows; ++r)
        for (long mask = 0; mask < signs; ++mask) {
          std::fill(w.begin(), w.end(), 0.0);
          for (int c = 0; c < b.cols; ++c) {
            double s = (c > 0 && ((mask >> (c - 1)) & 1)) ? -1.0 : 1.0;
            const double* row = C.data() + (off + r * b.cols + c) * p;
            for (int j = 0; j < p; ++j) w[j] += s * row[j];
          }
          best = std::max(best, last.dual_norm(w));
        }
    } else {
      fail(ErrorKind::unsupported_norm, "Euclidean output of a multilinear map of order >= 1");
    }
    off += b.dim();
  }
  return best;
}

}  // namespace detail

/// Exact operator norm sup |T(h_1, ..., h_l)| over unit arguments. The supremum of a multilinear
/// map over a product of polytopes is attained at vertices, so all but the last argument range over
/// extreme points of their unit balls and the last is maximised in closed form by the dual norm.
/// Operator-valued outputs are uncurried first, so a curry round trip keeps the value bit for bit.
inline MultilinearMap uncurry_last(const MultilinearMap& T);

inline double op_norm(const MultilinearMap& T) {
  const int l = T.order();
  if (T.out().blocks().size() == 1 && T.out().blocks()[0].kind == Block::Kind::op) {
    bool plain = true;
    for (const auto& a : T.args()) plain = plain && !a.has_euclid();
    int total = T.out().blocks()[0].cols;
    for (const auto& a : T.args()) total += a.dim();
    if (plain && total <= kOpNormBudget) return op_norm(uncurry_last(T));
  }
  if (l == 0) return T.out().norm(T.entries());
  int total = 0;
  for (const auto& a : T.args()) total += a.dim();
  require(total <= kOpNormBudget, ErrorKind::budget,
          "operator norm enumeration over " + std::to_string(total) + " argument coordinates exceeds the budget of " +
              std::to_string(kOpNormBudget));
  for (int k = 0; k + 1 < l; ++k)
    require(!T.args()[k].has_euclid(), ErrorKind::unsupported_norm, "Euclidean argument before the last slot");

  std::vector<std::vector<Vec>> verts(l - 1);
  for (int k = 0; k + 1 < l; ++k) verts[k] = T.args()[k].extreme_points();

  const int nout = T.out().dim();
  const int p = T.args().back().dim();
  double best = 0.0;
  std::vector<std::size_t> pick(l - 1, 0);
  // partial contractions are reused along the enumeration: level k holds T contracted with picks 0..k-1
  std::vector<Vec> level(l);
  level[0] = T.entries();
  std::vector<long> width(l);
  width[0] = T.block_size();
  for (int k = 1; k < l; ++k) width[k] = width[k - 1] / T.args()[k - 1].dim();
  auto contract = [&](int k) {
    const int m = T.args()[k].dim();
    const long w = width[k], rest = width[k + 1];
    const Vec& src = level[k];
    const Vec& h = verts[k][pick[k]];
    Vec& dst = level[k + 1];
    dst.assign(static_cast<std::size_t>(nout) * rest, 0.0);
    for (int o = 0; o < nout; ++o)
      for (int a = 0; a < m; ++a) {
        double x = h[a];
        if (x == 0.0) continue;
        const double* s = src.data() + o * w + a * rest;
        double* d = dst.data() + o * rest;
        for (long t = 0; t < rest; ++t) d[t] += x * s[t];
      }
  };
  if (l == 1) return detail::last_argument_norm(T.out(), T.entries(), T.args().back());
  for (int k = 0; k + 1 < l; ++k) contract(k);
  while (true) {
    best = std::max(best, detail::last_argument_norm(T.out(), level[l - 1], T.args().back()));
    int k = l - 2;
    while (k >= 0 && ++pick[k] == verts[k].size()) {
      pick[k] = 0;
      --k;
    }
    if (k < 0) break;
    for (int j = k; j + 1 < l; ++j) contract(j);
  }
  (void)p;
  return best;
}

/// L^{l+1}(A; Y) -> L^l(A; L(A_last, Y)): the last argument moves into an operator-valued output.
inline MultilinearMap curry_last(const MultilinearMap& T) {
  require(T.order() >= 1, ErrorKind::precondition, "curry_last needs order >= 1");
  require(T.out().blocks().size() == 1 && T.out().blocks()[0].kind == Block::Kind::sup, ErrorKind::unsupported_norm,
          "curry_last needs a plain sup-normed output");
  require(T.args().back().all_sup() && T.args().back().blocks().size() == 1, ErrorKind::unsupported_norm,
          "curry_last needs a plain sup-normed last argument");
  const int n = T.out().dim();
  const int p = T.args().back().dim();
  std::vector<Space> args(T.args().begin(), T.args().end() - 1);
  MultilinearMap R = MultilinearMap::zeros(Space::op(n, p), args);
  const long rest = T.block_size() / p;
  for (int r = 0; r < n; ++r)
    for (long t = 0; t < rest; ++t)
      for (int c = 0; c < p; ++c) R.entries()[(r * p + c) * rest + t] = T.entries()[r * T.block_size() + t * p + c];
  return R;
}

inline MultilinearMap uncurry_last(const MultilinearMap& T) {
  require(T.out().blocks().size() == 1 && T.out().blocks()[0].kind == Block::Kind::op, ErrorKind::precondition,
          "uncurry_last needs an operator-valued output");
  const int n = T.out().blocks()[0].rows;
  const int p = T.out().blocks()[0].cols;
  std::vector<Space> args = T.args();
  args.push_back(Space::sup(p));
  MultilinearMap R = MultilinearMap::zeros(Space::sup(n), args);
  const long rest = T.block_size();
  for (int r = 0; r < n; ++r)
    for (long t = 0; t < rest; ++t)
      for (int c = 0; c < p; ++c) R.entries()[r * rest * p + t * p + c] = T.entries()[(r * p + c) * rest + t];
  return R;
}

/// Square matrix in the algebra L(R^n, R^n) with the operator norm of the max norm.
struct Matrix {
  int n = 0;
  Vec a;

  static Matrix zeros(int n) { return Matrix{n, Vec(static_cast<std::size_t>(n) * n, 0.0)}; }
  static Matrix identity(int n) {
    Matrix m = zeros(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

  double norm() const { return Space::op(n, n).norm(a); }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    Matrix r = zeros(x.n);
    for (int i = 0; i < x.n; ++i)
      for (int k = 0; k < x.n; ++k) {
        double v = x(i, k);
        if (v == 0.0) continue;
        for (int j = 0; j < x.n; ++j) r(i, j) += v * y(k, j);
      }
    return r;
  }
  friend Matrix operator+(Matrix x, const Matrix& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
    return x;
  }
  friend Matrix operator-(Matrix x, const Matrix& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] -= y.a[i];
    return x;
  }
  friend Matrix operator*(double s, Matrix x) {
    for (double& v : x.a) v *= s;
    return x;
  }

  Vec apply(const Vec& v) const {
    Vec r(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }
};

}  // namespace wrp
