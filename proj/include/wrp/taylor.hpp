#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wrp/error.hpp"

namespace wrp {

/// Monomial table for polynomials in `nvars` variables truncated at total degree `degree`.
/// Monomials are ordered by total degree, then lexicographically, so the table of a lower
/// degree is a prefix of the table of a higher one.
class TaylorLayout {
 public:
  struct Product {
    int i, j, k;
  };

  static std::shared_ptr<const TaylorLayout> get(int nvars, int degree) {
    require(nvars >= 0 && degree >= 0 && degree <= 12, ErrorKind::budget, "Taylor layout out of range");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const TaylorLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{nvars, degree}];
    if (!slot) slot = std::shared_ptr<const TaylorLayout>(new TaylorLayout(nvars, degree));
    return slot;
  }

  int nvars() const { return n_; }
  int degree() const { return k_; }
  int size() const { return static_cast<int>(deg_.size()); }
  int exponent(int idx, int var) const { return exps_[static_cast<std::size_t>(idx) * n_ + var]; }
  const int* exponents(int idx) const { return exps_.data() + static_cast<std::size_t>(idx) * n_; }
  int total_degree(int idx) const { return deg_[idx]; }
  /// Number of monomials of total degree <= d.
  int prefix(int d) const { return d < 0 ? 0 : (d >= k_ ? size() : deg_begin_[d + 1]); }
  /// Index of alpha + e_var, or -1 past the truncation degree.
  int up(int idx, int var) const { return up_[static_cast<std::size_t>(idx) * n_ + var]; }
  /// Index of alpha - e_var, or -1 if alpha_var == 0.
  int down(int idx, int var) const { return down_[static_cast<std::size_t>(idx) * n_ + var]; }
  /// alpha! = prod alpha_v!
  double factorial(int idx) const { return fact_[idx]; }
  const std::vector<Product>& products() const { return products_; }

  int find(const int* e) const {
    std::uint64_t code = 0;
    int d = 0;
    for (int v = n_ - 1; v >= 0; --v) {
      code = code * static_cast<std::uint64_t>(k_ + 1) + static_cast<std::uint64_t>(e[v]);
      d += e[v];
    }
    if (d > k_) return -1;
    auto it = index_.find(code);
    return it == index_.end() ? -1 : it->second;
  }

 private:
  TaylorLayout(int n, int k) : n_(n), k_(k) {
    std::vector<int> e(n, 0);
    deg_begin_.assign(k + 2, 0);
    for (int d = 0; d <= k; ++d) {
      deg_begin_[d] = size();
      emit(e, 0, d, d);
    }
    deg_begin_[k + 1] = size();
    for (int idx = 0; idx < size(); ++idx) {
      std::uint64_t code = 0;
      for (int v = n - 1; v >= 0; --v) code = code * static_cast<std::uint64_t>(k + 1) + static_cast<std::uint64_t>(exponent(idx, v));
      index_[code] = idx;
    }
    up_.assign(static_cast<std::size_t>(size()) * n, -1);
    down_.assign(static_cast<std::size_t>(size()) * n, -1);
    fact_.assign(size(), 1.0);
    std::vector<int> t(n);
    for (int idx = 0; idx < size(); ++idx) {
      for (int v = 0; v < n; ++v) {
        for (int w = 0; w < n; ++w) t[w] = exponent(idx, w);
        t[v] += 1;
        up_[static_cast<std::size_t>(idx) * n + v] = find(t.data());
        t[v] -= 2;
        if (t[v] >= 0) down_[static_cast<std::size_t>(idx) * n + v] = find(t.data());
        double f = 1.0;
        for (int j = 2; j <= exponent(idx, v); ++j) f *= j;
        fact_[idx] *= f;
      }
    }
    for (int i = 0; i < size(); ++i)
      for (int j = 0; j < size(); ++j) {
        if (deg_[i] + deg_[j] > k) continue;
        for (int w = 0; w < n; ++w) t[w] = exponent(i, w) + exponent(j, w);
        products_.push_back({i, j, find(t.data())});
      }
  }

  void emit(std::vector<int>& e, int var, int remaining, int d) {
    if (var == n_ - 1 || n_ == 0) {
      if (n_ > 0) e[var] = remaining;
      else if (remaining > 0) return;
      exps_.insert(exps_.end(), e.begin(), e.end());
      deg_.push_back(d);
      if (n_ > 0) e[var] = 0;
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      e[var] = a;
      emit(e, var + 1, remaining - a, d);
    }
    e[var] = 0;
  }

  int n_, k_;
  std::vector<int> exps_;
  std::vector<int> deg_;
  std::vector<int> deg_begin_;
  std::vector<int> up_, down_;
  std::vector<double> fact_;
  std::vector<Product> products_;
  std::unordered_map<std::uint64_t, int> index_;
};

using LayoutPtr = std::shared_ptr<const TaylorLayout>;

/// Truncated multivariate Taylor polynomial: c[idx] is the coefficient of delta^alpha, that is
/// the partial derivative of order alpha divided by alpha!.
class Taylor {
 public:
  Taylor() = default;
  explicit Taylor(LayoutPtr layout) : layout_(std::move(layout)), c_(layout_->size(), 0.0) {}

  static Taylor constant(const LayoutPtr& layout, double v) {
    Taylor t(layout);
    t.c_[0] = v;
    return t;
  }

  static Taylor variable(const LayoutPtr& layout, int var, double value) {
    Taylor t(layout);
    t.c_[0] = value;
    if (layout->degree() >= 1) t.c_[1 + var] = 1.0;
    return t;
  }

  const LayoutPtr& layout() const { return layout_; }
  double value() const { return c_[0]; }
  double operator[](int idx) const { return c_[idx]; }
  double& operator[](int idx) { return c_[idx]; }
  const std::vector<double>& coefficients() const { return c_; }

  Taylor& operator+=(const Taylor& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Taylor& operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
  }

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator*(Taylor a, double s) { return a *= s; }
  friend Taylor operator*(double s, Taylor a) { return a *= s; }
  friend Taylor operator-(Taylor a) {
    for (double& x : a.c_) x = -x;
    return a;
  }

  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r(a.layout_);
    for (const auto& p : a.layout_->products()) {
      double x = a.c_[p.i];
      if (x == 0.0) continue;
      r.c_[p.k] += x * b.c_[p.j];
    }
    return r;
  }

  /// f(a) from the derivatives f^(j)(a0), j = 0..degree.
  Taylor compose_scalar(const std::vector<double>& derivs) const {
    const int K = layout_->degree();
    Taylor h = *this;
    h.c_[0] = 0.0;
    Taylor r = constant(layout_, derivs[0]);
    Taylor hp = constant(layout_, 1.0);
    double fact = 1.0;
    for (int j = 1; j <= K; ++j) {
      hp = hp * h;
      fact *= j;
      double coef = derivs[j] / fact;
      if (coef == 0.0) continue;
      for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += coef * hp.c_[i];
    }
    return r;
  }

  friend Taylor sin(const Taylor& a) {
    const int K = a.layout_->degree();
    double s = std::sin(a.value()), c = std::cos(a.value());
    std::vector<double> d(K + 1);
    for (int j = 0; j <= K; ++j) d[j] = (j % 4 == 0) ? s : (j % 4 == 1) ? c : (j % 4 == 2) ? -s : -c;
    return a.compose_scalar(d);
  }

  friend Taylor cos(const Taylor& a) {
    const int K = a.layout_->degree();
    double s = std::sin(a.value()), c = std::cos(a.value());
    std::vector<double> d(K + 1);
    for (int j = 0; j <= K; ++j) d[j] = (j % 4 == 0) ? c : (j % 4 == 1) ? -s : (j % 4 == 2) ? -c : s;
    return a.compose_scalar(d);
  }

  friend Taylor exp(const Taylor& a) {
    std::vector<double> d(a.layout_->degree() + 1, std::exp(a.value()));
    return a.compose_scalar(d);
  }

  friend Taylor pow(const Taylor& a, int n) {
    require(n >= 0, ErrorKind::precondition, "negative integer power");
    Taylor r = constant(a.layout_, 1.0);
    for (int k = 0; k < n; ++k) r = r * a;
    return r;
  }

  /// Partial derivative in `var`; the result has one degree less.
  Taylor partial(int var) const {
    const int K = layout_->degree();
    require(K >= 1, ErrorKind::budget, "cannot differentiate a degree-0 Taylor polynomial");
    auto lower = TaylorLayout::get(layout_->nvars(), K - 1);
    Taylor r(lower);
    for (int idx = 0; idx < lower->size(); ++idx) {
      int up = layout_->up(idx, var);
      r.c_[idx] = (layout_->exponent(idx, var) + 1) * c_[up];
    }
    return r;
  }

  Taylor truncate(int degree) const {
    auto lower = TaylorLayout::get(layout_->nvars(), degree);
    require(degree <= layout_->degree(), ErrorKind::budget, "cannot raise the truncation degree");
    Taylor r(lower);
    for (int i = 0; i < lower->size(); ++i) r.c_[i] = c_[i];
    return r;
  }

 private:
  LayoutPtr layout_;
  std::vector<double> c_;
};

/// Substitutes h (Taylor polynomials in outer variables, constant terms ignored) for the
/// increments of the inner variables of every polynomial in P: the chain rule in coefficient form.
inline std::vector<Taylor> substitute(const std::vector<Taylor>& P, const std::vector<Taylor>& h, const LayoutPtr& outer) {
  if (P.empty()) return {};
  const auto& inner = P.front().layout();
  require(static_cast<int>(h.size()) == inner->nvars(), ErrorKind::precondition, "substitution arity mismatch");
  std::vector<Taylor> inc(h.size());
  for (std::size_t v = 0; v < h.size(); ++v) {
    inc[v] = h[v];
    inc[v][0] = 0.0;
  }
  const int n = inner->size();
  std::vector<Taylor> mono(n);
  mono[0] = Taylor::constant(outer, 1.0);
  for (int idx = 1; idx < n; ++idx) {
    int v = 0;
    while (inner->exponent(idx, v) == 0) ++v;
    mono[idx] = mono[inner->down(idx, v)] * inc[v];
  }
  std::vector<Taylor> out;
  out.reserve(P.size());
  for (const auto& p : P) {
    Taylor r(outer);
    for (int idx = 0; idx < n; ++idx) {
      double c = p[idx];
      if (c == 0.0) continue;
      const auto& m = mono[idx].coefficients();
      for (std::size_t i = 0; i < m.size(); ++i) r[static_cast<int>(i)] += c * m[i];
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace wrp
