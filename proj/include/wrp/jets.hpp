#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "wrp/check_report.hpp"
#include "wrp/expr.hpp"
#include "wrp/jet_map.hpp"
#include "wrp/multilinear.hpp"

namespace wrp {

/// Derivatives D^0 f(x), ..., D^k f(x) as multilinear maps.
struct Jet {
  Vec point;
  std::vector<MultilinearMap> d;

  int order() const { return static_cast<int>(d.size()) - 1; }
};

/// D^l f(x) from Taylor coefficients: the entry at (o, i_1, ..., i_l) is alpha! c_alpha, where
/// alpha counts the indices.
inline MultilinearMap derivative_tensor(const std::vector<Taylor>& T, const Space& in, const Space& out, int l) {
  require(static_cast<int>(T.size()) == out.dim(), ErrorKind::precondition, "Taylor output count mismatch");
  const int m = in.dim();
  MultilinearMap D = MultilinearMap::zeros(out, std::vector<Space>(l, in));
  if (T.empty()) return D;
  const auto& L = *T.front().layout();
  require(L.degree() >= l, ErrorKind::budget, "Taylor degree below the requested derivative order");
  const long width = D.block_size();
  std::vector<int> alpha(m);
  for (long t = 0; t < width; ++t) {
    std::fill(alpha.begin(), alpha.end(), 0);
    long q = t;
    for (int k = 0; k < l; ++k) {
      alpha[q % m] += 1;
      q /= m;
    }
    int idx = L.find(alpha.data());
    double f = L.factorial(idx);
    for (int o = 0; o < out.dim(); ++o) D.entries()[o * width + t] = f * T[o][idx];
  }
  return D;
}

inline Jet jet_of(const JetMap& f, std::span<const double> x, int order) {
  auto T = f.taylor(x, order);
  Jet j;
  j.point.assign(x.begin(), x.end());
  for (int l = 0; l <= order; ++l) j.d.push_back(derivative_tensor(T, f.in_space(), f.out_space(), l));
  return j;
}

inline MultilinearMap derivative_at(const JetMap& f, std::span<const double> x, int l) {
  return derivative_tensor(f.taylor(x, l), f.in_space(), f.out_space(), l);
}

/// Expression-backed map. Jets are exact Taylor arithmetic on the expression tree.
class ExprMap : public JetMap {
 public:
  ExprMap(Space in, Space out, DomainSet domain, std::vector<Expr> components, int max_order = 8)
      : JetMap(std::move(in), std::move(out), std::move(domain), max_order), comps_(std::move(components)) {
    require(static_cast<int>(comps_.size()) == out_dim(), ErrorKind::config, "component count does not match output space");
  }

  Vec eval(std::span<const double> x) const override {
    check_point(x);
    ExprEvaluator<double> ev(Vec(x.begin(), x.end()));
    Vec r;
    r.reserve(comps_.size());
    for (const auto& c : comps_) r.push_back(ev(c));
    return r;
  }

  std::vector<Taylor> taylor(std::span<const double> x, int order) const override {
    check_point(x);
    check_order(order);
    auto L = TaylorLayout::get(in_dim(), order);
    std::vector<Taylor> vars;
    for (int i = 0; i < in_dim(); ++i) vars.push_back(Taylor::variable(L, i, x[i]));
    ExprEvaluator<Taylor> ev(std::move(vars), L);
    std::vector<Taylor> r;
    r.reserve(comps_.size());
    for (const auto& c : comps_) r.push_back(ev(c));
    return r;
  }

  std::string kind() const override {
    bool calls = false, trig = false;
    int deg = 0;
    for (const auto& c : comps_) {
      calls = calls || c.has_calls();
      trig = trig || c.has_transcendental();
      int d = c.polynomial_degree();
      deg = (d < 0 || deg < 0) ? -1 : std::max(deg, d);
    }
    if (calls) return "composite";
    if (trig) return "trig-polynomial";
    if (deg >= 0 && deg <= 1) return "linear";
    return "polynomial";
  }

  const std::vector<Expr>& components() const { return comps_; }

 private:
  std::vector<Expr> comps_;
};

inline std::vector<Expr> variables(int n, int offset = 0) {
  std::vector<Expr> v;
  for (int i = 0; i < n; ++i) v.push_back(Expr::var(offset + i));
  return v;
}

inline MapPtr make_map(Space in, Space out, DomainSet domain, std::vector<Expr> comps) {
  return std::make_shared<ExprMap>(std::move(in), std::move(out), std::move(domain), std::move(comps));
}

/// Map R^d -> R^n on a domain, with sup norms on both sides.
inline MapPtr make_map(const DomainSet& domain, std::vector<Expr> comps) {
  int n = static_cast<int>(comps.size());
  return make_map(domain.space(), Space::sup(n), domain, std::move(comps));
}

namespace detail {

inline void require_plain_output(const JetMap& f, const char* what) {
  require(f.out_space().blocks().size() == 1 && f.out_space().blocks()[0].kind == Block::Kind::sup,
          ErrorKind::unsupported_norm, std::string(what) + " needs a map with a plain sup-normed output");
}

}  // namespace detail

/// Partial derivative with respect to the input coordinates [first, first + count), as a map
/// into L(R^count, Out) with the operator norm. With first = 0 and count = in_dim it is Df.
class PartialMap : public JetMap {
 public:
  PartialMap(MapPtr inner, int first, int count)
      : JetMap(inner->in_space(), Space::op(inner->out_dim(), count), inner->domain(), inner->max_order() - 1),
        inner_(std::move(inner)),
        first_(first),
        count_(count) {
    detail::require_plain_output(*inner_, "a partial derivative");
    require(first >= 0 && count > 0 && first + count <= inner_->in_dim(), ErrorKind::precondition, "partial derivative block out of range");
    int off = 0;
    for (const auto& b : inner_->in_space().blocks()) {
      bool overlaps = off < first + count && first < off + b.dim();
      require(!overlaps || b.kind == Block::Kind::sup, ErrorKind::unsupported_norm, "differentiation along a non-sup block");
      off += b.dim();
    }
  }

  Vec eval(std::span<const double> x) const override {
    auto T = inner_->taylor(x, 1);
    Vec r;
    for (const auto& t : T)
      for (int j = 0; j < count_; ++j) r.push_back(t[1 + first_ + j]);
    return r;
  }

  std::vector<Taylor> taylor(std::span<const double> x, int order) const override {
    check_order(order);
    auto T = inner_->taylor(x, order + 1);
    std::vector<Taylor> r;
    for (const auto& t : T)
      for (int j = 0; j < count_; ++j) r.push_back(t.partial(first_ + j));
    return r;
  }

  std::string kind() const override { return "derivative(" + inner_->kind() + ")"; }

 private:
  MapPtr inner_;
  int first_, count_;
};

inline MapPtr differential(const MapPtr& f) { return std::make_shared<PartialMap>(f, 0, f->in_dim()); }

inline MapPtr partial(const MapPtr& f, int first, int count) { return std::make_shared<PartialMap>(f, first, count); }

/// Central finite-difference jet of order <= 2; an oracle only. Default steps are 1e-4 for first
/// and 1e-3 for second derivatives.
inline Jet fd_jet(const JetMap& f, std::span<const double> x, int order, double h = 0.0) {
  require(order >= 0 && order <= 2, ErrorKind::budget, "finite-difference jets are limited to order 2");
  if (h <= 0.0) h = order >= 2 ? 1e-3 : 1e-4;
  const int m = f.in_dim();
  const int n = f.out_dim();
  Vec x0(x.begin(), x.end());
  auto at = [&](std::initializer_list<std::pair<int, double>> shifts) {
    Vec p = x0;
    for (auto [k, s] : shifts) p[k] += s;
    require(f.domain().contains(p), ErrorKind::domain, "finite-difference stencil leaves the domain");
    return f.eval(p);
  };
  Jet j;
  j.point = x0;
  Vec f0 = at({});
  j.d.emplace_back(f.out_space(), std::vector<Space>{}, f0);
  if (order >= 1) {
    MultilinearMap D1 = MultilinearMap::zeros(f.out_space(), {f.in_space()});
    for (int k = 0; k < m; ++k) {
      Vec p = at({{k, h}}), q = at({{k, -h}});
      for (int o = 0; o < n; ++o) D1.entries()[o * m + k] = (p[o] - q[o]) / (2 * h);
    }
    j.d.push_back(std::move(D1));
  }
  if (order >= 2) {
    MultilinearMap D2 = MultilinearMap::zeros(f.out_space(), {f.in_space(), f.in_space()});
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) {
        Vec v(n);
        if (a == b) {
          Vec p = at({{a, h}}), q = at({{a, -h}});
          for (int o = 0; o < n; ++o) v[o] = (p[o] - 2 * f0[o] + q[o]) / (h * h);
        } else {
          Vec pp = at({{a, h}, {b, h}}), pm = at({{a, h}, {b, -h}}), mp = at({{a, -h}, {b, h}}), mm = at({{a, -h}, {b, -h}});
          for (int o = 0; o < n; ++o) v[o] = (pp[o] - pm[o] - mp[o] + mm[o]) / (4 * h * h);
        }
        for (int o = 0; o < n; ++o) {
          D2.entries()[(o * m + a) * m + b] = v[o];
          D2.entries()[(o * m + b) * m + a] = v[o];
        }
      }
    j.d.push_back(std::move(D2));
  }
  return j;
}

/// Largest entry deviation between a closed-form jet and the finite-difference jet, relative to
/// the scale of the jet. Used to validate maps at ingest.
inline double fd_disagreement(const JetMap& f, std::span<const double> x, int order = 2) {
  Jet exact = jet_of(f, x, order);
  Jet fd = fd_jet(f, x, std::min(order, 1), 1e-5);
  double worst = 0.0;
  for (int l = 1; l <= std::min(order, 1); ++l) {
    const auto& a = exact.d[l].entries();
    const auto& b = fd.d[l].entries();
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
  }
  if (order >= 2) {
    Jet fd2 = fd_jet(f, x, 2, 1e-3);
    const auto& a = exact.d[2].entries();
    const auto& b = fd2.d[2].entries();
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])) * 1e-2);
  }
  return worst;
}

enum class Pairing { evaluate, compose };

/// The map (x, y, e) -> b(d_2 Xi(x, y), e), where b is evaluation (e in Y) or composition
/// (e in L(X, Y)). Xi must act on X x Y with X of dimension dim_x; e ranges over the ball of radius R.
inline MapPtr xi2_build(const MapPtr& xi, int dim_x, Pairing pairing, double R) {
  detail::require_plain_output(*xi, "xi2_build");
  require(xi->in_space().all_sup(), ErrorKind::unsupported_norm, "xi2_build needs sup-normed arguments");
  const int dx = dim_x, dy = xi->in_dim() - dim_x, dz = xi->out_dim();
  require(dx > 0 && dy > 0, ErrorKind::precondition, "xi2_build needs both argument blocks");
  Space E = pairing == Pairing::evaluate ? Space::sup(dy) : Space::op(dy, dx);
  Space out = pairing == Pairing::evaluate ? Space::sup(dz) : Space::op(dz, dx);
  std::vector<DomainSet> parts;
  if (xi->domain().shape() == DomainSet::Shape::product) parts = xi->domain().parts();
  else parts.push_back(xi->domain());
  parts.push_back(DomainSet::ball(Vec(E.dim(), 0.0), R, E));
  DomainSet dom = DomainSet::product(parts);
  Space in = Space::product({Space::sup(dx), Space::sup(dy), E});

  auto d2 = Expr::call(partial(xi, dx, dy), variables(dx + dy));
  std::vector<Expr> comps;
  if (pairing == Pairing::evaluate) {
    for (int r = 0; r < dz; ++r) {
      Expr s = 0.0;
      for (int j = 0; j < dy; ++j) s += d2[r * dy + j] * Expr::var(dx + dy + j);
      comps.push_back(s);
    }
  } else {
    for (int r = 0; r < dz; ++r)
      for (int c = 0; c < dx; ++c) {
        Expr s = 0.0;
        for (int j = 0; j < dy; ++j) s += d2[r * dy + j] * Expr::var(dx + dy + j * dx + c);
        comps.push_back(s);
      }
  }
  return make_map(in, out, dom, std::move(comps));
}

/// Pointwise bound |D^l Xi2(x, y, e)| <= l |D^l Xi(x, y)| + |e| |D^{l+1} Xi(x, y)|.
inline CheckReport xi2_estimate_check(const JetMap& xi, const JetMap& xi2, std::span<const double> point, int l,
                                      const std::string& id = "lem:Abschaetzung_hoheDiffs_Spezialfall-linArg") {
  const int dxy = xi.in_dim();
  Vec xy(point.begin(), point.begin() + dxy);
  Vec e(point.begin() + dxy, point.end());
  const Space E = Space(std::vector<Block>(xi2.in_space().blocks().end() - 1, xi2.in_space().blocks().end()));
  double lhs = op_norm(derivative_at(xi2, point, l));
  auto T = xi.taylor(xy, l + 1);
  double dl = op_norm(derivative_tensor(T, xi.in_space(), xi.out_space(), l));
  double dl1 = op_norm(derivative_tensor(T, xi.in_space(), xi.out_space(), l + 1));
  double rhs = l * dl + E.norm(e) * dl1;
  Witness w{-1, Vec(point.begin(), point.end()), 0.0};
  return check_le(id, lhs, Provenance::exact, rhs, Provenance::exact, scaled_tolerance(1e-9, lhs, rhs), w,
                  "order " + std::to_string(l));
}

/// Builds Xi(x, y) = b(g(x), y) for a bilinear b : Out(g) x Y -> Z.
inline MapPtr linear_in_second(const MapPtr& g, const MultilinearMap& b, const DomainSet& V) {
  require(b.order() == 2, ErrorKind::precondition, "linear_in_second needs a bilinear pairing");
  require(b.args()[0] == g->out_space(), ErrorKind::precondition, "pairing's first argument must be the value space of g");
  require(b.args()[1].dim() == V.dim(), ErrorKind::precondition, "pairing's second argument must match V");
  const int dx = g->in_dim(), da = g->out_dim(), dy = V.dim(), dz = b.out().dim();
  auto G = Expr::call(g, variables(dx));
  std::vector<Expr> comps;
  for (int z = 0; z < dz; ++z) {
    Expr s = 0.0;
    for (int a = 0; a < da; ++a)
      for (int j = 0; j < dy; ++j) {
        double c = b.entries()[(static_cast<long>(z) * da + a) * dy + j];
        if (c != 0.0) s += Expr::constant(c) * G[a] * Expr::var(dx + j);
      }
    comps.push_back(s);
  }
  DomainSet dom = DomainSet::product({g->domain(), V});
  return make_map(Space::product({g->in_space(), b.args()[1]}), b.out(), dom, std::move(comps));
}

/// The bilinear evaluation L(Y, Z) x Y -> Z, (A, y) -> A y, with the operator norm on L(Y, Z).
inline MultilinearMap evaluation_pairing(int dz, int dy) {
  MultilinearMap b = MultilinearMap::zeros(Space::sup(dz), {Space::op(dz, dy), Space::sup(dy)});
  for (int z = 0; z < dz; ++z)
    for (int j = 0; j < dy; ++j) b.entries()[(static_cast<long>(z) * (dz * dy) + z * dy + j) * dy + j] = 1.0;
  return b;
}

/// The (k+1)-linear map (h_1..h_k, y) -> d_1^k Xi(x, y)(h_1..h_k) for Xi linear in y: the mixed
/// derivative with k slots in X and one in Y.
inline MultilinearMap mixed_tensor(const JetMap& xi, int dim_x, std::span<const double> xy, int k) {
  const int dx = dim_x, dy = xi.in_dim() - dim_x;
  auto T = xi.taylor(xy, k + 1);
  MultilinearMap full = derivative_tensor(T, xi.in_space(), xi.out_space(), k + 1);
  const int m = xi.in_dim();
  std::vector<Space> args(k, Space::sup(dx));
  args.push_back(Space::sup(dy));
  MultilinearMap M = MultilinearMap::zeros(xi.out_space(), args);
  const long w = M.block_size(), fw = full.block_size();
  for (long t = 0; t < w; ++t) {
    long q = t;
    int j = static_cast<int>(q % dy);
    q /= dy;
    std::vector<int> idx(k);
    for (int s = k - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(q % dx);
      q /= dx;
    }
    long u = 0;
    for (int s = 0; s < k; ++s) u = u * m + idx[s];
    u = u * m + dx + j;
    for (int o = 0; o < xi.out_dim(); ++o) M.entries()[o * w + t] = full.entries()[o * fw + u];
  }
  return M;
}

/// d_1^k Xi(x, y) as a k-linear map on X, read off the full Taylor expansion.
inline MultilinearMap partial_x_tensor(const JetMap& xi, int dim_x, std::span<const double> xy, int k) {
  const int dx = dim_x, m = xi.in_dim();
  auto T = xi.taylor(xy, k);
  MultilinearMap full = derivative_tensor(T, xi.in_space(), xi.out_space(), k);
  MultilinearMap M = MultilinearMap::zeros(xi.out_space(), std::vector<Space>(k, Space::sup(dx)));
  const long w = M.block_size(), fw = full.block_size();
  for (long t = 0; t < w; ++t) {
    long q = t;
    std::vector<int> idx(k);
    for (int s = k - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(q % dx);
      q /= dx;
    }
    long u = 0;
    for (int s = 0; s < k; ++s) u = u * m + idx[s];
    for (int o = 0; o < xi.out_dim(); ++o) M.entries()[o * w + t] = full.entries()[o * fw + u];
  }
  return M;
}

/// Contracts the last slot of T with v.
inline MultilinearMap contract_last(const MultilinearMap& T, const Vec& v) {
  std::vector<Space> args(T.args().begin(), T.args().end() - 1);
  MultilinearMap R = MultilinearMap::zeros(T.out(), args);
  const int p = T.args().back().dim();
  const long w = R.block_size();
  for (int o = 0; o < T.out().dim(); ++o)
    for (long t = 0; t < w; ++t) {
      double s = 0.0;
      for (int c = 0; c < p; ++c) s += T.entries()[(o * w + t) * p + c] * v[c];
      R.entries()[o * w + t] = s;
    }
  return R;
}

/// Optional special form Xi = b o (g x id) for the bounds that involve g and b.
struct LinearSecondArgForm {
  MapPtr g;
  MultilinearMap b;
};

/// Identities and bounds for a map linear in its second argument at (x, y), order l >= 1.
/// Raises a precondition error if the linearity probe fails.
inline std::vector<CheckReport> linear2_identities_check(const JetMap& xi, int dim_x, const Vec& x, const Vec& y, const Vec& h1,
                                                         const Vec& h2, int l, const LinearSecondArgForm* form = nullptr,
                                                         double t = 1e-4) {
  require(l >= 1, ErrorKind::precondition, "linear-second-argument identities need order >= 1");
  const int dx = dim_x;
  auto join = [](const Vec& a, const Vec& b) {
    Vec r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
  };
  Vec xy = join(x, y);
  {
    Vec y2 = y;
    for (double& v : y2) v *= 0.5;
    Vec a = xi.eval(xy), b = xi.eval(join(x, y2)), z = xi.eval(join(x, Vec(y.size(), 0.0)));
    for (std::size_t o = 0; o < a.size(); ++o) {
      double s = std::max(1.0, std::abs(a[o]));
      require(std::abs(a[o] - 2 * b[o]) <= 1e-12 * s && std::abs(z[o]) <= 1e-12 * s, ErrorKind::precondition,
              "map is not linear in its second argument at the probe point");
    }
  }
  std::vector<CheckReport> out;
  Witness w{-1, xy, t};

  // d/dt d_1^l Xi(x + t h1, y + t h2) at 0 against d_1^l Xi(x, h2) + d_1^{l+1} Xi(x, y) applied to h1
  {
    Vec p = xy, q = xy;
    for (int k = 0; k < dx; ++k) {
      p[k] += t * h1[k];
      q[k] -= t * h1[k];
    }
    for (std::size_t k = 0; k < y.size(); ++k) {
      p[dx + k] += t * h2[k];
      q[dx + k] -= t * h2[k];
    }
    MultilinearMap fd = (partial_x_tensor(xi, dx, p, l) - partial_x_tensor(xi, dx, q, l)).scaled(1.0 / (2 * t));
    MultilinearMap rhs = partial_x_tensor(xi, dx, join(x, h2), l) + contract_last(partial_x_tensor(xi, dx, xy, l + 1), h1);
    double err = op_norm(fd - rhs);
    double scale = std::max(1.0, op_norm(rhs));
    out.push_back(check_le("id:Ableitung_Abb_linear_2Arg", err, Provenance::exact, 1e-6 * scale, Provenance::exact, 0.0, w,
                           "central difference against the product-rule identity, order " + std::to_string(l)));
  }

  const Space Y = Space::sup(static_cast<int>(y.size()));
  const double ny = Y.norm(y);
  double Dl = op_norm(derivative_at(xi, xy, l));
  double Pl = op_norm(mixed_tensor(xi, dx, xy, l));
  double Plm1 = op_norm(mixed_tensor(xi, dx, xy, l - 1));
  {
    double rhs = l * Plm1 + Pl * ny;
    out.push_back(check_le("est:norm_l-te_Ableitung-Abb_linear_2Arg", Dl, Provenance::exact, rhs, Provenance::exact,
                           scaled_tolerance(1e-9, Dl, rhs), w, "order " + std::to_string(l)));
  }
  if (form) {
    double nb = op_norm(form->b);
    auto G = form->g->taylor(x, l);
    MultilinearMap Dg = derivative_tensor(G, form->g->in_space(), form->g->out_space(), l);
    double ng = op_norm(Dg);
    double ngm1 = op_norm(derivative_tensor(G, form->g->in_space(), form->g->out_space(), l - 1));
    // identity d_1^l Xi(x, y)(h) = b(D^l g(x)(h), y) on the mixed tensor
    const int da = form->g->out_dim(), dy = static_cast<int>(y.size());
    MultilinearMap M = mixed_tensor(xi, dx, xy, l);
    MultilinearMap B = MultilinearMap::zeros(M.out(), M.args());
    const long wg = Dg.block_size();
    for (int z = 0; z < M.out().dim(); ++z)
      for (long s = 0; s < wg; ++s)
        for (int j = 0; j < dy; ++j) {
          double acc = 0.0;
          for (int a = 0; a < da; ++a) acc += form->b.entries()[(static_cast<long>(z) * da + a) * dy + j] * Dg.entries()[a * wg + s];
          B.entries()[(z * wg + s) * dy + j] = acc;
        }
    double defect = op_norm(M - B);
    out.push_back(check_le("est:Abb_linear_2Arg-Spezialfall-hohes_Diff--partiell", Pl, Provenance::exact, nb * ng, Provenance::exact,
                           scaled_tolerance(1e-9, Pl, nb * ng), w, "order " + std::to_string(l)));
    out.push_back(check_le("est:Abb_linear_2Arg-Spezialfall-hohes_Diff--partiell", defect, Provenance::exact, 0.0, Provenance::exact,
                           scaled_tolerance(1e-12, Pl, nb * ng), w, "identity through the pairing"));
    double rhs = nb * l * ngm1 + nb * ny * ng;
    out.push_back(check_le("est:Abb_linear_2Arg-Spezialfall-hohes_Diff", Dl, Provenance::exact, rhs, Provenance::exact,
                           scaled_tolerance(1e-9, Dl, rhs), w, "order " + std::to_string(l)));
  }
  return out;
}

}  // namespace wrp
