#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wrp/check_report.hpp"
#include "wrp/convergence.hpp"
#include "wrp/multilinear.hpp"
#include "wrp/seminorms.hpp"

namespace wrp {

namespace detail {

inline Vec concat(std::span<const double> a, std::span<const double> b) {
  Vec r(a.begin(), a.end());
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

inline Vec axpy(const Vec& x, double t, const Vec& d) {
  Vec r = x;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += t * d[k];
  return r;
}

inline double sup_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline Vec minus(const Vec& a, const Vec& b) {
  Vec r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= b[k];
  return r;
}

/// Jacobian of a map at x as a matrix (rows = outputs).
inline Vec jacobian(const JetMap& f, std::span<const double> x) {
  auto T = f.taylor(x, 1);
  Vec J;
  for (const auto& t : T)
    for (int j = 0; j < f.in_dim(); ++j) J.push_back(t[1 + j]);
  return J;
}

}  // namespace detail

/// Composite Simpson rule on [0, 1] for a vector-valued integrand.
inline Vec weak_integral(const std::function<Vec(double)>& g, int n = 64) {
  require(n >= 2 && n % 2 == 0, ErrorKind::config, "Simpson rule needs an even positive number of panels");
  const double h = 1.0 / n;
  Vec acc = g(0.0);
  Vec last = g(1.0);
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += last[k];
  for (int i = 1; i < n; ++i) {
    Vec v = g(i * h);
    double w = (i % 2) ? 4.0 : 2.0;
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * v[k];
  }
  for (double& a : acc) a *= h / 3.0;
  return acc;
}

// ---------------------------------------------------------------------------------------------
// Superposition

/// Certified constants for a superposition kernel Xi on U x V.
struct SuperposeCertificates {
  double d2_sup0 = 0.0;  ///< >= sup |d_2 Xi|
  double sup2 = 0.0;     ///< >= |Xi|_{1,2}
  std::optional<double> gamma_f0;
  std::optional<double> gamma_f1;
};

namespace detail {

inline void check_kernel_vanishes(const JetMap& xi, const SampleGrid& grid, int dy) {
  const auto& pts = grid.points();
  std::size_t picks[3] = {0, pts.size() / 2, pts.size() - 1};
  for (std::size_t i : picks) {
    Vec v = xi.eval(concat(pts[i], Vec(dy, 0.0)));
    require(sup_norm(v) <= 1e-12, ErrorKind::precondition, "superposition kernel does not vanish at y = 0");
  }
}

inline void check_range(const WeightedFunction& g, const DomainSet& V, const char* what) {
  for (const auto& x : g.grid.points()) {
    Vec y = g.map->eval(x);
    require(V.contains(y), ErrorKind::range, std::string(what) + " leaves the target set at a grid point");
  }
}

}  // namespace detail

/// x -> Xi(x, gamma(x)) for gamma : U -> V and Xi : U x V -> Z with Xi(., 0) = 0.
inline WeightedFunction superpose(const MapPtr& xi, const WeightedFunction& gamma, const DomainSet& V) {
  require(V.star_shaped(), ErrorKind::precondition, "superposition needs a star-shaped target set");
  const int dx = gamma.map->in_dim(), dy = gamma.map->out_dim();
  require(xi->in_dim() == dx + dy, ErrorKind::precondition, "kernel arity does not match gamma");
  detail::check_range(gamma, V, "gamma");
  detail::check_kernel_vanishes(*xi, gamma.grid, dy);
  auto x = variables(dx);
  auto g = Expr::call(gamma.map, x);
  std::vector<Expr> args = x;
  args.insert(args.end(), g.begin(), g.end());
  auto comps = Expr::call(xi, args);
  return gamma.with_map(make_map(gamma.map->in_space(), xi->out_space(), gamma.map->domain(), comps));
}

/// The three seminorm estimates for superposition. gamma2 enables the Lipschitz estimate.
inline std::vector<CheckReport> superpose_estimates(const MapPtr& xi, const SuperposeCertificates& c, const WeightedFunction& gamma,
                                                    const DomainSet& V, const Weight& f, const WeightedFunction* gamma2 = nullptr) {
  std::vector<CheckReport> out;
  WeightedFunction s = superpose(xi, gamma, V);
  const double tol = 1e-9;
  {
    SeminormValue lhs = weighted_seminorm(s, f, 0);
    double g0 = c.gamma_f0 ? *c.gamma_f0 : weighted_seminorm(gamma, f, 0).value;
    Provenance rp = c.gamma_f0 ? Provenance::certified_upper : Provenance::grid_lower;
    double rhs = c.d2_sup0 * g0;
    out.push_back(check_le("est:f0-Norm_SPid", lhs.value, Provenance::grid_lower, rhs, rp, scaled_tolerance(tol, lhs.value, rhs),
                           Witness{gamma.factor, lhs.witness, 0.0}, "weight " + f.name));
  }
  if (gamma2) {
    WeightedFunction s2 = superpose(xi, *gamma2, V);
    WeightedFunction ds = s.with_map(difference(s.map, s2.map));
    WeightedFunction dg = gamma.with_map(difference(gamma.map, gamma2->map));
    SeminormValue lhs = weighted_seminorm(ds, f, 0);
    double rhs = c.d2_sup0 * weighted_seminorm(dg, f, 0).value;
    out.push_back(check_le("est:f0-Norm_SPid-Differenz", lhs.value, Provenance::grid_lower, rhs, Provenance::grid_lower,
                           scaled_tolerance(tol, lhs.value, rhs), Witness{gamma.factor, lhs.witness, 0.0}, "weight " + f.name));
  }
  {
    SeminormValue lhs = weighted_seminorm(s, f, 1);
    double g0 = c.gamma_f0 ? *c.gamma_f0 : weighted_seminorm(gamma, f, 0).value;
    double g1 = c.gamma_f1 ? *c.gamma_f1 : weighted_seminorm(gamma, f, 1).value;
    Provenance rp = (c.gamma_f0 && c.gamma_f1) ? Provenance::certified_upper : Provenance::grid_lower;
    double rhs = c.sup2 * g0 + c.d2_sup0 * g1;
    out.push_back(check_le("est:f1-Norm_SPid", lhs.value, Provenance::grid_lower, rhs, rp, scaled_tolerance(tol, lhs.value, rhs),
                           Witness{gamma.factor, lhs.witness, 0.0}, "weight " + f.name));
  }
  return out;
}

/// d_2 Xi(x, y) applied to v.
inline Vec apply_d2(const JetMap& xi, std::span<const double> xy, int dx, const Vec& v) {
  auto T = xi.taylor(xy, 1);
  Vec r(T.size(), 0.0);
  for (std::size_t o = 0; o < T.size(); ++o)
    for (std::size_t j = 0; j < v.size(); ++j) r[o] += T[o][1 + dx + static_cast<int>(j)] * v[j];
  return r;
}

/// Symmetric difference quotient of t -> Xi(., gamma + t gamma1) against d_2 Xi(., gamma) gamma1.
/// Steps at which gamma +- t gamma1 leaves V are dropped.
inline CheckReport superpose_derivative_check(const MapPtr& xi, const WeightedFunction& gamma, const WeightedFunction& gamma1,
                                              const DomainSet& V, const Weight& f, const ConvergenceOptions& opt = {}, bool perturb = false) {
  const int dx = gamma.map->in_dim();
  struct Pt {
    Vec x, g, g1, expected;
    double w;
  };
  std::vector<Pt> pts;
  for (const auto& x : gamma.grid.points()) {
    Pt p{x, gamma.map->eval(x), gamma1.map->eval(x), {}, std::abs(f.at(gamma.factor, x))};
    p.expected = apply_d2(*xi, detail::concat(x, p.g), dx, p.g1);
    if (perturb)
      for (double& v : p.expected) v *= 1.1;
    pts.push_back(std::move(p));
  }
  auto err = [&](double t) {
    double worst = 0.0;
    for (const auto& p : pts) {
      Vec ya = detail::axpy(p.g, t, p.g1), yb = detail::axpy(p.g, -t, p.g1);
      if (!V.contains(ya) || !V.contains(yb)) return std::nan("");
      Vec a = xi->eval(detail::concat(p.x, ya));
      Vec b = xi->eval(detail::concat(p.x, yb));
      double e = 0.0;
      for (std::size_t o = 0; o < a.size(); ++o) e = std::max(e, std::abs((a[o] - b[o]) / (2 * t) - p.expected[o]));
      worst = std::max(worst, weighted(p.w, e));
    }
    return worst;
  };
  return derivative_convergence("id:Differential_SuperposCWZweiVars-id", err, opt, gamma.factor);
}

/// Mean-value identity Xi(x, a) - Xi(x, b) = int_0^1 d_2 Xi(x, b + t (a - b)) (a - b) dt, checked
/// with the Simpson rule at every grid point.
inline CheckReport weak_integral_check(const MapPtr& xi, const WeightedFunction& a, const WeightedFunction& b, int n = 256,
                                       const std::string& id = "lem:Stetigkeit_parameterab_Int") {
  const int dx = a.map->in_dim();
  CheckReport worst;
  for (const auto& x : a.grid.points()) {
    Vec ya = a.map->eval(x), yb = b.map->eval(x);
    Vec d = detail::minus(ya, yb);
    Vec direct = detail::minus(xi->eval(detail::concat(x, ya)), xi->eval(detail::concat(x, yb)));
    Vec integral = weak_integral([&](double t) { return apply_d2(*xi, detail::concat(x, detail::axpy(yb, t, d)), dx, d); }, n);
    double err = detail::sup_norm(detail::minus(direct, integral));
    double scale = std::max(1.0, detail::sup_norm(direct));
    keep_worst(worst, check_le(id, err, Provenance::exact, 1e-10 * scale, Provenance::exact, 0.0, Witness{a.factor, x, 1.0 / n},
                               "Simpson quadrature of the mean-value integral"));
  }
  return worst;
}

// ---------------------------------------------------------------------------------------------
// Composition gamma o (eta + id)

/// x -> gamma(x + eta(x)) for eta : U -> V, gamma defined on W with U + V inside W.
inline WeightedFunction compose_perturbed(const MapPtr& gamma, const WeightedFunction& eta, const DomainSet& V) {
  require(V.balanced(), ErrorKind::precondition, "composition needs a balanced perturbation set");
  const DomainSet& U = eta.map->domain();
  require(minkowski_sum_contained(U, V, gamma->domain()), ErrorKind::geometry, "U + V is not contained in the domain of gamma");
  require(eta.map->out_dim() == eta.map->in_dim() && gamma->in_dim() == eta.map->in_dim(), ErrorKind::precondition,
          "composition dimension mismatch");
  detail::check_range(eta, V, "eta");
  auto x = variables(eta.map->in_dim());
  auto e = Expr::call(eta.map, x);
  std::vector<Expr> args;
  for (std::size_t k = 0; k < x.size(); ++k) args.push_back(e[k] + x[k]);
  auto comps = Expr::call(gamma, args);
  return eta.with_map(make_map(eta.map->in_space(), gamma->out_space(), U, comps));
}

struct CompositionCertificates {
  double lip = 0.0;       ///< >= |gamma|_{1_W,1}
  double lip_diff = 0.0;  ///< >= |gamma - gamma0|_{1_W,1}
};

/// The pointwise value bound and the Lipschitz-type difference bound for composition.
inline std::vector<CheckReport> compose_estimates(const MapPtr& gamma, const MapPtr& gamma0, const WeightedFunction& eta,
                                                  const WeightedFunction& eta0, const DomainSet& V, const CompositionCertificates& c,
                                                  const Weight& f) {
  std::vector<CheckReport> out;
  WeightedFunction comp = compose_perturbed(gamma, eta, V);
  {
    CheckReport worst;
    for (const auto& x : eta.grid.points()) {
      double w = std::abs(f.at(eta.factor, x));
      double lhs = weighted(w, detail::sup_norm(comp.map->eval(x)));
      double rhs = weighted(w, c.lip * detail::sup_norm(eta.map->eval(x)) + detail::sup_norm(gamma->eval(x)));
      keep_worst(worst, check_le("est:Funktionswerte_Gewicht_K-Kompo", lhs, Provenance::exact, rhs, Provenance::certified_upper,
                                 scaled_tolerance(1e-9, lhs, rhs), Witness{eta.factor, x, 0.0}, "weight " + f.name));
    }
    out.push_back(worst);
  }
  {
    WeightedFunction comp0 = compose_perturbed(gamma0, eta0, V);
    WeightedFunction lhs_f = comp.with_map(difference(comp.map, comp0.map));
    SeminormValue lhs = weighted_seminorm(lhs_f, f, 0);
    double deta = weighted_seminorm(eta.with_map(difference(eta.map, eta0.map)), f, 0).value;
    double eta0n = weighted_seminorm(eta0, f, 0).value;
    // gamma - gamma0 restricted to U
    auto dg = difference(gamma, gamma0);
    auto restricted = make_map(eta.map->in_space(), dg->out_space(), eta.map->domain(), Expr::call(dg, variables(eta.map->in_dim())));
    double dgam = weighted_seminorm(eta.with_map(restricted), f, 0).value;
    double rhs = c.lip * deta + c.lip_diff * eta0n + dgam;
    out.push_back(check_le("est:f,0-Norm_Differenz_Kompo", lhs.value, Provenance::grid_lower, rhs, Provenance::grid_lower,
                           scaled_tolerance(1e-9, lhs.value, rhs), Witness{eta.factor, lhs.witness, 0.0}, "weight " + f.name));
  }
  return out;
}

/// Symmetric quotient of t -> (gamma + t gamma1)(x + eta(x) + t eta1(x)) against
/// D gamma(x + eta) eta1 + gamma1(x + eta).
inline CheckReport compose_derivative_check(const MapPtr& gamma, const MapPtr& gamma1, const WeightedFunction& eta,
                                            const WeightedFunction& eta1, const Weight& f, const ConvergenceOptions& opt = {},
                                            bool perturb = false, const std::string& id = "id:Ableitung_Kompo") {
  struct Pt {
    Vec x, e, e1, expected;
    double w;
  };
  std::vector<Pt> pts;
  const int d = eta.map->in_dim();
  for (const auto& x : eta.grid.points()) {
    Pt p{x, eta.map->eval(x), eta1.map->eval(x), {}, std::abs(f.at(eta.factor, x))};
    Vec z = detail::minus(x, Vec(d, 0.0));
    for (int k = 0; k < d; ++k) z[k] += p.e[k];
    Vec J = detail::jacobian(*gamma, z);
    Vec g1 = gamma1->eval(z);
    p.expected = g1;
    for (std::size_t o = 0; o < g1.size(); ++o)
      for (int j = 0; j < d; ++j) p.expected[o] += J[o * d + j] * p.e1[j];
    if (perturb)
      for (double& v : p.expected) v *= 1.1;
    pts.push_back(std::move(p));
  }
  auto F = [&](const Pt& p, double t) {
    Vec z = p.x;
    for (int k = 0; k < d; ++k) z[k] += p.e[k] + t * p.e1[k];
    Vec a = gamma->eval(z), b = gamma1->eval(z);
    for (std::size_t o = 0; o < a.size(); ++o) a[o] += t * b[o];
    return a;
  };
  auto err = [&](double t) {
    double worst = 0.0;
    for (const auto& p : pts) {
      Vec a = F(p, t), b = F(p, -t);
      double e = 0.0;
      for (std::size_t o = 0; o < a.size(); ++o) e = std::max(e, std::abs((a[o] - b[o]) / (2 * t) - p.expected[o]));
      worst = std::max(worst, weighted(p.w, e));
    }
    return worst;
  };
  return derivative_convergence(id, err, opt, eta.factor);
}

// ---------------------------------------------------------------------------------------------
// Quasi-inversion QI(a) = -sum_{k >= 1} a^k, so that a + QI(a) - a QI(a) = 0 and
// (1 - a)^{-1} = 1 - QI(a).

struct NeumannConfig {
  double tail_tol = 1e-12;
  int max_terms = 128;
};

/// Smallest N with q^{N+1} / (1 - q) <= tail_tol.
inline int neumann_terms(double q, double tail_tol) {
  require(q >= 0.0 && q < 1.0, ErrorKind::spectral, "Neumann series needs a certified norm bound below one");
  if (q == 0.0) return 1;
  int N = 0;
  double tail = q / (1.0 - q);
  while (tail > tail_tol) {
    tail *= q;
    ++N;
  }
  return std::max(N, 1);
}

struct QuasiInverse {
  Matrix value;
  int terms = 0;
  double tail_bound = 0.0;
};

inline QuasiInverse quasi_inverse(const Matrix& A, double q, const NeumannConfig& cfg = {}) {
  require(q < 1.0, ErrorKind::spectral, "certified norm bound " + std::to_string(q) + " is not below one");
  require(A.norm() <= q * (1 + 1e-15) + 1e-300, ErrorKind::spectral, "operator norm exceeds its certified bound");
  int N = neumann_terms(q, cfg.tail_tol);
  require(N <= cfg.max_terms, ErrorKind::truncation,
          "Neumann truncation needs " + std::to_string(N) + " terms, more than the limit " + std::to_string(cfg.max_terms));
  QuasiInverse r;
  r.terms = N;
  r.tail_bound = std::pow(q, N + 1) / (1 - q);
  Matrix power = A;
  Matrix acc = Matrix::zeros(A.n);
  for (int k = 1; k <= N; ++k) {
    acc = acc - power;
    if (k < N) power = power * A;
  }
  r.value = acc;
  return r;
}

/// |a + QI(a) - a QI(a)| against 2 * tail_tol.
inline CheckReport quasi_inverse_check(const Matrix& A, double q, const NeumannConfig& cfg = {}, const std::string& id = "prop:Zsf_Inversion_gewAbb") {
  QuasiInverse qi = quasi_inverse(A, q, cfg);
  Matrix res = A + qi.value - A * qi.value;
  double r = res.norm();
  return check_le(id, r, Provenance::exact, 2 * cfg.tail_tol, Provenance::exact, 0.0, {},
                  "truncation order " + std::to_string(qi.terms));
}

// ---------------------------------------------------------------------------------------------
// Inversion Inv(phi) = (phi + id)^{-1} - id on V

struct ContractionConfig {
  double tau = 0.5;
  double r = 1.0;
  double fix_tol = 1e-12;
  int max_iters = 200;
};

struct InversionCertificates {
  double lip = 0.0;   ///< >= |phi|_{1,1}
  double sup0 = 0.0;  ///< >= |phi|_{1,0}
};

struct FixedPoint {
  Vec x;
  int iterations = 0;
  /// Largest ratio of successive increments.
  double max_ratio = 0.0;
};

/// Solves x + phi(x) = y by x <- y - phi(x), stopping once the step is below fix_tol (1 - tau) / tau;
/// every iterate must remain in the domain of phi.
inline FixedPoint solve_perturbed_identity(const JetMap& phi, std::span<const double> y, const ContractionConfig& cfg) {
  Vec yv(y.begin(), y.end());
  FixedPoint fp{yv, 0};
  const double stop = cfg.fix_tol * (1 - cfg.tau) / cfg.tau;
  double prev = -1.0;
  while (true) {
    require(phi.domain().contains(fp.x), ErrorKind::contraction, "fixed-point iterate left the domain of phi");
    Vec next = detail::minus(yv, phi.eval(fp.x));
    ++fp.iterations;
    double step = detail::sup_norm(detail::minus(next, fp.x));
    if (prev > 0.0 && step > 1e-10) fp.max_ratio = std::max(fp.max_ratio, step / prev);
    prev = step;
    fp.x = std::move(next);
    if (step <= stop) break;
    require(fp.iterations < cfg.max_iters, ErrorKind::convergence, "fixed-point iteration did not settle");
  }
  require(phi.domain().contains(fp.x), ErrorKind::contraction, "fixed point lies outside the domain of phi");
  return fp;
}

/// Inv(phi) on V. Values come from the contraction; the first-order jet is assembled from
/// (D phi QI(-D phi) - D phi) o (Inv + id), and higher orders by Newton steps in Taylor arithmetic.
class InverseMap : public JetMap {
 public:
  InverseMap(MapPtr phi, DomainSet V, ContractionConfig cfg, NeumannConfig ncfg = {})
      : JetMap(phi->in_space(), phi->out_space(), std::move(V), phi->max_order()), phi_(std::move(phi)), cfg_(cfg), ncfg_(ncfg) {}

  Vec eval(std::span<const double> y) const override {
    check_point(y);
    FixedPoint fp = solve_perturbed_identity(*phi_, y, cfg_);
    return detail::minus(fp.x, Vec(y.begin(), y.end()));
  }

  /// D Inv(phi)(y) from the quasi-inverse identity.
  Matrix differential_identity(const Vec& xstar) const {
    const int d = in_dim();
    Matrix A{d, detail::jacobian(*phi_, xstar)};
    QuasiInverse qi = quasi_inverse((-1.0) * A, std::max(cfg_.tau, A.norm()), ncfg_);
    return A * qi.value - A;
  }

  std::vector<Taylor> taylor(std::span<const double> y, int order) const override {
    check_point(y);
    check_order(order);
    const int d = in_dim();
    Vec yv(y.begin(), y.end());
    Vec xs = solve_perturbed_identity(*phi_, y, cfg_).x;
    auto L = TaylorLayout::get(d, order);
    std::vector<Taylor> X;
    if (order == 0) {
      for (int k = 0; k < d; ++k) X.push_back(Taylor::constant(L, xs[k] - yv[k]));
      return X;
    }
    Matrix M = differential_identity(xs);
    Matrix B = Matrix::identity(d) + M;
    for (int k = 0; k < d; ++k) {
      Taylor t = Taylor::constant(L, xs[k]);
      for (int j = 0; j < d; ++j) t[1 + j] = B(k, j);
      X.push_back(std::move(t));
    }
    if (order >= 2) {
      auto P = phi_->taylor(xs, order);
      for (int it = 1; it < order; ++it) {
        auto ph = substitute(P, X, L);
        std::vector<Taylor> R;
        for (int k = 0; k < d; ++k) {
          Taylor r = X[k] + ph[k] - Taylor::variable(L, k, yv[k]);
          r[0] = 0.0;
          R.push_back(std::move(r));
        }
        for (int k = 0; k < d; ++k)
          for (int j = 0; j < d; ++j) X[k] -= B(k, j) * R[j];
      }
    }
    for (int k = 0; k < d; ++k) X[k] -= Taylor::variable(L, k, yv[k]);
    return X;
  }

  std::string kind() const override { return "inverse(" + phi_->kind() + ")"; }

  const MapPtr& phi() const { return phi_; }
  const ContractionConfig& config() const { return cfg_; }

 private:
  MapPtr phi_;
  ContractionConfig cfg_;
  NeumannConfig ncfg_;
};

/// Checks membership of phi in D_tau and V + B(0, r) inside U, then returns Inv(phi) on V.
inline WeightedFunction invert_perturbed(const MapPtr& phi, const DomainSet& V, const InversionCertificates& c,
                                         const ContractionConfig& cfg, const SampleGrid& grid, int factor = 0,
                                         const NeumannConfig& ncfg = {}) {
  require(cfg.tau > 0.0 && cfg.tau < 1.0, ErrorKind::config, "contraction constant must lie in (0, 1)");
  require(c.lip < cfg.tau, ErrorKind::domain, "phi is outside D_tau: Lipschitz certificate is not below tau");
  const double r = cfg.r;
  require(r > 0.0, ErrorKind::config, "inversion radius must be positive");
  require(c.sup0 < 0.5 * r * (1 - cfg.tau), ErrorKind::domain, "phi is outside D_tau: sup certificate is not below (r/2)(1 - tau)");
  require(minkowski_sum_contained(V, DomainSet::ball_at_zero(V.dim(), r), phi->domain()), ErrorKind::geometry,
          "V + B(0, r) is not contained in U");
  require(phi->in_dim() == phi->out_dim(), ErrorKind::precondition, "inversion needs phi : U -> X");
  auto inv = std::make_shared<InverseMap>(phi, V, cfg, ncfg);
  return WeightedFunction(inv, grid, -1, factor);
}

/// Residual, value bound and Lipschitz dependence bound for the inverse; psi is a second element
/// of D_tau with certified Lipschitz constant lip_diff for phi - psi.
inline std::vector<CheckReport> inversion_estimates(const WeightedFunction& inv_phi, const WeightedFunction& inv_psi,
                                                    const InversionCertificates& cphi, const InversionCertificates& cpsi,
                                                    double lip_diff, const Weight& f) {
  std::vector<CheckReport> out;
  const auto& ip = dynamic_cast<const InverseMap&>(*inv_phi.map);
  const auto& is = dynamic_cast<const InverseMap&>(*inv_psi.map);
  const JetMap& phi = *ip.phi();
  const JetMap& psi = *is.phi();
  const double fix_tol = ip.config().fix_tol;
  CheckReport resid;
  double lhs1 = 0, rhs1 = 0, lhs2 = 0, rhs_phi = 0, rhs_diff = 0;
  Vec w1, w2;
  for (const auto& y : inv_phi.grid.points()) {
    double w = std::abs(f.at(inv_phi.factor, y));
    Vec a = inv_phi.map->eval(y), b = inv_psi.map->eval(y);
    Vec xa = detail::axpy(a, 1.0, Vec(y.begin(), y.end()));
    Vec res = detail::minus(detail::axpy(xa, 1.0, phi.eval(xa)), Vec(y.begin(), y.end()));
    keep_worst(resid, check_le("prop:Zsf_Inversion_gewAbb", detail::sup_norm(res), Provenance::exact, 2 * fix_tol, Provenance::exact, 0.0,
                               Witness{inv_phi.factor, y, 0.0}, "fixed-point residual"));
    Vec py = phi.eval(y), qy = psi.eval(y);
    double v1 = weighted(w, detail::sup_norm(a));
    if (v1 >= lhs1) {
      lhs1 = v1;
      w1 = y;
    }
    rhs_phi = std::max(rhs_phi, weighted(w, detail::sup_norm(py)));
    double v2 = weighted(w, detail::sup_norm(detail::minus(b, a)));
    if (v2 >= lhs2) {
      lhs2 = v2;
      w2 = y;
    }
    rhs_diff = std::max(rhs_diff, weighted(w, detail::sup_norm(detail::minus(py, qy))));
  }
  out.push_back(resid);
  rhs1 = rhs_phi / (1 - cphi.lip);
  out.push_back(check_le("est:Abschaetzung_gewichteter_FWert_der_K-Inversion", lhs1, Provenance::grid_lower, rhs1, Provenance::grid_lower,
                         scaled_tolerance(1e-9, lhs1, rhs1), Witness{inv_phi.factor, w1, 0.0}, "weight " + f.name));
  double rhs2 = (lip_diff * rhs_phi / (1 - cphi.lip) + rhs_diff) / (1 - cpsi.lip);
  out.push_back(check_le("est:f0-norm_Diff_KoorInv", lhs2, Provenance::grid_lower, rhs2, Provenance::grid_lower,
                         scaled_tolerance(1e-9, lhs2, rhs2), Witness{inv_phi.factor, w2, 0.0}, "weight " + f.name));
  return out;
}

/// D Inv(phi) from the quasi-inverse identity against a central-difference Jacobian of Inv(phi).
inline CheckReport inverse_differential_check(const WeightedFunction& inv, double h = 1e-4, double tol = 1e-6) {
  const auto& im = dynamic_cast<const InverseMap&>(*inv.map);
  const int d = im.in_dim();
  CheckReport worst;
  for (const auto& y : inv.grid.points()) {
    Vec xs = detail::axpy(im.eval(y), 1.0, Vec(y.begin(), y.end()));
    Matrix M = im.differential_identity(xs);
    Matrix F = Matrix::zeros(d);
    for (int j = 0; j < d; ++j) {
      Vec p(y.begin(), y.end()), q(y.begin(), y.end());
      p[j] += h;
      q[j] -= h;
      Vec a = im.eval(p), b = im.eval(q);
      for (int k = 0; k < d; ++k) F(k, j) = (a[k] - b[k]) / (2 * h);
    }
    double err = (M - F).norm();
    keep_worst(worst, check_le("id:Differential_der_inversen_Abb", err, Provenance::exact, tol, Provenance::exact, 0.0,
                               Witness{inv.factor, y, h}, "identity against finite-difference Jacobian"));
  }
  return worst;
}

/// Symmetric quotient of t -> Inv(phi + t phi1)(y) against (QI(-D phi) phi1 - phi1)(Inv(phi)(y) + y).
inline CheckReport inversion_derivative_check(const WeightedFunction& inv, const MapPtr& phi1, const Weight& f,
                                              const ConvergenceOptions& opt = {}, bool perturb = false,
                                              const NeumannConfig& ncfg = {}) {
  const auto& im = dynamic_cast<const InverseMap&>(*inv.map);
  const MapPtr& phi = im.phi();
  const int d = im.in_dim();
  struct Pt {
    Vec y, expected;
    double w;
  };
  std::vector<Pt> pts;
  for (const auto& y : inv.grid.points()) {
    Vec xs = detail::axpy(im.eval(y), 1.0, Vec(y.begin(), y.end()));
    Matrix A{d, detail::jacobian(*phi, xs)};
    QuasiInverse qi = quasi_inverse((-1.0) * A, std::max(im.config().tau, A.norm()), ncfg);
    Vec p1 = phi1->eval(xs);
    Vec e = detail::minus(qi.value.apply(p1), p1);
    if (perturb)
      for (double& v : e) v *= 1.1;
    pts.push_back({Vec(y.begin(), y.end()), e, std::abs(f.at(inv.factor, y))});
  }
  ContractionConfig tight = im.config();
  auto err = [&](double t) {
    auto plus = sum(phi, scaled(phi1, t));
    auto minus = sum(phi, scaled(phi1, -t));
    double worst = 0.0;
    for (const auto& p : pts) {
      Vec a = detail::minus(solve_perturbed_identity(*plus, p.y, tight).x, p.y);
      Vec b = detail::minus(solve_perturbed_identity(*minus, p.y, tight).x, p.y);
      double e = 0.0;
      for (int k = 0; k < d; ++k) e = std::max(e, std::abs((a[k] - b[k]) / (2 * t) - p.expected[k]));
      worst = std::max(worst, weighted(p.w, e));
    }
    return worst;
  };
  return derivative_convergence("id:Ableitung_Inversion", err, opt, inv.factor);
}

}  // namespace wrp
