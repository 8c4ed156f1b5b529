#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wrp/operators.hpp"
#include "wrp/spaces.hpp"

namespace wrp {

/// A finite family (gamma_i) of weighted functions, factor i living on U_i.
struct RestrictedElement {
  std::vector<WeightedFunction> parts;

  std::size_t size() const { return parts.size(); }
  const WeightedFunction& operator[](std::size_t i) const { return parts[i]; }

  static RestrictedElement of(std::vector<WeightedFunction> parts) {
    for (std::size_t i = 0; i < parts.size(); ++i) parts[i].factor = static_cast<int>(i);
    return RestrictedElement{std::move(parts)};
  }

  /// Same grids and factor indices, new maps.
  RestrictedElement with_maps(const std::vector<MapPtr>& maps) const {
    require(maps.size() == parts.size(), ErrorKind::precondition, "family size mismatch");
    RestrictedElement r;
    for (std::size_t i = 0; i < parts.size(); ++i) r.parts.push_back(parts[i].with_map(maps[i]));
    return r;
  }

  RestrictedElement restrict_to(const std::vector<int>& indices) const {
    RestrictedElement r;
    for (int i : indices) r.parts.push_back(parts.at(i));
    return r;
  }
};

inline RestrictedElement family_difference(const RestrictedElement& a, const RestrictedElement& b) {
  require(a.size() == b.size(), ErrorKind::precondition, "family size mismatch");
  std::vector<MapPtr> m;
  for (std::size_t i = 0; i < a.size(); ++i) m.push_back(difference(a[i].map, b[i].map));
  return a.with_maps(m);
}

inline RestrictedElement family_scaled(const RestrictedElement& a, double s) {
  std::vector<MapPtr> m;
  for (const auto& p : a.parts) m.push_back(scaled(p.map, s));
  return a.with_maps(m);
}

inline RestrictedElement family_sum(const RestrictedElement& a, const RestrictedElement& b) {
  require(a.size() == b.size(), ErrorKind::precondition, "family size mismatch");
  std::vector<MapPtr> m;
  for (std::size_t i = 0; i < a.size(); ++i) m.push_back(sum(a[i].map, b[i].map));
  return a.with_maps(m);
}

inline RestrictedElement family_differential(const RestrictedElement& a) {
  RestrictedElement r;
  for (const auto& p : a.parts) r.parts.push_back(WeightedFunction(differential(p.map), p.grid, p.max_order - 1, p.factor));
  return r;
}

struct FamilySeminorm {
  double value = 0.0;
  int argmax = -1;
  std::vector<double> per_factor;
  Vec witness;
};

/// Exact maximum over the family of the factor grid seminorms; ties keep the first factor.
inline FamilySeminorm family_seminorm(const RestrictedElement& x, const Weight& f, int l) {
  FamilySeminorm s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    SeminormValue v = weighted_seminorm(x[i], f, l);
    s.per_factor.push_back(v.value);
    if (s.argmax < 0 || v.value > s.value) {
      s.value = v.value;
      s.argmax = static_cast<int>(i);
      s.witness = v.witness;
    }
  }
  return s;
}

/// Grid maximum of |f(x)| |gamma_i(x)| restricted to points of another grid.
inline double seminorm_on(const MapPtr& g, const SampleGrid& grid, const Weight& f, int factor) {
  double m = 0.0;
  for (const auto& x : grid.points()) m = std::max(m, weighted(std::abs(f.at(factor, x)), detail::sup_norm(g->eval(x))));
  return m;
}

// ---------------------------------------------------------------------------------------------
// Structure of restricted products

/// Lipschitz continuity into the restricted product. For every pair of parameters the family
/// quotient equals the largest factor quotient (general form), and stays below the largest
/// certified factor constant (weighted form).
inline std::vector<CheckReport> lipschitz_bound_check(const std::function<RestrictedElement(double)>& A, const Vec& params,
                                                      const Weight& f, int l, const Vec& factor_lip) {
  require(params.size() >= 2, ErrorKind::precondition, "Lipschitz check needs at least two parameter samples");
  double L = 0.0;
  for (double v : factor_lip) L = std::max(L, v);
  std::vector<RestrictedElement> vals;
  for (double p : params) vals.push_back(A(p));
  CheckReport general, weighted_rep;
  for (std::size_t a = 0; a < params.size(); ++a)
    for (std::size_t b = a + 1; b < params.size(); ++b) {
      double dist = std::abs(params[a] - params[b]);
      if (dist == 0.0) continue;
      FamilySeminorm d = family_seminorm(family_difference(vals[a], vals[b]), f, l);
      double quotient = d.value / dist;
      double best_factor = 0.0;
      for (double v : d.per_factor) best_factor = std::max(best_factor, v / dist);
      Witness w{d.argmax, {params[a], params[b]}, dist};
      keep_worst(general, check_eq("lem:L-Stetigkeit_Abb_in_LinfProd", quotient, Provenance::grid_lower, best_factor,
                                   Provenance::grid_lower, scaled_tolerance(1e-12, quotient, best_factor), w,
                                   "family quotient against the largest factor quotient"));
      double rhs = L * dist;
      keep_worst(weighted_rep, check_le("lem:L-Stetigkeit_Abb_in_LinfProd-gewAbb", d.value, Provenance::grid_lower, rhs,
                                        Provenance::certified_upper, scaled_tolerance(1e-12, d.value, rhs), w,
                                        "weight " + f.name + ", order " + std::to_string(l)));
    }
  return {general, weighted_rep};
}

/// Splits (e_i, f_i) into ((e_i), (f_i)) and joins them back. The round trip must reproduce every
/// grid value bit for bit, and the seminorms must satisfy p^E, p^F <= p^{ExF} <= p^E + p^F.
inline std::vector<CheckReport> product_iso_roundtrip(const RestrictedElement& x, const Weight& f, int l,
                                                      const std::string& id = "lem:pktwProduktLInf") {
  std::vector<MapPtr> E, F, joined;
  for (const auto& p : x.parts) {
    auto [a, b] = pair_split(p);
    E.push_back(a.map);
    F.push_back(b.map);
    joined.push_back(pair_join(a, b).map);
  }
  RestrictedElement xe = x.with_maps(E), xf = x.with_maps(F), back = x.with_maps(joined);
  long mismatches = 0;
  Witness mw;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (const auto& pt : x[i].grid.points()) {
      Vec u = x[i].map->eval(pt), v = back[i].map->eval(pt);
      if (u != v) {
        if (mismatches == 0) mw = Witness{static_cast<int>(i), pt, 0.0};
        ++mismatches;
      }
    }
  std::vector<CheckReport> out;
  out.push_back(check_eq(id, static_cast<double>(mismatches), Provenance::exact, 0.0, Provenance::exact, 0.0, mw,
                         "grid values differing after split and join"));
  double pe = family_seminorm(xe, f, l).value, pf = family_seminorm(xf, f, l).value, p = family_seminorm(x, f, l).value;
  double mx = std::max(pe, pf);
  out.push_back(check_le(id, mx, Provenance::grid_lower, p, Provenance::grid_lower, scaled_tolerance(1e-12, mx, p), {},
                         "max(p^E, p^F) <= p of the pair"));
  out.push_back(check_le(id, p, Provenance::grid_lower, pe + pf, Provenance::grid_lower, scaled_tolerance(1e-12, p, pe + pf), {},
                         "p of the pair <= p^E + p^F"));
  return out;
}

/// Cauchy sequence x_n with declared envelope: |x_m - x_n| <= env(n) for m > n, |x_n - x_lim| <= env(n),
/// and the limit has finite family seminorm.
inline std::vector<CheckReport> cauchy_limit_check(const std::function<RestrictedElement(int)>& seq, const RestrictedElement& limit,
                                                   const std::function<double(int)>& envelope, int n_max, const Weight& f, int l,
                                                   double tol = 1e-12, const std::string& id = "lem:Linf_compl_wenn_Faktoren_c") {
  std::vector<RestrictedElement> xs;
  for (int n = 0; n <= n_max; ++n) xs.push_back(seq(n));
  CheckReport cauchy, tail;
  for (int n = 0; n <= n_max; ++n) {
    double env = envelope(n);
    Witness w{-1, {}, static_cast<double>(n)};
    for (int m = n + 1; m <= n_max; ++m) {
      double d = family_seminorm(family_difference(xs[m], xs[n]), f, l).value;
      keep_worst(cauchy, check_le(id, d, Provenance::grid_lower, env, Provenance::exact, tol, w, "Cauchy increment against envelope"));
    }
    FamilySeminorm t = family_seminorm(family_difference(xs[n], limit), f, l);
    w.factor = t.argmax;
    keep_worst(tail, check_le(id, t.value, Provenance::grid_lower, env, Provenance::exact, tol, w, "distance to the limit against envelope"));
  }
  double lim = family_seminorm(limit, f, l).value;
  std::vector<CheckReport> out{cauchy, tail};
  out.push_back(check_le(id, lim, Provenance::grid_lower, std::numeric_limits<double>::max(), Provenance::exact, 0.0, {},
                         "limit has finite family seminorm"));
  return out;
}

/// The (f, l) value does not depend on the order at which jets are computed.
inline CheckReport initial_topology_check(const RestrictedElement& x, const Weight& f, int l, int k,
                                          const std::string& id = "lem:CinfLinf_initial_CkLinf") {
  require(l <= k, ErrorKind::budget, "order view below the seminorm order");
  double direct = family_seminorm(x, f, l).value;
  double via = 0.0;
  for (const auto& p : x.parts)
    for (const auto& pt : p.grid.points()) {
      Jet j = jet_of(*p.map, pt, k);
      via = std::max(via, weighted(std::abs(f.at(p.factor, pt)), op_norm(j.d[l])));
    }
  return check_eq(id, direct, Provenance::grid_lower, via, Provenance::grid_lower, 0.0, {},
                  "order " + std::to_string(l) + " read from the order-" + std::to_string(k) + " jet");
}

/// Family version of the reduction |(g_i)|_{f, l+1} = |(D g_i)|_{f, l}.
inline CheckReport family_decomposition_check(const RestrictedElement& x, const Weight& f, int l,
                                              const std::string& id = "prop:Zerlegungssatz_Familie") {
  FamilySeminorm a = family_seminorm(x, f, l + 1);
  FamilySeminorm b = family_seminorm(family_differential(x), f, l);
  return check_eq(id, a.value, Provenance::grid_lower, b.value, Provenance::grid_lower, scaled_tolerance(1e-12, a.value, b.value),
                  Witness{a.argmax, a.witness, 0.0}, "weight " + f.name + ", order " + std::to_string(l));
}

// ---------------------------------------------------------------------------------------------
// Adjusting weights and neighbourhoods

/// d_i = dist(0, boundary of V_i).
inline Vec zero_distances(const std::vector<DomainSet>& V) {
  Vec d;
  for (const auto& v : V) {
    require(v.star_shaped(), ErrorKind::precondition, "target sets must be star-shaped with center 0");
    d.push_back(v.boundary_distance(Vec(v.dim(), 0.0)));
  }
  return d;
}

/// Throws unless omega is an adjusting weight for (V_i) and every grid value respects its certified inf.
inline void require_adjusting(const Weight& omega, const std::vector<DomainSet>& V, const std::vector<SampleGrid>& grids) {
  for (const auto& r : check_adjusting_weight(omega, zero_distances(V), grids))
    require(r.passed(), ErrorKind::precondition, "'" + omega.name + "' is not an adjusting weight: " + r.detail);
  omega.validate(grids);
}

/// Largest r with gamma_i(x) + B(0, r / |omega(x)|) inside V_i at every grid point.
inline double clearance_radius(const RestrictedElement& g, const Weight& omega, const std::vector<DomainSet>& V) {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (const auto& x : g[i].grid.points()) {
      Vec y = g[i].map->eval(x);
      double dist = V[i].boundary_distance(y);
      r = std::min(r, std::abs(omega.at(static_cast<int>(i), x)) * dist);
    }
  return r;
}

inline std::vector<SampleGrid> grids_of(const RestrictedElement& x) {
  std::vector<SampleGrid> g;
  for (const auto& p : x.parts) g.push_back(p.grid);
  return g;
}

/// Openness: gamma has clearance r; every eta with |eta - gamma|_{omega,0} < r has clearance
/// s = r - |eta - gamma|_{omega,0} at every grid point.
inline CheckReport openness_check(const RestrictedElement& gamma, const RestrictedElement& eta, const Weight& omega,
                                  const std::vector<DomainSet>& V, double r, const std::string& id = "ass1:CFof_offen") {
  const double have = clearance_radius(gamma, omega, V);
  require(have >= r, ErrorKind::precondition, "gamma does not have the declared clearance radius");
  const double dist = family_seminorm(family_difference(eta, gamma), omega, 0).value;
  if (!(dist < r)) return skipped(id, "eta is not inside the omega-ball of radius r around gamma");
  const double s = r - dist;
  CheckReport worst;
  for (std::size_t i = 0; i < eta.size(); ++i)
    for (const auto& x : eta[i].grid.points()) {
      double need = s / std::abs(omega.at(static_cast<int>(i), x));
      double have_i = V[i].boundary_distance(eta[i].map->eval(x));
      keep_worst(worst, check_le(id, need, Provenance::exact, have_i, Provenance::exact, scaled_tolerance(1e-12, need, have_i),
                                 Witness{static_cast<int>(i), x, 0.0}, "ball of radius s/|omega| around eta_i(x) inside V_i"));
    }
  return worst;
}

/// Inclusion of the omega-ball of radius tau in the tau V_i neighbourhood, in the form
/// |eta_i(x)| < tau d_i (point) and |eta_i(x)| + (tau - |eta|_{omega,0}) / |omega(x)| <= tau d_i (ball).
inline std::vector<CheckReport> inclusion_check(const RestrictedElement& eta, const Weight& omega, const std::vector<DomainSet>& V,
                                                double tau, const std::string& id = "incl:1-Kugel_f0-norm_sub_CFof") {
  require(tau > 0.0, ErrorKind::config, "tau must be positive");
  require_adjusting(omega, V, grids_of(eta));
  const Vec d = zero_distances(V);
  const double n = family_seminorm(eta, omega, 0).value;
  const double r = tau - n;
  CheckReport point, ball;
  for (std::size_t i = 0; i < eta.size(); ++i)
    for (const auto& x : eta[i].grid.points()) {
      double v = detail::sup_norm(eta[i].map->eval(x));
      double cap = tau * d[i];
      Witness w{static_cast<int>(i), x, 0.0};
      // strict containment in the open set tau V_i
      CheckReport pr = check_le(id, v, Provenance::exact, cap, Provenance::exact, 0.0, w, "eta_i(x) inside tau V_i");
      if (!(v < cap)) pr.status = Status::fail;
      keep_worst(point, pr);
      if (r > 0.0) {
        double lhs = v + r / std::abs(omega.at(static_cast<int>(i), x));
        keep_worst(ball, check_le(id, lhs, Provenance::exact, cap, Provenance::exact, scaled_tolerance(1e-12, lhs, cap), w,
                                  "eta_i(x) + B(0, r/|omega(x)|) inside tau V_i"));
      }
    }
  if (r <= 0.0) {
    point.detail += "; |eta|_{omega,0} = " + format_double(n) + " is not below tau";
    return {point};
  }
  return {point, ball};
}

/// |x|_{1,l} <= (1/c) |x|_{omega,l} with c the certified inf of omega over the family.
inline CheckReport constant_one_check(const RestrictedElement& x, const Weight& omega, int l,
                                      const std::string& id = "bem:konstantes-1-Gew_adjust-weight") {
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto inf = omega.inf_bound(static_cast<int>(i));
    if (!inf) return skipped(id, "weight '" + omega.name + "' has no certified inf");
    c = std::min(c, *inf);
  }
  require(c > 0.0, ErrorKind::precondition, "certified inf must be positive");
  omega.validate(grids_of(x));
  FamilySeminorm a = family_seminorm(x, Weight::one(), l);
  double rhs = family_seminorm(x, omega, l).value / c;
  return check_le(id, a.value, Provenance::grid_lower, rhs, Provenance::grid_lower, scaled_tolerance(1e-12, a.value, rhs),
                  Witness{a.argmax, a.witness, 0.0}, "order " + std::to_string(l));
}

/// Family derivative by symmetric quotients: the family seminorm of
/// (F(t) - F(-t)) / 2t - expected must decay at second order.
inline CheckReport family_derivative_convergence(const std::string& id, const std::function<RestrictedElement(double)>& F,
                                                 const RestrictedElement& expected, const Weight& f,
                                                 const ConvergenceOptions& opt = {}) {
  auto err = [&](double t) {
    RestrictedElement q = family_scaled(family_difference(F(t), F(-t)), 0.5 / t);
    return family_seminorm(family_difference(q, expected), f, 0).value;
  };
  return derivative_convergence(id, err, opt);
}

// ---------------------------------------------------------------------------------------------
// Simultaneous operators

struct SimResult {
  RestrictedElement value;
  std::vector<CheckReport> reports;
};

/// Maps x -> b(M(x), gamma(x)) for a bilinear b on the output spaces of M and gamma.
inline MapPtr bilinear_of(const MultilinearMap& b, const MapPtr& M, const MapPtr& gamma) {
  require(b.order() == 2, ErrorKind::precondition, "bilinear pairing expected");
  const int n = gamma->in_dim();
  auto A = Expr::call(M, variables(n));
  auto G = Expr::call(gamma, variables(n));
  const int d1 = b.args()[0].dim(), d2 = b.args()[1].dim();
  require(d1 == M->out_dim() && d2 == gamma->out_dim(), ErrorKind::precondition, "pairing does not match the factor maps");
  std::vector<Expr> comps;
  for (int o = 0; o < b.out().dim(); ++o) {
    Expr s = 0.0;
    for (int j = 0; j < d1; ++j)
      for (int k = 0; k < d2; ++k) {
        double c = b.entries()[(static_cast<long>(o) * d1 + j) * d2 + k];
        if (c != 0.0) s += Expr::constant(c) * A[j] * G[k];
      }
    comps.push_back(s);
  }
  return make_map(gamma->in_space(), b.out(), gamma->domain(), std::move(comps));
}

/// n-linear beta applied factor-wise to maps on a common domain.
inline MapPtr multilinear_of(const MultilinearMap& beta, const std::vector<MapPtr>& args) {
  require(static_cast<int>(args.size()) == beta.order() && !args.empty(), ErrorKind::precondition, "arity mismatch");
  const int n = args.front()->in_dim();
  std::vector<std::vector<Expr>> A;
  for (const auto& a : args) A.push_back(Expr::call(a, variables(n)));
  std::vector<Expr> comps;
  const long block = beta.block_size();
  for (int o = 0; o < beta.out().dim(); ++o) {
    Expr s = 0.0;
    for (long t = 0; t < block; ++t) {
      double c = beta.entries()[o * block + t];
      if (c == 0.0) continue;
      Expr term = Expr::constant(c);
      long rest = t;
      std::vector<int> idx(args.size());
      for (int k = static_cast<int>(args.size()) - 1; k >= 0; --k) {
        int m = beta.args()[k].dim();
        idx[k] = static_cast<int>(rest % m);
        rest /= m;
      }
      for (std::size_t k = 0; k < args.size(); ++k) term = term * A[k][idx[k]];
      s += term;
    }
    comps.push_back(s);
  }
  return make_map(args.front()->in_space(), beta.out(), args.front()->domain(), std::move(comps));
}

/// (gamma_i) -> (b_i(M_i, gamma_i)). cert bounds |M_i|_{1,0} and pairs f with the dominating g.
inline SimResult sim_multiply(const std::vector<MapPtr>& M, const std::vector<MultilinearMap>& b, const RestrictedElement& x,
                              const Weight& f, const Weight& g, const DominanceCertificate& cert,
                              const std::string& id = "lem:simultane_mult-multiplier") {
  require(M.size() == x.size() && b.size() == x.size(), ErrorKind::precondition, "family size mismatch");
  SimResult res;
  auto grids = grids_of(x);
  for (const auto& r : check_dominance_certificate(f, g, cert, grids, "cond:est_sim-multiplier_weights")) {
    require(!r.failed(), ErrorKind::precondition, "dominance certificate fails on factor " + std::to_string(r.witness.factor));
    res.reports.push_back(r);
  }
  double bnorm = 0.0;
  std::vector<MapPtr> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double K = cert.constant(static_cast<int>(i));
    require(seminorm_on(M[i], x[i].grid, Weight::one(), 0) <= K, ErrorKind::precondition,
            "multiplier bound K_i is below a sampled value of |M_i| on factor " + std::to_string(i));
    bnorm = std::max(bnorm, op_norm(b[i]));
    out.push_back(bilinear_of(b[i], M[i], x[i].map));
  }
  res.value = x.with_maps(out);
  FamilySeminorm lhs = family_seminorm(res.value, f, 0);
  double rhs = bnorm * family_seminorm(x, g, 0).value;
  res.reports.push_back(check_le(id, lhs.value, Provenance::grid_lower, rhs, Provenance::grid_lower, scaled_tolerance(1e-9, lhs.value, rhs),
                                 Witness{lhs.argmax, lhs.witness, 0.0}, "sup_i |b_i| |x|_{g,0}"));
  return res;
}

/// (gamma_{i,1}, ..., gamma_{i,n}) -> beta_i(gamma_{i,1}, ..., gamma_{i,n}) with |f_i| <= prod_j |g^j_i|.
inline SimResult sim_multilinear(const std::vector<MultilinearMap>& beta, const std::vector<RestrictedElement>& args, const Weight& f,
                                 const std::vector<Weight>& gs, const std::string& id = "lem:multilineareSuperpos-Linf") {
  require(!args.empty() && gs.size() == args.size(), ErrorKind::precondition, "one weight per argument family expected");
  const auto& first = args.front();
  require(beta.size() == first.size(), ErrorKind::precondition, "family size mismatch");
  for (std::size_t i = 0; i < first.size(); ++i)
    for (const auto& x : first[i].grid.points()) {
      double prod = 1.0;
      for (const auto& g : gs) prod *= std::abs(g.at(static_cast<int>(i), x));
      require(std::abs(f.at(static_cast<int>(i), x)) <= prod * (1 + 1e-12), ErrorKind::precondition,
              "weight factorisation |f| <= prod |g^j| fails on factor " + std::to_string(i));
    }
  SimResult res;
  double C = 0.0;
  std::vector<MapPtr> out;
  for (std::size_t i = 0; i < first.size(); ++i) {
    std::vector<MapPtr> maps;
    for (const auto& a : args) maps.push_back(a[i].map);
    C = std::max(C, op_norm(beta[i]));
    out.push_back(multilinear_of(beta[i], maps));
  }
  res.value = first.with_maps(out);
  FamilySeminorm lhs = family_seminorm(res.value, f, 0);
  double rhs = C;
  for (std::size_t j = 0; j < args.size(); ++j) rhs *= family_seminorm(args[j], gs[j], 0).value;
  res.reports.push_back(check_le(id, lhs.value, Provenance::grid_lower, rhs, Provenance::grid_lower, scaled_tolerance(1e-9, lhs.value, rhs),
                                 Witness{lhs.argmax, lhs.witness, 0.0}, "C prod_j |x_j|_{g^j,0}"));
  return res;
}

/// The general multilinear lemma for constant arguments: max_i |beta_i(x_1, ..., x_m)| <= C prod |x_k|.
inline CheckReport multilinear_family_check(const std::vector<MultilinearMap>& beta, const std::vector<Vec>& xs,
                                            const std::string& id = "lem:m-lin_Abb_glm_stetig->Prod_stetig") {
  double C = 0.0, lhs = 0.0;
  int arg = -1;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    C = std::max(C, op_norm(beta[i]));
    double v = beta[i].out().norm(beta[i].apply(xs));
    if (v > lhs || arg < 0) {
      lhs = v;
      arg = static_cast<int>(i);
    }
  }
  double rhs = C;
  for (std::size_t k = 0; k < xs.size(); ++k) rhs *= beta.front().args()[k].norm(xs[k]);
  return check_le(id, lhs, Provenance::exact, rhs, Provenance::exact, scaled_tolerance(1e-12, lhs, rhs), Witness{arg, {}, 0.0},
                  "uniformly bounded multilinear family");
}

/// Simultaneous superposition (gamma_i) -> (beta_i(., gamma_i)) on the omega-neighbourhood.
/// cert pairs f with g for order 1 (K_i >= |beta_i|_{1,1}); certs carry the per-factor constants.
inline SimResult sim_superpose(const std::vector<MapPtr>& beta, const std::vector<SuperposeCertificates>& certs,
                               const RestrictedElement& x, const std::vector<DomainSet>& V, const Weight& omega, const Weight& f,
                               const Weight& g, const DominanceCertificate& cert, const RestrictedElement* direction = nullptr,
                               const std::string& id = "prop:simultane_SP_BCinf0_Produkt") {
  require(beta.size() == x.size() && certs.size() == x.size() && V.size() == x.size(), ErrorKind::precondition, "family size mismatch");
  auto grids = grids_of(x);
  require_adjusting(omega, V, grids);
  const double r = clearance_radius(x, omega, V);
  require(r > 0.0, ErrorKind::precondition, "element is not in the omega-neighbourhood of (V_i)");
  SimResult res;
  for (const auto& rep : check_dominance_certificate(f, g, cert, grids, "cond:est_SP-Abb_weights")) {
    require(!rep.failed(), ErrorKind::precondition, "dominance certificate fails on factor " + std::to_string(rep.witness.factor));
    res.reports.push_back(rep);
  }
  std::vector<MapPtr> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(cert.constant(static_cast<int>(i)) >= certs[i].d2_sup0, ErrorKind::precondition,
            "K_i is below the certified bound of d_2 beta_i on factor " + std::to_string(i));
    out.push_back(superpose(beta[i], x[i], V[i]).map);
    for (auto& rep : superpose_estimates(beta[i], certs[i], x[i], V[i], f)) {
      rep.witness.factor = static_cast<int>(i);
      res.reports.push_back(rep);
    }
  }
  res.value = x.with_maps(out);
  FamilySeminorm lhs = family_seminorm(res.value, f, 0);
  double rhs = family_seminorm(x, g, 0).value;
  res.reports.push_back(check_le(id, lhs.value, Provenance::grid_lower, rhs, Provenance::grid_lower, scaled_tolerance(1e-9, lhs.value, rhs),
                                 Witness{lhs.argmax, lhs.witness, 0.0}, "|beta_*(x)|_{f,0} <= |x|_{g,0}"));
  if (direction) {
    // family derivative d beta_*(x; h) = (d_2 beta_i(., x_i) h_i)_i
    std::vector<MapPtr> expected;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int dx = x[i].map->in_dim(), dy = x[i].map->out_dim();
      auto X = variables(dx);
      auto G = Expr::call(x[i].map, X);
      auto H = Expr::call((*direction)[i].map, X);
      std::vector<Expr> args = X;
      args.insert(args.end(), G.begin(), G.end());
      auto D2 = Expr::call(partial(beta[i], dx, dy), args);
      std::vector<Expr> comps;
      for (int o = 0; o < beta[i]->out_dim(); ++o) {
        Expr s = 0.0;
        for (int j = 0; j < dy; ++j) s += D2[o * dy + j] * H[j];
        comps.push_back(s);
      }
      expected.push_back(make_map(x[i].map->in_space(), beta[i]->out_space(), x[i].map->domain(), comps));
    }
    auto F = [&](double t) {
      std::vector<MapPtr> m;
      RestrictedElement shifted = family_sum(x, family_scaled(*direction, t));
      for (std::size_t i = 0; i < x.size(); ++i) m.push_back(superpose(beta[i], shifted[i], V[i]).map);
      return x.with_maps(m);
    };
    res.reports.push_back(family_derivative_convergence("lem:Abb_nach_Linf_Ck_wenn_Komp_Ck_mit_stetigem_Diff", F, x.with_maps(expected), f));
    int a = family_seminorm(*direction, f, 0).argmax;
    CheckReport c = superpose_derivative_check(beta[a], x[a], (*direction)[a], V[a], f);
    c.witness.factor = a;
    res.reports.push_back(c);
  }
  return res;
}

/// Certificate transformer: from K_l >= |D beta|_{1,l} (l = 0..L) to
/// K'_l = l K_{l-1} + R K_l >= |d beta|_{1,l} on U x B(0, R) for l = 1..L.
inline Vec comparison_certificates(const Vec& K, double R) {
  Vec out(K.size(), 0.0);
  for (std::size_t l = 1; l < K.size(); ++l) out[l] = static_cast<double>(l) * K[l - 1] + R * K[l];
  return out;
}

/// The ordinary differential (x, h) -> D beta(x) h on U x B(0, R).
inline MapPtr ordinary_differential(const MapPtr& beta, double R) {
  const int n = beta->in_dim(), m = beta->out_dim();
  auto D = Expr::call(differential(beta), variables(n));
  std::vector<Expr> comps;
  for (int o = 0; o < m; ++o) {
    Expr s = 0.0;
    for (int j = 0; j < n; ++j) s += D[o * n + j] * Expr::var(n + j);
    comps.push_back(s);
  }
  DomainSet dom = DomainSet::product({beta->domain(), DomainSet::ball_at_zero(n, R)});
  return make_map(Space::product({beta->in_space(), Space::sup(n)}), beta->out_space(), dom, std::move(comps));
}

/// Grid maxima of |D^l d beta| on U x B(0, R) against the transformed certificates.
inline std::vector<CheckReport> comparison_check(const MapPtr& beta, const Vec& K, double R, int per_axis = 0,
                                                 const std::string& id = "lem:vergleich_Bedingungen_simultane-multiplier_simu-Supo") {
  Vec Kp = comparison_certificates(K, R);
  MapPtr db = ordinary_differential(beta, R);
  SampleGrid grid = SampleGrid::lattice(db->domain(), per_axis);
  std::vector<CheckReport> out;
  for (std::size_t l = 1; l < K.size(); ++l) {
    double worst = 0.0;
    Vec wp;
    for (const auto& p : grid.points()) {
      double v = op_norm(derivative_at(*db, p, static_cast<int>(l)));
      if (v > worst || wp.empty()) {
        worst = v;
        wp = p;
      }
    }
    out.push_back(check_le(id, worst, Provenance::grid_lower, Kp[l], Provenance::certified_upper, scaled_tolerance(1e-9, worst, Kp[l]),
                           Witness{-1, wp, 0.0}, "order " + std::to_string(l)));
  }
  return out;
}

/// Uniformly bounded beta_i : V_i -> Z_i with beta_i(0) = 0, superposed as (x, y) -> beta_i(y).
/// K[l] >= sup_i |beta_i|_{1,l}; the weight g = K_1 f dominates automatically.
inline SimResult sim_superpose_uniform(const std::vector<MapPtr>& beta, const Vec& K, const RestrictedElement& x,
                                       const std::vector<DomainSet>& V, const Weight& omega, const Weight& f,
                                       const std::string& id = "cor:simultane_SP_BCinf0_einfach") {
  require(K.size() >= 2, ErrorKind::precondition, "uniform bounds for order 1 are required");
  std::vector<MapPtr> lifted;
  std::vector<SuperposeCertificates> certs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(detail::sup_norm(beta[i]->eval(Vec(beta[i]->in_dim(), 0.0))) == 0.0, ErrorKind::precondition, "beta_i(0) must vanish");
    const int dx = x[i].map->in_dim(), dy = beta[i]->in_dim();
    auto Y = variables(dy, dx);
    lifted.push_back(make_map(Space::product({x[i].map->in_space(), beta[i]->in_space()}), beta[i]->out_space(),
                              DomainSet::product({x[i].map->domain(), beta[i]->domain()}), Expr::call(beta[i], Y)));
    certs.push_back(SuperposeCertificates{K[1], K.size() > 2 ? K[2] : 0.0, {}, {}});
  }
  Weight g = f;
  g.name = "K1*" + f.name;
  for (auto& p : g.pieces) p = p.scaled(K[1]);
  if (g.certified_sup)
    for (double& v : *g.certified_sup) v *= K[1];
  if (g.certified_inf)
    for (double& v : *g.certified_inf) v *= K[1];
  DominanceCertificate cert{f.name, 1, g.name, Vec{K[1]}};
  SimResult res = sim_superpose(lifted, certs, x, V, omega, f, g, cert, nullptr);
  for (auto& r : res.reports)
    if (r.id == "cond:est_SP-Abb_weights") r.id = "lem:glm_beschraenkte_Abb-Multiplier";
  // the lifted superposition agrees with beta_i o gamma_i bit for bit
  long mism = 0;
  Witness mw;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (const auto& p : x[i].grid.points()) {
      Vec direct = beta[i]->eval(x[i].map->eval(p));
      if (direct != res.value[i].map->eval(p)) {
        if (mism++ == 0) mw = Witness{static_cast<int>(i), p, 0.0};
      }
    }
  res.reports.push_back(check_eq(id, static_cast<double>(mism), Provenance::exact, 0.0, Provenance::exact, 0.0, mw,
                                 "lifted superposition equals beta_i o gamma_i"));
  FamilySeminorm lhs = family_seminorm(res.value, f, 0);
  double rhs = K[1] * family_seminorm(x, f, 0).value;
  res.reports.push_back(check_le(id, lhs.value, Provenance::grid_lower, rhs, Provenance::grid_lower, scaled_tolerance(1e-9, lhs.value, rhs),
                                 Witness{lhs.argmax, lhs.witness, 0.0}, "|beta o x|_{f,0} <= K_1 |x|_{f,0}"));
  return res;
}

/// x -> QI(gamma(x)) for an operator-valued gamma with certified |gamma(x)| <= q < 1, as the
/// truncated power series -sum_{k=1}^N gamma^k, also in Taylor arithmetic.
class QuasiInverseMap : public JetMap {
 public:
  QuasiInverseMap(MapPtr gamma, double q, NeumannConfig cfg)
      : JetMap(gamma->in_space(), gamma->out_space(), gamma->domain(), gamma->max_order()), gamma_(std::move(gamma)), q_(q), cfg_(cfg) {
    const auto& blocks = gamma_->out_space().blocks();
    require(blocks.size() == 1 && blocks[0].kind == Block::Kind::op && blocks[0].rows == blocks[0].cols, ErrorKind::precondition,
            "quasi-inversion needs square operator values");
    n_ = blocks[0].rows;
    terms_ = neumann_terms(q_, cfg_.tail_tol);
    require(terms_ <= cfg_.max_terms, ErrorKind::truncation, "Neumann truncation exceeds the term limit");
  }

  Vec eval(std::span<const double> x) const override {
    check_point(x);
    Matrix A{n_, gamma_->eval(x)};
    return quasi_inverse(A, q_, cfg_).value.a;
  }

  std::vector<Taylor> taylor(std::span<const double> x, int order) const override {
    check_point(x);
    check_order(order);
    auto A = gamma_->taylor(x, order);
    Matrix a0{n_, Vec(A.size())};
    for (std::size_t k = 0; k < A.size(); ++k) a0.a[k] = A[k][0];
    require(a0.norm() <= q_ * (1 + 1e-15), ErrorKind::spectral, "operator norm exceeds its certified bound");
    const auto& L = A.front().layout();
    auto mul = [&](const std::vector<Taylor>& P, const std::vector<Taylor>& Q) {
      std::vector<Taylor> R(P.size(), Taylor(L));
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k)
          for (int j = 0; j < n_; ++j) R[i * n_ + j] += P[i * n_ + k] * Q[k * n_ + j];
      return R;
    };
    // Horner: S = A (I + A (I + ... (I + A)))
    std::vector<Taylor> S = A;
    for (int k = 1; k < terms_; ++k) {
      std::vector<Taylor> T = S;
      for (int i = 0; i < n_; ++i) T[i * n_ + i] += Taylor::constant(L, 1.0);
      S = mul(A, T);
    }
    for (auto& s : S) s = -s;
    return S;
  }

  std::string kind() const override { return "quasi-inverse(" + gamma_->kind() + ")"; }
  int terms() const { return terms_; }

 private:
  MapPtr gamma_;
  double q_;
  NeumannConfig cfg_;
  int n_ = 0;
  int terms_ = 0;
};

/// (gamma_i) -> (QI o gamma_i). Residual a + QI(a) - a QI(a) is checked at every grid point; a point
/// where |gamma_i(x)| exceeds q fails with that witness.
inline SimResult sim_power_series(const RestrictedElement& x, double q, const NeumannConfig& cfg = {},
                                  const std::string& id = "lem:sim-SuperPos_QuasiInversion") {
  require(q < 1.0, ErrorKind::spectral, "certified bound must be below one");
  SimResult res;
  std::vector<MapPtr> out;
  CheckReport worst;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto qm = std::make_shared<QuasiInverseMap>(x[i].map, q, cfg);
    const int n = x[i].map->out_space().blocks()[0].rows;
    for (const auto& p : x[i].grid.points()) {
      Matrix A{n, x[i].map->eval(p)};
      Witness w{static_cast<int>(i), p, 0.0};
      double an = A.norm();
      if (an > q) {
        res.reports.push_back(check_le(id, an, Provenance::exact, q, Provenance::certified_upper, 0.0, w, "operator norm above the certified bound"));
        continue;
      }
      Matrix Q = quasi_inverse(A, q, cfg).value;
      double resid = (A + Q - A * Q).norm();
      keep_worst(worst, check_le(id, resid, Provenance::exact, 2 * cfg.tail_tol, Provenance::exact, 0.0, w, "quasi-inverse relation residual"));
    }
    out.push_back(qm);
  }
  res.value = x.with_maps(out);
  res.reports.insert(res.reports.begin(), worst);
  return res;
}

struct ComposeFamilyCertificates {
  Vec lip;  ///< lip[i] >= |gamma_i|_{1_W,1}
};

/// (gamma_i, eta_i) -> (gamma_i o (eta_i + id)); eta must lie in the omega-neighbourhood of (V_i).
inline SimResult sim_compose(const std::vector<MapPtr>& gamma, const RestrictedElement& eta, const std::vector<DomainSet>& V,
                             const Weight& omega, const Weight& f, const ComposeFamilyCertificates& certs,
                             const std::vector<MapPtr>* gamma1 = nullptr, const RestrictedElement* eta1 = nullptr,
                             const std::string& id = "prop:Simultane_Koor-Kompo_diffbar") {
  require(gamma.size() == eta.size() && V.size() == eta.size() && certs.lip.size() == eta.size(), ErrorKind::precondition,
          "family size mismatch");
  require_adjusting(omega, V, grids_of(eta));
  require(clearance_radius(eta, omega, V) > 0.0, ErrorKind::precondition, "eta is not in the omega-neighbourhood of (V_i)");
  SimResult res;
  std::vector<MapPtr> out;
  double rhs = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    WeightedFunction c = compose_perturbed(gamma[i], eta[i], V[i]);
    out.push_back(c.map);
    CheckReport pw;
    for (const auto& x : eta[i].grid.points()) {
      double w = std::abs(f.at(static_cast<int>(i), x));
      double lhs = weighted(w, detail::sup_norm(c.map->eval(x)));
      double r = weighted(w, certs.lip[i] * detail::sup_norm(eta[i].map->eval(x)) + detail::sup_norm(gamma[i]->eval(x)));
      keep_worst(pw, check_le("est:Funktionswerte_Gewicht_K-Kompo", lhs, Provenance::exact, r, Provenance::certified_upper,
                              scaled_tolerance(1e-9, lhs, r), Witness{static_cast<int>(i), x, 0.0}, "weight " + f.name));
    }
    res.reports.push_back(pw);
    double gi = seminorm_on(gamma[i], eta[i].grid, f, static_cast<int>(i));
    rhs = std::max(rhs, certs.lip[i] * weighted_seminorm(eta[i], f, 0).value + gi);
  }
  res.value = eta.with_maps(out);
  FamilySeminorm lhs = family_seminorm(res.value, f, 0);
  res.reports.push_back(check_le(id, lhs.value, Provenance::grid_lower, rhs, Provenance::grid_lower, scaled_tolerance(1e-9, lhs.value, rhs),
                                 Witness{lhs.argmax, lhs.witness, 0.0}, "sup_i (L_i |eta_i|_{f,0} + |gamma_i|_{f,0})"));
  if (gamma1 && eta1) {
    std::vector<MapPtr> expected;
    for (std::size_t i = 0; i < eta.size(); ++i) {
      const int d = eta[i].map->in_dim();
      auto X = variables(d);
      auto E = Expr::call(eta[i].map, X);
      auto E1 = Expr::call((*eta1)[i].map, X);
      std::vector<Expr> z;
      for (int k = 0; k < d; ++k) z.push_back(E[k] + X[k]);
      auto DG = Expr::call(differential(gamma[i]), z);
      auto G1 = Expr::call((*gamma1)[i], z);
      std::vector<Expr> comps;
      for (int o = 0; o < gamma[i]->out_dim(); ++o) {
        Expr s = G1[o];
        for (int j = 0; j < d; ++j) s += DG[o * d + j] * E1[j];
        comps.push_back(s);
      }
      expected.push_back(make_map(eta[i].map->in_space(), gamma[i]->out_space(), eta[i].map->domain(), comps));
    }
    auto F = [&](double t) {
      std::vector<MapPtr> m;
      RestrictedElement e = family_sum(eta, family_scaled(*eta1, t));
      for (std::size_t i = 0; i < eta.size(); ++i) {
        auto gt = sum(gamma[i], scaled((*gamma1)[i], t));
        m.push_back(compose_perturbed(gt, e[i], V[i]).map);
      }
      return eta.with_maps(m);
    };
    res.reports.push_back(family_derivative_convergence(id, F, eta.with_maps(expected), f));
  }
  return res;
}

struct InvertFamilyCertificates {
  double lip = 0.0;   ///< >= sup_i |phi_i|_{1,1}
  double sup0 = 0.0;  ///< >= sup_i |phi_i|_{1,0}
};

/// (phi_i) -> (Inv(phi_i) on Vt_i) with shared tau and r. grids are sample grids on Vt_i.
inline SimResult sim_invert(const RestrictedElement& phi, const std::vector<DomainSet>& Vt, const std::vector<SampleGrid>& grids,
                            const InvertFamilyCertificates& certs, const ContractionConfig& cfg, const Weight& f,
                            const NeumannConfig& ncfg = {}, const std::string& id = "prop:Simultane_Inv-Kompo_glatt") {
  require(Vt.size() == phi.size() && grids.size() == phi.size(), ErrorKind::precondition, "family size mismatch");
  require(certs.lip < cfg.tau && certs.sup0 < 0.5 * cfg.r * (1 - cfg.tau), ErrorKind::domain,
          "family is outside D^tau for the shared tau and r");
  SimResult res;
  std::vector<WeightedFunction> parts;
  CheckReport resid;
  double lhs = 0.0, rhs = 0.0;
  int arg = -1;
  Vec wp;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    WeightedFunction inv = invert_perturbed(phi[i].map, Vt[i], InversionCertificates{certs.lip, certs.sup0}, cfg, grids[i],
                                            static_cast<int>(i), ncfg);
    for (const auto& y : grids[i].points()) {
      Vec v = inv.map->eval(y);
      Vec x = detail::axpy(v, 1.0, y);
      Vec r = detail::minus(detail::axpy(x, 1.0, phi[i].map->eval(x)), y);
      Witness w{static_cast<int>(i), y, 0.0};
      keep_worst(resid, check_le("prop:Zsf_Inversion_gewAbb", detail::sup_norm(r), Provenance::exact, 2 * cfg.fix_tol, Provenance::exact,
                                 0.0, w, "fixed-point residual"));
      double fw = std::abs(f.at(static_cast<int>(i), y));
      double a = weighted(fw, detail::sup_norm(v));
      if (a > lhs || arg < 0) {
        lhs = a;
        arg = static_cast<int>(i);
        wp = y;
      }
      rhs = std::max(rhs, weighted(fw, detail::sup_norm(phi[i].map->eval(y))) / (1 - certs.lip));
    }
    parts.push_back(inv);
  }
  res.value = RestrictedElement{parts};
  res.reports.push_back(resid);
  res.reports.push_back(check_le(id, lhs, Provenance::grid_lower, rhs, Provenance::grid_lower, scaled_tolerance(1e-9, lhs, rhs),
                                 Witness{arg, wp, 0.0}, "|Inv(phi)|_{f,0} <= |phi|_{f,0} / (1 - tau)"));
  return res;
}

/// D Inv(phi_i) assembled through the family operators: QI over (-D phi_i), the bilinear product
/// and composition with Inv(phi_i) + id, compared with finite-difference Jacobians.
inline CheckReport sim_invert_differential_check(const RestrictedElement& phi, const RestrictedElement& inv, double tau,
                                                 const NeumannConfig& ncfg = {}, double h = 1e-4, double tol = 1e-6,
                                                 const std::string& id = "id:Differential_der_inversen_Abb") {
  RestrictedElement A = family_differential(phi);
  RestrictedElement minusA = family_scaled(A, -1.0);
  SimResult qi = sim_power_series(minusA, tau, ncfg);
  for (const auto& r : qi.reports) require(!r.failed(), ErrorKind::spectral, "quasi-inversion of -D phi failed");
  std::vector<MapPtr> chain;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const int d = phi[i].map->in_dim();
    MultilinearMap mm = MultilinearMap::zeros(Space::op(d, d), {Space::op(d, d), Space::op(d, d)});
    // (P Q)_{ij} = sum_k P_{ik} Q_{kj}
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int k = 0; k < d; ++k) mm.entries()[((static_cast<long>(a * d + b) * d * d) + (a * d + k)) * d * d + (k * d + b)] = 1.0;
    MapPtr prod = multilinear_of(mm, {A[i].map, qi.value[i].map});
    chain.push_back(difference(prod, A[i].map));
  }
  CheckReport worst;
  for (std::size_t i = 0; i < inv.size(); ++i) {
    const int d = inv[i].map->in_dim();
    auto Y = variables(d);
    auto I = Expr::call(inv[i].map, Y);
    std::vector<Expr> z;
    for (int k = 0; k < d; ++k) z.push_back(I[k] + Y[k]);
    MapPtr composed = make_map(inv[i].map->in_space(), Space::op(d, d), inv[i].map->domain(), Expr::call(chain[i], z));
    for (const auto& y : inv[i].grid.points()) {
      Matrix M{d, composed->eval(y)};
      Matrix F = Matrix::zeros(d);
      for (int j = 0; j < d; ++j) {
        Vec p = y, q = y;
        p[j] += h;
        q[j] -= h;
        Vec a = inv[i].map->eval(p), b = inv[i].map->eval(q);
        for (int k = 0; k < d; ++k) F(k, j) = (a[k] - b[k]) / (2 * h);
      }
      double err = (M - F).norm();
      keep_worst(worst, check_le(id, err, Provenance::exact, tol, Provenance::exact, 0.0, Witness{static_cast<int>(i), y, h},
                                 "family chain against finite-difference Jacobian"));
    }
  }
  return worst;
}

/// Family derivative of phi -> Inv(phi) along phi1 against (QI(-D phi_i) phi1_i - phi1_i) o (Inv(phi_i) + id).
inline CheckReport sim_invert_derivative_check(const RestrictedElement& phi, const RestrictedElement& phi1, const RestrictedElement& inv,
                                               const Weight& f, const NeumannConfig& ncfg = {}, const ConvergenceOptions& opt = {},
                                               const std::string& id = "prop:Simultane_Inv-Kompo_glatt") {
  auto err = [&](double t) {
    double worst = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const auto& im = dynamic_cast<const InverseMap&>(*inv[i].map);
      const int d = im.in_dim();
      auto plus = sum(phi[i].map, scaled(phi1[i].map, t));
      auto minus = sum(phi[i].map, scaled(phi1[i].map, -t));
      for (const auto& y : inv[i].grid.points()) {
        Vec xs = detail::axpy(im.eval(y), 1.0, y);
        Matrix A{d, detail::jacobian(*phi[i].map, xs)};
        QuasiInverse qi = quasi_inverse((-1.0) * A, std::max(im.config().tau, A.norm()), ncfg);
        Vec p1 = phi1[i].map->eval(xs);
        Vec e = detail::minus(qi.value.apply(p1), p1);
        Vec a = detail::minus(solve_perturbed_identity(*plus, y, im.config()).x, y);
        Vec b = detail::minus(solve_perturbed_identity(*minus, y, im.config()).x, y);
        double m = 0.0;
        for (int k = 0; k < d; ++k) m = std::max(m, std::abs((a[k] - b[k]) / (2 * t) - e[k]));
        worst = std::max(worst, weighted(std::abs(f.at(static_cast<int>(i), y)), m));
      }
    }
    return worst;
  };
  return derivative_convergence(id, err, opt);
}

}  // namespace wrp
