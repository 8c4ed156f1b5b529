#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wrp/check_report.hpp"
#include "wrp/grid.hpp"
#include "wrp/jets.hpp"
#include "wrp/weight.hpp"

namespace wrp {

/// A jet map paired with the grid on which its weighted seminorms are sampled.
struct WeightedFunction {
  MapPtr map;
  SampleGrid grid;
  int max_order = 8;
  int factor = 0;

  WeightedFunction() = default;
  WeightedFunction(MapPtr m, SampleGrid g, int max_ord = -1, int fac = 0)
      : map(std::move(m)), grid(std::move(g)), max_order(max_ord < 0 ? map->max_order() : max_ord), factor(fac) {
    require(map->in_dim() == grid.dim(), ErrorKind::config, "grid dimension does not match map input");
    for (const auto& p : grid.points())
      require(map->domain().contains(p), ErrorKind::domain, "grid point outside the map domain");
  }

  WeightedFunction with_map(MapPtr m) const { return WeightedFunction(std::move(m), grid, max_order, factor); }
};

struct SeminormValue {
  double value = 0.0;
  Provenance provenance = Provenance::grid_lower;
  Vec witness;
  int factor = -1;
  double weight = 0.0;
};

/// |f(x)| |D^l g(x)| at one point, with inf * 0 = 0.
inline double pointwise_seminorm(const JetMap& g, const Weight& f, int factor, std::span<const double> x, int l) {
  double d = op_norm(derivative_at(g, x, l));
  return weighted(std::abs(f.at(factor, x)), d);
}

/// Grid maximum of |f(x)| |D^l g(x)|; a lower bound of the seminorm. Ties keep the first point.
inline SeminormValue weighted_seminorm(const WeightedFunction& g, const Weight& f, int l) {
  require(l >= 0 && l <= g.max_order, ErrorKind::budget,
          "seminorm order " + std::to_string(l) + " exceeds the declared smoothness " + std::to_string(g.max_order));
  SeminormValue s;
  s.factor = g.factor;
  bool first = true;
  for (const auto& x : g.grid.points()) {
    double v = pointwise_seminorm(*g.map, f, g.factor, x, l);
    if (first || v > s.value) {
      s.value = v;
      s.witness = x;
      s.weight = f.at(g.factor, x);
      first = false;
    }
  }
  return s;
}

/// |g|_{f, l+1} against |Dg|_{f, l}.
inline CheckReport decomposition_check(const WeightedFunction& g, const Weight& f, int l,
                                       const std::string& id = "lem:topologische_Zerlegung_von_CFk") {
  SeminormValue a = weighted_seminorm(g, f, l + 1);
  WeightedFunction dg(differential(g.map), g.grid, g.max_order - 1, g.factor);
  SeminormValue b = weighted_seminorm(dg, f, l);
  Witness w{g.factor, a.witness, 0.0};
  return check_eq(id, a.value, Provenance::grid_lower, b.value, Provenance::grid_lower, scaled_tolerance(1e-12, a.value, b.value), w,
                  "weight " + f.name + ", order " + std::to_string(l));
}

/// Map built from call expressions of existing maps, on the domain and input space of `like`.
inline MapPtr combine(const MapPtr& like, Space out, const std::vector<Expr>& comps) {
  return make_map(like->in_space(), std::move(out), like->domain(), comps);
}

inline MapPtr difference(const MapPtr& a, const MapPtr& b) {
  require(a->in_space() == b->in_space() && a->out_space() == b->out_space(), ErrorKind::precondition, "difference of incompatible maps");
  auto A = Expr::call(a, variables(a->in_dim()));
  auto B = Expr::call(b, variables(b->in_dim()));
  std::vector<Expr> c;
  for (std::size_t k = 0; k < A.size(); ++k) c.push_back(A[k] - B[k]);
  return combine(a, a->out_space(), c);
}

inline MapPtr sum(const MapPtr& a, const MapPtr& b) {
  require(a->in_space() == b->in_space() && a->out_space() == b->out_space(), ErrorKind::precondition, "sum of incompatible maps");
  auto A = Expr::call(a, variables(a->in_dim()));
  auto B = Expr::call(b, variables(b->in_dim()));
  std::vector<Expr> c;
  for (std::size_t k = 0; k < A.size(); ++k) c.push_back(A[k] + B[k]);
  return combine(a, a->out_space(), c);
}

inline MapPtr scaled(const MapPtr& a, double s) {
  auto A = Expr::call(a, variables(a->in_dim()));
  std::vector<Expr> c;
  for (auto& e : A) c.push_back(Expr::constant(s) * e);
  return combine(a, a->out_space(), c);
}

/// Components [first, first + count) of a map, with the given output space.
inline MapPtr project(const MapPtr& a, int first, int count, Space out) {
  auto A = Expr::call(a, variables(a->in_dim()));
  std::vector<Expr> c(A.begin() + first, A.begin() + first + count);
  return combine(a, std::move(out), c);
}

/// Splits a map into a product Y x Z along its first output block boundary.
inline std::pair<WeightedFunction, WeightedFunction> pair_split(const WeightedFunction& g) {
  const auto& blocks = g.map->out_space().blocks();
  require(blocks.size() >= 2, ErrorKind::precondition, "pair_split needs a product codomain");
  Space Y({blocks.front()});
  Space Z(std::vector<Block>(blocks.begin() + 1, blocks.end()));
  return {g.with_map(project(g.map, 0, Y.dim(), Y)), g.with_map(project(g.map, Y.dim(), Z.dim(), Z))};
}

inline WeightedFunction pair_join(const WeightedFunction& a, const WeightedFunction& b) {
  auto A = Expr::call(a.map, variables(a.map->in_dim()));
  auto B = Expr::call(b.map, variables(b.map->in_dim()));
  A.insert(A.end(), B.begin(), B.end());
  return a.with_map(combine(a.map, Space::product({a.map->out_space(), b.map->out_space()}), A));
}

/// The seminorm of a pair is the larger of the seminorms of its components.
inline CheckReport pair_split_check(const WeightedFunction& g, const Weight& f, int l,
                                    const std::string& id = "lem:gewichtete_Abb_Produktisomorphie-endl") {
  auto [a, b] = pair_split(g);
  double whole = weighted_seminorm(g, f, l).value;
  double pa = weighted_seminorm(a, f, l).value;
  double pb = weighted_seminorm(b, f, l).value;
  double parts = std::max(pa, pb);
  return check_eq(id, whole, Provenance::grid_lower, parts, Provenance::grid_lower, scaled_tolerance(1e-12, whole, parts),
                  Witness{g.factor, {}, 0.0}, "order " + std::to_string(l));
}

/// |phi - psi|_{1,0} <= min(d, 1) |phi - psi|_{omega,0} for an adjusting weight omega.
inline CheckReport norm_comparison_1U(const WeightedFunction& phi, const WeightedFunction& psi, const Weight& omega, double d,
                                      const std::string& id = "est:1-0-norm_f-0-norm_spezielles-f") {
  WeightedFunction diff = phi.with_map(difference(phi.map, psi.map));
  SeminormValue a = weighted_seminorm(diff, Weight::one(), 0);
  SeminormValue b = weighted_seminorm(diff, omega, 0);
  double rhs = std::min(d, 1.0) * b.value;
  return check_le(id, a.value, Provenance::grid_lower, rhs, Provenance::grid_lower, scaled_tolerance(1e-12, a.value, rhs),
                  Witness{phi.factor, a.witness, 0.0});
}

}  // namespace wrp
