#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wrp/grid.hpp"

namespace wrp {

/// A closed-form weight evaluator on one factor, value = scale * base(x) + shift.
///   constant: c
///   poly:     sum_k coeffs[k] * t^k with t = x . u
///   gauss:    exp(-a |x|_2^2)
///   sine:     2 + sin(x . u)
/// u defaults to the first coordinate axis.
struct WeightPiece {
  enum class Kind { constant, poly, gauss, sine };
  Kind kind = Kind::constant;
  double c = 1.0;
  Vec coeffs;
  double a = 0.0;
  Vec u;
  double scale = 1.0;
  double shift = 0.0;

  static WeightPiece constant(double c) {
    WeightPiece p;
    p.c = c;
    return p;
  }
  static WeightPiece polynomial(Vec coeffs, Vec u = {}) {
    WeightPiece p;
    p.kind = Kind::poly;
    p.coeffs = std::move(coeffs);
    p.u = std::move(u);
    return p;
  }
  static WeightPiece gauss(double a) {
    WeightPiece p;
    p.kind = Kind::gauss;
    p.a = a;
    return p;
  }
  static WeightPiece sine(Vec u = {}) {
    WeightPiece p;
    p.kind = Kind::sine;
    p.u = std::move(u);
    return p;
  }

  WeightPiece scaled(double s) const {
    WeightPiece p = *this;
    p.scale *= s;
    p.shift *= s;
    return p;
  }
  WeightPiece shifted(double s) const {
    WeightPiece p = *this;
    p.shift += s;
    return p;
  }

  double operator()(std::span<const double> x) const {
    double base = 0.0;
    switch (kind) {
      case Kind::constant:
        base = c;
        break;
      case Kind::poly: {
        double t = dot_u(x);
        double acc = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * t + coeffs[k];
        base = acc;
        break;
      }
      case Kind::gauss: {
        double s = 0.0;
        for (double v : x) s += v * v;
        base = std::exp(-a * s);
        break;
      }
      case Kind::sine:
        base = 2.0 + std::sin(dot_u(x));
        break;
    }
    if (std::isinf(base)) return scale == 0.0 ? shift : scale * base;
    return scale * base + shift;
  }

 private:
  double dot_u(std::span<const double> x) const {
    if (u.empty()) return x.empty() ? 0.0 : x[0];
    double s = 0.0;
    for (std::size_t k = 0; k < x.size() && k < u.size(); ++k) s += x[k] * u[k];
    return s;
  }
};

/// A weight on the disjoint union of the factor domains: one evaluator per factor, or a single
/// evaluator shared by all factors. Values may be +inf; NaN is rejected.
struct Weight {
  std::string name;
  std::vector<WeightPiece> pieces;
  std::optional<Vec> certified_sup;
  std::optional<Vec> certified_inf;

  static Weight uniform(std::string name, WeightPiece piece) { return Weight{std::move(name), {std::move(piece)}, {}, {}}; }
  static Weight one() { return uniform("one", WeightPiece::constant(1.0)); }

  const WeightPiece& piece(int factor) const {
    require(!pieces.empty(), ErrorKind::config, "weight '" + name + "' has no evaluator");
    if (pieces.size() == 1) return pieces.front();
    require(factor >= 0 && factor < static_cast<int>(pieces.size()), ErrorKind::config,
            "weight '" + name + "' has no evaluator for factor " + std::to_string(factor));
    return pieces[factor];
  }

  double at(int factor, std::span<const double> x) const {
    double v = piece(factor)(x);
    require(!std::isnan(v), ErrorKind::range, "weight '" + name + "' evaluated to NaN");
    return v;
  }

  /// Certified upper bound of |weight| on a factor, if one was declared or the piece is constant.
  std::optional<double> sup_bound(int factor) const {
    if (certified_sup) return certified_sup->size() == 1 ? certified_sup->front() : certified_sup->at(factor);
    const auto& p = piece(factor);
    if (p.kind == WeightPiece::Kind::constant) return std::abs(p.scale * p.c + p.shift);
    return std::nullopt;
  }

  std::optional<double> inf_bound(int factor) const {
    if (certified_inf) return certified_inf->size() == 1 ? certified_inf->front() : certified_inf->at(factor);
    const auto& p = piece(factor);
    if (p.kind == WeightPiece::Kind::constant) return std::abs(p.scale * p.c + p.shift);
    return std::nullopt;
  }

  /// Every declared certificate must dominate the sampled values; checked at ingest.
  void validate(const std::vector<SampleGrid>& grids) const {
    for (std::size_t i = 0; i < grids.size(); ++i) {
      for (const auto& x : grids[i].points()) {
        double v = std::abs(at(static_cast<int>(i), x));
        if (certified_sup) {
          double s = certified_sup->size() == 1 ? certified_sup->front() : certified_sup->at(i);
          require(v <= s, ErrorKind::precondition,
                  "certified sup of weight '" + name + "' is below a sampled value on factor " + std::to_string(i));
        }
        if (certified_inf) {
          double s = certified_inf->size() == 1 ? certified_inf->front() : certified_inf->at(i);
          require(v >= s, ErrorKind::precondition,
                  "certified inf of weight '" + name + "' is above a sampled value on factor " + std::to_string(i));
        }
      }
    }
  }
};

/// g dominates K_i |f| on every factor for the seminorm order ell.
struct DominanceCertificate {
  std::string f;
  int ell = 0;
  std::string g;
  Vec K;

  double constant(int factor) const { return K.size() == 1 ? K.front() : K.at(factor); }
};

/// Product of a nonnegative factor with a possibly infinite weight value, with inf * 0 = 0.
inline double weighted(double weight_abs, double value) {
  if (value == 0.0) return 0.0;
  return weight_abs * value;
}

}  // namespace wrp
