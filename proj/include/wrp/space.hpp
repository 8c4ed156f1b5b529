#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wrp/error.hpp"

namespace wrp {

using Vec = std::vector<double>;

/// One coordinate block of a finite-dimensional normed space.
/// sup: R^rows with the max norm. op: rows x cols matrices with the operator norm induced by the
/// max norm (max absolute row sum). euclid: R^rows with the 2-norm.
struct Block {
  enum class Kind { sup, op, euclid };
  Kind kind = Kind::sup;
  int rows = 0;
  int cols = 1;

  int dim() const { return rows * cols; }
  bool operator==(const Block&) const = default;
};

/// A finite product of blocks with the max-of-blocks norm.
class Space {
 public:
  Space() = default;
  explicit Space(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    for (const auto& b : blocks_) {
      require(b.rows > 0 && b.cols > 0, ErrorKind::config, "space block with non-positive size");
      dim_ += b.dim();
    }
  }

  static Space sup(int n) { return n == 0 ? Space() : Space({Block{Block::Kind::sup, n, 1}}); }
  static Space op(int rows, int cols) { return Space({Block{Block::Kind::op, rows, cols}}); }
  static Space euclid(int n) { return Space({Block{Block::Kind::euclid, n, 1}}); }

  static Space product(const std::vector<Space>& parts) {
    std::vector<Block> bs;
    for (const auto& p : parts) bs.insert(bs.end(), p.blocks_.begin(), p.blocks_.end());
    return Space(std::move(bs));
  }

  int dim() const { return dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  bool operator==(const Space& o) const { return blocks_ == o.blocks_; }

  bool all_sup() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](const Block& b) { return b.kind == Block::Kind::sup; });
  }
  bool has_euclid() const {
    return std::any_of(blocks_.begin(), blocks_.end(), [](const Block& b) { return b.kind == Block::Kind::euclid; });
  }

  double norm(std::span<const double> v) const {
    require(static_cast<int>(v.size()) == dim_, ErrorKind::precondition, "vector size does not match space");
    double m = 0.0;
    std::size_t off = 0;
    for (const auto& b : blocks_) {
      m = std::max(m, block_norm(b, v.subspan(off, b.dim())));
      off += b.dim();
    }
    return m;
  }

  /// Norm of the linear functional w in the dual of this space.
  double dual_norm(std::span<const double> w) const {
    double s = 0.0;
    std::size_t off = 0;
    for (const auto& b : blocks_) {
      auto part = w.subspan(off, b.dim());
      switch (b.kind) {
        case Block::Kind::sup:
          for (double x : part) s += std::abs(x);
          break;
        case Block::Kind::op:
          for (int r = 0; r < b.rows; ++r) {
            double mx = 0.0;
            for (int c = 0; c < b.cols; ++c) mx = std::max(mx, std::abs(part[r * b.cols + c]));
            s += mx;
          }
          break;
        case Block::Kind::euclid: {
          double q = 0.0;
          for (double x : part) q += x * x;
          s += std::sqrt(q);
          break;
        }
      }
      off += b.dim();
    }
    return s;
  }

  /// Extreme points of the closed unit ball. Only defined without Euclidean blocks.
  std::vector<Vec> extreme_points() const {
    require(!has_euclid(), ErrorKind::unsupported_norm, "Euclidean unit ball has no finite vertex set");
    std::vector<Vec> pts{Vec{}};
    for (const auto& b : blocks_) {
      std::vector<Vec> local = block_vertices(b);
      std::vector<Vec> next;
      next.reserve(pts.size() * local.size());
      for (const auto& p : pts)
        for (const auto& l : local) {
          Vec q = p;
          q.insert(q.end(), l.begin(), l.end());
          next.push_back(std::move(q));
        }
      pts = std::move(next);
    }
    return pts;
  }

  std::size_t extreme_point_count() const {
    std::size_t n = 1;
    for (const auto& b : blocks_) {
      if (b.kind == Block::Kind::sup) n <<= b.rows;
      else if (b.kind == Block::Kind::op)
        for (int r = 0; r < b.rows; ++r) n *= static_cast<std::size_t>(2 * b.cols);
      else
        return 0;
    }
    return n;
  }

  std::string describe() const {
    std::string s;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const auto& b = blocks_[i];
      if (i) s += " x ";
      if (b.kind == Block::Kind::sup) s += "sup(" + std::to_string(b.rows) + ")";
      else if (b.kind == Block::Kind::op) s += "op(" + std::to_string(b.rows) + "," + std::to_string(b.cols) + ")";
      else s += "euclid(" + std::to_string(b.rows) + ")";
    }
    return s.empty() ? "{0}" : s;
  }

 private:
  static double block_norm(const Block& b, std::span<const double> v) {
    double m = 0.0;
    switch (b.kind) {
      case Block::Kind::sup:
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
      case Block::Kind::op:
        for (int r = 0; r < b.rows; ++r) {
          double s = 0.0;
          for (int c = 0; c < b.cols; ++c) s += std::abs(v[r * b.cols + c]);
          m = std::max(m, s);
        }
        return m;
      case Block::Kind::euclid:
        for (double x : v) m += x * x;
        return std::sqrt(m);
    }
    return m;
  }

  static std::vector<Vec> block_vertices(const Block& b) {
    std::vector<Vec> out;
    if (b.kind == Block::Kind::sup) {
      std::size_t n = std::size_t{1} << b.rows;
      for (std::size_t mask = 0; mask < n; ++mask) {
        Vec v(b.rows);
        for (int k = 0; k < b.rows; ++k) v[k] = (mask >> k) & 1 ? -1.0 : 1.0;
        out.push_back(std::move(v));
      }
      return out;
    }
    // op block: every row is a signed unit vector
    std::vector<Vec> rows;
    for (int c = 0; c < b.cols; ++c)
      for (double s : {1.0, -1.0}) {
        Vec r(b.cols, 0.0);
        r[c] = s;
        rows.push_back(std::move(r));
      }
    out.push_back(Vec{});
    for (int r = 0; r < b.rows; ++r) {
      std::vector<Vec> next;
      for (const auto& p : out)
        for (const auto& row : rows) {
          Vec q = p;
          q.insert(q.end(), row.begin(), row.end());
          next.push_back(std::move(q));
        }
      out = std::move(next);
    }
    return out;
  }

  std::vector<Block> blocks_;
  int dim_ = 0;
};

/// Open boxes, open balls and finite products of them.
class DomainSet {
 public:
  enum class Shape { box, ball, product };

  static DomainSet box(Vec lo, Vec hi) {
    require(lo.size() == hi.size() && !lo.empty(), ErrorKind::config, "box bounds must have equal positive length");
    for (std::size_t k = 0; k < lo.size(); ++k)
      require(lo[k] < hi[k], ErrorKind::config, "box requires lo < hi on every axis");
    DomainSet d;
    d.shape_ = Shape::box;
    d.lo_ = std::move(lo);
    d.hi_ = std::move(hi);
    d.space_ = Space::sup(static_cast<int>(d.lo_.size()));
    return d;
  }

  static DomainSet cube(int dim, double lo, double hi) { return box(Vec(dim, lo), Vec(dim, hi)); }

  /// Ball in the norm of `space`; the max norm gives a cube.
  static DomainSet ball(Vec center, double radius, Space space = {}) {
    require(radius > 0.0 && std::isfinite(radius), ErrorKind::config, "ball radius must be positive");
    if (space.dim() == 0) space = Space::sup(static_cast<int>(center.size()));
    require(space.dim() == static_cast<int>(center.size()), ErrorKind::config, "ball center does not match space");
    DomainSet d;
    d.shape_ = Shape::ball;
    d.center_ = std::move(center);
    d.radius_ = radius;
    d.space_ = std::move(space);
    return d;
  }

  static DomainSet ball_at_zero(int dim, double radius) { return ball(Vec(dim, 0.0), radius); }

  static DomainSet product(std::vector<DomainSet> parts) {
    require(!parts.empty(), ErrorKind::config, "empty product domain");
    DomainSet d;
    d.shape_ = Shape::product;
    std::vector<Space> sp;
    for (const auto& p : parts) sp.push_back(p.space_);
    d.space_ = Space::product(sp);
    d.parts_ = std::move(parts);
    return d;
  }

  Shape shape() const { return shape_; }
  int dim() const { return space_.dim(); }
  const Space& space() const { return space_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<DomainSet>& parts() const { return parts_; }

  /// Distance from x to the complement; zero outside.
  double boundary_distance(std::span<const double> x) const {
    require(static_cast<int>(x.size()) == dim(), ErrorKind::precondition, "point dimension does not match domain");
    switch (shape_) {
      case Shape::box: {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < lo_.size(); ++k) d = std::min({d, x[k] - lo_[k], hi_[k] - x[k]});
        return std::max(d, 0.0);
      }
      case Shape::ball: {
        Vec diff(x.begin(), x.end());
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= center_[k];
        return std::max(radius_ - space_.norm(diff), 0.0);
      }
      case Shape::product: {
        double d = std::numeric_limits<double>::infinity();
        std::size_t off = 0;
        for (const auto& p : parts_) {
          d = std::min(d, p.boundary_distance(x.subspan(off, p.dim())));
          off += p.dim();
        }
        return d;
      }
    }
    return 0.0;
  }

  bool contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    switch (shape_) {
      case Shape::box:
        for (std::size_t k = 0; k < lo_.size(); ++k)
          if (!(x[k] > lo_[k] && x[k] < hi_[k])) return false;
        return true;
      case Shape::ball: {
        Vec diff(x.begin(), x.end());
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= center_[k];
        return space_.norm(diff) < radius_;
      }
      case Shape::product: {
        std::size_t off = 0;
        for (const auto& p : parts_) {
          if (!p.contains(x.subspan(off, p.dim()))) return false;
          off += p.dim();
        }
        return true;
      }
    }
    return false;
  }

  bool convex() const { return true; }

  /// Star-shaped with respect to the origin.
  bool star_shaped() const { return contains(Vec(dim(), 0.0)); }

  bool balanced() const {
    switch (shape_) {
      case Shape::box:
        for (std::size_t k = 0; k < lo_.size(); ++k)
          if (lo_[k] != -hi_[k]) return false;
        return true;
      case Shape::ball:
        return std::all_of(center_.begin(), center_.end(), [](double c) { return c == 0.0; });
      case Shape::product:
        return std::all_of(parts_.begin(), parts_.end(), [](const DomainSet& p) { return p.balanced(); });
    }
    return false;
  }

  /// Coordinate bounding box of the closure.
  Vec lower() const { return bound(-1.0); }
  Vec upper() const { return bound(1.0); }

  std::string describe() const {
    std::string s;
    switch (shape_) {
      case Shape::box: s = "box"; break;
      case Shape::ball: s = "ball(" + space_.describe() + ")"; break;
      case Shape::product:
        s = "product[";
        for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? ", " : "") + parts_[i].describe();
        return s + "]";
    }
    return s;
  }

 private:
  Vec bound(double sign) const {
    switch (shape_) {
      case Shape::box: return sign < 0 ? lo_ : hi_;
      case Shape::ball: {
        // every coordinate of a unit vector is at most one in absolute value for these norms
        Vec b = center_;
        for (double& v : b) v += sign * radius_;
        return b;
      }
      case Shape::product: {
        Vec b;
        for (const auto& p : parts_) {
          Vec q = p.bound(sign);
          b.insert(b.end(), q.begin(), q.end());
        }
        return b;
      }
    }
    return {};
  }

  Shape shape_ = Shape::box;
  Vec lo_, hi_, center_;
  double radius_ = 0.0;
  Space space_;
  std::vector<DomainSet> parts_;
};

/// Sufficient test for U + V contained in W. Exact when W is a box or a max-norm ball, since then
/// containment reduces to the coordinate extremes of U and V.
inline bool minkowski_sum_contained(const DomainSet& U, const DomainSet& V, const DomainSet& W, double tol = 1e-12) {
  require(U.dim() == V.dim() && V.dim() == W.dim(), ErrorKind::geometry, "Minkowski sum of mismatched dimensions");
  Vec ulo = U.lower(), uhi = U.upper(), vlo = V.lower(), vhi = V.upper();
  bool box_like = W.shape() == DomainSet::Shape::box ||
                  (W.shape() == DomainSet::Shape::ball && W.space().all_sup());
  if (box_like) {
    Vec wlo = W.lower(), whi = W.upper();
    for (int k = 0; k < W.dim(); ++k) {
      if (ulo[k] + vlo[k] < wlo[k] - tol) return false;
      if (uhi[k] + vhi[k] > whi[k] + tol) return false;
    }
    return true;
  }
  require(W.shape() == DomainSet::Shape::ball, ErrorKind::geometry, "unsupported target set for Minkowski test");
  // conservative: farthest corner of the bounding boxes
  Vec far(W.dim());
  for (int k = 0; k < W.dim(); ++k)
    far[k] = std::max(std::abs(uhi[k] + vhi[k] - W.center()[k]), std::abs(ulo[k] + vlo[k] - W.center()[k]));
  return W.space().norm(far) <= W.radius() + tol;
}

}  // namespace wrp
