#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "wrp/space.hpp"

namespace wrp {

/// Default lattice density for a domain of the given dimension.
inline int default_points_per_axis(int dim) {
  switch (dim) {
    case 1: return 11;
    case 2: return 9;
    case 3: return 5;
    case 4: return 5;
    default: return 3;
  }
}

/// A finite set of points strictly inside a domain. Points sit on a uniform lattice
/// lo + k * step (k = 1, 2, ...) of the bounding box, filtered by membership; pinned points are
/// appended as given.
class SampleGrid {
 public:
  SampleGrid() = default;

  static SampleGrid lattice(const DomainSet& domain, int per_axis = 0, std::vector<Vec> pinned = {}) {
    if (per_axis <= 0) per_axis = default_points_per_axis(domain.dim());
    Vec lo = domain.lower(), hi = domain.upper();
    Vec step(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k) step[k] = (hi[k] - lo[k]) / (per_axis + 1);
    return build(domain, std::move(lo), std::move(step), std::vector<int>(domain.dim(), per_axis), std::move(pinned));
  }

  static SampleGrid with_step(const DomainSet& domain, double step, std::vector<Vec> pinned = {}) {
    require(step > 0.0, ErrorKind::config, "grid step must be positive");
    Vec lo = domain.lower(), hi = domain.upper();
    std::vector<int> counts(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k) {
      int n = 0;
      while (lo[k] + (n + 1) * step < hi[k]) ++n;
      counts[k] = n;
    }
    return build(domain, std::move(lo), Vec(domain.dim(), step), std::move(counts), std::move(pinned));
  }

  /// Halves the lattice spacing; every old point is reproduced bit for bit.
  SampleGrid refine() const {
    Vec half = step_;
    for (double& h : half) h *= 0.5;
    std::vector<int> counts = counts_;
    for (int& c : counts) c = 2 * c + 1;
    return build(domain_, origin_, std::move(half), std::move(counts), pinned_);
  }

  const DomainSet& domain() const { return domain_; }
  const std::vector<Vec>& points() const { return points_; }
  const std::vector<Vec>& pinned() const { return pinned_; }
  std::size_t size() const { return points_.size(); }
  int dim() const { return domain_.dim(); }

 private:
  static SampleGrid build(const DomainSet& domain, Vec origin, Vec step, std::vector<int> counts, std::vector<Vec> pinned) {
    SampleGrid g;
    g.domain_ = domain;
    g.origin_ = std::move(origin);
    g.step_ = std::move(step);
    g.counts_ = std::move(counts);
    g.pinned_ = std::move(pinned);
    const int d = domain.dim();
    std::vector<int> k(d, 1);
    bool done = false;
    for (int c : g.counts_)
      if (c <= 0) done = true;
    while (!done) {
      Vec p(d);
      for (int a = 0; a < d; ++a) p[a] = g.origin_[a] + k[a] * g.step_[a];
      if (domain.contains(p)) g.points_.push_back(std::move(p));
      int a = d - 1;
      while (a >= 0) {
        if (++k[a] <= g.counts_[a]) break;
        k[a] = 1;
        --a;
      }
      done = a < 0;
    }
    for (const auto& p : g.pinned_) {
      require(domain.contains(p), ErrorKind::domain, "pinned grid point is not interior");
      g.points_.push_back(p);
    }
    require(!g.points_.empty(), ErrorKind::config, "sample grid has no interior points");
    return g;
  }

  DomainSet domain_;
  Vec origin_, step_;
  std::vector<int> counts_;
  std::vector<Vec> pinned_;
  std::vector<Vec> points_;
};

}  // namespace wrp
