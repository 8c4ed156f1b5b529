#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wrp/space.hpp"
#include "wrp/taylor.hpp"

namespace wrp {

/// A smooth map between finite-dimensional normed spaces with closed-form jets. Jets are exposed
/// as Taylor polynomials of every output coordinate in the increments of the input coordinates.
class JetMap {
 public:
  JetMap(Space in, Space out, DomainSet domain, int max_order)
      : in_(std::move(in)), out_(std::move(out)), domain_(std::move(domain)), max_order_(max_order) {
    require(in_.dim() == domain_.dim(), ErrorKind::config, "map domain dimension does not match its input space");
  }
  virtual ~JetMap() = default;

  const Space& in_space() const { return in_; }
  const Space& out_space() const { return out_; }
  const DomainSet& domain() const { return domain_; }
  int in_dim() const { return in_.dim(); }
  int out_dim() const { return out_.dim(); }
  int max_order() const { return max_order_; }

  virtual Vec eval(std::span<const double> x) const = 0;
  virtual std::vector<Taylor> taylor(std::span<const double> x, int order) const = 0;
  virtual std::string kind() const = 0;

 protected:
  void check_point(std::span<const double> x) const {
    require(static_cast<int>(x.size()) == in_dim(), ErrorKind::precondition, "point dimension does not match map input");
    if (!domain_.contains(x)) {
      std::string s = "point (";
      for (std::size_t k = 0; k < x.size(); ++k) s += (k ? ", " : "") + std::to_string(x[k]);
      fail(ErrorKind::domain, s + ") lies outside the map domain " + domain_.describe());
    }
  }
  void check_order(int order) const {
    require(order >= 0 && order <= max_order_, ErrorKind::budget,
            "jet order " + std::to_string(order) + " exceeds the declared maximum " + std::to_string(max_order_));
  }

 private:
  Space in_, out_;
  DomainSet domain_;
  int max_order_;
};

using MapPtr = std::shared_ptr<const JetMap>;

}  // namespace wrp
