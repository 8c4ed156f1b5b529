#include <iostream>

#include "wrp/wrp.hpp"

/// Superposes Xi(x, y) = cos(x) y + 0.5 y^2 with gamma(x) = 0.2 sin(x) and prints the weighted
/// estimates together with the finite-difference derivative check.
int main() {
  using namespace wrp;
  DomainSet U = DomainSet::cube(1, -1.0, 1.0), V = DomainSet::cube(1, -0.5, 0.5);
  SampleGrid grid = SampleGrid::lattice(U, 41);
  MapPtr xi = make_map(Space::product({Space::sup(1), Space::sup(1)}), Space::sup(1), DomainSet::product({U, V}),
                       {parse_expr("cos(x) * y + 0.5 * y^2", {"x", "y"})});
  WeightedFunction gamma(make_map(U, {parse_expr("0.2 * sin(x)", {"x"})}), grid);
  WeightedFunction eta(make_map(U, {parse_expr("0.2 * sin(x) + 0.05 * cos(x)", {"x"})}), grid);
  WeightedFunction dir(make_map(U, {parse_expr("0.1 * cos(2 * x)", {"x"})}), grid);
  Weight f = Weight::uniform("f", WeightPiece::gauss(0.5));

  // |d_2 Xi| <= 1 + 0.5 and |D^2 Xi| <= 0.5 + 2 + 1 on U x V
  SuperposeCertificates certs{1.5, 3.5, {}, {}};
  for (const auto& r : superpose_estimates(xi, certs, gamma, V, f, &eta))
    std::cout << r.id << ": " << r.lhs << " <= " << r.rhs << " (" << to_string(r.status) << ")\n";
  CheckReport d = superpose_derivative_check(xi, gamma, dir, V, f);
  std::cout << d.id << ": " << to_string(d.status) << ", " << d.detail << "\n";
}
