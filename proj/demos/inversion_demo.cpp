#include <cstdio>

#include "wrp/wrp.hpp"

/// Inverts x + phi(x) for phi(x) = 0.1 sin(x + 0.3) on a small box and compares the linear case
/// phi = c x with its closed form -c / (1 + c) y.
int main() {
  using namespace wrp;
  DomainSet Ut = DomainSet::cube(1, -1.2, 1.2), Vt = DomainSet::cube(1, -0.2, 0.2);
  SampleGrid grid = SampleGrid::lattice(Vt, 9);
  ContractionConfig cfg;
  cfg.tau = 0.5;
  cfg.r = 1.0;

  MapPtr phi = make_map(Ut, {parse_expr("0.1 * sin(x + 0.3)", {"x"})});
  WeightedFunction inv = invert_perturbed(phi, Vt, InversionCertificates{0.1, 0.1}, cfg, grid);
  for (const auto& y : grid.points()) {
    double x = y[0] + inv.map->eval(y)[0];
    std::printf("y = %+.3f  Inv(phi)(y) = %+.15f  residual = %.2e\n", y[0], inv.map->eval(y)[0], x + 0.1 * std::sin(x + 0.3) - y[0]);
  }

  const double c = 0.2;
  MapPtr lin = make_map(Ut, {parse_expr("0.2 * x", {"x"})});
  WeightedFunction ilin = invert_perturbed(lin, Vt, InversionCertificates{c, 1.2 * c}, cfg, grid);
  double worst = 0.0;
  for (const auto& y : grid.points()) worst = std::max(worst, std::abs(ilin.map->eval(y)[0] + c / (1 + c) * y[0]));
  std::printf("linear case c = %.2f: max deviation from -c/(1+c) y = %.2e\n", c, worst);
}
