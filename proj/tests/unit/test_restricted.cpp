#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wrp/wrp.hpp"

using namespace wrp;

namespace {

const DomainSet kUnit = DomainSet::cube(1, -1.0, 1.0);

MapPtr map1(const std::string& text, const DomainSet& D) { return make_map(D, {parse_expr(text, {"x"})}); }

WeightedFunction fn1(const std::string& text, const SampleGrid& g) { return WeightedFunction(map1(text, g.domain()), g); }

RestrictedElement family(const std::vector<std::string>& texts, const SampleGrid& g) {
  std::vector<WeightedFunction> parts;
  for (const auto& t : texts) parts.push_back(fn1(t, g));
  return RestrictedElement::of(parts);
}

std::string num(double v) { return "(" + format_double(v) + ")"; }

MultilinearMap scalar_product() { return MultilinearMap(Space::sup(1), {Space::sup(1), Space::sup(1)}, {1.0}); }

}  // namespace

TEST(FamilySeminorm, SingleFactorEqualsFactorValue) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement x = family({"sin(2 * x)"}, g);
  Weight f = Weight::uniform("f", WeightPiece::gauss(1.0));
  for (int l = 0; l <= 2; ++l) EXPECT_EQ(family_seminorm(x, f, l).value, weighted_seminorm(x[0], f, l).value);
}

TEST(FamilySeminorm, MaximumWithArgmax) {
  SampleGrid g = SampleGrid::with_step(kUnit, 0.1);
  FamilySeminorm two = family_seminorm(family({"0.3", "0.7"}, g), Weight::one(), 0);
  EXPECT_EQ(two.value, 0.7);
  EXPECT_EQ(two.argmax, 1);
  std::vector<std::string> texts;
  for (int i = 1; i <= 8; ++i) texts.push_back("x / " + std::to_string(i));
  FamilySeminorm eight = family_seminorm(family(texts, g), Weight::one(), 0);
  EXPECT_NEAR(eight.value, 0.9, 1e-15);
  EXPECT_EQ(eight.argmax, 0);
  EXPECT_EQ(eight.per_factor.size(), 8u);
}

TEST(FamilySeminorm, PermutationAndZeroFactorInvariance) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement x = family({"x^2", "sin(x)", "0.5 * cos(3 * x)"}, g);
  RestrictedElement perm = x.restrict_to({2, 0, 1});
  RestrictedElement padded = family({"x^2", "sin(x)", "0.5 * cos(3 * x)", "0"}, g);
  Weight f = Weight::uniform("f", WeightPiece::gauss(0.5));
  for (int l = 0; l <= 3; ++l) {
    double v = family_seminorm(x, f, l).value;
    EXPECT_EQ(family_seminorm(perm, f, l).value, v);
    EXPECT_EQ(family_seminorm(padded, f, l).value, v);
  }
}

TEST(FamilySeminorm, DecompositionAndInitialTopology) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement x = family({"x^3", "exp(x) - 1", "sin(x) * x"}, g);
  Weight f = Weight::uniform("f", WeightPiece::gauss(1.0));
  for (int l = 0; l <= 2; ++l) {
    EXPECT_TRUE(family_decomposition_check(x, f, l).passed());
    EXPECT_TRUE(initial_topology_check(x, f, l, 3).passed());
  }
}

TEST(Lipschitz, ConstantFamily) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement x = family({"x", "x^2"}, g);
  auto reps = lipschitz_bound_check([&](double) { return x; }, {0.0, 0.5, 1.0}, Weight::one(), 0, {0.0, 0.0});
  for (const auto& r : reps) {
    EXPECT_TRUE(r.passed()) << r.detail;
    EXPECT_EQ(r.lhs, 0.0);
  }
}

TEST(Lipschitz, SineScaledFamily) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement x = family({"x", "0.5 * x^2", "0.25 * sin(x)"}, g);
  Weight f = Weight::uniform("f", WeightPiece::gauss(1.0));
  for (int l = 0; l <= 1; ++l) {
    Vec L;
    for (const auto& p : x.parts) L.push_back(weighted_seminorm(p, f, l).value);
    Vec params{-1.0, -0.6, -0.2, 0.1, 0.4};
    auto A = [&](double t) { return family_scaled(x, std::sin(t)); };
    auto reps = lipschitz_bound_check(A, params, f, l, L);
    ASSERT_EQ(reps.size(), 2u);
    EXPECT_TRUE(reps[0].passed()) << reps[0].detail;
    EXPECT_TRUE(reps[1].passed()) << reps[1].detail;
    EXPECT_GE(reps[1].margin, 0.0);
  }
}

TEST(Lipschitz, UnderstatedCertificateFails) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement x = family({"x", "2 * x"}, g);
  auto reps = lipschitz_bound_check([&](double t) { return family_scaled(x, t); }, {0.0, 1.0}, Weight::one(), 0, {1.0, 1.0});
  EXPECT_TRUE(reps[0].passed());
  EXPECT_TRUE(reps[1].failed());
}

TEST(ProductIso, RoundTripAndBounds) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  std::vector<WeightedFunction> parts;
  parts.push_back(pair_join(fn1("sin(x)", g), fn1("x^2", g)));
  parts.push_back(pair_join(fn1("0.3 * x", g), fn1("exp(x) / 3", g)));
  RestrictedElement x = RestrictedElement::of(parts);
  for (int l = 0; l <= 2; ++l)
    for (const auto& r : product_iso_roundtrip(x, Weight::uniform("f", WeightPiece::gauss(1.0)), l)) EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(ProductIso, ZeroSecondComponent) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement x = RestrictedElement::of({pair_join(fn1("x", g), fn1("0", g))});
  auto [e, f] = pair_split(x[0]);
  for (int l = 0; l <= 2; ++l) EXPECT_EQ(weighted_seminorm(f, Weight::one(), l).value, 0.0);
  auto reps = product_iso_roundtrip(x, Weight::one(), 0);
  EXPECT_EQ(reps[1].lhs, reps[1].rhs);
}

TEST(Cauchy, GeometricSeriesOverHundredFactors) {
  SampleGrid g = SampleGrid::lattice(kUnit, 9);
  std::vector<std::string> texts;
  for (int i = 0; i < 100; ++i) texts.push_back("sin(x + " + std::to_string(i) + ") / " + std::to_string(i + 1));
  RestrictedElement e = family(texts, g);
  Weight f = Weight::uniform("f", WeightPiece::gauss(1.0));
  const double ne = family_seminorm(e, f, 0).value;
  auto seq = [&](int n) { return family_scaled(e, 2.0 - std::ldexp(1.0, -n)); };
  RestrictedElement limit = family_scaled(e, 2.0);
  auto reps = cauchy_limit_check(seq, limit, [&](int n) { return std::ldexp(ne, -n); }, 10, f, 0);
  for (const auto& r : reps) EXPECT_TRUE(r.passed()) << r.detail;
  EXPECT_NEAR(family_seminorm(family_difference(seq(5), limit), f, 0).value, std::ldexp(ne, -5), 1e-15);
}

TEST(Cauchy, ConstantSequenceAndTooTightEnvelope) {
  SampleGrid g = SampleGrid::lattice(kUnit, 9);
  RestrictedElement e = family({"x", "x^2"}, g);
  auto ok = cauchy_limit_check([&](int) { return e; }, e, [](int) { return 0.0; }, 4, Weight::one(), 0);
  for (const auto& r : ok) EXPECT_TRUE(r.passed());
  auto seq = [&](int n) { return family_scaled(e, 1.0 - std::ldexp(1.0, -n)); };
  auto bad = cauchy_limit_check(seq, e, [](int n) { return std::ldexp(0.5, -n); }, 6, Weight::one(), 0);
  EXPECT_TRUE(bad[1].failed());
}

TEST(Neighbourhood, InclusionExamples) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  std::vector<DomainSet> V{DomainSet::ball_at_zero(1, 1.0), DomainSet::ball_at_zero(1, 0.5)};
  Weight omega{"omega", {WeightPiece::constant(1.0), WeightPiece::constant(2.0)}, {}, {}};
  auto small = inclusion_check(family({"0.1", "0.1"}, g), omega, V, 0.4);
  ASSERT_EQ(small.size(), 2u);
  for (const auto& r : small) EXPECT_TRUE(r.passed()) << r.detail;
  auto zero = inclusion_check(family({"0", "0"}, g), omega, V, 0.01);
  for (const auto& r : zero) EXPECT_TRUE(r.passed());
  auto edge = inclusion_check(family({"0.39", "0.195"}, g), omega, V, 0.4);
  EXPECT_TRUE(edge[0].passed());
  EXPECT_NEAR(edge[0].margin, 0.01 * 0.5, 1e-15);
  EXPECT_TRUE(edge[1].passed());
}

TEST(Neighbourhood, NonAdjustingWeightIsPrecondition) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  std::vector<DomainSet> V{DomainSet::ball_at_zero(1, 1.0), DomainSet::ball_at_zero(1, 0.5)};
  try {
    inclusion_check(family({"0", "0"}, g), Weight::one(), V, 0.4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(Neighbourhood, Openness) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  std::vector<DomainSet> V{DomainSet::ball_at_zero(1, 1.0), DomainSet::ball_at_zero(1, 0.5)};
  Weight omega{"omega", {WeightPiece::constant(1.0), WeightPiece::constant(2.0)}, {}, {}};
  RestrictedElement gamma = family({"0.2 * x", "0.1 * x"}, g);
  double r = clearance_radius(gamma, omega, V);
  EXPECT_GT(r, 0.0);
  RestrictedElement eta = family({"0.2 * x + 0.05", "0.1 * x - 0.02"}, g);
  CheckReport rep = openness_check(gamma, eta, omega, V, r);
  EXPECT_TRUE(rep.passed()) << rep.detail;
  EXPECT_EQ(openness_check(gamma, family({"0.2 * x + 5", "0"}, g), omega, V, r).status, Status::skipped_precondition);
}

TEST(Neighbourhood, ConstantOneComparison) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement x = family({"x^2", "sin(x)"}, g);
  Weight omega{"omega", {WeightPiece::constant(1.0), WeightPiece::constant(2.0)}, {}, {}};
  for (int l = 0; l <= 2; ++l) EXPECT_TRUE(constant_one_check(x, omega, l).passed());
  EXPECT_EQ(constant_one_check(x, Weight::uniform("s", WeightPiece::sine()), 0).status, Status::skipped_precondition);
}

TEST(SimMultiply, IdentityMultiplierAndLinearMultipliers) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement x = family({"sin(x)", "x^2", "0.5 * x"}, g);
  std::vector<MultilinearMap> b(3, scalar_product());
  std::vector<MapPtr> ones(3, map1("1", kUnit));
  SimResult id = sim_multiply(ones, b, x, Weight::one(), Weight::one(), DominanceCertificate{"one", 0, "one", {1.0}});
  for (std::size_t i = 0; i < 3; ++i)
    for (const auto& p : g.points()) EXPECT_EQ(id.value[i].map->eval(p), x[i].map->eval(p));
  std::vector<MapPtr> M{map1("1 * x", kUnit), map1("2 * x", kUnit), map1("3 * x", kUnit)};
  Weight gw{"g", {WeightPiece::constant(1.0), WeightPiece::constant(2.0), WeightPiece::constant(3.0)}, {}, {}};
  SimResult res = sim_multiply(M, b, x, Weight::one(), gw, DominanceCertificate{"one", 0, "g", {1.0, 2.0, 3.0}});
  for (const auto& r : res.reports) EXPECT_TRUE(r.passed()) << r.id << " " << r.detail;
  SimResult zero = sim_multiply(M, b, family({"0", "0", "0"}, g), Weight::one(), gw, DominanceCertificate{"one", 0, "g", {1.0, 2.0, 3.0}});
  EXPECT_EQ(family_seminorm(zero.value, Weight::one(), 0).value, 0.0);
}

TEST(SimMultiply, UnderstatedMultiplierBound) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement x = family({"x"}, g);
  try {
    sim_multiply({map1("3 * x", kUnit)}, {scalar_product()}, x, Weight::one(), Weight::uniform("g", WeightPiece::constant(2.0)),
                 DominanceCertificate{"one", 0, "g", {2.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(SimMultilinear, ScalarProductWithGaussianFactors) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement a = family({"sin(x)", "x"}, g), b = family({"x^2", "cos(x)"}, g);
  Weight f = Weight::uniform("f", WeightPiece::gauss(1.0));
  Weight h = Weight::uniform("h", WeightPiece::gauss(0.5));
  SimResult res = sim_multilinear({scalar_product(), scalar_product()}, {a, b}, f, {h, h});
  for (const auto& r : res.reports) EXPECT_TRUE(r.passed()) << r.id << " " << r.detail;
  SimResult zero = sim_multilinear({scalar_product(), scalar_product()}, {a, family({"0", "0"}, g)}, f, {h, h});
  EXPECT_EQ(family_seminorm(zero.value, f, 0).value, 0.0);
}

TEST(SimSuperpose, UniformlyBoundedFamily) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  std::vector<DomainSet> V{DomainSet::ball_at_zero(1, 1.0), DomainSet::ball_at_zero(1, 1.0), DomainSet::ball_at_zero(1, 1.0)};
  Vec a{1.0, -0.5, 0.25};
  std::vector<MapPtr> beta;
  for (double ai : a) beta.push_back(map1(num(ai) + " * sin(x)", V[0]));
  RestrictedElement x = family({"0.3 * x", "0.2 * sin(x)", "0.1"}, g);
  Weight omega = Weight::uniform("omega", WeightPiece::constant(1.0));
  Weight f = Weight::uniform("f", WeightPiece::gauss(1.0));
  SimResult res = sim_superpose_uniform(beta, {1.0, 1.0, 1.0}, x, V, omega, f);
  for (const auto& r : res.reports) EXPECT_TRUE(r.passed()) << r.id << " " << r.detail;
  SimResult zero = sim_superpose_uniform(beta, {1.0, 1.0, 1.0}, family({"0", "0", "0"}, g), V, omega, f);
  EXPECT_EQ(family_seminorm(zero.value, f, 0).value, 0.0);
}

TEST(SimSuperpose, QuadraticKernelsWithDirection) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  DomainSet V = DomainSet::ball_at_zero(1, 1.0);
  std::vector<MapPtr> beta;
  std::vector<SuperposeCertificates> certs;
  for (int i = 1; i <= 2; ++i) {
    beta.push_back(make_map(DomainSet::product({kUnit, V}), {parse_expr(std::to_string(i) + " * y^2", {"x", "y"})}));
    certs.push_back(SuperposeCertificates{2.0 * i, 2.0 * i, {}, {}});
  }
  RestrictedElement x = family({"0.3 * x", "0.2 * x^2"}, g), h = family({"x", "1"}, g);
  Weight omega = Weight::uniform("omega", WeightPiece::constant(1.0));
  Weight f = Weight::uniform("f", WeightPiece::gauss(1.0));
  Weight gw{"g", {WeightPiece::gauss(1.0).scaled(2.0), WeightPiece::gauss(1.0).scaled(4.0)}, {}, {}};
  SimResult res = sim_superpose(beta, certs, x, {V, V}, omega, f, gw, DominanceCertificate{"f", 1, "g", {2.0, 4.0}}, &h);
  for (const auto& r : res.reports) EXPECT_TRUE(r.passed()) << r.id << " " << r.detail;
}

TEST(SimSuperpose, ComparisonCertificates) {
  MapPtr beta = make_map(DomainSet::cube(1, -1, 1), {parse_expr("sin(x)", {"x"})});
  for (const auto& r : comparison_check(beta, {1.0, 1.0, 1.0}, 0.5)) EXPECT_TRUE(r.passed()) << r.detail;
  Vec k = comparison_certificates({1.0, 2.0, 3.0}, 0.5);
  EXPECT_EQ(k[1], 1.0 * 1.0 + 0.5 * 2.0);
  EXPECT_EQ(k[2], 2.0 * 2.0 + 0.5 * 3.0);
}

TEST(SimPowerSeries, ClosedForms) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  auto opfam = [&](const std::vector<std::string>& texts) {
    std::vector<WeightedFunction> parts;
    for (const auto& t : texts) parts.emplace_back(make_map(Space::sup(1), Space::op(1, 1), kUnit, {parse_expr(t, {"x"})}), g);
    return RestrictedElement::of(parts);
  };
  SimResult zero = sim_power_series(opfam({"0", "0"}), 0.5);
  EXPECT_EQ(family_seminorm(zero.value, Weight::one(), 0).value, 0.0);
  SimResult half = sim_power_series(opfam({"0.5", "0.5"}), 0.5);
  for (const auto& r : half.reports) EXPECT_TRUE(r.passed());
  for (std::size_t i = 0; i < 2; ++i)
    for (const auto& p : g.points()) EXPECT_NEAR(half.value[i].map->eval(p)[0], -1.0, 1e-11);
  SimResult s = sim_power_series(opfam({"0.3 * sin(x)"}), 0.3);
  for (const auto& p : g.points()) {
    double a = 0.3 * std::sin(p[0]);
    EXPECT_NEAR(s.value[0].map->eval(p)[0], -a / (1 - a), 1e-12);
  }
  SimResult over = sim_power_series(opfam({"0.9 * x"}), 0.5);
  bool any_fail = false;
  for (const auto& r : over.reports) any_fail = any_fail || r.failed();
  EXPECT_TRUE(any_fail);
}

TEST(SimCompose, ShiftedSquares) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  DomainSet W = DomainSet::cube(1, -2, 2);
  DomainSet V = DomainSet::ball_at_zero(1, 0.5);
  std::vector<MapPtr> gamma{map1("x^2", W), map1("x^2", W)};
  std::vector<MapPtr> gamma1{map1("sin(x)", W), map1("0.5 * x", W)};
  RestrictedElement eta = family({"0.1", "-0.05"}, g), eta1 = family({"x", "0.2"}, g);
  Weight omega = Weight::uniform("omega", WeightPiece::constant(2.0));
  SimResult res = sim_compose(gamma, eta, {V, V}, omega, Weight::one(), ComposeFamilyCertificates{{4.0, 4.0}}, &gamma1, &eta1);
  for (const auto& r : res.reports) EXPECT_TRUE(r.passed()) << r.id << " " << r.detail;
  Vec c{0.1, -0.05};
  for (std::size_t i = 0; i < 2; ++i)
    for (const auto& p : g.points()) EXPECT_NEAR(res.value[i].map->eval(p)[0], (p[0] + c[i]) * (p[0] + c[i]), 1e-15);
  SimResult id = sim_compose(gamma, family({"0", "0"}, g), {V, V}, omega, Weight::one(), ComposeFamilyCertificates{{4.0, 4.0}});
  for (const auto& p : g.points()) EXPECT_EQ(id.value[0].map->eval(p), gamma[0]->eval(p));
}

TEST(SimInvert, LinearFamilyClosedForms) {
  DomainSet U = DomainSet::cube(1, -1.2, 1.2);
  DomainSet Vt = DomainSet::cube(1, -0.2, 0.2);
  SampleGrid gu = SampleGrid::lattice(U), gv = SampleGrid::lattice(Vt, 9);
  Vec c{0.05, 0.1, 0.2};
  std::vector<std::string> texts;
  for (double ci : c) texts.push_back(num(ci) + " * x");
  RestrictedElement phi = family(texts, gu);
  ContractionConfig cfg;
  SimResult res = sim_invert(phi, {Vt, Vt, Vt}, {gv, gv, gv}, InvertFamilyCertificates{0.2, 0.24}, cfg, Weight::one());
  for (const auto& r : res.reports) EXPECT_TRUE(r.passed()) << r.id << " " << r.detail;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (const auto& y : gv.points()) EXPECT_NEAR(res.value[i].map->eval(y)[0], -c[i] / (1 + c[i]) * y[0], 1e-12);
  EXPECT_TRUE(sim_invert_differential_check(phi, res.value, cfg.tau).passed());
  RestrictedElement phi1 = family({"0.1 * x^2", "0.05", "sin(x) / 10"}, gu);
  CheckReport d = sim_invert_derivative_check(phi, phi1, res.value, Weight::one());
  EXPECT_TRUE(d.passed()) << d.detail;
}

TEST(SimInvert, SharedRadiusRejectsLargeCoefficients) {
  DomainSet U = DomainSet::cube(1, -1.2, 1.2);
  DomainSet Vt = DomainSet::cube(1, -0.2, 0.2);
  SampleGrid gu = SampleGrid::lattice(U), gv = SampleGrid::lattice(Vt, 9);
  RestrictedElement phi = family({"0.1 * x", "0.25 * x", "0.4 * x"}, gu);
  try {
    sim_invert(phi, {Vt, Vt, Vt}, {gv, gv, gv}, InvertFamilyCertificates{0.4, 0.48}, ContractionConfig{}, Weight::one());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
}

TEST(SimInvert, ZeroFamily) {
  DomainSet U = DomainSet::cube(1, -1.2, 1.2);
  DomainSet Vt = DomainSet::cube(1, -0.2, 0.2);
  SampleGrid gu = SampleGrid::lattice(U), gv = SampleGrid::lattice(Vt, 9);
  SimResult res = sim_invert(family({"0", "0"}, gu), {Vt, Vt}, {gv, gv}, InvertFamilyCertificates{0.0, 0.0}, ContractionConfig{}, Weight::one());
  EXPECT_EQ(family_seminorm(res.value, Weight::one(), 0).value, 0.0);
}

TEST(Restriction, SubfamilyValuesAreBitIdentical) {
  SampleGrid g = SampleGrid::lattice(kUnit);
  RestrictedElement x = family({"x", "sin(x)", "x^3", "cos(x) - 1"}, g);
  RestrictedElement r = x.restrict_to({1, 3});
  Weight f = Weight::uniform("f", WeightPiece::gauss(1.0));
  for (int l = 0; l <= 2; ++l) {
    FamilySeminorm full = family_seminorm(x, f, l), sub = family_seminorm(r, f, l);
    EXPECT_EQ(sub.per_factor[0], full.per_factor[1]);
    EXPECT_EQ(sub.per_factor[1], full.per_factor[3]);
    EXPECT_LE(sub.value, full.value);
  }
}
