#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "wrp/wrp.hpp"

using namespace wrp;

namespace {

FamilyScenario zeroed(FamilyScenario s) {
  auto zero = [](std::vector<std::string>& v) {
    for (auto& e : v) e = "0";
  };
  for (auto& f : s.factors) {
    for (auto* v : {&f.gamma, &f.gamma2, &f.gamma1, &f.xi, &f.outer, &f.outer0, &f.outer1, &f.phi, &f.psi, &f.phi1, &f.beta, &f.field, &f.lin_g})
      zero(*v);
  }
  s.name = "zero";
  return s;
}

}  // namespace

TEST(Registry, UniqueIdsWithStatements) {
  std::set<std::string> seen;
  for (const auto& c : check_registry()) {
    EXPECT_TRUE(seen.insert(c.id).second) << c.id;
    EXPECT_FALSE(c.title.empty()) << c.id;
    EXPECT_FALSE(c.statement.empty()) << c.id;
    EXPECT_EQ(find_check(c.id), &c);
  }
  EXPECT_EQ(seen.size(), all_check_ids().size());
  EXPECT_GE(seen.size(), 40u);
  EXPECT_EQ(find_check("est:bogus"), nullptr);
}

TEST(Registry, EveryGroupIdIsRegistered) {
  for (const auto& g : detail::check_groups())
    for (const auto& id : g.ids) EXPECT_NE(find_check(id), nullptr) << id;
}

TEST(Generator, DeterministicAndShaped) {
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 1234567ull}) {
    FamilyScenario a = generate_scenario(seed), b = generate_scenario(seed);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.dim, 1 + static_cast<int>(seed % 2));
    EXPECT_EQ(a.factors.size(), 2 + seed % 7);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  }
  EXPECT_NE(to_json(generate_scenario(1)).dump(), to_json(generate_scenario(2)).dump());
  FamilyScenario big = generate_scenario(ScenarioSeed{5, 2, 8});
  EXPECT_EQ(big.dim, 2);
  EXPECT_EQ(big.factors.size(), 8u);
}

TEST(Generator, HundredSeedsPassIngest) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) EXPECT_NO_THROW(build_scenario(generate_scenario(seed))) << seed;
}

TEST(ScenarioJson, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    FamilyScenario s = generate_scenario(seed);
    EXPECT_EQ(scenario_from_json(to_json(s)), s) << seed;
    EXPECT_EQ(scenario_from_json(nlohmann::json::parse(to_json(s).dump())), s) << seed;
  }
}

TEST(ScenarioJson, UnknownFieldNamesPointer) {
  nlohmann::json j = to_json(generate_scenario(0));
  j["factors"][1]["bogus"] = 1;
  try {
    scenario_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    EXPECT_NE(std::string(e.what()).find("/factors/1/bogus"), std::string::npos) << e.what();
  }
  nlohmann::json k = to_json(generate_scenario(0));
  k["factors"][0]["gamma"] = "not a list";
  EXPECT_THROW(scenario_from_json(k), Error);
}

TEST(ScenarioJson, BrokenExpressionIsRejectedAtBuild) {
  FamilyScenario s = generate_scenario(0);
  s.factors[0].gamma[0] = "sin(x1";
  EXPECT_THROW(build_scenario(s), Error);
  s = generate_scenario(0);
  s.factors[0].gamma[0] = "z1 + x1";
  EXPECT_THROW(build_scenario(s), Error);
}

TEST(Suite, EmptySelectionYieldsNothing) {
  CheckSelection none;
  none.ids = std::set<std::string>{};
  EXPECT_TRUE(run_suite({generate_scenario(0)}, none).empty());
}

TEST(Suite, SelectionRestrictsIds) {
  CheckSelection sel;
  sel.ids = std::set<std::string>{"est:f0-Norm_SPid", "lem:topologische_Zerlegung_von_CFk"};
  auto reps = run_suite({generate_scenario(1)}, sel);
  ASSERT_FALSE(reps.empty());
  for (const auto& r : reps) {
    EXPECT_TRUE(sel.selected(r.id)) << r.id;
    EXPECT_TRUE(r.passed()) << r.id << " " << r.detail;
  }
}

TEST(Suite, SeedFortyTwoIsByteIdentical) {
  FamilyScenario s = generate_scenario(42);
  auto a = run_suite({s}, CheckSelection::all());
  auto b = run_suite({s}, CheckSelection::all(), {}, 4);
  EXPECT_EQ(report_json("x", {s}, a).dump(), report_json("x", {s}, b).dump());
  EXPECT_EQ(margins_csv(a), margins_csv(b));
}

TEST(Suite, ParallelOrderMatchesSerial) {
  std::vector<FamilyScenario> ss{generate_scenario(2), generate_scenario(3), generate_scenario(4)};
  CheckSelection sel;
  sel.ids = std::set<std::string>{"est:f0-Norm_SPid", "lem:multilineareSuperpos-Linf", "def:adjusting_weight"};
  auto a = run_suite(ss, sel, {}, 1), b = run_suite(ss, sel, {}, 3);
  EXPECT_EQ(report_json("x", ss, a).dump(), report_json("x", ss, b).dump());
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LE(a[i - 1].scenario_index, a[i].scenario_index);
}

TEST(Suite, ZeroMapsGiveMarginEqualToBound) {
  FamilyScenario s = zeroed(generate_scenario(0));
  auto reps = run_suite({s}, CheckSelection::all());
  ASSERT_FALSE(reps.empty());
  int estimates = 0;
  for (const auto& r : reps) {
    EXPECT_FALSE(r.failed()) << r.id << " " << r.detail;
    if (r.id.rfind("est:", 0) == 0 && r.relation == Relation::le && r.passed()) {
      EXPECT_EQ(r.lhs, 0.0) << r.id;
      EXPECT_EQ(r.margin, r.rhs) << r.id;
      ++estimates;
    }
  }
  EXPECT_GT(estimates, 5);
}

TEST(Suite, HalvedSuperpositionCertificateFails) {
  FamilyScenario s = generate_scenario(0);
  for (auto& f : s.factors) f.xi_d2_sup0 *= 0.5;
  CheckSelection sel;
  sel.ids = std::set<std::string>{"est:f0-Norm_SPid"};
  bool any_fail = false;
  for (const auto& r : run_suite({s}, sel)) any_fail = any_fail || r.failed();
  EXPECT_TRUE(any_fail);
}

TEST(Suite, RestrictionKeepsFactorReportsBitIdentical) {
  FamilyScenario s = generate_scenario(6);
  FamilyScenario r = restrict_scenario(s, {0, 2});
  ASSERT_EQ(r.factors.size(), 2u);
  EXPECT_EQ(r.factors[1], s.factors[2]);
  BuiltScenario a = build_scenario(s), b = build_scenario(r);
  Weight f = a.f;
  for (int l = 0; l <= 2; ++l) {
    FamilySeminorm full = family_seminorm(a.family(&BuiltFactor::gamma), f, l);
    FamilySeminorm sub = family_seminorm(b.family(&BuiltFactor::gamma), f, l);
    EXPECT_EQ(sub.per_factor[0], full.per_factor[0]);
    EXPECT_EQ(sub.per_factor[1], full.per_factor[2]);
  }
}

TEST(Reports, JsonEncodingOfNonFinite) {
  CheckReport r = skipped("est:f0-Norm_SPid", "why");
  nlohmann::json j = to_json(r);
  EXPECT_TRUE(j["lhs"].is_null());
  EXPECT_EQ(j["status"], "skipped-precondition");
  CheckReport inf = check_le("est:f0-Norm_SPid", 1.0, Provenance::exact, INFINITY, Provenance::exact, 0.0);
  EXPECT_EQ(to_json(inf)["rhs"], "inf");
  EXPECT_EQ(to_json(inf)["margin"], "inf");
}

TEST(Reports, CsvShapes) {
  std::vector<CheckReport> reps{check_le("b", 1.0, Provenance::exact, 2.0, Provenance::exact, 0.0),
                                check_le("a", 1.0, Provenance::exact, 1.5, Provenance::exact, 0.0), skipped("a", "x")};
  std::string m = margins_csv(reps);
  EXPECT_EQ(m.substr(0, m.find('\n')), "scenario,id,status,lhs,rhs,margin");
  EXPECT_EQ(std::count(m.begin(), m.end(), '\n'), 4);
  EXPECT_EQ(margins_histogram_csv(reps), "id,margin\na,0.5\nb,1\n");
  auto s = summarize(reps);
  EXPECT_EQ(s["a"].total, 2);
  EXPECT_EQ(s["a"].skipped, 1);
  EXPECT_EQ(s["a"].min_margin, 0.5);
}
