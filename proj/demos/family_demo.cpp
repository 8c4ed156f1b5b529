#include <iostream>

#include "wrp/wrp.hpp"

/// Generates a seeded family scenario, runs every registered check on it and prints the per-id
/// summary.
int main(int argc, char** argv) {
  using namespace wrp;
  std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 3;
  FamilyScenario s = generate_scenario(seed);
  std::cout << s.name << ": dimension " << s.dim << ", " << s.factors.size() << " factors\n";
  auto reports = run_suite({s}, CheckSelection::all());
  for (const auto& [id, c] : summarize(reports))
    std::cout << (c.failed ? "FAIL " : "ok   ") << id << "  (" << c.passed << "/" << c.total << ", min margin " << c.min_margin << ")\n";
}
