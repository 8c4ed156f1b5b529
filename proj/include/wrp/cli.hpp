#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wrp/verify.hpp"

namespace wrp {

/// Exit statuses of `run`.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_fail = 2, exit_skipped = 3, exit_io = 4 };

struct Tolerances {
  double fix_tol = 1e-12;
  double tail_tol = 1e-12;
  int max_terms = 128;
  double slope_lo = 1.7;
  double slope_hi = 2.3;
  double exact_tol = 1e-12;

  bool operator==(const Tolerances&) const = default;
};

struct RunConfig {
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> scenario_files;
  std::optional<std::vector<std::string>> checks;  ///< no value: every registered id
  Tolerances tolerances;
  std::string out = "wrp-out";
  bool histogram = true;
  int jobs = 1;
  bool strict_preconditions = false;
  bool skips_pass = false;

  bool operator==(const RunConfig&) const = default;

  std::size_t unit_count() const { return scenario_files.size() + seeds.size(); }

  CheckSelection selection() const {
    CheckSelection s;
    if (checks) s.ids = std::set<std::string>(checks->begin(), checks->end());
    return s;
  }

  SuiteOptions suite_options() const {
    SuiteOptions o;
    o.fix_tol = tolerances.fix_tol;
    o.neumann.tail_tol = tolerances.tail_tol;
    o.neumann.max_terms = tolerances.max_terms;
    o.convergence.slope_lo = tolerances.slope_lo;
    o.convergence.slope_hi = tolerances.slope_hi;
    o.convergence.exact_tol = tolerances.exact_tol;
    return o;
  }
};

inline void validate_check_ids(const std::vector<std::string>& ids, const std::string& pointer) {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (!find_check(ids[i])) detail::schema_error(pointer + "/" + std::to_string(i), "unknown check id \"" + ids[i] + "\"");
}

/// Parses a run configuration. Relative scenario paths are resolved against `base_dir`.
inline RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  using detail::field_or;
  detail::reject_unknown(j, "", {"seeds", "scenarios", "checks", "tolerances", "out", "histogram", "jobs", "strict_preconditions", "skips_pass"});
  RunConfig c;
  c.seeds = field_or<std::vector<std::uint64_t>>(j, "", "seeds", {});
  for (const auto& p : field_or<std::vector<std::string>>(j, "", "scenarios", {})) {
    std::filesystem::path path(p);
    c.scenario_files.push_back(path.is_relative() && !base_dir.empty() ? (base_dir / path).lexically_normal().string() : p);
  }
  if (j.contains("checks")) {
    const auto& ch = j["checks"];
    if (ch.is_string()) {
      if (ch.get<std::string>() != "all") detail::schema_error("/checks", "expected \"all\" or a list of check ids");
    } else {
      auto ids = detail::field<std::vector<std::string>>(j, "", "checks");
      validate_check_ids(ids, "/checks");
      c.checks = ids;
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    detail::reject_unknown(t, "/tolerances", {"fix_tol", "tail_tol", "max_terms", "slope_lo", "slope_hi", "exact_tol"});
    Tolerances& o = c.tolerances;
    o.fix_tol = field_or(t, "/tolerances", "fix_tol", o.fix_tol);
    o.tail_tol = field_or(t, "/tolerances", "tail_tol", o.tail_tol);
    o.max_terms = field_or(t, "/tolerances", "max_terms", o.max_terms);
    o.slope_lo = field_or(t, "/tolerances", "slope_lo", o.slope_lo);
    o.slope_hi = field_or(t, "/tolerances", "slope_hi", o.slope_hi);
    o.exact_tol = field_or(t, "/tolerances", "exact_tol", o.exact_tol);
    for (auto [v, key] : {std::pair{o.fix_tol, "fix_tol"}, {o.tail_tol, "tail_tol"}, {o.exact_tol, "exact_tol"}})
      if (!(v > 0.0)) detail::schema_error(std::string("/tolerances/") + key, "must be positive");
    if (o.max_terms < 1) detail::schema_error("/tolerances/max_terms", "must be at least 1");
    if (!(o.slope_lo < o.slope_hi)) detail::schema_error("/tolerances/slope_hi", "must exceed slope_lo");
  }
  c.out = field_or<std::string>(j, "", "out", c.out);
  c.histogram = field_or(j, "", "histogram", c.histogram);
  c.jobs = field_or(j, "", "jobs", c.jobs);
  if (c.jobs < 1) detail::schema_error("/jobs", "must be at least 1");
  c.strict_preconditions = field_or(j, "", "strict_preconditions", c.strict_preconditions);
  c.skips_pass = field_or(j, "", "skips_pass", c.skips_pass);
  return c;
}

inline RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::config, std::string("malformed config: ") + e.what());
  }
  return parse_config(j, base_dir);
}

inline nlohmann::json emit_config(const RunConfig& c) {
  const auto& t = c.tolerances;
  nlohmann::json j = {{"seeds", c.seeds},
                      {"scenarios", c.scenario_files},
                      {"tolerances",
                       {{"fix_tol", t.fix_tol},
                        {"tail_tol", t.tail_tol},
                        {"max_terms", t.max_terms},
                        {"slope_lo", t.slope_lo},
                        {"slope_hi", t.slope_hi},
                        {"exact_tol", t.exact_tol}}},
                      {"out", c.out},
                      {"histogram", c.histogram},
                      {"jobs", c.jobs},
                      {"strict_preconditions", c.strict_preconditions},
                      {"skips_pass", c.skips_pass}};
  j["checks"] = c.checks ? nlohmann::json(*c.checks) : nlohmann::json("all");
  return j;
}

/// FNV-1a of the canonical config without output location and parallelism.
inline std::string run_id(const RunConfig& c) {
  nlohmann::json j = emit_config(c);
  j.erase("out");
  j.erase("jobs");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << h;
  return std::string(16 - std::min<std::size_t>(16, s.str().size()), '0') + s.str();
}

/// Writes through a temporary file and a rename. Throws io errors.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(os), ErrorKind::io, "cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    require(static_cast<bool>(os), ErrorKind::io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorKind::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::io, "cannot read " + path.string());
  std::ostringstream s;
  s << is.rdbuf();
  return s.str();
}

/// One queued scenario: loaded from a file or generated from a seed. A unit that fails to load
/// carries the reason instead of a scenario.
struct ScenarioUnit {
  std::optional<FamilyScenario> scenario;
  std::string error;
  nlohmann::json descriptor;
};

/// Scenario files first, then seeds. Unreadable files are io errors; invalid contents become
/// units with an error.
inline std::vector<ScenarioUnit> load_units(const RunConfig& c) {
  std::vector<ScenarioUnit> units;
  for (const auto& path : c.scenario_files) {
    std::string text = read_file(path);
    ScenarioUnit u;
    try {
      u.scenario = scenario_from_json(nlohmann::json::parse(text));
      u.descriptor = describe(*u.scenario);
    } catch (const nlohmann::json::parse_error& e) {
      u.error = std::string("malformed scenario: ") + e.what();
    } catch (const Error& e) {
      u.error = e.what();
    }
    if (!u.scenario) u.descriptor = {{"name", path}, {"seed", nullptr}, {"error", u.error}};
    u.descriptor["source"] = path;
    units.push_back(std::move(u));
  }
  for (auto s : c.seeds) {
    ScenarioUnit u;
    u.scenario = generate_scenario(s);
    u.descriptor = describe(*u.scenario);
    units.push_back(std::move(u));
  }
  return units;
}

struct RunOutcome {
  std::vector<CheckReport> reports;
  nlohmann::json report;
  int exit_code = exit_ok;
};

inline int exit_code_for(const std::vector<CheckReport>& reports, const RunConfig& c) {
  bool any_fail = false, any_skip = false;
  for (const auto& r : reports) {
    any_fail = any_fail || r.failed();
    any_skip = any_skip || r.status == Status::skipped_precondition;
  }
  if (any_fail || (any_skip && c.strict_preconditions)) return exit_fail;
  if (any_skip && !c.skips_pass) return exit_skipped;
  return exit_ok;
}

/// Runs every unit and assembles the report; writes nothing.
inline RunOutcome execute(const RunConfig& c) {
  std::vector<ScenarioUnit> units = load_units(c);
  std::vector<FamilyScenario> good;
  std::vector<int> good_index;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (units[i].scenario) {
      good.push_back(*units[i].scenario);
      good_index.push_back(static_cast<int>(i));
    }
  const CheckSelection sel = c.selection();
  std::vector<CheckReport> ran = run_suite(good, sel, c.suite_options(), c.jobs);
  for (auto& r : ran) r.scenario_index = good_index.at(r.scenario_index);
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (units[i].scenario) continue;
    for (const auto& id : all_check_ids())
      if (sel.selected(id)) {
        CheckReport r = skipped(id, units[i].error);
        r.scenario_index = static_cast<int>(i);
        ran.push_back(r);
      }
  }
  std::stable_sort(ran.begin(), ran.end(),
                   [](const CheckReport& a, const CheckReport& b) { return a.scenario_index < b.scenario_index; });
  RunOutcome out;
  nlohmann::json seeds = nlohmann::json::array(), scen = nlohmann::json::array(), checks = nlohmann::json::array();
  for (const auto& u : units) {
    seeds.push_back(u.scenario && u.scenario->seed ? nlohmann::json(*u.scenario->seed) : nlohmann::json(nullptr));
    scen.push_back(u.descriptor);
  }
  for (const auto& r : ran) checks.push_back(to_json(r));
  out.report = {{"run_id", run_id(c)}, {"seed", seeds}, {"scenario", scen}, {"checks", checks}, {"summary", summary_json(ran)}};
  out.exit_code = exit_code_for(ran, c);
  out.reports = std::move(ran);
  return out;
}

/// Writes report.json, margins.csv and optionally margins_hist.csv into the output directory.
inline void persist(const RunOutcome& o, const RunConfig& c) {
  std::filesystem::path dir(c.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec && std::filesystem::is_directory(dir), ErrorKind::io, "cannot create output directory " + dir.string());
  write_atomic(dir / "report.json", o.report.dump(2) + "\n");
  write_atomic(dir / "margins.csv", margins_csv(o.reports));
  if (c.histogram) write_atomic(dir / "margins_hist.csv", margins_histogram_csv(o.reports));
}

/// Executes and persists; returns the exit status. I/O errors map to exit 4.
inline int run(const RunConfig& c, std::ostream& log = std::cerr) {
  try {
    RunOutcome o = execute(c);
    persist(o, c);
    const auto& s = o.report["summary"];
    log << "units " << c.unit_count() << ", checks " << s["total"] << ": pass " << s["pass"] << ", fail " << s["fail"] << ", skipped "
        << s["skipped"] << "\n";
    for (const auto& r : o.reports)
      if (r.failed()) log << "FAIL unit " << r.scenario_index << " " << r.id << " lhs " << r.lhs << " rhs " << r.rhs << " " << r.detail << "\n";
    return o.exit_code;
  } catch (const Error& e) {
    log << e.what() << "\n";
    return e.kind() == ErrorKind::io ? exit_io : exit_usage;
  }
}

/// Accepts N or an inclusive range A..B.
inline std::vector<std::uint64_t> parse_seed_arg(const std::string& s) {
  auto number = [&](const std::string& t) {
    require(!t.empty() && t.find_first_not_of("0123456789") == std::string::npos, ErrorKind::config, "invalid seed \"" + s + "\"");
    return static_cast<std::uint64_t>(std::stoull(t));
  };
  auto dots = s.find("..");
  if (dots == std::string::npos) return {number(s)};
  std::uint64_t a = number(s.substr(0, dots)), b = number(s.substr(dots + 2));
  require(a <= b && b - a < 100000, ErrorKind::config, "invalid seed range \"" + s + "\"");
  std::vector<std::uint64_t> v;
  for (std::uint64_t k = a; k <= b; ++k) v.push_back(k);
  return v;
}

inline std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

/// Entry point of the `wrp` executable.
inline int cli_main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Numerical verification suite for weighted function spaces and restricted products"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run the verification suite");
  std::string config_path, checks_arg, out_dir;
  std::vector<std::string> seed_args;
  int jobs = 0;
  bool strict = false;
  run_cmd->add_option("--config", config_path, "Run configuration (JSON); '-' reads stdin");
  run_cmd->add_option("--seed", seed_args, "Generator seed, N or A..B (repeatable)");
  run_cmd->add_option("--checks", checks_arg, "Comma-separated check ids or 'all'");
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--strict-preconditions", strict, "Count precondition skips as failures");

  auto* list_cmd = app.add_subcommand("list-checks", "List every check id with its title");
  auto* explain_cmd = app.add_subcommand("explain", "Show the statement and hypotheses of a check");
  std::string explain_id;
  explain_cmd->add_option("id", explain_id, "Check id")->required();

  auto* gen_cmd = app.add_subcommand("generate", "Print the generated scenario for a seed as JSON");
  std::uint64_t gen_seed = 0;
  int gen_dim = 0, gen_factors = 0;
  gen_cmd->add_option("--seed", gen_seed, "Generator seed")->required();
  gen_cmd->add_option("--dim", gen_dim, "Dimension (1..3)");
  gen_cmd->add_option("--factors", gen_factors, "Family size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (*list_cmd) {
    for (const auto& c : check_registry()) out << c.id << "\t" << c.title << "\n";
    return exit_ok;
  }
  if (*explain_cmd) {
    const CheckInfo* c = find_check(explain_id);
    if (!c) {
      err << "unknown check id \"" << explain_id << "\"\n";
      return exit_usage;
    }
    out << c->id << "\n" << c->title << "\n\n" << c->statement << "\n\nHypotheses:\n";
    for (const auto& h : c->hypotheses) out << "  - " << h << "\n";
    return exit_ok;
  }
  if (*gen_cmd) {
    try {
      out << to_json(generate_scenario(ScenarioSeed{gen_seed, gen_dim, gen_factors})).dump(2) << "\n";
      return exit_ok;
    } catch (const Error& e) {
      err << e.what() << "\n";
      return exit_usage;
    }
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      if (config_path == "-") {
        std::ostringstream s;
        s << std::cin.rdbuf();
        cfg = parse_config_text(s.str());
      } else {
        std::filesystem::path p(config_path);
        std::string text;
        try {
          text = read_file(p);
        } catch (const Error& e) {
          err << e.what() << "\n";
          return exit_io;
        }
        cfg = parse_config_text(text, p.parent_path());
      }
    }
    if (!seed_args.empty()) {
      cfg.seeds.clear();
      for (const auto& s : seed_args)
        for (auto v : parse_seed_arg(s)) cfg.seeds.push_back(v);
    }
    if (cfg.unit_count() == 0) {
      const char* env = std::getenv("WRP_SEED");
      cfg.seeds = env ? parse_seed_arg(env) : std::vector<std::uint64_t>{0};
    }
    if (!checks_arg.empty()) {
      if (checks_arg == "all") {
        cfg.checks.reset();
      } else {
        auto ids = split_ids(checks_arg);
        for (const auto& id : ids)
          require(find_check(id) != nullptr, ErrorKind::config, "unknown check id \"" + id + "\"");
        cfg.checks = ids;
      }
    }
    if (!out_dir.empty()) cfg.out = out_dir;
    if (jobs > 0) cfg.jobs = jobs;
    if (strict) cfg.strict_preconditions = true;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_usage;
  }
  return run(cfg, err);
}

}  // namespace wrp
