#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wrp/error.hpp"

namespace wrp {

enum class Status { pass, fail, skipped_precondition };

/// Where a number came from. A grid maximum is only a lower bound for a supremum.
enum class Provenance { grid_lower, certified_upper, certified_lower, exact };

enum class Relation { le, eq };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skipped_precondition: return "skipped-precondition";
  }
  return "?";
}

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::grid_lower: return "grid_lower";
    case Provenance::certified_upper: return "certified_upper";
    case Provenance::certified_lower: return "certified_lower";
    case Provenance::exact: return "exact";
  }
  return "?";
}

inline const char* to_string(Relation r) { return r == Relation::le ? "le" : "eq"; }

struct Witness {
  int factor = -1;
  std::vector<double> point;
  double step = 0.0;
};

struct CheckReport {
  std::string id;
  Status status = Status::pass;
  Relation relation = Relation::le;
  double lhs = 0.0;
  double rhs = 0.0;
  Provenance lhs_provenance = Provenance::exact;
  Provenance rhs_provenance = Provenance::exact;
  double margin = 0.0;
  double tolerance = 0.0;
  Witness witness;
  std::string detail;
  int scenario_index = -1;

  bool passed() const { return status == Status::pass; }
  bool failed() const { return status == Status::fail; }
};

/// Relative tolerance scaled by the size of the compared quantities.
inline double scaled_tolerance(double rel, double a, double b) {
  double s = 1.0;
  if (std::isfinite(a)) s = std::max(s, std::abs(a));
  if (std::isfinite(b)) s = std::max(s, std::abs(b));
  return rel * s;
}

/// rhs - lhs with the convention that equal infinities give zero.
inline double le_margin(double lhs, double rhs) {
  if (std::isinf(lhs) && std::isinf(rhs) && lhs == rhs) return 0.0;
  return rhs - lhs;
}

inline CheckReport finish(CheckReport r) {
  if (std::isnan(r.margin)) {
    r.status = Status::fail;
    return r;
  }
  r.status = r.margin >= -r.tolerance ? Status::pass : Status::fail;
  return r;
}

/// An inequality lhs <= rhs. Refuses pairings that would compare a certified upper bound against
/// a sampled lower bound, since such a comparison proves nothing.
inline CheckReport check_le(std::string id, double lhs, Provenance lp, double rhs, Provenance rp,
                            double tolerance, Witness w = {}, std::string detail = {}) {
  require(!(lp == Provenance::certified_upper && rp == Provenance::grid_lower), ErrorKind::precondition,
          "check " + id + " pairs a certified upper bound with a grid lower bound");
  CheckReport r;
  r.id = std::move(id);
  r.relation = Relation::le;
  r.lhs = lhs;
  r.rhs = rhs;
  r.lhs_provenance = lp;
  r.rhs_provenance = rp;
  r.margin = le_margin(lhs, rhs);
  r.tolerance = tolerance;
  r.witness = std::move(w);
  r.detail = std::move(detail);
  return finish(std::move(r));
}

/// An identity lhs == rhs; the margin is minus the absolute discrepancy.
inline CheckReport check_eq(std::string id, double lhs, Provenance lp, double rhs, Provenance rp,
                            double tolerance, Witness w = {}, std::string detail = {}) {
  CheckReport r;
  r.id = std::move(id);
  r.relation = Relation::eq;
  r.lhs = lhs;
  r.rhs = rhs;
  r.lhs_provenance = lp;
  r.rhs_provenance = rp;
  r.margin = (lhs == rhs) ? 0.0 : -std::abs(rhs - lhs);
  r.tolerance = tolerance;
  r.witness = std::move(w);
  r.detail = std::move(detail);
  return finish(std::move(r));
}

inline CheckReport skipped(std::string id, std::string reason) {
  CheckReport r;
  r.id = std::move(id);
  r.status = Status::skipped_precondition;
  r.lhs = r.rhs = r.margin = std::numeric_limits<double>::quiet_NaN();
  r.detail = std::move(reason);
  return r;
}

/// Keeps the report with the smallest margin; skipped reports never displace evaluated ones.
inline void keep_worst(CheckReport& acc, const CheckReport& next) {
  if (acc.id.empty() || acc.status == Status::skipped_precondition) {
    acc = next;
    return;
  }
  if (next.status == Status::skipped_precondition) return;
  double a = acc.margin + acc.tolerance;
  double b = next.margin + next.tolerance;
  if (std::isnan(b) || b < a) acc = next;
}

}  // namespace wrp
