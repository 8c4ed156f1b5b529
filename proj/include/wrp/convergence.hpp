#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "wrp/check_report.hpp"

namespace wrp {

struct ConvergenceOptions {
  std::vector<double> steps{0.1, 0.05, 0.025, 0.0125};
  double slope_lo = 1.7;
  double slope_hi = 2.3;
  /// Below this maximal error the quotient is exact up to rounding.
  double exact_tol = 1e-12;
  /// Errors below this floor are rounding noise and do not enter the slope fit.
  double noise_floor = 1e-13;
};

struct ConvergenceTrace {
  std::vector<double> steps;
  std::vector<double> errors;
  double slope = std::nan("");
  double max_error = 0.0;
  int dropped = 0;
};

/// Least-squares slope of log(error) against log(step).
inline ConvergenceTrace measure_convergence(const std::function<double(double)>& error, const ConvergenceOptions& opt) {
  ConvergenceTrace tr;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double t : opt.steps) {
    double e = error(t);
    if (std::isnan(e)) {
      ++tr.dropped;
      continue;
    }
    tr.steps.push_back(t);
    tr.errors.push_back(e);
    tr.max_error = std::max(tr.max_error, e);
    if (e > opt.noise_floor && std::isfinite(e)) {
      double lx = std::log(t), ly = std::log(e);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
  }
  if (n >= 2) tr.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return tr;
}

/// Passes when the symmetric difference quotient error decays with slope in the window, or when
/// the quotient is exact to rounding at every step.
inline CheckReport derivative_convergence(const std::string& id, const std::function<double(double)>& error,
                                          const ConvergenceOptions& opt = {}, int factor = -1) {
  ConvergenceTrace tr = measure_convergence(error, opt);
  Witness w;
  w.factor = factor;
  std::string detail = "errors";
  for (double e : tr.errors) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " %.3e", e);
    detail += buf;
  }
  if (tr.dropped > 0) detail += "; dropped " + std::to_string(tr.dropped) + " step(s) out of range";
  if (tr.steps.size() < 2) return check_eq(id, std::nan(""), Provenance::grid_lower, 2.0, Provenance::exact, 0.0, w, "too few usable steps; " + detail);
  if (tr.max_error <= opt.exact_tol) {
    w.step = tr.steps.front();
    return check_le(id, tr.max_error, Provenance::grid_lower, opt.exact_tol, Provenance::exact, 0.0, w, "exact quotient; " + detail);
  }
  double mid = 0.5 * (opt.slope_lo + opt.slope_hi);
  double half = 0.5 * (opt.slope_hi - opt.slope_lo);
  w.step = tr.steps.back();
  return check_eq(id, tr.slope, Provenance::grid_lower, mid, Provenance::exact, half, w, "slope fit; " + detail);
}

}  // namespace wrp
