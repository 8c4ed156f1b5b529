#pragma once

#include <string>
#include <vector>

#include "wrp/check_report.hpp"
#include "wrp/grid.hpp"
#include "wrp/space.hpp"
#include "wrp/weight.hpp"

namespace wrp {

using NormedSpaceDesc = Space;

/// Distance to the complement for a point of the domain; points outside are a domain error.
inline double boundary_distance(const DomainSet& d, std::span<const double> x) {
  require(d.contains(x), ErrorKind::domain, "point lies outside " + d.describe());
  return d.boundary_distance(x);
}

/// An adjusting weight has finite sup and satisfies inf |omega_i| >= max(1/r_i, 1) on every factor.
/// One report for the global sup, then one per factor for the lower bound. With grids, the
/// sampled minimum of |omega_i| is tested as well and stands in for a missing certified inf.
inline std::vector<CheckReport> check_adjusting_weight(const Weight& omega, const Vec& radii, const std::vector<SampleGrid>& grids = {},
                                                       const std::string& id = "def:adjusting_weight") {
  std::vector<CheckReport> out;
  double global_sup = 0.0;
  bool sup_known = true;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    auto s = omega.sup_bound(static_cast<int>(i));
    if (!s) {
      sup_known = false;
      break;
    }
    global_sup = std::max(global_sup, *s);
  }
  if (sup_known) {
    out.push_back(check_le(id, global_sup, Provenance::certified_upper, std::numeric_limits<double>::max(), Provenance::exact,
                           0.0, {}, "sup over factors of |omega_i| is finite"));
  } else {
    out.push_back(skipped(id, "weight '" + omega.name + "' has no certified sup"));
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(radii[i] > 0.0, ErrorKind::config, "adjusting-weight radius must be positive");
    double need = std::max(1.0 / radii[i], 1.0);
    auto inf = omega.inf_bound(static_cast<int>(i));
    Witness w;
    w.factor = static_cast<int>(i);
    if (i < grids.size()) {
      CheckReport worst;
      for (const auto& x : grids[i].points()) {
        double v = std::abs(omega.at(static_cast<int>(i), x));
        keep_worst(worst, check_le(id, need, Provenance::exact, v, Provenance::grid_lower, scaled_tolerance(1e-12, need, v),
                                   Witness{static_cast<int>(i), x, 0.0}, "sampled |omega_i(x)| >= max(1/r_i, 1)"));
      }
      if (!worst.id.empty()) out.push_back(worst);
      if (!inf) continue;
    }
    if (!inf) {
      out.push_back(skipped(id, "weight '" + omega.name + "' has no certified inf on factor " + std::to_string(i)));
      continue;
    }
    Provenance p = omega.certified_inf ? Provenance::certified_lower : Provenance::exact;
    out.push_back(check_le(id, need, Provenance::exact, *inf, p, scaled_tolerance(1e-12, need, *inf), w,
                           "inf |omega_i| >= max(1/r_i, 1)"));
  }
  return out;
}

/// Pointwise test of K_i |f_i(x)| <= |g_i(x)| on every grid point; one report per factor
/// carrying the smallest margin.
inline std::vector<CheckReport> check_dominance_certificate(const Weight& f, const Weight& g, const DominanceCertificate& cert,
                                                            const std::vector<SampleGrid>& grids,
                                                            const std::string& id = "cond:est_weights_SP") {
  std::vector<CheckReport> out;
  for (std::size_t i = 0; i < grids.size(); ++i) {
    CheckReport worst;
    double K = cert.constant(static_cast<int>(i));
    for (const auto& x : grids[i].points()) {
      double lhs = weighted(K, std::abs(f.at(static_cast<int>(i), x)));
      double rhs = std::abs(g.at(static_cast<int>(i), x));
      Witness w{static_cast<int>(i), x, 0.0};
      keep_worst(worst, check_le(id, lhs, Provenance::exact, rhs, Provenance::exact, scaled_tolerance(1e-12, lhs, rhs), w,
                                 "K_i |" + f.name + "| <= |" + g.name + "| for order " + std::to_string(cert.ell)));
    }
    out.push_back(worst);
  }
  return out;
}

}  // namespace wrp
