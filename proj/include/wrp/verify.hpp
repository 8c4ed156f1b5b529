#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "wrp/restricted.hpp"

namespace wrp {

/// One verifiable statement: its frozen id, a short title, the statement in formula form and its
/// hypotheses.
struct CheckInfo {
  std::string id;
  std::string title;
  std::string statement;
  std::vector<std::string> hypotheses;
};

inline const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> reg = {
      {"lem:topologische_Zerlegung_von_CFk", "Reduction to lower order",
       "|g|_{f,l+1} = |Dg|_{f,l}; the map g -> (g, Dg) embeds C^{k+1}_W(U,Y) into C_W(U,Y) x C^k_W(U,L(X,Y)).",
       {"g is C^{k+1} on U", "f is a weight on U", "0 <= l <= k"}},
      {"lem:gewichtete_Abb_Produktisomorphie-endl", "Weighted maps into a finite product",
       "|(g_1, g_2)|_{f,l} = max(|g_1|_{f,l}, |g_2|_{f,l}) for g into Y_1 x Y_2 with the max norm.",
       {"codomain is a product Y_1 x Y_2 with the max norm"}},
      {"lem:Stetigkeit_parameterab_Int", "Parameter-dependent integral",
       "Xi(x, a) - Xi(x, b) = int_0^1 d_2 Xi(x, b + t (a - b)) (a - b) dt, evaluated as a weak integral at every grid point.",
       {"Xi is C^1 on U x V", "V is convex"}},
      {"id:Ableitung_Kompo", "Derivative of composition",
       "d/dt (gamma + t gamma_1) o (eta + t eta_1 + id) at t = 0 equals Dgamma o (eta + id) . eta_1 + gamma_1 o (eta + id).",
       {"U + V inside W", "V balanced", "eta maps U into V"}},
      {"est:Funktionswerte_Gewicht_K-Kompo", "Weighted value of a composition",
       "|f(x)| |gamma(x + eta(x))| <= |f(x)| (L |eta(x)| + |gamma(x)|) with L >= |gamma|_{1_W,1}.",
       {"segment from x to x + eta(x) lies in W", "L certified"}},
      {"est:f,0-Norm_Differenz_Kompo", "Difference of compositions",
       "|gamma o (eta + id) - gamma_0 o (eta_0 + id)|_{f,0} <= L |eta - eta_0|_{f,0} + L' |eta_0|_{f,0} + |(gamma - gamma_0)|_U|_{f,0}.",
       {"L >= |gamma|_{1_W,1}", "L' >= |gamma - gamma_0|_{1_W,1}"}},
      {"prop:Zsf_Inversion_gewAbb", "Inversion of perturbed identities",
       "For phi in D_tau the equation x + phi(x) = y has a unique solution x = y + Inv(phi)(y) on V; the quasi-inverse satisfies a + QI(a) - a QI(a) = 0.",
       {"|phi|_{1,1} < tau < 1", "|phi|_{1,0} < (r/2)(1 - tau)", "V + B(0, r) inside U", "|a| <= q < 1 for QI"}},
      {"est:Abschaetzung_gewichteter_FWert_der_K-Inversion", "Weighted value of the inverse",
       "|f(y)| |Inv(phi)(y)| <= |f(y)| |phi(y)| / (1 - Lip(phi)).", {"phi in D_tau"}},
      {"est:f0-norm_Diff_KoorInv", "Difference of inverses",
       "|Inv(phi) - Inv(psi)|_{f,0} <= (Lip(phi - psi) |phi|_{f,0} / (1 - Lip(phi)) + |phi - psi|_{f,0}) / (1 - Lip(psi)).",
       {"phi, psi in D_tau"}},
      {"id:Ableitung_Inversion", "Derivative of inversion",
       "d/dt Inv(phi + t phi_1) at t = 0 equals (QI(-Dphi) phi_1 - phi_1) o (Inv(phi) + id).", {"phi in D_tau"}},
      {"id:Differential_der_inversen_Abb", "Differential of the inverse",
       "D Inv(phi) = (Dphi . QI(-Dphi) - Dphi) o (Inv(phi) + id).", {"phi in D_tau"}},
      {"id:Ableitung_Abb_linear_2Arg", "Maps linear in the second argument: derivative",
       "d/dt d_1^l Xi(x + t h_1, y + t h_2) at t = 0 equals d_1^l Xi(x, h_2) + d_1^{l+1} Xi(x, y) h_1.",
       {"Xi(x, .) linear for every x"}},
      {"est:norm_l-te_Ableitung-Abb_linear_2Arg", "Maps linear in the second argument: l-th derivative",
       "|D^l Xi(x, y)| <= l |d_1^{l-1} Xi(x, .)| + |d_1^l Xi(x, .)| |y|.", {"Xi(x, .) linear for every x"}},
      {"est:Abb_linear_2Arg-Spezialfall-hohes_Diff--partiell", "Pairing form: partial derivatives",
       "For Xi(x, y) = b(g(x), y): d_1^l Xi(x, .) = b(D^l g(x), .) and |d_1^l Xi(x, .)| <= |b| |D^l g(x)|.", {"b continuous bilinear"}},
      {"est:Abb_linear_2Arg-Spezialfall-hohes_Diff", "Pairing form: full derivatives",
       "For Xi(x, y) = b(g(x), y): |D^l Xi(x, y)| <= |b| (l |D^{l-1} g(x)| + |y| |D^l g(x)|).", {"b continuous bilinear"}},
      {"lem:Abschaetzung_hoheDiffs_Spezialfall-linArg", "Pointwise bound for the differential map",
       "For Xi_2(x, y, e) = b(d_2 Xi(x, y), e): |D^l Xi_2(x, y, e)| <= l |D^l Xi(x, y)| + |e| |D^{l+1} Xi(x, y)|.",
       {"b is evaluation or composition"}},
      {"est:Differential-MaMu_hohes_Diff_1-l-Norm", "Norm of the differential map on a ball",
       "|Xi_2|_{1,l} on U x V x B(0, R) is at most l K_l + R K_{l+1} with K_j >= |Xi|_{1,j}.", {"K_j certified", "R > 0"}},
      {"est:f0-Norm_SPid-Differenz", "Superposition: Lipschitz bound",
       "|Xi_*(gamma) - Xi_*(eta)|_{f,0} <= sup |d_2 Xi| |gamma - eta|_{f,0}.", {"V convex", "gamma, eta map U into V"}},
      {"est:f0-Norm_SPid", "Superposition: value bound", "|Xi_*(gamma)|_{f,0} <= sup |d_2 Xi| |gamma|_{f,0}.",
       {"Xi(., 0) = 0", "V star-shaped with center 0"}},
      {"est:f1-Norm_SPid", "Superposition: first-order bound",
       "|Xi_*(gamma)|_{f,1} <= |Xi|_{1,2} |gamma|_{f,0} + sup |d_2 Xi| |gamma|_{f,1}.", {"Xi(., 0) = 0", "V star-shaped"}},
      {"id:Differential_SuperposCWZweiVars-id", "Superposition: derivative",
       "d/dt Xi_*(gamma + t gamma_1) at t = 0 equals d_2 Xi(., gamma) gamma_1.", {"gamma + t gamma_1 maps into V for small t"}},
      {"cond:est_weights_SP", "Weight dominance", "K_i |f_i(x)| <= |g_i(x)| at every grid point of every factor.",
       {"g declared a weight of the space"}},
      {"lem:L-Stetigkeit_Abb_in_LinfProd", "Lipschitz maps into a restricted product",
       "p_j(A(s) - A(t)) = max_i p_{i,j}(A_i(s) - A_i(t)), so Lip(A) = sup_i Lip(A_i).", {"finitely many factors"}},
      {"lem:pktwProduktLInf", "Restricted product of products",
       "Splitting (e_i, f_i) -> ((e_i), (f_i)) is inverted by joining; max(p^E, p^F) <= p^{ExF} <= p^E + p^F.", {"factor codomains are products"}},
      {"lem:Linf_compl_wenn_Faktoren_c", "Completeness",
       "A sequence with |x_m - x_n| <= e(n) for m > n converges to its limit at rate e(n) and the limit has finite seminorms.",
       {"closed-form envelope e(n)", "sequences only"}},
      {"lem:Abb_nach_Linf_Ck_wenn_Komp_Ck_mit_stetigem_Diff", "C^1 criterion for maps into a restricted product",
       "The family difference quotient converges to the family of factor derivatives in the family seminorm.",
       {"factor derivatives given in closed form"}},
      {"lem:m-lin_Abb_glm_stetig->Prod_stetig", "Uniformly bounded multilinear families",
       "max_i |beta_i(x_1, ..., x_m)| <= sup_i |beta_i| prod_k |x_k|.", {"sup_i |beta_i| finite"}},
      {"lem:CinfLinf_initial_CkLinf", "Initial topology", "The (f, l) family seminorm is the same when read from jets of any order k >= l.",
       {"l <= k"}},
      {"prop:Zerlegungssatz_Familie", "Family reduction", "max_i |gamma_i|_{f,l+1} = max_i |D gamma_i|_{f,l}.", {"each gamma_i is C^{l+1}"}},
      {"lem:L-Stetigkeit_Abb_in_LinfProd-gewAbb", "Lipschitz maps into a weighted restricted product",
       "|A(s) - A(t)|_{f,l} <= sup_i L_i |s - t|.", {"L_i certified factor constants"}},
      {"def:adjusting_weight", "Adjusting weight", "sup_i sup |omega_i| < infinity and inf |omega_i| >= max(1/r_i, 1) on every factor.",
       {"certified sup and inf of omega"}},
      {"est:1-0-norm_f-0-norm_spezielles-f", "Norm comparison", "|phi - psi|_{1,0} <= min(d, 1) |phi - psi|_{omega,0}.",
       {"omega adjusting for d"}},
      {"ass1:CFof_offen", "Openness",
       "If gamma_i(x) + B(0, r/|omega(x)|) lies in V_i and |eta - gamma|_{omega,0} < r, then eta_i(x) + B(0, s/|omega(x)|) lies in V_i for s = r - |eta - gamma|_{omega,0}.",
       {"V_i open", "omega adjusting"}},
      {"incl:1-Kugel_f0-norm_sub_CFof", "Inclusion of the omega-ball",
       "|eta|_{omega,0} < tau implies eta_i(x) in tau V_i at every x, with d_i = dist(0, boundary V_i).",
       {"omega adjusting for (d_i)", "V_i star-shaped with center 0", "0 < tau"}},
      {"bem:konstantes-1-Gew_adjust-weight", "Constant weight and adjusting weights", "|x|_{1,l} <= (1/c) |x|_{omega,l} when inf |omega| >= c > 0.",
       {"certified inf c of omega"}},
      {"lem:simultane_mult-multiplier", "Simultaneous multiplication", "|(b_i(M_i, gamma_i))|_{f,0} <= sup_i |b_i| |(gamma_i)|_{g,0}.",
       {"K_i >= |M_i|_{1,0}", "K_i |f_i| <= |g_i|", "sup_i |b_i| finite"}},
      {"cond:est_sim-multiplier_weights", "Multiplier weight condition", "K_i |f_i(x)| <= |g_i(x)| with K_i >= |M_i|_{1,0}.",
       {"g declared a weight"}},
      {"lem:multilineareSuperpos-Linf", "Simultaneous multilinear superposition",
       "|(beta_i(gamma_{i,1}, ..., gamma_{i,n}))|_{f,0} <= C prod_j |(gamma_{i,j})|_{g^j,0}.", {"|f_i| <= prod_j |g^j_i|", "C >= sup_i |beta_i|"}},
      {"prop:simultane_SP_BCinf0_Produkt", "Simultaneous superposition", "|(beta_i(., gamma_i))|_{f,0} <= |(gamma_i)|_{g,0}.",
       {"beta_i(., 0) = 0", "omega adjusting", "gamma in the omega-neighbourhood", "K_i >= sup |d_2 beta_i| with K_i |f_i| <= |g_i|"}},
      {"cond:est_SP-Abb_weights", "Superposition weight condition", "K_i |f_i(x)| <= |g_i(x)| with K_i >= |beta_i|_{1,1}.", {"g declared a weight"}},
      {"lem:vergleich_Bedingungen_simultane-multiplier_simu-Supo", "Certificates for ordinary differentials",
       "K_l >= |D beta|_{1,l} implies |d beta|_{1,l} <= l K_{l-1} + R K_l on U x B(0, R).", {"R > 0"}},
      {"lem:glm_beschraenkte_Abb-Multiplier", "Uniformly bounded maps as multipliers", "g = K_1 f satisfies the superposition weight condition.",
       {"sup_i |beta_i|_{1,1} <= K_1"}},
      {"cor:simultane_SP_BCinf0_einfach", "Superposition with uniformly bounded maps",
       "(gamma_i) -> (beta_i o gamma_i) is defined with |beta o gamma|_{f,0} <= K_1 |gamma|_{f,0}.", {"beta_i(0) = 0", "sup_i |beta_i|_{1,l} <= K_l"}},
      {"lem:sim-SuperPos_QuasiInversion", "Simultaneous quasi-inversion",
       "gamma_i -> QI o gamma_i with QI(a) = -sum_{k >= 1} a^k satisfies a + QI(a) - a QI(a) = 0 up to 2 tail_tol.", {"sup_{i,x} |gamma_i(x)| <= q < 1"}},
      {"prop:Simultane_Koor-Kompo_diffbar", "Simultaneous composition",
       "(gamma_i o (eta_i + id)) has |.|_{f,0} <= sup_i (L_i |eta_i|_{f,0} + |gamma_i|_U|_{f,0}) and family derivative (Dgamma_i o (eta_i + id) eta_{1,i} + gamma_{1,i} o (eta_i + id)).",
       {"U_i + V_i inside W_i", "V_i balanced", "omega adjusting", "eta in the omega-neighbourhood"}},
      {"prop:Simultane_Inv-Kompo_glatt", "Simultaneous inversion",
       "(Inv(phi_i)) has |.|_{f,0} <= |phi|_{f,0} / (1 - tau) and family derivative (QI(-Dphi_i) phi_{1,i} - phi_{1,i}) o (Inv(phi_i) + id).",
       {"shared tau and r", "family in D^tau", "V_i + B(0, r) inside U_i"}},
  };
  return reg;
}

inline const CheckInfo* find_check(std::string_view id) {
  for (const auto& c : check_registry())
    if (c.id == id) return &c;
  return nullptr;
}

inline std::vector<std::string> all_check_ids() {
  std::vector<std::string> ids;
  for (const auto& c : check_registry()) ids.push_back(c.id);
  return ids;
}

// ---------------------------------------------------------------------------------------------
// Scenarios

/// One factor of a scenario. Expressions use x1..xn for points of U_i, W_i and the inversion
/// domain, and y1..yn for points of V_i.
struct FactorScenario {
  double v_radius = 0.5;  ///< V_i = [-d, d]^n
  double omega = 2.0;     ///< constant adjusting weight on the factor
  std::vector<std::string> gamma, gamma2, gamma1;
  std::vector<std::string> xi;
  std::vector<double> xi_bounds;  ///< K_l >= |Xi|_{1,l}, l = 0..3
  double xi_d2_sup0 = 0.0;
  std::vector<std::string> outer, outer0, outer1;
  double outer_lip = 0.0, outer_lip_diff = 0.0;
  std::vector<std::string> phi, psi, phi1;
  double phi_lip = 0.0, phi_sup0 = 0.0, psi_lip = 0.0, psi_sup0 = 0.0, phi_psi_lip = 0.0;
  std::string multiplier;
  double multiplier_sup = 0.0;
  std::vector<std::string> beta;
  double beta_bound = 0.0;
  double bilinear_scale = 1.0;
  std::vector<std::string> field;  ///< n x n operator field, row-major
  std::vector<std::string> lin_g;  ///< n x n operator field for the pairing form

  bool operator==(const FactorScenario&) const = default;
};

struct InversionSetup {
  double tau = 0.5;
  double r = 1.0;
  double u_half = 1.2;
  double v_half = 0.2;

  bool operator==(const InversionSetup&) const = default;
};

/// A finite family of factors sharing one weight family; the runtime restricted product.
struct FamilyScenario {
  std::string name;
  std::optional<std::uint64_t> seed;
  int dim = 1;
  double u_half = 1.0;        ///< U_i = [-u, u]^n
  double weight_decay = 0.5;  ///< f(x) = exp(-a |x|^2)
  double tau_inclusion = 0.5;
  double field_bound = 0.75;
  InversionSetup inversion;
  std::vector<FactorScenario> factors;

  bool operator==(const FamilyScenario&) const = default;
};

struct ScenarioSeed {
  std::uint64_t seed = 0;
  int dim = 0;      ///< 0: 1 + seed % 2
  int factors = 0;  ///< 0: 2 + seed % 7
};

namespace detail {

class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1p-53; }
  double signed_in(double lo, double hi) {
    double v = uniform(lo, hi);
    return (rng_() & 1) ? -v : v;
  }

 private:
  std::mt19937_64 rng_;
};

inline std::string num(double v) {
  std::string s = format_double(v);
  return v < 0 ? "(" + s + ")" : s;
}

inline std::string var(const char* p, int k) { return std::string(p) + std::to_string(k + 1); }

}  // namespace detail

/// Randomised built-in coefficients, drawn inside ranges for which every certificate holds.
inline FamilyScenario generate_scenario(const ScenarioSeed& s) {
  using detail::num;
  using detail::var;
  const int n = s.dim > 0 ? s.dim : 1 + static_cast<int>(s.seed % 2);
  const int m = s.factors > 0 ? s.factors : 2 + static_cast<int>(s.seed % 7);
  require(n >= 1 && n <= 3, ErrorKind::config, "scenario dimension must lie in 1..3");
  require(m >= 1 && m <= 100, ErrorKind::config, "scenario family size must lie in 1..100");
  detail::SeedStream rs(s.seed * 0x9E3779B97F4A7C15ULL + 0x1234567ULL);
  FamilyScenario sc;
  sc.name = "seed-" + std::to_string(s.seed);
  sc.seed = s.seed;
  sc.dim = n;
  sc.weight_decay = rs.uniform(0.25, 1.0);
  sc.tau_inclusion = rs.uniform(0.3, 0.9);
  for (int i = 0; i < m; ++i) {
    FactorScenario f;
    const double d = rs.uniform(0.5, 1.0);
    f.v_radius = d;
    f.omega = std::max(1.0 / d, 1.0) * rs.uniform(1.0, 1.25);
    for (int k = 0; k < n; ++k) {
      std::string x = var("x", k);
      double a = rs.signed_in(0.1, 0.3) * d, b = rs.uniform(-1.0, 1.0);
      double e = rs.signed_in(0.02, 0.05) * d, g1 = rs.signed_in(0.1, 0.3) * d;
      std::string g = num(a) + " * sin(" + x + " + " + num(b) + ")";
      f.gamma.push_back(g);
      f.gamma2.push_back(g + " + " + num(e) + " * cos(" + x + ")");
      f.gamma1.push_back(num(g1) + " * cos(2 * " + x + ")");
    }
    const double bx = rs.signed_in(0.5, 1.5), cx = rs.signed_in(0.2, 0.8);
    for (int k = 0; k < n; ++k)
      f.xi.push_back(num(bx) + " * cos(" + var("x", k) + ") * " + var("y", k) + " + " + num(cx) + " * " + var("y", k) + "^2");
    const double ab = std::abs(bx), ac = std::abs(cx);
    f.xi_bounds = {ab * d + ac * d * d, ab * (1 + d) + 2 * ac * d, ab * (d + 2) + 2 * ac, ab * (d + 3)};
    f.xi_d2_sup0 = ab + 2 * ac * d;

    const double p = rs.signed_in(0.2, 1.0), q = rs.signed_in(0.05, 0.3), sp = n > 1 ? rs.signed_in(0.0, 0.3) : 0.0;
    const double dp = rs.signed_in(0.01, 0.05), dq = rs.signed_in(0.0, 0.03);
    const double wr = sc.u_half + d;
    for (int k = 0; k < n; ++k) {
      std::string x = var("x", k), xn = var("x", (k + 1) % n);
      std::string cross = n > 1 ? " + " + num(sp) + " * " + xn : "";
      f.outer.push_back(num(p) + " * sin(" + x + ") + " + num(q) + " * " + x + "^2" + cross);
      f.outer0.push_back(num(p + dp) + " * sin(" + x + ") + " + num(q + dq) + " * " + x + "^2" + cross);
      f.outer1.push_back("0.3 * cos(" + x + ")");
    }
    f.outer_lip = std::abs(p) + 2 * std::abs(q) * wr + std::abs(sp);
    f.outer_lip_diff = std::abs(dp) + 2 * std::abs(dq) * wr;

    const double pa = rs.signed_in(0.02, 0.12), pb = rs.uniform(-1.0, 1.0), ps = n > 1 ? rs.signed_in(0.0, 0.08) : 0.0;
    const double da = rs.signed_in(0.0, 0.01);
    const double uh = sc.inversion.u_half;
    for (int k = 0; k < n; ++k) {
      std::string x = var("x", k), xn = var("x", (k + 1) % n);
      std::string cross = n > 1 ? " + " + num(ps) + " * " + xn : "";
      f.phi.push_back(num(pa) + " * sin(" + x + " + " + num(pb) + ")" + cross);
      f.psi.push_back(num(pa + da) + " * sin(" + x + " + " + num(pb) + ")" + cross);
      f.phi1.push_back("0.05 * cos(" + x + ")");
    }
    f.phi_lip = std::abs(pa) + std::abs(ps);
    f.phi_sup0 = std::abs(pa) + uh * std::abs(ps);
    f.psi_lip = std::abs(pa + da) + std::abs(ps);
    f.psi_sup0 = std::abs(pa + da) + uh * std::abs(ps);
    f.phi_psi_lip = std::abs(da);

    const double mm = rs.uniform(0.5, 2.0);
    f.multiplier = num(mm) + " * (1 + 0.5 * sin(x1))";
    f.multiplier_sup = 1.5 * mm;
    const double w = rs.signed_in(0.2, 1.0);
    for (int k = 0; k < n; ++k) f.beta.push_back(num(w) + " * sin(" + var("y", k) + ")");
    f.beta_bound = std::abs(w);
    f.bilinear_scale = rs.signed_in(0.5, 1.5);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double c = rs.signed_in(0.0, 0.6 / n);
        f.field.push_back(num(c) + " * sin(x1 + " + num(j + 2.0 * k) + ")");
        double h = rs.signed_in(0.2, 1.0);
        f.lin_g.push_back(num(h) + " * cos(x1 + " + num(j - 1.0 * k) + ")");
      }
    sc.factors.push_back(std::move(f));
  }
  return sc;
}

inline FamilyScenario generate_scenario(std::uint64_t seed) { return generate_scenario(ScenarioSeed{seed, 0, 0}); }

// ---------------------------------------------------------------------------------------------
// Scenario JSON

namespace detail {

using json = nlohmann::json;

inline std::vector<std::string> names(const char* p, int n) {
  std::vector<std::string> v;
  for (int k = 0; k < n; ++k) v.push_back(var(p, k));
  return v;
}

[[noreturn]] inline void schema_error(const std::string& pointer, const std::string& what) {
  fail(ErrorKind::config, pointer + ": " + what);
}

inline void reject_unknown(const json& j, const std::string& ptr, std::initializer_list<const char*> known) {
  if (!j.is_object()) schema_error(ptr.empty() ? "/" : ptr, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) schema_error(ptr + "/" + it.key(), "unknown field");
  }
}

template <class T>
T field(const json& j, const std::string& ptr, const char* key) {
  if (!j.contains(key)) schema_error(ptr + "/" + key, "missing field");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    schema_error(ptr + "/" + key, "wrong type");
  }
}

template <class T>
T field_or(const json& j, const std::string& ptr, const char* key, T def) {
  return j.contains(key) ? field<T>(j, ptr, key) : def;
}

}  // namespace detail

inline nlohmann::json to_json(const FactorScenario& f) {
  return {{"v_radius", f.v_radius},         {"omega", f.omega},
          {"gamma", f.gamma},               {"gamma2", f.gamma2},
          {"gamma1", f.gamma1},             {"xi", f.xi},
          {"xi_bounds", f.xi_bounds},       {"xi_d2_sup0", f.xi_d2_sup0},
          {"outer", f.outer},               {"outer0", f.outer0},
          {"outer1", f.outer1},             {"outer_lip", f.outer_lip},
          {"outer_lip_diff", f.outer_lip_diff}, {"phi", f.phi},
          {"psi", f.psi},                   {"phi1", f.phi1},
          {"phi_lip", f.phi_lip},           {"phi_sup0", f.phi_sup0},
          {"psi_lip", f.psi_lip},           {"psi_sup0", f.psi_sup0},
          {"phi_psi_lip", f.phi_psi_lip},   {"multiplier", f.multiplier},
          {"multiplier_sup", f.multiplier_sup}, {"beta", f.beta},
          {"beta_bound", f.beta_bound},     {"bilinear_scale", f.bilinear_scale},
          {"field", f.field},               {"lin_g", f.lin_g}};
}

inline nlohmann::json to_json(const FamilyScenario& s) {
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : s.factors) fs.push_back(to_json(f));
  nlohmann::json j = {{"name", s.name},
                      {"dim", s.dim},
                      {"u_half", s.u_half},
                      {"weight_decay", s.weight_decay},
                      {"tau_inclusion", s.tau_inclusion},
                      {"field_bound", s.field_bound},
                      {"inversion", {{"tau", s.inversion.tau}, {"r", s.inversion.r}, {"u_half", s.inversion.u_half}, {"v_half", s.inversion.v_half}}},
                      {"factors", fs}};
  j["seed"] = s.seed ? nlohmann::json(*s.seed) : nlohmann::json(nullptr);
  return j;
}

inline FactorScenario factor_from_json(const nlohmann::json& j, const std::string& ptr, int n) {
  using detail::field;
  using V = std::vector<std::string>;
  detail::reject_unknown(j, ptr, {"v_radius", "omega", "gamma", "gamma2", "gamma1", "xi", "xi_bounds", "xi_d2_sup0", "outer", "outer0",
                                  "outer1", "outer_lip", "outer_lip_diff", "phi", "psi", "phi1", "phi_lip", "phi_sup0", "psi_lip",
                                  "psi_sup0", "phi_psi_lip", "multiplier", "multiplier_sup", "beta", "beta_bound", "bilinear_scale",
                                  "field", "lin_g"});
  FactorScenario f;
  f.v_radius = field<double>(j, ptr, "v_radius");
  f.omega = field<double>(j, ptr, "omega");
  f.gamma = field<V>(j, ptr, "gamma");
  f.gamma2 = field<V>(j, ptr, "gamma2");
  f.gamma1 = field<V>(j, ptr, "gamma1");
  f.xi = field<V>(j, ptr, "xi");
  f.xi_bounds = field<std::vector<double>>(j, ptr, "xi_bounds");
  f.xi_d2_sup0 = field<double>(j, ptr, "xi_d2_sup0");
  f.outer = field<V>(j, ptr, "outer");
  f.outer0 = field<V>(j, ptr, "outer0");
  f.outer1 = field<V>(j, ptr, "outer1");
  f.outer_lip = field<double>(j, ptr, "outer_lip");
  f.outer_lip_diff = field<double>(j, ptr, "outer_lip_diff");
  f.phi = field<V>(j, ptr, "phi");
  f.psi = field<V>(j, ptr, "psi");
  f.phi1 = field<V>(j, ptr, "phi1");
  f.phi_lip = field<double>(j, ptr, "phi_lip");
  f.phi_sup0 = field<double>(j, ptr, "phi_sup0");
  f.psi_lip = field<double>(j, ptr, "psi_lip");
  f.psi_sup0 = field<double>(j, ptr, "psi_sup0");
  f.phi_psi_lip = field<double>(j, ptr, "phi_psi_lip");
  f.multiplier = field<std::string>(j, ptr, "multiplier");
  f.multiplier_sup = field<double>(j, ptr, "multiplier_sup");
  f.beta = field<V>(j, ptr, "beta");
  f.beta_bound = field<double>(j, ptr, "beta_bound");
  f.bilinear_scale = field<double>(j, ptr, "bilinear_scale");
  f.field = field<V>(j, ptr, "field");
  f.lin_g = field<V>(j, ptr, "lin_g");
  auto need = [&](const V& v, std::size_t count, const char* key) {
    if (v.size() != count) detail::schema_error(ptr + "/" + key, "expected " + std::to_string(count) + " expressions");
  };
  for (auto [v, key] : {std::pair{&f.gamma, "gamma"}, {&f.gamma2, "gamma2"}, {&f.gamma1, "gamma1"}, {&f.xi, "xi"}, {&f.outer, "outer"},
                        {&f.outer0, "outer0"}, {&f.outer1, "outer1"}, {&f.phi, "phi"}, {&f.psi, "psi"}, {&f.phi1, "phi1"}, {&f.beta, "beta"}})
    need(*v, static_cast<std::size_t>(n), key);
  need(f.field, static_cast<std::size_t>(n * n), "field");
  need(f.lin_g, static_cast<std::size_t>(n * n), "lin_g");
  if (f.xi_bounds.size() != 4) detail::schema_error(ptr + "/xi_bounds", "expected 4 bounds");
  if (!(f.v_radius > 0)) detail::schema_error(ptr + "/v_radius", "must be positive");
  if (!(f.omega > 0)) detail::schema_error(ptr + "/omega", "must be positive");
  return f;
}

inline FamilyScenario scenario_from_json(const nlohmann::json& j) {
  using detail::field;
  detail::reject_unknown(j, "", {"name", "seed", "dim", "u_half", "weight_decay", "tau_inclusion", "field_bound", "inversion", "factors"});
  FamilyScenario s;
  s.name = detail::field_or<std::string>(j, "", "name", "scenario");
  if (j.contains("seed") && !j["seed"].is_null()) s.seed = field<std::uint64_t>(j, "", "seed");
  s.dim = field<int>(j, "", "dim");
  if (s.dim < 1 || s.dim > 3) detail::schema_error("/dim", "must lie in 1..3");
  s.u_half = field<double>(j, "", "u_half");
  s.weight_decay = field<double>(j, "", "weight_decay");
  s.tau_inclusion = field<double>(j, "", "tau_inclusion");
  s.field_bound = field<double>(j, "", "field_bound");
  if (!(s.field_bound < 1.0)) detail::schema_error("/field_bound", "must be below 1");
  const auto& inv = j.contains("inversion") ? j.at("inversion") : nlohmann::json::object();
  detail::reject_unknown(inv, "/inversion", {"tau", "r", "u_half", "v_half"});
  s.inversion.tau = field<double>(inv, "/inversion", "tau");
  s.inversion.r = field<double>(inv, "/inversion", "r");
  s.inversion.u_half = field<double>(inv, "/inversion", "u_half");
  s.inversion.v_half = field<double>(inv, "/inversion", "v_half");
  if (!j.contains("factors") || !j["factors"].is_array() || j["factors"].empty()) detail::schema_error("/factors", "expected a nonempty array");
  for (std::size_t i = 0; i < j["factors"].size(); ++i)
    s.factors.push_back(factor_from_json(j["factors"][i], "/factors/" + std::to_string(i), s.dim));
  return s;
}

/// The scenario restricted to the given factor indices, in that order.
inline FamilyScenario restrict_scenario(const FamilyScenario& s, const std::vector<int>& indices) {
  FamilyScenario r = s;
  r.factors.clear();
  for (int i : indices) r.factors.push_back(s.factors.at(i));
  r.name = s.name + "-restricted";
  return r;
}

// ---------------------------------------------------------------------------------------------
// Built scenarios

struct BuiltFactor {
  DomainSet U, V, W, Ut, Vt;
  SampleGrid grid, inv_grid, phi_grid;
  WeightedFunction gamma, gamma2, gamma1;
  MapPtr xi, outer, outer0, outer1, phi, psi, phi1, multiplier, beta, field, lin_g;
};

struct BuiltScenario {
  FamilyScenario spec;
  std::vector<BuiltFactor> factors;
  Weight f, g_sp, g_mult, omega, half;

  RestrictedElement family(WeightedFunction BuiltFactor::*member) const {
    std::vector<WeightedFunction> parts;
    for (const auto& b : factors) parts.push_back(b.*member);
    return RestrictedElement::of(parts);
  }
  std::vector<MapPtr> maps(MapPtr BuiltFactor::*member) const {
    std::vector<MapPtr> v;
    for (const auto& b : factors) v.push_back(b.*member);
    return v;
  }
  std::vector<DomainSet> targets() const {
    std::vector<DomainSet> v;
    for (const auto& b : factors) v.push_back(b.V);
    return v;
  }
};

namespace detail {

inline std::vector<Expr> parse_all(const std::vector<std::string>& texts, const std::vector<std::string>& names) {
  std::vector<Expr> v;
  for (const auto& t : texts) v.push_back(parse_expr(t, names));
  return v;
}

/// Closed-form jets against finite differences at three probe points of the map's domain.
inline void validate_jets(const JetMap& m, const std::string& what) {
  const SampleGrid g = SampleGrid::lattice(m.domain(), 3);
  const auto& pts = g.points();
  for (std::size_t i : {std::size_t{0}, pts.size() / 2, pts.size() - 1}) {
    double e = fd_disagreement(m, pts[i], std::min(2, m.max_order()));
    require(e <= 1e-5, ErrorKind::config, what + ": derivatives disagree with finite differences (" + format_double(e) + ")");
  }
}

}  // namespace detail

/// Parses expressions, builds domains, grids and weights, and validates every declared weight
/// certificate against the grids and every map's jets against finite differences.
inline BuiltScenario build_scenario(const FamilyScenario& s) {
  const int n = s.dim;
  const auto xs = detail::names("x", n), ys = detail::names("y", n);
  auto xys = xs;
  xys.insert(xys.end(), ys.begin(), ys.end());
  BuiltScenario b;
  b.spec = s;
  b.f = Weight::uniform("f", WeightPiece::gauss(s.weight_decay));
  b.f.certified_sup = Vec{1.0};
  b.half = Weight::uniform("sqrt-f", WeightPiece::gauss(0.5 * s.weight_decay));
  b.half.certified_sup = Vec{1.0};
  b.g_sp.name = "g";
  b.g_mult.name = "g-mult";
  b.omega.name = "omega";
  for (std::size_t i = 0; i < s.factors.size(); ++i) {
    const auto& fs = s.factors[i];
    BuiltFactor f;
    f.U = DomainSet::cube(n, -s.u_half, s.u_half);
    f.V = DomainSet::cube(n, -fs.v_radius, fs.v_radius);
    f.W = DomainSet::cube(n, -(s.u_half + fs.v_radius), s.u_half + fs.v_radius);
    f.Ut = DomainSet::cube(n, -s.inversion.u_half, s.inversion.u_half);
    f.Vt = DomainSet::cube(n, -s.inversion.v_half, s.inversion.v_half);
    f.grid = SampleGrid::lattice(f.U);
    f.inv_grid = SampleGrid::lattice(f.Vt, n == 1 ? 9 : 5);
    f.phi_grid = SampleGrid::lattice(f.Ut, n == 1 ? 9 : 5);
    const int fac = static_cast<int>(i);
    f.gamma = WeightedFunction(make_map(f.U, detail::parse_all(fs.gamma, xs)), f.grid, -1, fac);
    f.gamma2 = WeightedFunction(make_map(f.U, detail::parse_all(fs.gamma2, xs)), f.grid, -1, fac);
    f.gamma1 = WeightedFunction(make_map(f.U, detail::parse_all(fs.gamma1, xs)), f.grid, -1, fac);
    DomainSet UV = DomainSet::product({f.U, f.V});
    f.xi = make_map(Space::product({Space::sup(n), Space::sup(n)}), Space::sup(n), UV, detail::parse_all(fs.xi, xys));
    f.outer = make_map(f.W, detail::parse_all(fs.outer, xs));
    f.outer0 = make_map(f.W, detail::parse_all(fs.outer0, xs));
    f.outer1 = make_map(f.W, detail::parse_all(fs.outer1, xs));
    f.phi = make_map(f.Ut, detail::parse_all(fs.phi, xs));
    f.psi = make_map(f.Ut, detail::parse_all(fs.psi, xs));
    f.phi1 = make_map(f.Ut, detail::parse_all(fs.phi1, xs));
    f.multiplier = make_map(f.U, {parse_expr(fs.multiplier, xs)});
    f.beta = make_map(f.V, detail::parse_all(fs.beta, ys));
    f.field = make_map(Space::sup(n), Space::op(n, n), f.U, detail::parse_all(fs.field, xs));
    f.lin_g = make_map(Space::sup(n), Space::op(n, n), f.U, detail::parse_all(fs.lin_g, xs));
    const std::pair<const MapPtr*, const char*> probes[] = {{&f.gamma.map, "gamma"}, {&f.gamma2.map, "gamma2"}, {&f.gamma1.map, "gamma1"},
                                                            {&f.xi, "xi"},           {&f.outer, "outer"},   {&f.outer0, "outer0"},
                                                            {&f.outer1, "outer1"},   {&f.phi, "phi"},       {&f.psi, "psi"},
                                                            {&f.phi1, "phi1"},       {&f.multiplier, "multiplier"},
                                                            {&f.beta, "beta"},       {&f.field, "field"},   {&f.lin_g, "lin_g"}};
    for (auto [m, what] : probes) detail::validate_jets(**m, "/factors/" + std::to_string(i) + "/" + what);
    b.g_sp.pieces.push_back(WeightPiece::gauss(s.weight_decay).scaled(fs.xi_d2_sup0));
    b.g_mult.pieces.push_back(WeightPiece::gauss(s.weight_decay).scaled(fs.multiplier_sup));
    b.omega.pieces.push_back(WeightPiece::constant(fs.omega));
    b.factors.push_back(std::move(f));
  }
  std::vector<SampleGrid> grids;
  for (const auto& f : b.factors) grids.push_back(f.grid);
  b.f.validate(grids);
  b.half.validate(grids);
  b.omega.validate(grids);
  return b;
}

// ---------------------------------------------------------------------------------------------
// Suite

struct SuiteOptions {
  ConvergenceOptions convergence;
  double fix_tol = 1e-12;
  NeumannConfig neumann;
};

/// Check selection; no value means every registered id.
struct CheckSelection {
  std::optional<std::set<std::string>> ids;

  static CheckSelection all() { return {}; }
  bool selected(const std::string& id) const { return !ids || ids->count(id) > 0; }
  bool any(const std::vector<std::string>& group) const {
    for (const auto& g : group)
      if (selected(g)) return true;
    return false;
  }
};

namespace detail {

struct CheckGroup {
  std::vector<std::string> ids;
  std::function<void(const BuiltScenario&, const SuiteOptions&, std::vector<CheckReport>&)> run;
};

inline void tag(std::vector<CheckReport>& out, std::vector<CheckReport> reps, int factor) {
  for (auto& r : reps) {
    if (r.witness.factor < 0) r.witness.factor = factor;
    out.push_back(std::move(r));
  }
}

inline void add(std::vector<CheckReport>& out, CheckReport r, int factor = -1) {
  if (r.witness.factor < 0) r.witness.factor = factor;
  out.push_back(std::move(r));
}

inline ContractionConfig contraction(const BuiltScenario& b, const SuiteOptions& o) {
  ContractionConfig c;
  c.tau = b.spec.inversion.tau;
  c.r = b.spec.inversion.r;
  c.fix_tol = o.fix_tol;
  return c;
}

inline const std::vector<CheckGroup>& check_groups() {
  static const std::vector<CheckGroup> groups = {
      {{"lem:topologische_Zerlegung_von_CFk", "lem:gewichtete_Abb_Produktisomorphie-endl", "est:1-0-norm_f-0-norm_spezielles-f"},
       [](const BuiltScenario& b, const SuiteOptions&, std::vector<CheckReport>& out) {
         for (std::size_t i = 0; i < b.factors.size(); ++i) {
           const auto& f = b.factors[i];
           const int fi = static_cast<int>(i);
           for (int l = 0; l <= 2; ++l) add(out, decomposition_check(f.gamma, b.f, l), fi);
           add(out, decomposition_check(f.gamma.with_map(f.multiplier), b.f, 1), fi);
           WeightedFunction pair = pair_join(f.gamma, f.gamma1);
           for (int l = 0; l <= 1; ++l) add(out, pair_split_check(pair, b.f, l), fi);
           add(out, norm_comparison_1U(f.gamma, f.gamma2, b.omega, b.spec.factors[i].v_radius), fi);
         }
       }},
      {{"lem:Stetigkeit_parameterab_Int", "est:f0-Norm_SPid", "est:f0-Norm_SPid-Differenz", "est:f1-Norm_SPid",
        "id:Differential_SuperposCWZweiVars-id", "cond:est_weights_SP"},
       [](const BuiltScenario& b, const SuiteOptions& o, std::vector<CheckReport>& out) {
         std::vector<SampleGrid> grids;
         for (const auto& f : b.factors) grids.push_back(f.grid);
         Vec K;
         for (const auto& fs : b.spec.factors) K.push_back(fs.xi_d2_sup0);
         tag(out, check_dominance_certificate(b.f, b.g_sp, DominanceCertificate{"f", 0, "g", K}, grids), -1);
         for (std::size_t i = 0; i < b.factors.size(); ++i) {
           const auto& f = b.factors[i];
           const auto& fs = b.spec.factors[i];
           const int fi = static_cast<int>(i);
           SuperposeCertificates c{fs.xi_d2_sup0, fs.xi_bounds[2], {}, {}};
           tag(out, superpose_estimates(f.xi, c, f.gamma, f.V, b.f, &f.gamma2), fi);
           add(out, superpose_derivative_check(f.xi, f.gamma, f.gamma1, f.V, b.f, o.convergence), fi);
           add(out, weak_integral_check(f.xi, f.gamma, f.gamma2), fi);
         }
       }},
      {{"est:Funktionswerte_Gewicht_K-Kompo", "est:f,0-Norm_Differenz_Kompo", "id:Ableitung_Kompo"},
       [](const BuiltScenario& b, const SuiteOptions& o, std::vector<CheckReport>& out) {
         for (std::size_t i = 0; i < b.factors.size(); ++i) {
           const auto& f = b.factors[i];
           const auto& fs = b.spec.factors[i];
           const int fi = static_cast<int>(i);
           tag(out, compose_estimates(f.outer, f.outer0, f.gamma, f.gamma2, f.V, CompositionCertificates{fs.outer_lip, fs.outer_lip_diff}, b.f),
               fi);
           add(out, compose_derivative_check(f.outer, f.outer1, f.gamma, f.gamma1, b.f, o.convergence), fi);
         }
       }},
      {{"prop:Zsf_Inversion_gewAbb", "est:Abschaetzung_gewichteter_FWert_der_K-Inversion", "est:f0-norm_Diff_KoorInv",
        "id:Ableitung_Inversion", "id:Differential_der_inversen_Abb"},
       [](const BuiltScenario& b, const SuiteOptions& o, std::vector<CheckReport>& out) {
         const ContractionConfig cfg = contraction(b, o);
         for (std::size_t i = 0; i < b.factors.size(); ++i) {
           const auto& f = b.factors[i];
           const auto& fs = b.spec.factors[i];
           const int fi = static_cast<int>(i);
           InversionCertificates cp{fs.phi_lip, fs.phi_sup0}, cq{fs.psi_lip, fs.psi_sup0};
           WeightedFunction ip = invert_perturbed(f.phi, f.Vt, cp, cfg, f.inv_grid, fi, o.neumann);
           WeightedFunction iq = invert_perturbed(f.psi, f.Vt, cq, cfg, f.inv_grid, fi, o.neumann);
           tag(out, inversion_estimates(ip, iq, cp, cq, fs.phi_psi_lip, b.f), fi);
           add(out, inverse_differential_check(ip), fi);
           add(out, inversion_derivative_check(ip, f.phi1, b.f, o.convergence, false, o.neumann), fi);
           // the quasi-inverse relation at the sampled operator values
           CheckReport worst;
           for (const auto& x : f.grid.points()) {
             Matrix A{b.spec.dim, f.field->eval(x)};
             CheckReport r = quasi_inverse_check(A, b.spec.field_bound, o.neumann);
             r.witness = Witness{fi, x, 0.0};
             keep_worst(worst, r);
           }
           add(out, worst, fi);
         }
       }},
      {{"id:Ableitung_Abb_linear_2Arg", "est:norm_l-te_Ableitung-Abb_linear_2Arg", "est:Abb_linear_2Arg-Spezialfall-hohes_Diff--partiell",
        "est:Abb_linear_2Arg-Spezialfall-hohes_Diff"},
       [](const BuiltScenario& b, const SuiteOptions&, std::vector<CheckReport>& out) {
         const int n = b.spec.dim;
         for (std::size_t i = 0; i < b.factors.size(); ++i) {
           const auto& f = b.factors[i];
           const int fi = static_cast<int>(i);
           MultilinearMap ev = evaluation_pairing(n, n);
           MapPtr xi = linear_in_second(f.lin_g, ev, f.V);
           LinearSecondArgForm form{f.lin_g, ev};
           const auto& pts = f.grid.points();
           std::vector<CheckReport> worst;
           for (std::size_t p = 0; p < pts.size(); p += std::max<std::size_t>(1, pts.size() / 9)) {
             const Vec& x = pts[p];
             Vec y = f.gamma.map->eval(x), h1 = f.gamma1.map->eval(x), h2 = f.gamma2.map->eval(x);
             std::size_t slot = 0;
             for (int l = 1; l <= 2; ++l)
               for (auto& r : linear2_identities_check(*xi, n, x, y, h1, h2, l, &form)) {
                 r.witness.factor = fi;
                 if (worst.size() <= slot) worst.resize(slot + 1);
                 keep_worst(worst[slot++], r);
               }
           }
           out.insert(out.end(), worst.begin(), worst.end());
         }
       }},
      {{"lem:Abschaetzung_hoheDiffs_Spezialfall-linArg", "est:Differential-MaMu_hohes_Diff_1-l-Norm"},
       [](const BuiltScenario& b, const SuiteOptions&, std::vector<CheckReport>& out) {
         const int n = b.spec.dim;
         const double R = 1.0;
         for (std::size_t i = 0; i < b.factors.size(); ++i) {
           const auto& f = b.factors[i];
           const auto& fs = b.spec.factors[i];
           const int fi = static_cast<int>(i);
           MapPtr xi2 = xi2_build(f.xi, n, Pairing::evaluate, R);
           SampleGrid g = SampleGrid::lattice(xi2->domain(), n == 1 ? 5 : 3);
           for (int l = 1; l <= 2; ++l) {
             CheckReport pw;
             double sup = 0.0;
             Vec wp;
             for (const auto& p : g.points()) {
               CheckReport r = xi2_estimate_check(*f.xi, *xi2, p, l);
               r.witness.factor = fi;
               keep_worst(pw, r);
               if (r.lhs > sup || wp.empty()) {
                 sup = r.lhs;
                 wp = p;
               }
             }
             out.push_back(pw);
             double rhs = l * fs.xi_bounds[l] + R * fs.xi_bounds[l + 1];
             out.push_back(check_le("est:Differential-MaMu_hohes_Diff_1-l-Norm", sup, Provenance::grid_lower, rhs, Provenance::certified_upper,
                                    scaled_tolerance(1e-9, sup, rhs), Witness{fi, wp, 0.0}, "order " + std::to_string(l)));
           }
         }
       }},
      {{"lem:L-Stetigkeit_Abb_in_LinfProd", "lem:L-Stetigkeit_Abb_in_LinfProd-gewAbb", "lem:pktwProduktLInf", "lem:Linf_compl_wenn_Faktoren_c",
        "lem:CinfLinf_initial_CkLinf", "prop:Zerlegungssatz_Familie", "lem:m-lin_Abb_glm_stetig->Prod_stetig"},
       [](const BuiltScenario& b, const SuiteOptions&, std::vector<CheckReport>& out) {
         RestrictedElement x = b.family(&BuiltFactor::gamma);
         RestrictedElement d = b.family(&BuiltFactor::gamma1);
         auto A = [&](double t) { return family_scaled(x, std::sin(t)); };
         for (int l = 0; l <= 1; ++l) {
           // |sin s - sin t| <= |s - t|, so the factor constants are the factor seminorms of gamma_i
           Vec L;
           for (const auto& p : x.parts) L.push_back(weighted_seminorm(p, b.f, l).value);
           tag(out, lipschitz_bound_check(A, {-1.0, -0.4, 0.0, 0.3, 0.8, 1.5}, b.f, l, L), -1);
         }
         std::vector<WeightedFunction> pairs;
         for (std::size_t i = 0; i < x.size(); ++i) pairs.push_back(pair_join(x[i], d[i]));
         tag(out, product_iso_roundtrip(RestrictedElement::of(pairs), b.f, 0), -1);
         auto seq = [&](int k) { return family_scaled(x, 2.0 - std::ldexp(1.0, -k)); };
         const double e = family_seminorm(x, b.f, 0).value;
         tag(out, cauchy_limit_check(seq, family_scaled(x, 2.0), [&](int k) { return std::ldexp(e, -k); }, 30, b.f, 0), -1);
         add(out, initial_topology_check(x, b.f, 1, 3));
         for (int l = 0; l <= 1; ++l) add(out, family_decomposition_check(x, b.f, l));
         std::vector<MultilinearMap> betas;
         const int n = b.spec.dim;
         for (const auto& fs : b.spec.factors) {
           MultilinearMap m = MultilinearMap::zeros(Space::sup(1), {Space::sup(n), Space::sup(n)});
           for (int k = 0; k < n; ++k) m.entries()[k * n + k] = fs.bilinear_scale;
           betas.push_back(m);
         }
         Vec u(n), v(n);
         for (int k = 0; k < n; ++k) {
           u[k] = std::cos(1.0 + k);
           v[k] = std::sin(2.0 + 3 * k);
         }
         add(out, multilinear_family_check(betas, {u, v}));
       }},
      {{"def:adjusting_weight", "ass1:CFof_offen", "incl:1-Kugel_f0-norm_sub_CFof", "bem:konstantes-1-Gew_adjust-weight"},
       [](const BuiltScenario& b, const SuiteOptions&, std::vector<CheckReport>& out) {
         auto V = b.targets();
         RestrictedElement x = b.family(&BuiltFactor::gamma);
         tag(out, check_adjusting_weight(b.omega, zero_distances(V), grids_of(x)), -1);
         RestrictedElement y = b.family(&BuiltFactor::gamma2);
         add(out, openness_check(x, y, b.omega, V, clearance_radius(x, b.omega, V)));
         double s = family_seminorm(x, b.omega, 0).value;
         RestrictedElement eta = family_scaled(x, 0.8 * b.spec.tau_inclusion / s);
         tag(out, inclusion_check(eta, b.omega, V, b.spec.tau_inclusion), -1);
         for (int l = 0; l <= 1; ++l) add(out, constant_one_check(x, b.omega, l));
       }},
      {{"lem:simultane_mult-multiplier", "cond:est_sim-multiplier_weights", "lem:multilineareSuperpos-Linf"},
       [](const BuiltScenario& b, const SuiteOptions&, std::vector<CheckReport>& out) {
         const int n = b.spec.dim;
         RestrictedElement x = b.family(&BuiltFactor::gamma);
         std::vector<MultilinearMap> mult, dots;
         Vec K;
         for (const auto& fs : b.spec.factors) {
           MultilinearMap m = MultilinearMap::zeros(Space::sup(n), {Space::sup(1), Space::sup(n)});
           for (int k = 0; k < n; ++k) m.entries()[k * n + k] = 1.0;
           mult.push_back(m);
           MultilinearMap d = MultilinearMap::zeros(Space::sup(1), {Space::sup(n), Space::sup(n)});
           for (int k = 0; k < n; ++k) d.entries()[k * n + k] = fs.bilinear_scale;
           dots.push_back(d);
           K.push_back(fs.multiplier_sup);
         }
         SimResult r = sim_multiply(b.maps(&BuiltFactor::multiplier), mult, x, b.f, b.g_mult, DominanceCertificate{"f", 0, "g-mult", K});
         tag(out, r.reports, -1);
         SimResult s = sim_multilinear(dots, {x, b.family(&BuiltFactor::gamma1)}, b.f, {b.half, b.half});
         tag(out, s.reports, -1);
       }},
      {{"prop:simultane_SP_BCinf0_Produkt", "cond:est_SP-Abb_weights", "lem:Abb_nach_Linf_Ck_wenn_Komp_Ck_mit_stetigem_Diff",
        "lem:vergleich_Bedingungen_simultane-multiplier_simu-Supo", "lem:glm_beschraenkte_Abb-Multiplier", "cor:simultane_SP_BCinf0_einfach",
        "est:f0-Norm_SPid", "est:f0-Norm_SPid-Differenz", "est:f1-Norm_SPid", "id:Differential_SuperposCWZweiVars-id"},
       [](const BuiltScenario& b, const SuiteOptions& o, std::vector<CheckReport>& out) {
         RestrictedElement x = b.family(&BuiltFactor::gamma);
         RestrictedElement d = b.family(&BuiltFactor::gamma1);
         std::vector<SuperposeCertificates> certs;
         Vec K;
         double kb = 0.0;
         for (const auto& fs : b.spec.factors) {
           certs.push_back(SuperposeCertificates{fs.xi_d2_sup0, fs.xi_bounds[2], {}, {}});
           K.push_back(fs.xi_d2_sup0);
           kb = std::max(kb, fs.beta_bound);
         }
         SimResult r = sim_superpose(b.maps(&BuiltFactor::xi), certs, x, b.targets(), b.omega, b.f, b.g_sp, DominanceCertificate{"f", 1, "g", K}, &d);
         tag(out, r.reports, -1);
         for (std::size_t i = 0; i < b.factors.size(); ++i) tag(out, comparison_check(b.factors[i].beta, {kb, kb, kb}, 1.0, 5), static_cast<int>(i));
         SimResult u = sim_superpose_uniform(b.maps(&BuiltFactor::beta), {kb, kb, kb}, x, b.targets(), b.omega, b.f);
         tag(out, u.reports, -1);
       }},
      {{"lem:sim-SuperPos_QuasiInversion"},
       [](const BuiltScenario& b, const SuiteOptions& o, std::vector<CheckReport>& out) {
         std::vector<WeightedFunction> parts;
         for (std::size_t i = 0; i < b.factors.size(); ++i)
           parts.push_back(WeightedFunction(b.factors[i].field, b.factors[i].grid, -1, static_cast<int>(i)));
         SimResult r = sim_power_series(RestrictedElement::of(parts), b.spec.field_bound, o.neumann);
         tag(out, r.reports, -1);
       }},
      {{"prop:Simultane_Koor-Kompo_diffbar", "id:Ableitung_Kompo", "est:f,0-Norm_Differenz_Kompo", "est:Funktionswerte_Gewicht_K-Kompo"},
       [](const BuiltScenario& b, const SuiteOptions&, std::vector<CheckReport>& out) {
         ComposeFamilyCertificates c;
         for (const auto& fs : b.spec.factors) c.lip.push_back(fs.outer_lip);
         auto g1 = b.maps(&BuiltFactor::outer1);
         RestrictedElement e1 = b.family(&BuiltFactor::gamma1);
         SimResult r = sim_compose(b.maps(&BuiltFactor::outer), b.family(&BuiltFactor::gamma), b.targets(), b.omega, b.f, c, &g1, &e1);
         tag(out, r.reports, -1);
       }},
      {{"prop:Simultane_Inv-Kompo_glatt", "id:Differential_der_inversen_Abb", "prop:Zsf_Inversion_gewAbb",
        "est:Abschaetzung_gewichteter_FWert_der_K-Inversion", "est:f0-norm_Diff_KoorInv", "id:Ableitung_Inversion"},
       [](const BuiltScenario& b, const SuiteOptions& o, std::vector<CheckReport>& out) {
         std::vector<WeightedFunction> ph, ph1;
         std::vector<DomainSet> Vt;
         std::vector<SampleGrid> grids;
         InvertFamilyCertificates c;
         for (std::size_t i = 0; i < b.factors.size(); ++i) {
           const auto& f = b.factors[i];
           ph.push_back(WeightedFunction(f.phi, f.phi_grid, -1, static_cast<int>(i)));
           ph1.push_back(WeightedFunction(f.phi1, f.phi_grid, -1, static_cast<int>(i)));
           Vt.push_back(f.Vt);
           grids.push_back(f.inv_grid);
           c.lip = std::max(c.lip, b.spec.factors[i].phi_lip);
           c.sup0 = std::max(c.sup0, b.spec.factors[i].phi_sup0);
         }
         RestrictedElement phi = RestrictedElement::of(ph);
         SimResult r = sim_invert(phi, Vt, grids, c, contraction(b, o), b.f, o.neumann);
         tag(out, r.reports, -1);
         out.push_back(sim_invert_differential_check(phi, r.value, b.spec.inversion.tau, o.neumann));
         out.push_back(sim_invert_derivative_check(phi, RestrictedElement::of(ph1), r.value, b.f, o.neumann, o.convergence));
       }},
  };
  return groups;
}

}  // namespace detail

/// Every check of the selection on one scenario. Build or check errors become skipped reports
/// carrying the reason.
inline std::vector<CheckReport> run_scenario(const FamilyScenario& s, const CheckSelection& sel, const SuiteOptions& opt = {}) {
  std::vector<CheckReport> out;
  std::optional<BuiltScenario> built;
  std::string build_error;
  try {
    built = build_scenario(s);
  } catch (const Error& e) {
    build_error = e.what();
  }
  for (const auto& g : detail::check_groups()) {
    if (!sel.any(g.ids)) continue;
    std::vector<CheckReport> local;
    std::string reason = build_error;
    if (built) {
      try {
        g.run(*built, opt, local);
      } catch (const Error& e) {
        reason = e.what();
        local.clear();
      }
    }
    if (!reason.empty() && local.empty()) {
      for (const auto& id : g.ids)
        if (sel.selected(id)) local.push_back(skipped(id, reason));
    }
    for (auto& r : local)
      if (sel.selected(r.id)) out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const CheckReport& a, const CheckReport& b) { return a.id < b.id; });
  return out;
}

/// Runs scenarios on up to `jobs` threads; the result order is (scenario index, check id).
inline std::vector<CheckReport> run_suite(const std::vector<FamilyScenario>& scenarios, const CheckSelection& sel,
                                          const SuiteOptions& opt = {}, int jobs = 1) {
  if (sel.ids && sel.ids->empty()) return {};
  std::vector<std::vector<CheckReport>> per(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      per[i] = run_scenario(scenarios[i], sel, opt);
      for (auto& r : per[i]) r.scenario_index = static_cast<int>(i);
    }
  };
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<CheckReport> all;
  for (auto& v : per) all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  return all;
}

// ---------------------------------------------------------------------------------------------
// Reports

struct CheckSummary {
  int total = 0, passed = 0, failed = 0, skipped = 0;
  double min_margin = std::numeric_limits<double>::infinity();
};

inline std::map<std::string, CheckSummary> summarize(const std::vector<CheckReport>& reports) {
  std::map<std::string, CheckSummary> s;
  for (const auto& r : reports) {
    auto& c = s[r.id];
    ++c.total;
    if (r.status == Status::pass) ++c.passed;
    else if (r.status == Status::fail) ++c.failed;
    else ++c.skipped;
    if (r.status != Status::skipped_precondition) c.min_margin = std::min(c.min_margin, std::isnan(r.margin) ? -INFINITY : r.margin);
  }
  return s;
}

namespace detail {

inline nlohmann::json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace detail

inline nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json pt = nlohmann::json::array();
  for (double v : r.witness.point) pt.push_back(detail::number(v));
  return {{"id", r.id},
          {"status", to_string(r.status)},
          {"relation", to_string(r.relation)},
          {"lhs", detail::number(r.lhs)},
          {"rhs", detail::number(r.rhs)},
          {"lhs_provenance", to_string(r.lhs_provenance)},
          {"rhs_provenance", to_string(r.rhs_provenance)},
          {"margin", detail::number(r.margin)},
          {"tolerance", detail::number(r.tolerance)},
          {"witness", {{"factor", r.witness.factor}, {"point", pt}, {"step", detail::number(r.witness.step)}}},
          {"detail", r.detail},
          {"scenario_index", r.scenario_index}};
}

inline nlohmann::json summary_json(const std::vector<CheckReport>& reports) {
  nlohmann::json per = nlohmann::json::object();
  int pass = 0, fail = 0, skip = 0;
  for (const auto& [id, c] : summarize(reports)) {
    per[id] = {{"total", c.total}, {"pass", c.passed}, {"fail", c.failed}, {"skipped", c.skipped}, {"min_margin", detail::number(c.min_margin)}};
    pass += c.passed;
    fail += c.failed;
    skip += c.skipped;
  }
  return {{"checks", per}, {"pass", pass}, {"fail", fail}, {"skipped", skip}, {"total", static_cast<int>(reports.size())}};
}

/// Scenario descriptor for reports: name, seed, dimension and family size.
inline nlohmann::json describe(const FamilyScenario& s) {
  return {{"name", s.name},
          {"seed", s.seed ? nlohmann::json(*s.seed) : nlohmann::json(nullptr)},
          {"dim", s.dim},
          {"factors", static_cast<int>(s.factors.size())}};
}

inline nlohmann::json report_json(const std::string& run_id, const std::vector<FamilyScenario>& scenarios,
                                  const std::vector<CheckReport>& reports) {
  nlohmann::json seeds = nlohmann::json::array(), scen = nlohmann::json::array(), checks = nlohmann::json::array();
  for (const auto& s : scenarios) {
    seeds.push_back(s.seed ? nlohmann::json(*s.seed) : nlohmann::json(nullptr));
    scen.push_back(describe(s));
  }
  for (const auto& r : reports) checks.push_back(to_json(r));
  return {{"run_id", run_id}, {"seed", seeds}, {"scenario", scen}, {"checks", checks}, {"summary", summary_json(reports)}};
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string r = "\"";
  for (char c : s) r += c == '"' ? std::string("\"\"") : std::string(1, c);
  return r + "\"";
}

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

}  // namespace detail

/// One row per check: id, status, lhs, rhs, margin.
inline std::string margins_csv(const std::vector<CheckReport>& reports) {
  std::string s = "scenario,id,status,lhs,rhs,margin\n";
  for (const auto& r : reports)
    s += std::to_string(r.scenario_index) + "," + detail::csv_field(r.id) + "," + to_string(r.status) + "," + detail::csv_number(r.lhs) + "," +
         detail::csv_number(r.rhs) + "," + detail::csv_number(r.margin) + "\n";
  return s;
}

/// Histogram input: margins grouped by check id, skipped reports omitted.
inline std::string margins_histogram_csv(const std::vector<CheckReport>& reports) {
  std::map<std::string, std::vector<double>> by;
  for (const auto& r : reports)
    if (r.status != Status::skipped_precondition) by[r.id].push_back(r.margin);
  std::string s = "id,margin\n";
  for (auto& [id, ms] : by) {
    std::sort(ms.begin(), ms.end());
    for (double m : ms) s += detail::csv_field(id) + "," + detail::csv_number(m) + "\n";
  }
  return s;
}

}  // namespace wrp
