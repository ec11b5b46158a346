#pragma once

// Acceptance criteria 1-9. Each check computes its measurements from scratch
// and compares them with fixed thresholds.

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wgqed/analysis.hpp"
#include "wgqed/scenario.hpp"

namespace wgqed::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

inline const EngineRun& engine(const ScenarioResult& r, const std::string& name) {
  const EngineRun* run = r.find(name);
  require(run != nullptr, ErrorCategory::config, "engine " + name + " did not run");
  return *run;
}

inline double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }

// Samples of v whose time lies in [lo, hi].
inline std::vector<double> window(const Trajectory& tr, std::span<const double> v, double lo, double hi) {
  std::vector<double> out;
  for (std::size_t k = 0; k < tr.size(); ++k)
    if (tr.t[k] >= lo && tr.t[k] <= hi) out.push_back(v[k]);
  return out;
}

}  // namespace detail

/// 1. Centered preset: P2 = 0 up to tau1 and P1 = exp(-2 gamma11 t) up to 2 tau1.
inline CriterionResult causality() {
  CriterionResult c{1, "causality", false, "", 0.0};
  const detail::Timer timer;
  const ScenarioResult r = run_scenario(preset_config("centered-12", {"engines=[\"dde\"]"}));
  const auto& tr = detail::engine(r, "dde").atoms;
  const double tau = r.system.tau1();
  const double gamma = r.system.rates.gamma11;
  double pre = 0.0, decay = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (tr.t[k] <= tau) pre = std::max(pre, tr.p2[k]);
    if (tr.t[k] <= 2.0 * tau) decay = std::max(decay, std::abs(tr.p1[k] - std::exp(-2.0 * gamma * tr.t[k])));
  }
  c.seconds = timer.seconds();
  c.passed = pre <= 1e-12 && decay <= 1e-8 && c.seconds < 1.0;
  c.detail = "max P2(t<=tau1) = " + detail::num(pre) + " (<= 1e-12), max |P1 - exp(-2 g t)| (t<=2tau1) = " +
             detail::num(decay) + " (<= 1e-8), runtime " + detail::num(c.seconds) + " s (< 1 s)";
  return c;
}

/// 2. gamma11 tau1 = 1: P1 minimum in (tau1, 2 tau1) then a maximum before
/// 3 tau1; both engines empty by t = 30 / gamma11.
inline CriterionResult revival_structure() {
  CriterionResult c{2, "revival structure", false, "", 0.0};
  const detail::Timer timer;
  ScenarioConfig cfg = preset_config("centered-12", {"coupling={\"gamma11\":1.0,\"tau1\":1.0,\"phase\":12.0}",
                                                     "time.t_end_gamma=30", "time.samples=3001"});
  const ScenarioResult r = run_scenario(cfg);
  const double tau = r.system.tau1();
  const auto& dde = detail::engine(r, "dde").atoms;
  const auto& me = detail::engine(r, "me").atoms;

  bool min_found = false;
  double t_min = 0.0;
  for (const auto& e : local_extrema(dde.p1, 1e-12)) {
    const double t = dde.t[e.index];
    if (e.kind == ExtremumKind::minimum && t > tau && t < 2.0 * tau && !min_found) {
      min_found = true;
      t_min = t;
    }
  }
  bool max_found = false;
  double t_max = 0.0;
  if (min_found) {
    for (const auto& e : local_extrema(dde.p1, 1e-12)) {
      const double t = dde.t[e.index];
      if (e.kind == ExtremumKind::maximum && t > t_min && t < 3.0 * tau) {
        max_found = true;
        t_max = t;
        break;
      }
    }
  }
  const double tail_dde = dde.p1.back() + dde.p2.back();
  const double tail_me = me.p1.back() + me.p2.back();
  std::string where;
  for (const auto& e : local_extrema(dde.p1, 1e-12)) {
    if (dde.t[e.index] > 3.0 * tau) break;
    where += std::string(e.kind == ExtremumKind::minimum ? " min@" : " max@") + detail::num(dde.t[e.index] / tau);
  }
  c.seconds = timer.seconds();
  c.passed = min_found && max_found && tail_dde <= 1e-4 && tail_me <= 1e-4;
  c.detail = "P1 minimum in (tau1, 2tau1): " + std::string(min_found ? "yes at t/tau1 = " + detail::num(t_min / tau) : "no") +
             ", maximum before 3tau1: " + std::string(max_found ? "yes at t/tau1 = " + detail::num(t_max / tau) : "no") +
             "; P1 extrema before 3tau1 (t/tau1):" + (where.empty() ? " none" : where) +
             "; P1+P2 at 30/gamma11: dde " + detail::num(tail_dde) + ", me " + detail::num(tail_me) + " (<= 1e-4)";
  return c;
}

/// Sup distance over [0, 5 tau1] between oracle and DDE populations of the
/// centered preset for the given oracle grid.
inline double oracle_distance(std::size_t n, double k_max_scale, double* tau_out = nullptr) {
  std::vector<std::string> o = {"engines=[\"dde\",\"oracle\"]", "time.t_end_tau=5", "time.samples=1001",
                                "oracle.n=" + std::to_string(n), "oracle.k_max_scale=" + detail::num(k_max_scale)};
  const ScenarioResult r = run_scenario(preset_config("centered-12", o));
  if (tau_out) *tau_out = r.system.tau1();
  const auto& a = detail::engine(r, "dde").atoms;
  const auto& b = detail::engine(r, "oracle").atoms;
  return std::max(curve_distance(a, b, Observable::p1).sup, curve_distance(a, b, Observable::p2).sup);
}

/// 3. Oracle vs DDE at defaults within 5e-2, halving when N and k_max double.
inline CriterionResult oracle_equivalence() {
  CriterionResult c{3, "oracle equivalence", false, "", 0.0};
  const detail::Timer timer;
  const double base = oracle_distance(4001, 1.0);
  const double base_seconds = timer.seconds();
  const double doubled = oracle_distance(8001, 2.0);
  c.seconds = timer.seconds();
  c.passed = base <= 5e-2 && doubled <= 0.5 * base && base_seconds < 60.0;
  c.detail = "sup |P_oracle - P_dde| on [0, 5tau1]: N=4001 " + detail::num(base) + " (<= 5e-2), N=8001 with 2 k_max " +
             detail::num(doubled) + " (<= half = " + detail::num(0.5 * base) + "), default run " +
             detail::num(base_seconds) + " s (< 60 s)";
  return c;
}

/// 4. Off-center with TM21: DDE and ME P1 within 0.05 and P2 suppressed to 5%
/// of the run without TM21.
inline CriterionResult markovian_recovery() {
  CriterionResult c{4, "Markovian recovery", false, "", 0.0};
  const detail::Timer timer;
  const ScenarioResult with = run_scenario(preset_config("offcenter-x"));
  const ScenarioResult without = run_scenario(preset_config("offcenter-x", {"neglect_tm21=true"}));
  const auto& dde = detail::engine(with, "dde").atoms;
  const auto& me = detail::engine(with, "me").atoms;
  const double d1 = curve_distance(dde, me, Observable::p1).sup;
  const double p2_with = detail::max_of(dde.p2);
  const double p2_without = detail::max_of(detail::engine(without, "dde").atoms.p2);
  const double p2_me_with = detail::max_of(me.p2);
  const double p2_me_without = detail::max_of(detail::engine(without, "me").atoms.p2);
  c.seconds = timer.seconds();
  c.passed = d1 <= 0.05 && p2_with <= 0.05 * p2_without;
  c.detail = "sup |P1_dde - P1_me| = " + detail::num(d1) + " (<= 0.05); max P2 dde: " + detail::num(p2_with) +
             " vs " + detail::num(p2_without) + " without TM21, ratio " + detail::num(p2_with / p2_without) +
             " (<= 0.05); me ratio " + detail::num(p2_me_with / p2_me_without);
  return c;
}

/// 5. Without TM21 the DDE shows a P1 revival; with TM21 P1 only decreases.
inline CriterionResult tm21_switch() {
  CriterionResult c{5, "TM21 switch", false, "", 0.0};
  const detail::Timer timer;
  const ScenarioResult with = run_scenario(preset_config("offcenter-x", {"engines=[\"dde\"]"}));
  const ScenarioResult without =
      run_scenario(preset_config("offcenter-x", {"engines=[\"dde\"]", "neglect_tm21=true"}));
  const auto& p_with = detail::engine(with, "dde").atoms.p1;
  const auto& p_without = detail::engine(without, "dde").atoms.p1;
  const bool revival = has_revival(p_without, 1e-10);
  const bool monotone = non_increasing(p_with, 1e-10);
  double rise = 0.0;
  double t_rise = 0.0;
  for (std::size_t k = 1; k < p_with.size(); ++k) {
    if (p_with[k] - p_with[k - 1] > rise) {
      rise = p_with[k] - p_with[k - 1];
      t_rise = with.grid[k];
    }
  }
  c.seconds = timer.seconds();
  c.passed = revival && monotone;
  c.detail = std::string("revival without TM21: ") + (revival ? "yes" : "no") + "; P1 non-increasing with TM21: " +
             (monotone ? "yes" : "no") + " (largest step rise " + detail::num(rise) + " at t/tau1 = " +
             detail::num(t_rise / with.system.tau1()) + ", resolution 1e-10)";
  return c;
}

/// 6. Perpendicular-y dark state populations and the cos^2 ratio law.
inline CriterionResult dark_state_populations() {
  CriterionResult c{6, "dark state", false, "", 0.0};
  const detail::Timer timer;
  bool ok = true;
  std::string detail_text;
  const double b = CrossSection{}.b;
  for (double offset : {0.25, 0.125, 0.375}) {
    const ScenarioResult r =
        run_scenario(preset_config("perp-y", {"geometry.offset=" + detail::num(offset), "time.t_end_gamma=30"}));
    const double dy = offset * b;
    const double law = std::pow(std::cos(dy * std::numbers::pi / b), 2);
    const int j11 = r.system.table.find(1, 1);
    const SteadyPopulations expect = steady_ratio(
        dark_state(r.system.table.entries[j11][0].renormalized, r.system.table.entries[j11][1].renormalized), 1.0,
        0.0);
    for (const char* name : {"dde", "me"}) {
      const auto& tr = detail::engine(r, name).atoms;
      const SteadyEstimate p1 = steady_value(tr.p1);
      const SteadyEstimate p2 = steady_value(tr.p2);
      const double ratio = p1.mean / p2.mean;
      double err = std::max(std::abs(p1.mean - expect.p1), std::abs(p2.mean - expect.p2));
      if (offset == 0.25)
        err = std::max({err, std::abs(p1.mean - 1.0 / 9.0), std::abs(p2.mean - 2.0 / 9.0)});
      const bool pass = err <= 1e-3 && std::abs(ratio - law) <= 1e-3 && p1.flat && p2.flat;
      ok = ok && pass;
      detail_text += " dy=" + detail::num(offset) + "b " + name + ": P=(" + detail::num(p1.mean) + ", " +
                     detail::num(p2.mean) + ") ratio " + detail::num(ratio) + " vs " + detail::num(law) + ";";
    }
  }
  c.seconds = timer.seconds();
  c.passed = ok && c.seconds < 5.0;
  c.detail = "expected (1/9, 2/9) at dy = b/4, tolerance 1e-3;" + detail_text + " runtime " + detail::num(c.seconds) +
             " s (< 5 s)";
  return c;
}

/// 7. Perpendicular-x: DDE and ME agree and atom 2 stays nearly unexcited.
inline CriterionResult perp_x_freezing() {
  CriterionResult c{7, "perp-x freezing", false, "", 0.0};
  const detail::Timer timer;
  const ScenarioResult r = run_scenario(preset_config("perp-x"));
  const auto& dde = detail::engine(r, "dde").atoms;
  const auto& me = detail::engine(r, "me").atoms;
  const double d = std::max(curve_distance(dde, me, Observable::p1).sup, curve_distance(dde, me, Observable::p2).sup);
  const double p2 = std::max(detail::max_of(dde.p2), detail::max_of(me.p2));
  c.seconds = timer.seconds();
  c.passed = d <= 1e-6 && p2 <= 0.02;
  c.detail = "sup |P_dde - P_me| = " + detail::num(d) + " (<= 1e-6), max P2 = " + detail::num(p2) + " (<= 0.02)";
  return c;
}

/// 8. Trace, positivity and |ee> leakage of the ME over every preset.
inline CriterionResult lindblad_sanity() {
  CriterionResult c{8, "Lindblad sanity", false, "", 0.0};
  const detail::Timer timer;
  double drift = 0.0, neg = 0.0, ee = 0.0;
  std::vector<ScenarioConfig> configs;
  for (const auto& name : preset_names()) configs.push_back(preset_config(name, {"engines=[\"me\"]"}));
  configs.push_back(preset_config("offcenter-x", {"engines=[\"me\"]", "neglect_tm21=true"}));
  for (const auto& cfg : configs) {
    const ScenarioResult r = run_scenario(cfg);
    const auto& me = detail::engine(r, "me").me;
    for (std::size_t k = 0; k < me.size(); ++k) {
      drift = std::max(drift, std::abs(me.trace[k] - 1.0));
      neg = std::min(neg, me.min_eig[k]);
      ee = std::max(ee, std::abs(me.p_ee[k]));
    }
  }
  c.seconds = timer.seconds();
  c.passed = drift <= 1e-10 && neg >= -1e-10 && ee <= 1e-12;
  c.detail = "over " + std::to_string(configs.size()) + " runs: trace drift " + detail::num(drift) +
             " (<= 1e-10), min eigenvalue " + detail::num(neg) + " (>= -1e-10), |ee> population " + detail::num(ee) +
             " (<= 1e-12)";
  return c;
}

/// 9. gamma12^2 = gamma11 gamma22, and the centered collective rates against a
/// direct evaluation from the cutoff formula.
inline CriterionResult rate_algebra() {
  CriterionResult c{9, "rate algebra", false, "", 0.0};
  const detail::Timer timer;
  double worst_product = 0.0;
  std::mt19937 rng(20);
  std::uniform_real_distribution<double> ux(0.05, 0.95), uy(0.025, 0.475), uz(-5.0, 5.0);
  const CrossSection cs{};
  const double omega = midpoint_frequency(cs);
  for (int i = 0; i < 200; ++i) {
    GeometryInput in;
    in.omega_a = omega;
    in.atoms = {Position{ux(rng), uy(rng), uz(rng)}, Position{ux(rng), uy(rng), uz(rng)}};
    const DerivedSystem s = derive_system(in);
    const double lhs = s.rates.gamma12 * s.rates.gamma12;
    const double rhs = s.rates.gamma11 * s.rates.gamma22;
    worst_product = std::max(worst_product, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
  }
  for (const auto& name : preset_names()) {
    const DerivedSystem s = derive_system(geometry_input(preset_config(name)));
    const double rhs = s.rates.gamma11 * s.rates.gamma22;
    worst_product = std::max(worst_product, std::abs(s.rates.gamma12 * s.rates.gamma12 - rhs) / std::max(rhs, 1e-300));
  }

  // Direct evaluation for the centered preset: gamma11 = pi (0.08 Omega11)^2 / v1,
  // Gamma12 = 2 gamma11 cos(12), U12 = 2 gamma11 sin(12).
  const double o11 = std::numbers::pi * std::sqrt(1.0 / (cs.a * cs.a) + 1.0 / (cs.b * cs.b));
  const double o31 = std::numbers::pi * std::sqrt(9.0 / (cs.a * cs.a) + 1.0 / (cs.b * cs.b));
  const double w = 0.5 * (o11 + o31);
  const double v1 = std::sqrt(w * w - o11 * o11) / w;
  const double gamma = std::numbers::pi * std::pow(0.08 * o11, 2) / v1;
  const DerivedSystem s = derive_system(geometry_input(preset_config("centered-12")));
  const double e_g11 = std::abs(s.collective.Gamma[0][0] - 2.0 * gamma);
  const double e_g12 = std::abs(s.collective.Gamma[0][1] - 2.0 * gamma * std::cos(12.0));
  const double e_u12 = std::abs(s.collective.U[0][1] - 2.0 * gamma * std::sin(12.0));
  const double e_sym = std::abs(s.collective.Gamma[0][1] - s.collective.Gamma[1][0]) +
                       std::abs(s.collective.U[0][1] - s.collective.U[1][0]);
  const double worst_collective = std::max({e_g11, e_g12, e_u12, e_sym});
  c.seconds = timer.seconds();
  c.passed = worst_product <= 1e-12 && worst_collective <= 1e-12;
  c.detail = "max rel |gamma12^2 - gamma11 gamma22| = " + detail::num(worst_product) + " (<= 1e-12); Gamma12 = " +
             detail::num(s.collective.Gamma[0][1]) + ", U12 = " + detail::num(s.collective.U[0][1]) +
             ", max abs deviation from direct evaluation " + detail::num(worst_collective) + " (<= 1e-12)";
  return c;
}

inline std::vector<std::function<CriterionResult()>> all_criteria() {
  return {causality,          revival_structure, oracle_equivalence, markovian_recovery, tm21_switch,
          dark_state_populations, perp_x_freezing, lindblad_sanity,    rate_algebra};
}

inline std::string format_line(const CriterionResult& r) {
  return "[criterion " + std::to_string(r.id) + "] " + (r.passed ? "PASS" : "FAIL") + " " + r.title + ": " + r.detail;
}

/// Runs one criterion, turning exceptions into a failure with the message.
inline CriterionResult run_guarded(int id, const std::function<CriterionResult()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), 0.0};
  }
}

}  // namespace wgqed::acceptance
