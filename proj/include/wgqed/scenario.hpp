#pragma once

// Scenario configs: JSON in, engine runs, CSV and summary out.

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wgqed/analysis.hpp"
#include "wgqed/discrete_mode_oracle.hpp"
#include "wgqed/markovian_dynamics.hpp"
#include "wgqed/retarded_dynamics.hpp"
#include "wgqed/system.hpp"

namespace wgqed {

using json = nlohmann::json;

/// Symbolic placement of the second atom relative to a centered first atom.
///   centered     same (x, y), z separated
///   offcenter-x  x shifted by offset * a, z separated
///   perp-x       x shifted by offset * a, same z
///   perp-y       y shifted by offset * b, same z
struct LayoutSpec {
  std::string layout = "centered";
  double separation_k10 = 12.0;  // z separation in units of 1 / k10
  double offset = 0.25;
};

struct TimeSpec {
  std::optional<double> t_end;
  std::optional<double> t_end_tau;    // multiples of tau1
  std::optional<double> t_end_gamma;  // multiples of 1 / gamma11
  std::size_t samples = 2000;
};

struct OutputSpec {
  std::string dir = ".";
  std::string prefix;
};

struct ScenarioConfig {
  std::string name = "scenario";
  CrossSection cross_section;
  std::optional<double> omega_a;  // empty: midpoint of the TM11 and TM31 cutoffs
  std::vector<std::pair<int, int>> modes = default_candidate_modes();
  bool neglect_tm21 = false;
  std::variant<LayoutSpec, std::array<Position, 2>> geometry = LayoutSpec{};
  std::variant<double, ExplicitRates> coupling = 0.08;
  std::string initial_label = "eg";
  Amplitudes initial{1.0, 0.0};
  std::vector<std::string> engines = {"dde", "me"};
  TimeSpec time;
  SolverConfig dde;
  OracleConfig oracle;
  OutputSpec output;
};

inline double midpoint_frequency(const CrossSection& cs) {
  return 0.5 * (cutoff_frequency(1, 1, cs) + cutoff_frequency(3, 1, cs));
}

namespace detail {

[[noreturn]] inline void bad_config(const std::string& what) { throw Error(ErrorCategory::config, what); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad_config(std::string("config field '") + key + "' has the wrong type");
  }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) bad_config("unknown config field '" + where + it.key() + "'");
  }
}

inline std::complex<double> complex_from(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  bad_config(std::string("initial amplitude ") + what + " must be a number or [re, im]");
}

inline Amplitudes named_initial(const std::string& label) {
  const double r = 1.0 / std::numbers::sqrt2;
  if (label == "eg") return {1.0, 0.0};
  if (label == "ge") return {0.0, 1.0};
  if (label == "symmetric") return {r, r};
  if (label == "antisymmetric") return {r, -r};
  bad_config("unknown initial state '" + label + "' (eg, ge, symmetric, antisymmetric or {b1, b2})");
}

}  // namespace detail

inline ScenarioConfig parse_config(const json& j) {
  using detail::bad_config;
  using detail::get_or;
  if (!j.is_object()) bad_config("config must be a JSON object");
  detail::reject_unknown(j,
                         {"name", "cross_section", "omega_a", "modes", "neglect_tm21", "geometry", "atoms", "coupling",
                          "initial", "engines", "time", "dde", "oracle", "output"},
                         "");
  ScenarioConfig c;
  c.name = get_or<std::string>(j, "name", c.name);
  if (j.contains("cross_section")) {
    const json& cs = j["cross_section"];
    if (!cs.is_object()) bad_config("cross_section must be an object {a, b}");
    detail::reject_unknown(cs, {"a", "b"}, "cross_section.");
    c.cross_section.a = get_or<double>(cs, "a", 1.0);
    c.cross_section.b = get_or<double>(cs, "b", 0.5);
  }
  if (j.contains("omega_a")) {
    const json& w = j["omega_a"];
    if (w.is_string()) {
      if (w.get<std::string>() != "midpoint") bad_config("omega_a must be a number or \"midpoint\"");
    } else if (w.is_number()) {
      c.omega_a = w.get<double>();
    } else {
      bad_config("omega_a must be a number or \"midpoint\"");
    }
  }
  if (j.contains("modes")) {
    c.modes.clear();
    for (const json& m : j["modes"]) {
      if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() || !m[1].is_number_integer())
        bad_config("modes must be a list of [m, n] integer pairs");
      c.modes.emplace_back(m[0].get<int>(), m[1].get<int>());
    }
  }
  c.neglect_tm21 = get_or<bool>(j, "neglect_tm21", false);

  if (j.contains("geometry") && j.contains("atoms")) bad_config("give either geometry or atoms, not both");
  if (j.contains("atoms")) {
    const json& a = j["atoms"];
    if (!a.is_array() || a.size() != 2) bad_config("atoms must list exactly two positions");
    std::array<Position, 2> p;
    for (int l = 0; l < 2; ++l) {
      detail::reject_unknown(a[l], {"x", "y", "z"}, "atoms.");
      p[l] = {get_or<double>(a[l], "x", 0.0), get_or<double>(a[l], "y", 0.0), get_or<double>(a[l], "z", 0.0)};
    }
    c.geometry = p;
  } else if (j.contains("geometry")) {
    const json& g = j["geometry"];
    detail::reject_unknown(g, {"layout", "separation_k10", "offset"}, "geometry.");
    LayoutSpec s;
    s.layout = get_or<std::string>(g, "layout", s.layout);
    s.separation_k10 = get_or<double>(g, "separation_k10", s.separation_k10);
    s.offset = get_or<double>(g, "offset", s.offset);
    if (s.layout != "centered" && s.layout != "offcenter-x" && s.layout != "perp-x" && s.layout != "perp-y")
      bad_config("unknown layout '" + s.layout + "' (centered, offcenter-x, perp-x, perp-y)");
    c.geometry = s;
  }

  if (j.contains("coupling")) {
    const json& k = j["coupling"];
    detail::reject_unknown(k, {"scale", "gamma11", "tau1", "phase"}, "coupling.");
    const bool scale = k.contains("scale");
    const bool rates = k.contains("gamma11") || k.contains("tau1") || k.contains("phase");
    if (scale == rates) bad_config("coupling needs exactly one of: scale, or explicit {gamma11, tau1, phase}");
    if (scale) {
      c.coupling = get_or<double>(k, "scale", 0.0);
    } else {
      if (!k.contains("gamma11")) bad_config("explicit coupling needs gamma11");
      c.coupling = ExplicitRates{get_or<double>(k, "gamma11", 0.0), get_or<double>(k, "tau1", 0.0),
                                 get_or<double>(k, "phase", 0.0)};
    }
  }

  if (j.contains("initial")) {
    const json& i = j["initial"];
    if (i.is_string()) {
      c.initial_label = i.get<std::string>();
      c.initial = detail::named_initial(c.initial_label);
    } else if (i.is_object()) {
      detail::reject_unknown(i, {"b1", "b2"}, "initial.");
      c.initial_label = "custom";
      c.initial = {i.contains("b1") ? detail::complex_from(i["b1"], "b1") : 0.0,
                   i.contains("b2") ? detail::complex_from(i["b2"], "b2") : 0.0};
      if (std::abs(std::norm(c.initial[0]) + std::norm(c.initial[1]) - 1.0) > 1e-12)
        bad_config("initial amplitudes must satisfy |b1|^2 + |b2|^2 = 1");
    } else {
      bad_config("initial must be a state name or {b1, b2}");
    }
  }

  if (j.contains("engines")) {
    c.engines = get_or<std::vector<std::string>>(j, "engines", {});
    if (c.engines.empty()) bad_config("engines must not be empty");
    for (const auto& e : c.engines)
      if (e != "dde" && e != "me" && e != "oracle") bad_config("unknown engine '" + e + "' (dde, me, oracle)");
  }

  if (j.contains("time")) {
    const json& t = j["time"];
    detail::reject_unknown(t, {"t_end", "t_end_tau", "t_end_gamma", "samples"}, "time.");
    int given = 0;
    if (t.contains("t_end")) c.time.t_end = get_or<double>(t, "t_end", 0.0), ++given;
    if (t.contains("t_end_tau")) c.time.t_end_tau = get_or<double>(t, "t_end_tau", 0.0), ++given;
    if (t.contains("t_end_gamma")) c.time.t_end_gamma = get_or<double>(t, "t_end_gamma", 0.0), ++given;
    if (given > 1) bad_config("time takes at most one of t_end, t_end_tau, t_end_gamma");
    const auto samples = get_or<long long>(t, "samples", 2000);
    if (samples < 2) bad_config("time.samples must be >= 2");
    c.time.samples = static_cast<std::size_t>(samples);
  }
  c.dde.samples = c.time.samples;

  if (j.contains("dde")) {
    const json& d = j["dde"];
    detail::reject_unknown(d, {"step", "steps_per_delay"}, "dde.");
    c.dde.step = get_or<double>(d, "step", 0.0);
    const auto spd = get_or<long long>(d, "steps_per_delay", 0);
    if (spd < 0) bad_config("dde.steps_per_delay must be >= 0");
    c.dde.steps_per_delay = static_cast<std::size_t>(spd);
  }
  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    detail::reject_unknown(o, {"n", "k_max", "k_max_scale", "rtol", "atol"}, "oracle.");
    const auto n = get_or<long long>(o, "n", 4001);
    if (n < 3) bad_config("oracle.n must be >= 3");
    c.oracle.n = static_cast<std::size_t>(n);
    c.oracle.k_max = get_or<double>(o, "k_max", 0.0);
    c.oracle.k_max_scale = get_or<double>(o, "k_max_scale", 1.0);
    c.oracle.rtol = get_or<double>(o, "rtol", c.oracle.rtol);
    c.oracle.atol = get_or<double>(o, "atol", c.oracle.atol);
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    detail::reject_unknown(o, {"dir", "prefix"}, "output.");
    c.output.dir = get_or<std::string>(o, "dir", c.output.dir);
    c.output.prefix = get_or<std::string>(o, "prefix", "");
  }
  if (c.output.prefix.empty()) c.output.prefix = c.name;
  return c;
}

/// Fully explicit form of a config; parsing it back yields the same config.
inline json to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["cross_section"] = {{"a", c.cross_section.a}, {"b", c.cross_section.b}};
  j["omega_a"] = c.omega_a ? json(*c.omega_a) : json("midpoint");
  j["modes"] = json::array();
  for (auto [m, n] : c.modes) j["modes"].push_back({m, n});
  j["neglect_tm21"] = c.neglect_tm21;
  if (const auto* s = std::get_if<LayoutSpec>(&c.geometry)) {
    j["geometry"] = {{"layout", s->layout}, {"separation_k10", s->separation_k10}, {"offset", s->offset}};
  } else {
    const auto& p = std::get<std::array<Position, 2>>(c.geometry);
    j["atoms"] = json::array();
    for (const auto& q : p) j["atoms"].push_back({{"x", q.x}, {"y", q.y}, {"z", q.z}});
  }
  if (const auto* s = std::get_if<double>(&c.coupling)) {
    j["coupling"] = {{"scale", *s}};
  } else {
    const auto& e = std::get<ExplicitRates>(c.coupling);
    j["coupling"] = {{"gamma11", e.gamma11}, {"tau1", e.tau1}, {"phase", e.phase}};
  }
  if (c.initial_label == "custom")
    j["initial"] = {{"b1", {c.initial[0].real(), c.initial[0].imag()}},
                    {"b2", {c.initial[1].real(), c.initial[1].imag()}}};
  else
    j["initial"] = c.initial_label;
  j["engines"] = c.engines;
  json t = {{"samples", c.time.samples}};
  if (c.time.t_end) t["t_end"] = *c.time.t_end;
  if (c.time.t_end_tau) t["t_end_tau"] = *c.time.t_end_tau;
  if (c.time.t_end_gamma) t["t_end_gamma"] = *c.time.t_end_gamma;
  j["time"] = t;
  j["dde"] = {{"step", c.dde.step}, {"steps_per_delay", c.dde.steps_per_delay}};
  j["oracle"] = {{"n", c.oracle.n},
                 {"k_max", c.oracle.k_max},
                 {"k_max_scale", c.oracle.k_max_scale},
                 {"rtol", c.oracle.rtol},
                 {"atol", c.oracle.atol}};
  j["output"] = {{"dir", c.output.dir}, {"prefix", c.output.prefix}};
  return j;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCategory::config, "malformed JSON in '" + path + "': " + e.what());
  }
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"centered-12", "centered-24", "offcenter-x", "perp-x", "perp-y"};
  return names;
}

inline json preset_json(const std::string& name) {
  json j = {{"name", name},
            {"omega_a", "midpoint"},
            {"coupling", {{"scale", 0.08}}},
            {"initial", "eg"},
            {"engines", {"dde", "me"}}};
  if (name == "centered-12") {
    j["geometry"] = {{"layout", "centered"}, {"separation_k10", 12.0}};
  } else if (name == "centered-24") {
    j["geometry"] = {{"layout", "centered"}, {"separation_k10", 24.0}};
  } else if (name == "offcenter-x") {
    j["geometry"] = {{"layout", "offcenter-x"}, {"separation_k10", 12.0}, {"offset", 0.25}};
    j["neglect_tm21"] = false;
  } else if (name == "perp-x") {
    j["geometry"] = {{"layout", "perp-x"}, {"offset", 0.25}};
  } else if (name == "perp-y") {
    j["geometry"] = {{"layout", "perp-y"}, {"offset", 0.25}};
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorCategory::config, "unknown preset '" + name + "' (" + known + ")");
  }
  return j;
}

/// Applies "a.b.c=value"; the value is read as JSON when it parses, else as a string.
inline void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(ErrorCategory::config, "override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  std::string pointer;
  std::size_t start = 0;
  while (start <= key.size()) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw Error(ErrorCategory::config, "override key '" + key + "' has an empty component");
    pointer += "/" + part;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  // Switching between geometry and atoms, or between coupling forms, replaces the block.
  if (key.starts_with("atoms")) j.erase("geometry");
  if (key.starts_with("geometry")) j.erase("atoms");
  if (key == "coupling.scale" && j.contains("coupling")) j["coupling"] = json::object();
  if ((key == "coupling.gamma11" || key == "coupling.tau1" || key == "coupling.phase") && j.contains("coupling"))
    j["coupling"].erase("scale");
  if (key.starts_with("time.t_end") && j.contains("time")) {
    j["time"].erase("t_end");
    j["time"].erase("t_end_tau");
    j["time"].erase("t_end_gamma");
  }
  try {
    j[json::json_pointer(pointer)] = value;
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::config, "cannot apply override '" + assignment + "': " + e.what());
  }
}

inline ScenarioConfig preset_config(const std::string& name, const std::vector<std::string>& overrides = {}) {
  json j = preset_json(name);
  for (const auto& o : overrides) apply_override(j, o);
  return parse_config(j);
}

/// Atom positions and the remaining geometry inputs of a config.
inline GeometryInput geometry_input(const ScenarioConfig& c) {
  GeometryInput in;
  in.cross_section = c.cross_section;
  in.cross_section.validate();
  in.omega_a = c.omega_a ? *c.omega_a : midpoint_frequency(c.cross_section);
  in.candidate_modes = c.modes;
  in.neglect_tm21 = c.neglect_tm21;
  if (const auto* s = std::get_if<double>(&c.coupling)) in.scale = *s;
  else in.explicit_rates = std::get<ExplicitRates>(c.coupling);

  if (const auto* p = std::get_if<std::array<Position, 2>>(&c.geometry)) {
    in.atoms = *p;
    return in;
  }
  const auto& s = std::get<LayoutSpec>(c.geometry);
  const double a = c.cross_section.a;
  const double b = c.cross_section.b;
  const Position center{0.5 * a, 0.5 * b, 0.0};
  Position second = center;
  double d = 0.0;
  if (s.layout == "centered" || s.layout == "offcenter-x") {
    const TMMode tm11 = make_mode(1, 1, c.cross_section);
    require(in.omega_a > tm11.cutoff, ErrorCategory::propagation,
            "omega_a = " + std::to_string(in.omega_a) + " is below the TM11 cutoff " + std::to_string(tm11.cutoff));
    d = s.separation_k10 / resonant_wavevector(tm11, in.omega_a);
    require(d > 0.0, ErrorCategory::geometry, "separation_k10 must be positive for a z-separated layout");
  }
  if (s.layout == "offcenter-x" || s.layout == "perp-x") second.x += s.offset * a;
  if (s.layout == "perp-y") second.y += s.offset * b;
  second.z = d;
  require(s.layout == "centered" || s.offset != 0.0, ErrorCategory::geometry,
          "layout '" + s.layout + "' needs a nonzero offset");
  in.atoms = {center, second};
  return in;
}

inline double resolve_t_end(const ScenarioConfig& c, const DerivedSystem& sys) {
  const double tau = sys.layout == Layout::perpendicular ? 0.0 : sys.tau1();
  const double gamma = sys.rates.gamma11;
  double t = 0.0;
  if (c.time.t_end) {
    t = *c.time.t_end;
  } else if (c.time.t_end_tau) {
    require(tau > 0.0, ErrorCategory::config, "t_end_tau needs a nonzero delay");
    t = *c.time.t_end_tau * tau;
  } else if (c.time.t_end_gamma) {
    require(gamma > 0.0, ErrorCategory::config, "t_end_gamma needs gamma11 > 0");
    t = *c.time.t_end_gamma / gamma;
  } else if (tau > 0.0) {
    t = 6.0 * tau;
  } else {
    require(gamma > 0.0, ErrorCategory::config, "no delay and no decay: give time.t_end");
    t = 10.0 / gamma;
  }
  require(t > 0.0 && std::isfinite(t), ErrorCategory::config, "time window must be positive");
  return t;
}

struct EngineRun {
  std::string engine;
  Trajectory atoms;
  MeTrajectory me;             // engine "me" only
  std::vector<double> norm;    // engine "oracle" only
  double revival_time = 0.0;   // engine "oracle" only
  double seconds = 0.0;
};

struct ScenarioResult {
  ScenarioConfig config;
  DerivedSystem system;
  double t_end = 0.0;
  std::vector<double> grid;
  std::vector<EngineRun> runs;

  const EngineRun* find(const std::string& engine) const {
    for (const auto& r : runs)
      if (r.engine == engine) return &r;
    return nullptr;
  }
};

inline EngineRun run_engine(const std::string& engine, const ScenarioConfig& c, const DerivedSystem& sys,
                            const std::vector<double>& grid) {
  const auto start = std::chrono::steady_clock::now();
  EngineRun run;
  run.engine = engine;
  if (engine == "dde") {
    SolverConfig cfg = c.dde;
    cfg.samples = grid.size();
    RetardedIntegrator integ(sys.retarded, c.initial, choose_step(sys.retarded, grid.back(), cfg));
    integ.advance_to(grid.back());
    run.atoms = integ.sample(grid);
  } else if (engine == "me") {
    const Generator gen(sys.lindblad);
    run.me = integrate_me(gen, state_from_amplitudes(c.initial[0], c.initial[1]), grid);
    run.atoms.t = run.me.t;
    run.atoms.p1 = run.me.p1;
    run.atoms.p2 = run.me.p2;
  } else if (engine == "oracle") {
    require(std::abs(std::norm(c.initial[0]) + std::norm(c.initial[1]) - 1.0) <= 1e-12, ErrorCategory::config,
            "oracle needs a normalized initial state");
    const std::array<double, 2> z{sys.atoms[0].position.z, sys.atoms[1].position.z};
    const double reference = std::max(sys.rates.gamma11, sys.rates.gamma22);
    const auto grids = build_grids(sys.table, z, reference, c.oracle);
    OracleResult r = integrate_full(grids, c.initial, grid, c.oracle);
    run.atoms = std::move(r.atoms);
    run.norm = std::move(r.total_norm);
    run.revival_time = r.revival_time;
  } else {
    throw Error(ErrorCategory::config, "unknown engine '" + engine + "'");
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

/// Derives the system and runs every requested engine, concurrently.
inline ScenarioResult run_scenario(const ScenarioConfig& c) {
  ScenarioResult out;
  out.config = c;
  out.system = derive_system(geometry_input(c));
  out.t_end = resolve_t_end(c, out.system);
  out.grid = uniform_grid(out.t_end, c.time.samples);
  std::vector<std::future<EngineRun>> jobs;
  for (const auto& e : c.engines)
    jobs.push_back(std::async(std::launch::async, run_engine, e, std::cref(c), std::cref(out.system),
                              std::cref(out.grid)));
  for (auto& j : jobs) out.runs.push_back(j.get());
  return out;
}

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json pair_matrix(const std::array<std::array<double, 2>, 2>& m) {
  return json::array({json::array({m[0][0], m[0][1]}), json::array({m[1][0], m[1][1]})});
}

}  // namespace detail

/// CSV text of one engine run. A t/tau1 column follows t when a delay exists.
inline std::string engine_csv(const EngineRun& run, double tau1) {
  const bool scaled = tau1 > 0.0;
  std::string s = "t,";
  if (scaled) s += "t_over_tau1,";
  s += run.engine == "me" ? "p1,p2,trace,min_eig\n" : "p1,p2,re_b1,im_b1,re_b2,im_b2\n";
  using detail::fmt17;
  for (std::size_t k = 0; k < run.atoms.size(); ++k) {
    s += fmt17(run.atoms.t[k]);
    if (scaled) s += "," + fmt17(run.atoms.t[k] / tau1);
    s += "," + fmt17(run.atoms.p1[k]) + "," + fmt17(run.atoms.p2[k]);
    if (run.engine == "me") {
      s += "," + fmt17(run.me.trace[k]) + "," + fmt17(run.me.min_eig[k]);
    } else {
      s += "," + fmt17(run.atoms.b1[k].real()) + "," + fmt17(run.atoms.b1[k].imag()) + "," +
           fmt17(run.atoms.b2[k].real()) + "," + fmt17(run.atoms.b2[k].imag());
    }
    s += "\n";
  }
  return s;
}

inline double delay_of(const ScenarioResult& r) {
  return r.system.layout == Layout::perpendicular ? 0.0 : r.system.tau1();
}

/// Derived quantities only, no dynamics.
inline json derived_json(const DerivedSystem& sys) {
  json j;
  j["layout"] = layout_name(sys.layout);
  j["omega_a"] = sys.input.omega_a;
  j["scale"] = sys.scale;
  j["separation"] = sys.separation;
  j["atoms"] = json::array();
  for (const auto& a : sys.atoms)
    j["atoms"].push_back({{"x", a.position.x}, {"y", a.position.y}, {"z", a.position.z}});
  j["modes"] = json::array();
  for (std::size_t m = 0; m < sys.modes.size(); ++m) {
    const auto& d = sys.modes[m];
    j["modes"].push_back({{"mode", "TM" + std::to_string(d.mode.m) + std::to_string(d.mode.n)},
                          {"cutoff", d.mode.cutoff},
                          {"k0", d.resonant_k},
                          {"group_velocity", d.group_velocity},
                          {"delay", d.delay},
                          {"phase", d.phase},
                          {"g_renormalized", {sys.table.entries[m][0].renormalized, sys.table.entries[m][1].renormalized}},
                          {"g_raw", {sys.table.entries[m][0].raw, sys.table.entries[m][1].raw}}});
  }
  j["rates"] = {{"gamma11", sys.rates.gamma11},
                {"gamma12", sys.rates.gamma12},
                {"gamma22", sys.rates.gamma22},
                {"gamma211", sys.rates.gamma211},
                {"gamma212", sys.rates.gamma212}};
  j["tau1"] = sys.layout == Layout::perpendicular ? 0.0 : sys.tau1();
  j["phase1"] = sys.layout == Layout::perpendicular ? 0.0 : sys.phase1();
  j["collective"] = {{"Gamma", detail::pair_matrix(sys.collective.Gamma)},
                     {"U", detail::pair_matrix(sys.collective.U)},
                     {"A_re", {{sys.collective.A[0][0].real(), sys.collective.A[0][1].real()},
                               {sys.collective.A[1][0].real(), sys.collective.A[1][1].real()}}},
                     {"A_im", {{sys.collective.A[0][0].imag(), sys.collective.A[0][1].imag()},
                               {sys.collective.A[1][0].imag(), sys.collective.A[1][1].imag()}}}};
  j["lindblad"] = {{"collective_decay", {{sys.lindblad.collective_decay(0, 0), sys.lindblad.collective_decay(0, 1)},
                                         {sys.lindblad.collective_decay(1, 0), sys.lindblad.collective_decay(1, 1)}}},
                   {"exchange", {{sys.lindblad.exchange(0, 0), sys.lindblad.exchange(0, 1)},
                                 {sys.lindblad.exchange(1, 0), sys.lindblad.exchange(1, 1)}}},
                   {"local_decay", sys.lindblad.local_decay}};
  return j;
}

inline json summary_json(const ScenarioResult& r) {
  json j;
  j["name"] = r.config.name;
  j["derived"] = derived_json(r.system);
  j["t_end"] = r.t_end;
  j["samples"] = r.grid.size();
  j["initial"] = {{"b1", {r.config.initial[0].real(), r.config.initial[0].imag()}},
                  {"b2", {r.config.initial[1].real(), r.config.initial[1].imag()}}};

  json checks = json::array();
  auto check = [&](const std::string& name, bool ok, double value, double threshold) {
    checks.push_back({{"name", name}, {"passed", ok}, {"value", value}, {"threshold", threshold}});
  };

  const int j11 = r.system.table.find(1, 1);
  const double g11 = r.system.table.entries[j11][0].renormalized;
  const double g12 = r.system.table.entries[j11][1].renormalized;
  std::optional<SteadyPopulations> predicted;
  if (r.system.has_dark_state()) {
    const DarkState d = dark_state(g11, g12);
    predicted = steady_ratio(d, r.config.initial[0], r.config.initial[1]);
    j["dark_state"] = {{"c1", d.c1},
                       {"c2", d.c2},
                       {"p1_inf", predicted->p1},
                       {"p2_inf", predicted->p2},
                       {"ratio", predicted->ratio ? json(*predicted->ratio) : json(nullptr)}};
  }

  const double tau = delay_of(r);
  j["engines"] = json::object();
  for (const auto& run : r.runs) {
    json e;
    e["rows"] = run.atoms.size();
    e["seconds"] = run.seconds;
    e["p1_final"] = run.atoms.p1.back();
    e["p2_final"] = run.atoms.p2.back();
    e["p1_max"] = *std::max_element(run.atoms.p1.begin(), run.atoms.p1.end());
    e["p2_max"] = *std::max_element(run.atoms.p2.begin(), run.atoms.p2.end());
    if (tau > 0.0 && run.engine == "dde") {
      double pre = 0.0;
      for (std::size_t k = 0; k < run.atoms.size(); ++k)
        if (run.atoms.t[k] <= tau) pre = std::max(pre, run.atoms.p2[k]);
      check("dde_causality_p2_before_tau1", pre <= 1e-12, pre, 1e-12);
    }
    if (run.engine == "me") {
      double drift = 0.0, neg = 0.0, ee = 0.0;
      for (std::size_t k = 0; k < run.me.size(); ++k) {
        drift = std::max(drift, std::abs(run.me.trace[k] - run.me.trace[0]));
        neg = std::min(neg, run.me.min_eig[k]);
        ee = std::max(ee, std::abs(run.me.p_ee[k]));
      }
      check("me_trace_drift", drift <= 1e-10, drift, 1e-10);
      check("me_min_eigenvalue", neg >= -1e-10, neg, -1e-10);
      check("me_ee_leakage", ee <= 1e-12, ee, 1e-12);
    }
    if (run.engine == "oracle") {
      double dev = 0.0;
      for (double n : run.norm) dev = std::max(dev, std::abs(n - 1.0));
      e["revival_time"] = run.revival_time;
      check("oracle_norm", dev <= 1e-8, dev, 1e-8);
    }
    if (predicted) {
      const double err = std::max(std::abs(run.atoms.p1.back() - predicted->p1),
                                  std::abs(run.atoms.p2.back() - predicted->p2));
      check(run.engine + "_dark_state_populations", err <= 1e-3, err, 1e-3);
    }
    j["engines"][run.engine] = e;
  }

  json distances = json::array();
  for (std::size_t a = 0; a < r.runs.size(); ++a) {
    for (std::size_t b = a + 1; b < r.runs.size(); ++b) {
      const auto d1 = curve_distance(r.runs[a].atoms, r.runs[b].atoms, Observable::p1);
      const auto d2 = curve_distance(r.runs[a].atoms, r.runs[b].atoms, Observable::p2);
      distances.push_back({{"engines", {r.runs[a].engine, r.runs[b].engine}},
                           {"p1_sup", d1.sup},
                           {"p1_l2", d1.l2},
                           {"p2_sup", d2.sup},
                           {"p2_l2", d2.l2}});
    }
  }
  j["distances"] = distances;
  j["checks"] = checks;
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCategory::io, "write failed for '" + path.string() + "'");
}

/// Writes <prefix>_<engine>.csv per engine, <prefix>_summary.json and
/// <prefix>_config.json into the output directory; returns the paths.
inline std::vector<std::filesystem::path> write_outputs(const ScenarioResult& r) {
  namespace fs = std::filesystem;
  const fs::path dir = r.config.output.dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCategory::io, "cannot create output directory '" + dir.string() + "': " + ec.message());
  const std::string prefix = r.config.output.prefix;
  std::vector<fs::path> written;
  for (const auto& run : r.runs) {
    const fs::path p = dir / (prefix + "_" + run.engine + ".csv");
    write_text(p, engine_csv(run, delay_of(r)));
    written.push_back(p);
  }
  const fs::path summary = dir / (prefix + "_summary.json");
  write_text(summary, summary_json(r).dump(2) + "\n");
  written.push_back(summary);
  const fs::path config = dir / (prefix + "_config.json");
  write_text(config, to_json(r.config).dump(2) + "\n");
  written.push_back(config);
  return written;
}

/// Process exit code for an error category.
inline int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::geometry: return 3;
    case ErrorCategory::propagation: return 4;
    case ErrorCategory::numerical: return 5;
    case ErrorCategory::io: return 6;
  }
  return 1;
}

}  // namespace wgqed
