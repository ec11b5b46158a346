#pragma once

// Assembly of the dynamical models from a waveguide geometry: coupling table,
// Weisskopf-Wigner rates, the retarded system and the Lindblad spec.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wgqed/error.hpp"
#include "wgqed/markovian_dynamics.hpp"
#include "wgqed/retarded_dynamics.hpp"
#include "wgqed/waveguide_modes.hpp"

namespace wgqed {

enum class Layout { centered, off_center, perpendicular };

inline const char* layout_name(Layout l) {
  switch (l) {
    case Layout::centered: return "centered";
    case Layout::off_center: return "off_center";
    case Layout::perpendicular: return "perpendicular";
  }
  return "unknown";
}

/// Perpendicular when the atoms share z, centered when they share (x, y),
/// off-center otherwise.
inline Layout classify_layout(const std::array<Position, 2>& p) {
  if (p[0].z == p[1].z) return Layout::perpendicular;
  if (p[0].x == p[1].x && p[0].y == p[1].y) return Layout::centered;
  return Layout::off_center;
}

inline ExchangeForm exchange_form(Layout l) {
  switch (l) {
    case Layout::centered: return ExchangeForm::centered;
    case Layout::off_center: return ExchangeForm::off_center;
    case Layout::perpendicular: return ExchangeForm::perpendicular;
  }
  return ExchangeForm::centered;
}

/// Retardation parameters given directly instead of through the geometry:
/// TM11 self rate of atom 1, TM11 delay and TM11 propagation phase. Other
/// modes keep their ratios to TM11.
struct ExplicitRates {
  double gamma11 = 0.0;
  double tau1 = 0.0;
  double phase = 0.0;
};

struct GeometryInput {
  CrossSection cross_section;
  std::array<Position, 2> atoms;
  double omega_a = 0.0;
  std::vector<std::pair<int, int>> candidate_modes = default_candidate_modes();
  bool neglect_tm21 = false;
  double scale = 0.08;                    // g'_11 / Omega_11, ignored with explicit rates
  std::optional<ExplicitRates> explicit_rates;
};

struct ModeData {
  TMMode mode;
  double resonant_k = 0.0;
  double group_velocity = 0.0;
  double delay = 0.0;
  double phase = 0.0;
};

struct DerivedSystem {
  GeometryInput input;
  std::array<AtomSpec, 2> atoms;
  double scale = 0.0;
  Layout layout = Layout::centered;
  double separation = 0.0;
  std::vector<ModeData> modes;
  CouplingTable table;
  ChannelRates rates;
  CollectiveRates collective;
  RetardedSystem retarded;
  LindbladSpec lindblad;

  const ModeData& tm11() const {
    for (const auto& m : modes)
      if (m.mode.is(1, 1)) return m;
    throw Error(ErrorCategory::propagation, "TM11 is not among the propagating modes");
  }
  double tau1() const { return tm11().delay; }
  double phase1() const { return tm11().phase; }
  bool explicit_mode() const { return input.explicit_rates.has_value(); }

  /// A dark state exists when only TM11 carries the atoms' emission and
  /// there is no retardation.
  bool has_dark_state() const {
    return layout == Layout::perpendicular && rates.gamma211 == 0.0 && rates.gamma212 == 0.0 &&
           (table.entries[table.find(1, 1)][0].renormalized != 0.0 ||
            table.entries[table.find(1, 1)][1].renormalized != 0.0);
  }
};

inline DerivedSystem derive_system(const GeometryInput& in) {
  in.cross_section.validate();
  DerivedSystem out;
  out.input = in;
  for (int l = 0; l < 2; ++l) {
    out.atoms[l] = AtomSpec{in.atoms[l], in.omega_a};
    out.atoms[l].validate(in.cross_section);
  }

  std::vector<TMMode> modes = propagating_modes(in.cross_section, in.omega_a, in.candidate_modes);
  require(!modes.empty(), ErrorCategory::propagation,
          "omega_a = " + std::to_string(in.omega_a) + " lies below the cutoff of every candidate mode");
  if (in.neglect_tm21) std::erase_if(modes, [](const TMMode& m) { return m.is(2, 1); });

  out.layout = classify_layout(in.atoms);
  out.separation = std::abs(in.atoms[1].z - in.atoms[0].z);

  if (in.explicit_rates) {
    const auto& e = *in.explicit_rates;
    require(e.gamma11 > 0.0 && e.tau1 >= 0.0 && std::isfinite(e.phase), ErrorCategory::config,
            "explicit rates need gamma11 > 0, tau1 >= 0 and a finite phase");
    require(out.layout != Layout::perpendicular || (e.tau1 == 0.0 && e.phase == 0.0), ErrorCategory::config,
            "explicit tau1 and phase must be 0 when the atoms share z");
    require(out.layout == Layout::perpendicular || e.tau1 > 0.0, ErrorCategory::config,
            "explicit tau1 must be positive when the atoms are separated along z");
    const CouplingTable unit = make_coupling_table(modes, in.cross_section, out.atoms, 1.0);
    const double unit_rate = channel_rates(unit).gamma11;
    require(unit_rate > 0.0, ErrorCategory::config, "atom 1 does not couple to TM11; gamma11 cannot be set");
    out.scale = std::sqrt(e.gamma11 / unit_rate);
  } else {
    require(in.scale > 0.0 && std::isfinite(in.scale), ErrorCategory::config, "coupling scale must be positive");
    out.scale = in.scale;
  }

  out.table = make_coupling_table(modes, in.cross_section, out.atoms, out.scale);
  out.rates = channel_rates(out.table);

  const TMMode& tm11 = modes[out.table.find(1, 1)];
  const double k10 = resonant_wavevector(tm11, in.omega_a);
  const double v1 = group_velocity(tm11, in.omega_a);
  for (const auto& mode : modes) {
    ModeData d;
    d.mode = mode;
    d.resonant_k = resonant_wavevector(mode, in.omega_a);
    d.group_velocity = group_velocity(mode, in.omega_a);
    if (in.explicit_rates) {
      d.delay = in.explicit_rates->tau1 * v1 / d.group_velocity;
      d.phase = in.explicit_rates->phase * d.resonant_k / k10;
    } else {
      d.delay = out.separation / d.group_velocity;
      d.phase = d.resonant_k * out.separation;
    }
    out.modes.push_back(d);
  }

  // Retarded equations: self decay from every mode, one delayed channel per
  // mode that couples to both atoms.
  for (std::size_t j = 0; j < modes.size(); ++j) {
    for (int l = 0; l < 2; ++l) out.retarded.self_rate[l] += mode_rate(out.table, j, l, l);
    const double kappa = mode_rate(out.table, j, 0, 1);
    if (kappa == 0.0) continue;
    const auto& d = out.modes[j];
    out.retarded.channels.push_back({1, 0, kappa, d.delay, d.phase});
    out.retarded.channels.push_back({0, 1, kappa, d.delay, d.phase});
  }

  // Master equation: collective terms from every mode coupling both atoms,
  // local dissipators from modes that see only one of them.
  const ExchangeForm form = exchange_form(out.layout);
  out.lindblad.omega_a = in.omega_a;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    std::array<std::array<double, 2>, 2> r{};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) r[a][b] = mode_rate(out.table, j, a, b);
    const bool is_tm11 = modes[j].is(1, 1);
    if (r[0][1] == 0.0 && !is_tm11) {
      out.lindblad.local_decay[0] += r[0][0];
      out.lindblad.local_decay[1] += r[1][1];
      continue;
    }
    const CollectiveRates c = collective_rates_from(r, out.modes[j].phase, form);
    if (is_tm11) out.collective = c;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        out.lindblad.collective_decay(a, b) += c.Gamma[a][b];
        out.lindblad.exchange(a, b) += c.U[a][b];
      }
    }
  }
  return out;
}

}  // namespace wgqed
