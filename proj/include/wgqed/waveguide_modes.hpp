#pragma once

// Static quantities of a rectangular waveguide with two z-polarized
// two-level atoms: TM mode cutoffs, dispersion, resonant wavevectors,
// group velocities, position-dependent couplings and the decay/exchange
// rates they induce.
//
// Units: hbar = c = eps0 = 1 and lengths in units of the x-extent a. The
// overall coupling magnitude enters only through the dimensionless ratio
// g'_11 / Omega_11 ("scale"), so the dipole moment and the cross-section
// area never appear on their own.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "wgqed/error.hpp"

namespace wgqed {

inline constexpr double speed_of_light = 1.0;

struct CrossSection {
  double a = 1.0;
  double b = 0.5;

  void validate() const {
    require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b), ErrorCategory::geometry,
            "cross section extents must be positive and finite");
  }
};

struct TMMode {
  int m = 1;
  int n = 1;
  double cutoff = 0.0;

  bool is(int mm, int nn) const { return m == mm && n == nn; }
};

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// A two-level atom with its dipole along z.
struct AtomSpec {
  Position position;
  double omega_a = 0.0;

  void validate(const CrossSection& cs) const {
    const auto& p = position;
    require(p.x >= 0.0 && p.x <= cs.a && p.y >= 0.0 && p.y <= cs.b, ErrorCategory::geometry,
            "atom outside cross section: (x, y) = (" + std::to_string(p.x) + ", " +
                std::to_string(p.y) + ")");
    require(omega_a > 0.0, ErrorCategory::geometry, "atomic transition frequency must be positive");
  }
};

inline double cutoff_frequency(int m, int n, const CrossSection& cs) {
  require(m >= 1 && n >= 1, ErrorCategory::config,
          "TM mode indices must be >= 1, got (" + std::to_string(m) + ", " + std::to_string(n) + ")");
  cs.validate();
  const double kx = m * std::numbers::pi / cs.a;
  const double ky = n * std::numbers::pi / cs.b;
  return speed_of_light * std::hypot(kx, ky);
}

inline TMMode make_mode(int m, int n, const CrossSection& cs) {
  return TMMode{m, n, cutoff_frequency(m, n, cs)};
}

inline double dispersion(const TMMode& mode, double k) {
  return std::hypot(mode.cutoff, speed_of_light * k);
}

namespace detail {

inline void require_propagating(const TMMode& mode, double omega_a) {
  if (!(omega_a > mode.cutoff)) {
    std::ostringstream os;
    os << "mode not propagating at this frequency: TM" << mode.m << mode.n << " cutoff "
       << mode.cutoff << " >= omega " << omega_a;
    throw Error(ErrorCategory::propagation, os.str());
  }
}

}  // namespace detail

/// k_j0 = sqrt(omega_a^2 - Omega_j^2) / c.
inline double resonant_wavevector(const TMMode& mode, double omega_a) {
  detail::require_propagating(mode, omega_a);
  return std::sqrt((omega_a - mode.cutoff) * (omega_a + mode.cutoff)) / speed_of_light;
}

/// d omega / dk at the resonant wavevector; always in (0, c).
inline double group_velocity(const TMMode& mode, double omega_a) {
  const double k0 = resonant_wavevector(mode, omega_a);
  return speed_of_light * speed_of_light * k0 / omega_a;
}

/// Modes from `candidates` whose cutoff lies strictly below omega_a, sorted by cutoff.
inline std::vector<TMMode> propagating_modes(const CrossSection& cs, double omega_a,
                                             const std::vector<std::pair<int, int>>& candidates) {
  std::vector<TMMode> out;
  for (auto [m, n] : candidates) {
    TMMode mode = make_mode(m, n, cs);
    if (mode.cutoff < omega_a) out.push_back(mode);
  }
  std::sort(out.begin(), out.end(),
            [](const TMMode& l, const TMMode& r) { return l.cutoff < r.cutoff; });
  return out;
}

inline std::vector<std::pair<int, int>> default_candidate_modes() { return {{1, 1}, {2, 1}, {3, 1}}; }

struct Coupling {
  double raw = 0.0;          // g_jl
  double renormalized = 0.0; // g'_jl = g_jl / sqrt(omega_a)
};

namespace detail {

// sin(p * pi * u / L), returning an exact zero on nodal planes so that
// couplings vanish exactly where the mode profile does.
inline double mode_profile(int p, double u, double extent) {
  const double ratio = p * u / extent;
  if (ratio == std::round(ratio)) return 0.0;
  return std::sin(ratio * std::numbers::pi);
}

}  // namespace detail

/// g'_jl = scale * Omega_j * sin(x m pi / a) sin(y n pi / b); a centered atom
/// in TM11 gets exactly scale * Omega_11. The sign of the profile is kept.
inline Coupling coupling_strength(const TMMode& mode, const CrossSection& cs, const AtomSpec& atom,
                                  double scale) {
  atom.validate(cs);
  const double profile = detail::mode_profile(mode.m, atom.position.x, cs.a) *
                         detail::mode_profile(mode.n, atom.position.y, cs.b);
  Coupling c;
  c.renormalized = scale * mode.cutoff * profile;
  c.raw = c.renormalized * std::sqrt(atom.omega_a);
  return c;
}

/// Couplings of two atoms to every listed mode.
struct CouplingTable {
  std::vector<TMMode> modes;
  std::vector<std::array<Coupling, 2>> entries;  // entries[j][l]: mode j, atom l
  double omega_a = 0.0;

  std::size_t size() const { return modes.size(); }

  /// Index of TM_mn in the table, or -1.
  int find(int m, int n) const {
    for (std::size_t j = 0; j < modes.size(); ++j)
      if (modes[j].is(m, n)) return static_cast<int>(j);
    return -1;
  }
};

inline CouplingTable make_coupling_table(const std::vector<TMMode>& modes, const CrossSection& cs,
                                         const std::array<AtomSpec, 2>& atoms, double scale) {
  require(atoms[0].omega_a == atoms[1].omega_a, ErrorCategory::config,
          "both atoms must share one transition frequency");
  CouplingTable table;
  table.modes = modes;
  table.omega_a = atoms[0].omega_a;
  for (const auto& mode : modes)
    table.entries.push_back({coupling_strength(mode, cs, atoms[0], scale),
                             coupling_strength(mode, cs, atoms[1], scale)});
  return table;
}

/// Weisskopf-Wigner rates. gamma11/gamma12/gamma22 come from TM11;
/// gamma212 (gamma211) collects the self rates of atom 2 (atom 1) from every
/// other propagating mode in the table, i.e. TM21 for the default mode list.
struct ChannelRates {
  double gamma11 = 0.0;
  double gamma12 = 0.0;
  double gamma22 = 0.0;
  double gamma212 = 0.0;
  double gamma211 = 0.0;
};

/// pi g'_ja g'_jb / v_j for mode index j of the table.
inline double mode_rate(const CouplingTable& table, std::size_t j, int atom_a, int atom_b) {
  const double v = group_velocity(table.modes[j], table.omega_a);
  return std::numbers::pi * table.entries[j][atom_a].renormalized *
         table.entries[j][atom_b].renormalized / v;
}

inline ChannelRates channel_rates(const CouplingTable& table) {
  const int j11 = table.find(1, 1);
  require(j11 >= 0, ErrorCategory::propagation, "TM11 is not among the propagating modes");
  ChannelRates r;
  r.gamma11 = mode_rate(table, j11, 0, 0);
  r.gamma12 = mode_rate(table, j11, 0, 1);
  r.gamma22 = mode_rate(table, j11, 1, 1);
  for (std::size_t j = 0; j < table.size(); ++j) {
    if (static_cast<int>(j) == j11) continue;
    r.gamma211 += mode_rate(table, j, 0, 0);
    r.gamma212 += mode_rate(table, j, 1, 1);
  }
  return r;
}

/// How the coherent exchange is read off the complex collective coupling A.
///   centered      Gamma = 2 Re A, U = 2 Im A
///   off_center    Gamma = 2 Re A, U = Im A      (primed rates)
///   perpendicular Gamma = 2 Re A, U = 0         (zero z-separation, A real)
enum class ExchangeForm { centered, off_center, perpendicular };

struct CollectiveRates {
  std::array<std::array<std::complex<double>, 2>, 2> A{};
  std::array<std::array<double, 2>, 2> Gamma{};
  std::array<std::array<double, 2>, 2> U{};
};

/// Collective couplings from the three TM11 rates pi g'_1i g'_1j / v_1 and
/// the propagation phase k_10 |z_1 - z_2|.
inline CollectiveRates collective_rates_from(const std::array<std::array<double, 2>, 2>& rates, double phase,
                                             ExchangeForm form) {
  CollectiveRates out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.A[i][j] = rates[i][j] * std::polar(1.0, i == j ? 0.0 : phase);
      out.Gamma[i][j] = 2.0 * out.A[i][j].real();
      switch (form) {
        case ExchangeForm::centered: out.U[i][j] = 2.0 * out.A[i][j].imag(); break;
        case ExchangeForm::off_center: out.U[i][j] = out.A[i][j].imag(); break;
        case ExchangeForm::perpendicular: out.U[i][j] = 0.0; break;
      }
    }
  }
  return out;
}

/// A_ij = pi g'_1i g'_1j exp(i k_10 |z_i - z_j|) / v_1 over the TM11 mode.
inline CollectiveRates collective_rates(const CouplingTable& table, double z1, double z2, ExchangeForm form) {
  const int j11 = table.find(1, 1);
  require(j11 >= 0, ErrorCategory::propagation, "TM11 is not among the propagating modes");
  const double k0 = resonant_wavevector(table.modes[j11], table.omega_a);
  std::array<std::array<double, 2>, 2> rates{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) rates[i][j] = mode_rate(table, j11, i, j);
  return collective_rates_from(rates, k0 * std::abs(z1 - z2), form);
}

}  // namespace wgqed
