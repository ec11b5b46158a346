#pragma once

// Brute-force single-excitation Schrodinger evolution of two atoms and a
// discretized waveguide continuum. Each propagating TM branch is sampled on a
// uniform, symmetric k grid; the atomic amplitudes B_l and the field
// amplitudes b_jp = sqrt(dk) B_j(k_p) obey
//
//   dB_l/dt  = -sum_jp conj(G_jlp) b_jp e^{-i (w_jp - w_a) t}
//   db_jp/dt =  sum_l  G_jlp B_l e^{+i (w_jp - w_a) t}
//   G_jlp    =  gf_jl sqrt(dk / w_jp) e^{i k_p z_l}
//
// with the full 1/sqrt(w) dependence, so no Weisskopf-Wigner reduction is
// made. The field coupling gf = g_raw / sqrt(2) makes the resonant continuum
// reproduce the decay rate pi g'^2 / v used by the reduced models.

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "wgqed/error.hpp"
#include "wgqed/trajectory.hpp"
#include "wgqed/waveguide_modes.hpp"

namespace wgqed {

struct ModeGrid {
  TMMode mode;
  double omega_a = 0.0;
  double resonant_k = 0.0;
  double group_velocity = 0.0;
  double dk = 0.0;
  std::vector<double> k;
  std::vector<double> omega;
  std::vector<double> detuning;  // omega - omega_a
  std::array<std::vector<std::complex<double>>, 2> coupling;

  std::size_t size() const { return k.size(); }

  /// Recurrence time of the discretized branch.
  double revival_time() const { return 2.0 * std::numbers::pi / (dk * group_velocity); }
};

/// Half-width of the k window that places the band edge of the window
/// `window_rates` reference rates above the atomic frequency.
inline double default_k_max(const TMMode& mode, double omega_a, double reference_rate, double window_rates = 40.0) {
  const double w = omega_a + window_rates * reference_rate;
  return std::sqrt((w - mode.cutoff) * (w + mode.cutoff)) / speed_of_light;
}

/// `raw` holds g_raw of both atoms for this mode, `z` their positions.
inline ModeGrid build_grid(const TMMode& mode, const std::array<double, 2>& raw, const std::array<double, 2>& z,
                           double omega_a, double k_max, std::size_t n) {
  require(n >= 3 && n % 2 == 1, ErrorCategory::config, "oracle grid size must be odd and >= 3");
  ModeGrid g;
  g.mode = mode;
  g.omega_a = omega_a;
  g.resonant_k = resonant_wavevector(mode, omega_a);
  g.group_velocity = group_velocity(mode, omega_a);
  require(k_max > g.resonant_k, ErrorCategory::config,
          "oracle k window " + std::to_string(k_max) + " does not contain the resonance k = " +
              std::to_string(g.resonant_k));
  g.dk = 2.0 * k_max / static_cast<double>(n - 1);
  const std::size_t half = n / 2;
  g.k.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double index = static_cast<double>(p) - static_cast<double>(half);
    g.k[p] = index * g.dk;
  }
  g.omega.resize(n);
  g.detuning.resize(n);
  for (int l = 0; l < 2; ++l) g.coupling[l].resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    g.omega[p] = dispersion(mode, g.k[p]);
    g.detuning[p] = g.omega[p] - omega_a;
    for (int l = 0; l < 2; ++l) {
      const double amplitude = raw[l] / std::numbers::sqrt2 * std::sqrt(g.dk / g.omega[p]);
      g.coupling[l][p] = amplitude * std::polar(1.0, g.k[p] * z[l]);
    }
  }
  return g;
}

struct OracleConfig {
  std::size_t n = 4001;
  double k_max = 0.0;        // 0: default_k_max per branch
  double k_max_scale = 1.0;  // multiplies the automatic window
  double window_rates = 40.0;
  double rtol = 1e-8;
  double atol = 1e-12;
};

/// Grids for every table mode that couples to at least one atom.
inline std::vector<ModeGrid> build_grids(const CouplingTable& table, const std::array<double, 2>& z,
                                         double reference_rate, const OracleConfig& cfg) {
  std::vector<ModeGrid> grids;
  for (std::size_t j = 0; j < table.size(); ++j) {
    const auto& e = table.entries[j];
    if (e[0].raw == 0.0 && e[1].raw == 0.0) continue;
    const TMMode& mode = table.modes[j];
    const double k_max = cfg.k_max > 0.0
                             ? cfg.k_max
                             : cfg.k_max_scale * default_k_max(mode, table.omega_a, reference_rate, cfg.window_rates);
    grids.push_back(build_grid(mode, {e[0].raw, e[1].raw}, z, table.omega_a, k_max, cfg.n));
  }
  return grids;
}

struct OracleResult {
  Trajectory atoms;
  std::vector<double> field_norm;
  std::vector<double> total_norm;
  double revival_time = 0.0;
};

inline double revival_horizon(std::span<const ModeGrid> grids) {
  double t = std::numeric_limits<double>::infinity();
  for (const auto& g : grids) t = std::min(t, g.revival_time());
  return t;
}

namespace detail {

struct FullSystem {
  std::span<const ModeGrid> grids;

  void operator()(const std::vector<std::complex<double>>& x, std::vector<std::complex<double>>& dxdt,
                  double t) const {
    const std::complex<double> b1 = x[0];
    const std::complex<double> b2 = x[1];
    std::complex<double> d1 = 0.0;
    std::complex<double> d2 = 0.0;
    std::size_t offset = 2;
    for (const auto& g : grids) {
      const auto& c1 = g.coupling[0];
      const auto& c2 = g.coupling[1];
      for (std::size_t p = 0; p < g.size(); ++p) {
        const std::complex<double> rot = std::polar(1.0, g.detuning[p] * t);
        const std::complex<double> field = x[offset + p];
        dxdt[offset + p] = (c1[p] * b1 + c2[p] * b2) * rot;
        const std::complex<double> back = field * std::conj(rot);
        d1 -= std::conj(c1[p]) * back;
        d2 -= std::conj(c2[p]) * back;
      }
      offset += g.size();
    }
    dxdt[0] = d1;
    dxdt[1] = d2;
  }
};

}  // namespace detail

/// Integrates the full model from atomic amplitudes `initial` and an empty
/// field; times must stay below the revival horizon of every branch.
inline OracleResult integrate_full(std::span<const ModeGrid> grids, const std::array<std::complex<double>, 2>& initial,
                                   std::span<const double> t_grid, const OracleConfig& cfg = {}) {
  namespace odeint = boost::numeric::odeint;
  require(!t_grid.empty(), ErrorCategory::config, "oracle time grid is empty");
  require(t_grid.front() == 0.0, ErrorCategory::config, "oracle time grid must start at 0");
  require(std::abs(std::norm(initial[0]) + std::norm(initial[1]) - 1.0) <= 1e-12, ErrorCategory::config,
          "oracle initial state must have unit norm");

  OracleResult out;
  out.revival_time = revival_horizon(grids);
  require(t_grid.back() < out.revival_time, ErrorCategory::config,
          "oracle horizon " + std::to_string(t_grid.back()) + " exceeds grid revival time t_rev = " +
              std::to_string(out.revival_time));

  std::size_t dim = 2;
  for (const auto& g : grids) dim += g.size();
  std::vector<std::complex<double>> x(dim, 0.0);
  x[0] = initial[0];
  x[1] = initial[1];

  auto observe = [&](const std::vector<std::complex<double>>& s, double t) {
    double field = 0.0;
    for (std::size_t i = 2; i < s.size(); ++i) field += std::norm(s[i]);
    out.atoms.push(t, s[0], s[1]);
    out.field_norm.push_back(field);
    out.total_norm.push_back(field + std::norm(s[0]) + std::norm(s[1]));
  };

  if (t_grid.size() == 1) {
    observe(x, 0.0);
    return out;
  }
  using State = std::vector<std::complex<double>>;
  auto stepper = odeint::make_dense_output(cfg.atol, cfg.rtol, odeint::runge_kutta_dopri5<State>());
  const double dt0 = std::min(1e-3, t_grid[1] - t_grid[0]);
  odeint::integrate_times(stepper, detail::FullSystem{grids}, x, t_grid.begin(), t_grid.end(), dt0, observe);
  return out;
}

}  // namespace wgqed
