#pragma once

// Two-atom retarded amplitude equations
//
//   dB_i/dt = -G_i B_i - sum_c kappa_c e^{i phi_c} Theta(t - tau_c) B_src(c)(t - tau_c)
//
// integrated by classical RK4 under the method of steps. The step divides
// the shortest positive delay, so every delayed argument trails the
// integration front by at least one step and is read from the Hermite dense
// output of completed steps. Channels with zero delay act instantaneously.
//
// Within a step the right-hand side takes the delayed source from the
// segment that step maps onto, so a source switching on at t = tau enters
// through the right limit for the step starting at tau and through the left
// limit (Theta(0) = 0) for the step ending there.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "wgqed/error.hpp"
#include "wgqed/history.hpp"
#include "wgqed/trajectory.hpp"

namespace wgqed {

struct DelayChannel {
  int source = 0;  // atom whose delayed amplitude drives the channel
  int target = 1;  // atom whose equation receives it
  double strength = 0.0;
  double delay = 0.0;
  double phase = 0.0;
};

struct RetardedSystem {
  std::array<double, 2> self_rate{};
  std::vector<DelayChannel> channels;

  void validate() const {
    for (double g : self_rate)
      require(g >= 0.0 && std::isfinite(g), ErrorCategory::config, "self decay rates must be >= 0");
    for (const auto& c : channels) {
      require(c.source >= 0 && c.source < 2 && c.target >= 0 && c.target < 2, ErrorCategory::config,
              "channel atoms must be 0 or 1");
      require(c.delay >= 0.0 && std::isfinite(c.delay), ErrorCategory::config,
              "channel delays must be >= 0");
      require(std::isfinite(c.strength) && std::isfinite(c.phase), ErrorCategory::config,
              "channel strength and phase must be finite");
    }
  }

  std::optional<double> shortest_delay() const {
    std::optional<double> out;
    for (const auto& c : channels)
      if (c.delay > 0.0 && c.strength != 0.0) out = out ? std::min(*out, c.delay) : c.delay;
    return out;
  }

  double fastest_rate() const {
    double r = std::max(self_rate[0], self_rate[1]);
    for (const auto& c : channels) r = std::max(r, std::abs(c.strength));
    return r;
  }
};

struct SolverConfig {
  double step = 0.0;               // 0: choose automatically
  std::size_t steps_per_delay = 0;  // 0: choose automatically
  std::size_t min_steps_per_delay = 200;
  double rate_step_product = 0.01;  // upper bound on step * fastest rate
  std::size_t samples = 2000;
};

/// Integration step for `system` under `cfg`. A positive shortest delay must
/// be an integer multiple of the step.
inline double choose_step(const RetardedSystem& system, double t_end, const SolverConfig& cfg) {
  const auto tau = system.shortest_delay();
  const double rate = system.fastest_rate();
  if (cfg.step > 0.0) {
    if (tau) {
      const double ratio = *tau / cfg.step;
      require(ratio >= 1.0 - 1e-9 && std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio,
              ErrorCategory::config,
              "step " + std::to_string(cfg.step) + " not commensurate with shortest delay " +
                  std::to_string(*tau));
      return *tau / std::round(ratio);
    }
    return cfg.step;
  }
  if (tau) {
    std::size_t n = cfg.steps_per_delay;
    if (n == 0) {
      n = cfg.min_steps_per_delay;
      if (rate > 0.0) n = std::max(n, static_cast<std::size_t>(std::ceil(*tau * rate / cfg.rate_step_product)));
    }
    return *tau / static_cast<double>(n);
  }
  if (rate > 0.0) return cfg.rate_step_product / rate;
  return t_end > 0.0 ? t_end / 2000.0 : 1.0;
}

class RetardedIntegrator {
 public:
  RetardedIntegrator(const RetardedSystem& system, const Amplitudes& initial, double step)
      : system_(system), history_(step) {
    system_.validate();
    require(std::norm(initial[0]) + std::norm(initial[1]) <= 1.0 + 1e-12, ErrorCategory::config,
            "initial atomic populations exceed one");
    for (const auto& c : system_.channels) {
      Channel ch;
      ch.source = c.source;
      ch.target = c.target;
      ch.coefficient = c.strength * std::polar(1.0, c.phase);
      ch.instantaneous = c.delay == 0.0;
      if (!ch.instantaneous) {
        double d = c.delay / step;
        require(d >= 1.0 - 1e-9, ErrorCategory::config, "step exceeds a channel delay");
        if (std::abs(d - std::round(d)) <= 1e-9 * d) d = std::round(d);
        ch.delay_steps = d;
      }
      channels_.push_back(ch);
    }
    const Amplitudes d0 = rhs(0, 0.0, initial);
    history_.push(initial, d0);
  }

  const History& history() const { return history_; }
  double step() const { return history_.step(); }
  double front() const { return history_.front(); }

  /// Advances until the front reaches t_end (rounded up to a whole step).
  void advance_to(double t_end) {
    const double h = history_.step();
    const auto target = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
    require(target < 100'000'000, ErrorCategory::numerical, "too many integration steps requested");
    while (history_.size() - 1 < target) advance_one();
  }

  void advance_one() {
    const double h = history_.step();
    const std::size_t n = history_.size() - 1;
    const Amplitudes y = history_.value(n);
    const Amplitudes k1 = rhs(n, 0.0, y);
    history_.set_right_derivative(n, k1);
    const Amplitudes k2 = rhs(n, 0.5, y + (0.5 * h) * k1);
    const Amplitudes k3 = rhs(n, 0.5, y + (0.5 * h) * k2);
    const Amplitudes k4 = rhs(n, 1.0, y + h * k3);
    Amplitudes next;
    for (int i = 0; i < 2; ++i) next[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    history_.push(next, rhs(n, 1.0, next));
  }

  /// Samples the dense output; every time must lie within [0, front].
  Trajectory sample(std::span<const double> times) const {
    Trajectory out;
    out.t.reserve(times.size());
    for (double t : times) {
      Amplitudes a = t == 0.0 ? history_.value(0) : history_.evaluate(t);
      out.push(t, a[0], a[1]);
    }
    return out;
  }

 private:
  struct Channel {
    int source = 0;
    int target = 0;
    std::complex<double> coefficient;
    bool instantaneous = false;
    double delay_steps = 0.0;
  };

  // Delayed amplitudes for stage fraction c of step n; the step maps onto
  // [n - D, n + 1 - D] in node units.
  Amplitudes delayed(double delay_steps, std::size_t n, double c) const {
    const double q0 = static_cast<double>(n) - delay_steps;
    const double qc = q0 + c;
    if (qc < 0.0 || (qc == 0.0 && q0 < 0.0)) return {};
    auto node = static_cast<std::size_t>(std::floor(qc));
    double theta = qc - static_cast<double>(node);
    if (theta == 0.0 && node > 0 && static_cast<double>(node) > q0) {
      --node;
      theta = 1.0;
    }
    if (theta == 0.0) return history_.value(node);
    return history_.segment(node, theta);
  }

  Amplitudes rhs(std::size_t n, double c, const Amplitudes& y) const {
    Amplitudes out{-system_.self_rate[0] * y[0], -system_.self_rate[1] * y[1]};
    for (const auto& ch : channels_) {
      const std::complex<double> src =
          ch.instantaneous ? y[ch.source] : delayed(ch.delay_steps, n, c)[ch.source];
      out[ch.target] -= ch.coefficient * src;
    }
    return out;
  }

  RetardedSystem system_;
  History history_;
  std::vector<Channel> channels_;
};

/// Integrates on [0, t_end] and samples cfg.samples uniform points.
inline Trajectory integrate_retarded(const RetardedSystem& system, const Amplitudes& initial, double t_end,
                                     const SolverConfig& cfg = {}) {
  require(t_end >= 0.0 && std::isfinite(t_end), ErrorCategory::config, "t_end must be >= 0");
  require(cfg.samples >= 1, ErrorCategory::config, "sample count must be >= 1");
  RetardedIntegrator integrator(system, initial, choose_step(system, t_end, cfg));
  integrator.advance_to(t_end);
  const auto grid = uniform_grid(t_end, t_end > 0.0 ? cfg.samples : 1);
  return integrator.sample(grid);
}

inline Amplitudes evaluate_history(const History& history, double t) { return history.evaluate(t); }

}  // namespace wgqed
