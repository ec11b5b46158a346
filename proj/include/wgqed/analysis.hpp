#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "wgqed/error.hpp"
#include "wgqed/trajectory.hpp"

namespace wgqed {

/// Atomic superposition c1 s1^+ |G,0> + c2 s2^+ |G,0> decoupled from a shared
/// mode that couples with strengths (g11, g12).
struct DarkState {
  double c1 = 0.0;
  double c2 = 0.0;
};

inline DarkState dark_state(double g11, double g12) {
  const double norm = std::hypot(g11, g12);
  require(norm > 0.0, ErrorCategory::config, "dark state undefined when both couplings vanish");
  return {g12 / norm, -g11 / norm};
}

struct SteadyPopulations {
  double p1 = 0.0;
  double p2 = 0.0;
  std::optional<double> ratio;  // p1 / p2, absent when p2 == 0
};

/// Long-time populations left in the dark state from a single-excitation
/// atomic state (b1, b2).
inline SteadyPopulations steady_ratio(const DarkState& dark, std::complex<double> b1, std::complex<double> b2) {
  require(std::abs(std::norm(b1) + std::norm(b2) - 1.0) <= 1e-9, ErrorCategory::config,
          "initial atomic amplitudes must be normalized");
  const double overlap = std::norm(dark.c1 * b1 + dark.c2 * b2);
  SteadyPopulations out;
  out.p1 = overlap * dark.c1 * dark.c1;
  out.p2 = overlap * dark.c2 * dark.c2;
  if (out.p2 > 0.0) out.ratio = out.p1 / out.p2;
  return out;
}

struct CurveDistance {
  double sup = 0.0;
  double l2 = 0.0;
};

namespace detail {

inline double interpolate(std::span<const double> t, std::span<const double> v, double x) {
  auto it = std::upper_bound(t.begin(), t.end(), x);
  if (it == t.begin()) return v.front();
  if (it == t.end()) return v.back();
  const std::size_t hi = static_cast<std::size_t>(it - t.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - t[lo]) / (t[hi] - t[lo]);
  return (1.0 - w) * v[lo] + w * v[hi];
}

}  // namespace detail

/// Sup and trapezoid-weighted L2 distance between two sampled curves. When
/// the grids differ, b is linearly resampled onto the points of a inside the
/// common time range.
inline CurveDistance curve_distance(std::span<const double> ta, std::span<const double> a, std::span<const double> tb,
                                    std::span<const double> b) {
  require(ta.size() == a.size() && tb.size() == b.size() && !ta.empty() && !tb.empty(), ErrorCategory::config,
          "curve sizes do not match their time grids");
  const double lo = std::max(ta.front(), tb.front());
  const double hi = std::min(ta.back(), tb.back());
  require(lo <= hi, ErrorCategory::config, "curves have disjoint time ranges");

  const bool shared = std::equal(ta.begin(), ta.end(), tb.begin(), tb.end());
  std::vector<double> t;
  std::vector<double> diff;
  for (std::size_t k = 0; k < ta.size(); ++k) {
    if (ta[k] < lo || ta[k] > hi) continue;
    const double other = shared ? b[k] : detail::interpolate(tb, b, ta[k]);
    t.push_back(ta[k]);
    diff.push_back(a[k] - other);
  }
  CurveDistance out;
  for (double d : diff) out.sup = std::max(out.sup, std::abs(d));
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k)
    acc += 0.5 * (t[k + 1] - t[k]) * (diff[k] * diff[k] + diff[k + 1] * diff[k + 1]);
  out.l2 = std::sqrt(acc);
  return out;
}

enum class Observable { p1, p2 };

inline std::span<const double> observable(const Trajectory& traj, Observable o) {
  return o == Observable::p1 ? std::span<const double>(traj.p1) : std::span<const double>(traj.p2);
}

inline CurveDistance curve_distance(const Trajectory& a, const Trajectory& b, Observable o) {
  return curve_distance(a.t, observable(a, o), b.t, observable(b, o));
}

/// Mean of the trailing `fraction` of a series plus a flatness verdict.
struct SteadyEstimate {
  double mean = 0.0;
  double spread = 0.0;
  bool flat = false;
};

inline SteadyEstimate steady_value(std::span<const double> values, double fraction = 0.05, double flatness = 1e-4) {
  require(!values.empty(), ErrorCategory::config, "empty series");
  const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * values.size())));
  const auto tail = values.subspan(values.size() - count);
  SteadyEstimate out;
  double lo = tail.front();
  double hi = tail.front();
  for (double v : tail) {
    out.mean += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.mean /= static_cast<double>(tail.size());
  out.spread = hi - lo;
  out.flat = out.spread <= flatness;
  return out;
}

enum class ExtremumKind { minimum, maximum };

struct Extremum {
  std::size_t index = 0;
  ExtremumKind kind = ExtremumKind::minimum;
};

/// Interior strict local extrema; changes smaller than `resolution` are ignored.
inline std::vector<Extremum> local_extrema(std::span<const double> v, double resolution = 0.0) {
  std::vector<Extremum> out;
  if (v.size() < 3) return out;
  // Track the direction of the last significant move.
  int direction = 0;
  std::size_t pivot = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double delta = v[k] - v[pivot];
    if (direction >= 0 && delta < -resolution) {
      if (direction > 0) out.push_back({pivot, ExtremumKind::maximum});
      direction = -1;
      pivot = k;
    } else if (direction <= 0 && delta > resolution) {
      if (direction < 0) out.push_back({pivot, ExtremumKind::minimum});
      direction = 1;
      pivot = k;
    } else if ((direction < 0 && v[k] < v[pivot]) || (direction > 0 && v[k] > v[pivot])) {
      pivot = k;
    }
  }
  return out;
}

/// True when the series never rises by more than `resolution` between samples.
inline bool non_increasing(std::span<const double> v, double resolution) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1] + resolution) return false;
  return true;
}

/// A local maximum that follows a local minimum.
inline bool has_revival(std::span<const double> v, double resolution = 0.0) {
  bool seen_min = false;
  for (const auto& e : local_extrema(v, resolution)) {
    if (e.kind == ExtremumKind::minimum) seen_min = true;
    else if (seen_min) return true;
  }
  return false;
}

}  // namespace wgqed
