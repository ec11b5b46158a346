#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "wgqed/error.hpp"

namespace wgqed {

using Amplitudes = std::array<std::complex<double>, 2>;

inline Amplitudes operator+(const Amplitudes& l, const Amplitudes& r) { return {l[0] + r[0], l[1] + r[1]}; }
inline Amplitudes operator*(double s, const Amplitudes& a) { return {s * a[0], s * a[1]}; }

/// Uniform-step record of the two atomic amplitudes with cubic Hermite dense
/// output. Each node keeps the value plus the one-sided derivatives on either
/// side: a delayed source switching on at a node makes the derivative jump
/// there, and the interpolant on each segment must see the derivative of its
/// own side. Everything before t = 0 is the zero pre-history.
class History {
 public:
  explicit History(double step) : step_(step) {
    require(step > 0.0 && std::isfinite(step), ErrorCategory::config, "history step must be positive");
  }

  double step() const { return step_; }
  std::size_t size() const { return values_.size(); }
  double front() const { return values_.empty() ? 0.0 : step_ * static_cast<double>(values_.size() - 1); }

  /// Appends node n = size() with its value and left derivative. The right
  /// derivative defaults to the left one until set_right_derivative().
  void push(const Amplitudes& value, const Amplitudes& left_derivative) {
    values_.push_back(value);
    left_.push_back(left_derivative);
    right_.push_back(left_derivative);
  }

  void set_right_derivative(std::size_t node, const Amplitudes& d) { right_.at(node) = d; }

  const Amplitudes& value(std::size_t node) const { return values_[node]; }
  const Amplitudes& left_derivative(std::size_t node) const { return left_[node]; }
  const Amplitudes& right_derivative(std::size_t node) const { return right_[node]; }

  /// Hermite interpolant on segment [node, node + 1] at fraction theta in [0, 1].
  Amplitudes segment(std::size_t node, double theta) const {
    if (theta == 0.0) return values_[node];
    if (theta == 1.0) return values_[node + 1];
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + theta;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    Amplitudes out;
    for (int i = 0; i < 2; ++i)
      out[i] = h00 * values_[node][i] + h10 * step_ * right_[node][i] + h01 * values_[node + 1][i] +
               h11 * step_ * left_[node + 1][i];
    return out;
  }

  /// Amplitudes at time t. Zero for t <= 0 (the step function vanishes at 0).
  Amplitudes evaluate(double t) const {
    if (t <= 0.0) return {};
    require(!values_.empty() && t <= front() * (1.0 + 1e-12), ErrorCategory::numerical,
            "history query at t = " + std::to_string(t) + " beyond integration front " +
                std::to_string(front()));
    if (values_.size() == 1) return values_[0];
    const double q = t / step_;
    auto node = static_cast<std::size_t>(std::floor(q));
    if (node >= values_.size() - 1) return values_.back();
    return segment(node, q - static_cast<double>(node));
  }

 private:
  double step_;
  std::vector<Amplitudes> values_;
  std::vector<Amplitudes> left_;
  std::vector<Amplitudes> right_;
};

}  // namespace wgqed
