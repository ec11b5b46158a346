#pragma once

#include <complex>
#include <vector>

namespace wgqed {

/// Sampled atomic dynamics. Amplitude engines fill b1/b2; the master
/// equation fills only the populations.
struct Trajectory {
  std::vector<double> t;
  std::vector<std::complex<double>> b1;
  std::vector<std::complex<double>> b2;
  std::vector<double> p1;
  std::vector<double> p2;

  std::size_t size() const { return t.size(); }
  bool has_amplitudes() const { return b1.size() == t.size() && !t.empty(); }

  void push(double time, std::complex<double> a1, std::complex<double> a2) {
    t.push_back(time);
    b1.push_back(a1);
    b2.push_back(a2);
    p1.push_back(std::norm(a1));
    p2.push_back(std::norm(a2));
  }
};

/// Uniform grid of `samples` points on [0, t_end].
inline std::vector<double> uniform_grid(double t_end, std::size_t samples) {
  std::vector<double> t(samples);
  if (samples == 1) {
    t[0] = 0.0;
    return t;
  }
  for (std::size_t k = 0; k < samples; ++k)
    t[k] = t_end * static_cast<double>(k) / static_cast<double>(samples - 1);
  return t;
}

}  // namespace wgqed
