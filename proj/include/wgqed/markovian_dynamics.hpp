#pragma once

// Born-Markov master equation for the two atoms:
//
//   d rho/dt = -i[H, rho]
//              + sum_ij (Gamma_ij / 2)(2 s_j rho s_i^+ - s_i^+ s_j rho - rho s_i^+ s_j)
//              + sum_l r_l (2 s_l rho s_l^+ - s_l^+ s_l rho - rho s_l^+ s_l)
//
//   H = omega_a sum_l s_l^+ s_l + sum_ij (U_ij / 2)(s_i^+ s_j + s_i s_j^+)
//
// in the basis {|gg>, |ge>, |eg>, |ee>} (atom 1 is the high bit). The
// generator is a constant 16x16 matrix acting on column-major vec(rho).

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "wgqed/error.hpp"

namespace wgqed {

using DensityMatrix = Eigen::Matrix4cd;
using Superoperator = Eigen::Matrix<std::complex<double>, 16, 16>;
using VecState = Eigen::Matrix<std::complex<double>, 16, 1>;

namespace basis {
inline constexpr int gg = 0;
inline constexpr int ge = 1;  // atom 2 excited
inline constexpr int eg = 2;  // atom 1 excited
inline constexpr int ee = 3;
}  // namespace basis

/// sigma^- of atom l (0 or 1).
inline Eigen::Matrix4cd lowering(int atom) {
  Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
  if (atom == 0) {
    s(basis::gg, basis::eg) = 1.0;
    s(basis::ge, basis::ee) = 1.0;
  } else {
    s(basis::gg, basis::ge) = 1.0;
    s(basis::eg, basis::ee) = 1.0;
  }
  return s;
}

inline DensityMatrix projector(int index) {
  DensityMatrix rho = DensityMatrix::Zero();
  rho(index, index) = 1.0;
  return rho;
}

/// |psi><psi| for psi = b1 |eg> + b2 |ge>, with any missing weight placed
/// incoherently in |gg>.
inline DensityMatrix state_from_amplitudes(std::complex<double> b1, std::complex<double> b2) {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(basis::eg) = b1;
  psi(basis::ge) = b2;
  DensityMatrix rho = psi * psi.adjoint();
  rho(basis::gg, basis::gg) += std::max(0.0, 1.0 - std::norm(b1) - std::norm(b2));
  return rho;
}

struct Populations {
  double p1 = 0.0;
  double p2 = 0.0;
};

inline Populations populations(const DensityMatrix& rho) {
  return {rho(basis::eg, basis::eg).real() + rho(basis::ee, basis::ee).real(),
          rho(basis::ge, basis::ge).real() + rho(basis::ee, basis::ee).real()};
}

inline double min_eigenvalue(const DensityMatrix& rho) {
  const DensityMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

struct LindbladSpec {
  double omega_a = 0.0;
  Eigen::Matrix2d exchange = Eigen::Matrix2d::Zero();          // U_ij
  Eigen::Matrix2d collective_decay = Eigen::Matrix2d::Zero();  // Gamma_ij
  std::array<double, 2> local_decay{};                         // r_l, e.g. gamma212 on atom 2

  void validate() const {
    require(std::isfinite(omega_a), ErrorCategory::config, "omega_a must be finite");
    require(exchange.allFinite() && collective_decay.allFinite(), ErrorCategory::config,
            "rates must be finite");
    const double scale = std::max(1.0, collective_decay.cwiseAbs().maxCoeff());
    require(std::abs(exchange(0, 1) - exchange(1, 0)) <= 1e-12 * std::max(1.0, exchange.cwiseAbs().maxCoeff()),
            ErrorCategory::config, "exchange couplings must be symmetric");
    require(std::abs(collective_decay(0, 1) - collective_decay(1, 0)) <= 1e-12 * scale, ErrorCategory::config,
            "collective decay matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(0.5 * (collective_decay + collective_decay.transpose()));
    require(solver.eigenvalues().minCoeff() >= -1e-12 * scale, ErrorCategory::config,
            "collective decay matrix is not positive semidefinite");
    for (double r : local_decay)
      require(r >= 0.0 && std::isfinite(r), ErrorCategory::config, "local decay rates must be >= 0");
  }
};

namespace detail {

// Matrix of X -> A X B on column-major vec(X).
inline Superoperator sandwich(const Eigen::Matrix4cd& A, const Eigen::Matrix4cd& B) {
  Superoperator m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (int rp = 0; rp < 4; ++rp)
        for (int cp = 0; cp < 4; ++cp) m(r + 4 * c, rp + 4 * cp) = A(r, rp) * B(cp, c);
  return m;
}

inline Superoperator dissipator(const Eigen::Matrix4cd& jump_right, const Eigen::Matrix4cd& jump_left) {
  // 2 L_j X L_i^+ - L_i^+ L_j X - X L_i^+ L_j
  const Eigen::Matrix4cd I = Eigen::Matrix4cd::Identity();
  const Eigen::Matrix4cd prod = jump_left.adjoint() * jump_right;
  return 2.0 * sandwich(jump_right, jump_left.adjoint()) - sandwich(prod, I) - sandwich(I, prod);
}

inline VecState vec(const DensityMatrix& rho) { return Eigen::Map<const VecState>(rho.data()); }
inline DensityMatrix unvec(const VecState& v) { return Eigen::Map<const DensityMatrix>(v.data()); }

}  // namespace detail

class Generator {
 public:
  explicit Generator(const LindbladSpec& spec) : spec_(spec) {
    spec_.validate();
    const std::array<Eigen::Matrix4cd, 2> s{lowering(0), lowering(1)};
    const Eigen::Matrix4cd I = Eigen::Matrix4cd::Identity();
    const std::complex<double> i(0.0, 1.0);

    Eigen::Matrix4cd H = Eigen::Matrix4cd::Zero();
    for (int l = 0; l < 2; ++l) H += spec.omega_a * s[l].adjoint() * s[l];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        H += 0.5 * spec.exchange(a, b) * (s[a].adjoint() * s[b] + s[a] * s[b].adjoint());
    hamiltonian_ = H;

    matrix_ = -i * (detail::sandwich(H, I) - detail::sandwich(I, H));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        if (spec.collective_decay(a, b) != 0.0)
          matrix_ += 0.5 * spec.collective_decay(a, b) * detail::dissipator(s[b], s[a]);
    for (int l = 0; l < 2; ++l)
      if (spec.local_decay[l] != 0.0) matrix_ += spec.local_decay[l] * detail::dissipator(s[l], s[l]);
  }

  const LindbladSpec& spec() const { return spec_; }
  const Superoperator& matrix() const { return matrix_; }
  const Eigen::Matrix4cd& hamiltonian() const { return hamiltonian_; }

  DensityMatrix apply(const DensityMatrix& rho) const { return detail::unvec(matrix_ * detail::vec(rho)); }

  /// Largest absolute row sum; bounds the stiffness seen by explicit steppers.
  double norm_bound() const { return matrix_.cwiseAbs().rowwise().sum().maxCoeff(); }

 private:
  LindbladSpec spec_;
  Eigen::Matrix4cd hamiltonian_;
  Superoperator matrix_;
};

inline Generator build_generator(const LindbladSpec& spec) { return Generator(spec); }

/// exp(L t) rho0, evaluated densely.
inline DensityMatrix propagate_exact(const Generator& gen, const DensityMatrix& rho0, double t) {
  const Superoperator scaled = gen.matrix() * std::complex<double>(t, 0.0);
  const Superoperator prop = scaled.exp();
  return detail::unvec(prop * detail::vec(rho0));
}

struct MeTrajectory {
  std::vector<double> t;
  std::vector<double> p1;
  std::vector<double> p2;
  std::vector<double> trace;
  std::vector<double> min_eig;
  std::vector<double> p_ee;
  std::vector<DensityMatrix> states;  // filled when requested

  std::size_t size() const { return t.size(); }
};

struct MeOptions {
  double step_norm_product = 0.01;  // RK4 step <= this / norm_bound()
  bool keep_states = false;
};

inline void validate_density_matrix(const DensityMatrix& rho) {
  require(rho.allFinite(), ErrorCategory::config, "density matrix has non-finite entries");
  require((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12, ErrorCategory::config,
          "density matrix is not Hermitian");
  require(std::abs(rho.trace().real() - 1.0) <= 1e-10, ErrorCategory::config, "density matrix trace is not 1");
  require(min_eigenvalue(rho) >= -1e-10, ErrorCategory::config, "density matrix has negative eigenvalues");
}

/// Uniform-step RK4 between consecutive grid times (grid must be non-decreasing
/// and start at or after 0; rho0 is the state at t = 0).
inline MeTrajectory integrate_me(const Generator& gen, const DensityMatrix& rho0, std::span<const double> t_grid,
                                 const MeOptions& opts = {}) {
  validate_density_matrix(rho0);
  const double bound = gen.norm_bound();
  const double h_max = bound > 0.0 ? opts.step_norm_product / bound : std::numeric_limits<double>::infinity();
  const Superoperator& L = gen.matrix();

  MeTrajectory out;
  VecState x = detail::vec(rho0);
  double now = 0.0;
  auto record = [&](double t) {
    const DensityMatrix rho = detail::unvec(x);
    const Populations p = populations(rho);
    out.t.push_back(t);
    out.p1.push_back(p.p1);
    out.p2.push_back(p.p2);
    out.trace.push_back(rho.trace().real());
    out.min_eig.push_back(min_eigenvalue(rho));
    out.p_ee.push_back(rho(basis::ee, basis::ee).real());
    if (opts.keep_states) out.states.push_back(rho);
  };
  for (double target : t_grid) {
    require(target >= now, ErrorCategory::config, "ME time grid must be non-decreasing and start at >= 0");
    const double span = target - now;
    if (span > 0.0) {
      const auto n = static_cast<std::size_t>(std::ceil(span / h_max));
      const double h = span / static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k) {
        const VecState k1 = L * x;
        const VecState k2 = L * (x + 0.5 * h * k1);
        const VecState k3 = L * (x + 0.5 * h * k2);
        const VecState k4 = L * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      now = target;
    }
    record(target);
  }
  return out;
}

/// Slowest nonzero decay rate of the generator (smallest nonzero |Re lambda|),
/// or 0 when the generator is purely coherent.
inline double slowest_decay_rate(const Generator& gen) {
  Eigen::ComplexEigenSolver<Superoperator> solver(gen.matrix(), false);
  const auto& ev = solver.eigenvalues();
  double largest = 0.0;
  for (int k = 0; k < ev.size(); ++k) largest = std::max(largest, std::abs(ev(k).real()));
  if (largest == 0.0) return 0.0;
  double slowest = largest;
  for (int k = 0; k < ev.size(); ++k) {
    const double r = std::abs(ev(k).real());
    if (r > 1e-9 * largest) slowest = std::min(slowest, r);
  }
  return slowest;
}

/// Fixed point reached from rho0: the propagator applied for 50 slowest
/// decay times. Which fixed point is reached depends on rho0 when the kernel
/// holds a dark state besides the vacuum.
inline DensityMatrix steady_state(const Generator& gen, const DensityMatrix& rho0) {
  validate_density_matrix(rho0);
  const double rate = slowest_decay_rate(gen);
  require(rate > 0.0, ErrorCategory::numerical, "generator has no dissipation; no steady state is approached");
  DensityMatrix rho = propagate_exact(gen, rho0, 50.0 / rate);
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace wgqed
