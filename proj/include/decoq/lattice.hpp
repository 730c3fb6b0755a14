#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "decoq/constants.hpp"
#include "decoq/params.hpp"
#include "decoq/quadrature.hpp"

namespace decoq {

// Vibrational Hessian of the trapped-ion array: per-site harmonic confinement
// plus the electrostatic coupling between every ion pair, expanded to second
// order around the lattice sites. Row/column layout is 3*i + alpha.
struct Hessian {
  Eigen::MatrixXd v;                       // N/m, symmetric, 3N x 3N
  std::vector<Eigen::Vector3d> sites;      // equilibrium positions r_i0
};

struct VibrationalSpectrum {
  std::vector<double> frequencies;  // nu_K, rad/s, ascending; zero modes clamped to 0
  Eigen::MatrixXd modes;            // orthogonal, column K = S_{i alpha;K}
  double nu_max = 0;
};

inline std::vector<Eigen::Vector3d> lattice_sites(const LatticeSpec& spec) {
  std::vector<Eigen::Vector3d> sites;
  sites.reserve(static_cast<size_t>(spec.dims[0]) * spec.dims[1] * spec.dims[2]);
  for (int x = 0; x < spec.dims[0]; ++x)
    for (int y = 0; y < spec.dims[1]; ++y)
      for (int z = 0; z < spec.dims[2]; ++z)
        sites.emplace_back(x * spec.spacing, y * spec.spacing, z * spec.spacing);
  return sites;
}

inline Hessian build_hessian(const LatticeSpec& spec) {
  const auto sites = lattice_sites(spec);
  const int n = static_cast<int>(sites.size());
  const double coul = spec.ion_charge * spec.ion_charge /
                      (4.0 * M_PI * constants::epsilon0);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(3 * n, 3 * n);

  const double trap_k = spec.ion_mass * spec.trap_freq * spec.trap_freq;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a) v(3 * i + a, 3 * i + a) = trap_k;

  // Pair term: d2/dr_ia dr_jb of coul/|r_i - r_j| at the lattice sites gives
  // -T for the (i,j) block and +T for each diagonal block, with
  // T_ab = coul (3 d_a d_b - delta_ab d^2) / d^5.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::Vector3d d = sites[i] - sites[j];
      const double r2 = d.squaredNorm();
      if (r2 <= 0)
        throw std::invalid_argument("lattice: coincident ion positions");
      const double r = std::sqrt(r2);
      const double r5 = r2 * r2 * r;
      Eigen::Matrix3d t;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          t(a, b) = coul * (3.0 * d(a) * d(b) - (a == b ? r2 : 0.0)) / r5;
      v.block<3, 3>(3 * i, 3 * j) = -t;
      v.block<3, 3>(3 * j, 3 * i) = -t;
      v.block<3, 3>(3 * i, 3 * i) += t;
      v.block<3, 3>(3 * j, 3 * j) += t;
    }
  }
  return {std::move(v), sites};
}

namespace detail {

// Deterministic eigenvector orientation: largest-magnitude entry made positive.
inline void fix_column_sign(Eigen::MatrixXd& m, int col) {
  int imax = 0;
  double best = 0;
  for (int r = 0; r < m.rows(); ++r)
    if (std::abs(m(r, col)) > best) {
      best = std::abs(m(r, col));
      imax = r;
    }
  if (m(imax, col) < 0) m.col(col) = -m.col(col);
}

}  // namespace detail

inline VibrationalSpectrum solve_modes(const Hessian& h, double ion_mass) {
  const Eigen::Index dim = h.v.rows();
  {
    const double scale = std::max(h.v.cwiseAbs().maxCoeff(), 1e-300);
    const double asym = (h.v - h.v.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
      throw std::invalid_argument("lattice: hessian is not symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.v);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("lattice: eigensolver failed");
  Eigen::VectorXd evals = solver.eigenvalues();
  Eigen::MatrixXd evecs = solver.eigenvectors();

  const double emax = std::max(evals.cwiseAbs().maxCoeff(), 1e-300);
  const double eps = 1e-8 * emax;
  for (Eigen::Index k = 0; k < dim; ++k) {
    if (evals(k) < -eps)
      throw std::runtime_error("lattice: negative stiffness eigenvalue, unstable configuration");
    if (evals(k) < 0) evals(k) = 0;
    detail::fix_column_sign(evecs, static_cast<int>(k));
  }

  // Ascending order with lexicographic tie-breaking inside degenerate blocks.
  std::vector<int> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(evals(a) - evals(b)) > 1e-12 * emax) return evals(a) < evals(b);
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double d = evecs(r, a) - evecs(r, b);
      if (std::abs(d) > 1e-12) return d < 0;
    }
    return false;
  });

  VibrationalSpectrum out;
  out.frequencies.resize(dim);
  out.modes.resize(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    out.frequencies[k] = std::sqrt(evals(order[k]) / ion_mass);
    out.modes.col(k) = evecs.col(order[k]);
  }
  out.nu_max = out.frequencies.empty() ? 0.0 : out.frequencies.back();

  // Checked on every solve: orthogonality of S and the per-mode residual of
  // m nu_K^2 S_K = V S_K, both against the spectral scale.
  const double ortho = (out.modes.transpose() * out.modes -
                        Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (ortho > 1e-10)
    throw std::runtime_error("lattice: mode matrix lost orthogonality");
  const Eigen::MatrixXd resid = h.v * out.modes;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double lam = ion_mass * out.frequencies[k] * out.frequencies[k];
    const double r = (resid.col(k) - lam * out.modes.col(k)).cwiseAbs().maxCoeff();
    if (r > 1e-8 * emax)
      throw std::runtime_error("lattice: eigen residual above tolerance");
  }
  return out;
}

inline double lamb_dicke(double wavevector, double ion_mass, double nu) {
  if (!(nu > 0))
    throw std::domain_error("lattice: zero-frequency mode carries no Lamb-Dicke weight");
  return std::abs(wavevector) * std::sqrt(constants::hbar / (2.0 * ion_mass * nu));
}

// Picks the per-site trap frequency so the solved top of the band equals
// target_nu_max. Monotone in trap_freq, so bisection converges unconditionally.
inline double calibrate_trap_freq(const LatticeSpec& spec, double target_nu_max,
                                  double rel_tol = 0.01) {
  if (!(target_nu_max > 0))
    throw std::invalid_argument("lattice: calibration target must be > 0");
  auto solved_numax = [&](double trap) {
    LatticeSpec s = spec;
    s.trap_freq = trap;
    return solve_modes(build_hessian(s), s.ion_mass).nu_max;
  };
  double lo = target_nu_max * 1e-2;
  double hi = target_nu_max * 1e2;
  // The Coulomb part only stiffens the top mode, so nu_max(trap) >= trap and
  // the bracket below always straddles the target.
  while (solved_numax(lo) > target_nu_max) lo *= 0.5;
  return bisect_increasing(solved_numax, lo, hi, target_nu_max, rel_tol);
}

inline LatticeSpec with_calibrated_trap(const LatticeSpec& spec, double target_nu_max) {
  LatticeSpec out = spec;
  if (out.trap_freq <= 0) out.trap_freq = calibrate_trap_freq(spec, target_nu_max);
  return out;
}

}  // namespace decoq
