#pragma once

#include "ctsdyn/assembly.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace cts {

/// Dynamics linearized about an equilibrium, with the state-space realization
/// dz/dt = A z + B [d f_ex; d l_0c], z = [d n_a; d v_a]. Boundary-motion
/// feedthrough blocks are kept for callers that drive constrained coordinates.
struct LinearModel {
  Mat m_aa, d_aa, kt_aa;
  Mat m_ab, d_ab, kt_ab;
  Mat a;  // 2 n_a x 2 n_a
  Mat b;  // 2 n_a x (3 n_n + n_ec)
  std::vector<int> free;
};

inline LinearModel linearize(const StructureModel& model, const Vec& n_eq, const Vec& l_0c,
                             const std::vector<MemberState>& states, double zeta = 0.0) {
  const AssemblySet as = assemble(model, n_eq, l_0c, states);
  const int n_a = static_cast<int>(as.free.size());

  LinearModel lm;
  lm.free = as.free;
  lm.m_aa = as.m_aa;
  lm.d_aa = zeta * as.d_aa;
  lm.kt_aa = as.kt_aa;
  lm.m_ab = as.m_ab;
  lm.d_ab = zeta * as.d_ab;
  lm.kt_ab = as.kt_ab;

  Eigen::LLT<Mat> llt(as.m_aa);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("linearize: singular mass matrix on the free coordinates");

  lm.a = Mat::Zero(2 * n_a, 2 * n_a);
  lm.a.topRightCorner(n_a, n_a) = Mat::Identity(n_a, n_a);
  lm.a.bottomLeftCorner(n_a, n_a) = -llt.solve(lm.kt_aa);
  lm.a.bottomRightCorner(n_a, n_a) = -llt.solve(lm.d_aa);

  const int n_coords = model.n_coords();
  const int n_ec = model.n_elements();
  lm.b = Mat::Zero(2 * n_a, n_coords + n_ec);
  const Mat m_inv = llt.solve(Mat::Identity(n_a, n_a));
  for (int i = 0; i < n_a; ++i) lm.b.block(n_a, as.free[i], n_a, 1) = m_inv.col(i);
  Mat k_l0_a(n_a, n_ec);
  for (int i = 0; i < n_a; ++i) k_l0_a.row(i) = as.k_l0c.row(as.free[i]);
  lm.b.bottomRightCorner(n_a, n_ec) = -llt.solve(k_l0_a);
  return lm;
}

/// Undamped vibration modes about an equilibrium: K_Taa phi = omega^2 M_aa phi
/// with M-orthonormal shapes, frequencies ascending. Modes below
/// rigid_tol * omega_max count as rigid-body or mechanism modes.
struct ModalResult {
  Vec omega;      // rad/s
  Vec frequency;  // Hz
  Mat shapes;     // n_a x n_a, column i pairs with omega[i]
  int rigid_modes = 0;
  Vec eigenvalues;  // raw generalized eigenvalues omega^2
};

struct ModalOptions {
  double rigid_tol = 1e-5;
};

inline ModalResult modal(const StructureModel& model, const Vec& n_eq, const Vec& l_0c,
                         const std::vector<MemberState>& states, const ModalOptions& opt = {}) {
  const AssemblySet as = assemble(model, n_eq, l_0c, states);
  Eigen::LLT<Mat> llt(as.m_aa);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("modal: mass matrix is not positive definite on free coordinates");

  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(as.kt_aa, as.m_aa);
  if (es.info() != Eigen::Success) throw std::runtime_error("modal: eigensolver failed");

  ModalResult mr;
  mr.eigenvalues = es.eigenvalues();
  mr.shapes = es.eigenvectors();
  const Index n = mr.eigenvalues.size();
  mr.omega.resize(n);
  for (Index i = 0; i < n; ++i) mr.omega[i] = std::sqrt(std::max(0.0, mr.eigenvalues[i]));
  mr.frequency = mr.omega / (2.0 * M_PI);

  const double omega_max = n > 0 ? mr.omega[n - 1] : 0.0;
  for (Index i = 0; i < n; ++i)
    if (mr.omega[i] < opt.rigid_tol * omega_max) ++mr.rigid_modes;
  return mr;
}

}  // namespace cts
