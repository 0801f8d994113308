#pragma once

#include "ctsdyn/forces.hpp"
#include "ctsdyn/model.hpp"

#include <vector>

namespace cts {

namespace detail {

/// (X + X^T)/2 with a guard against real asymmetry; assembly only ever
/// produces symmetric matrices up to rounding.
inline Mat symmetrize(const Mat& x) {
  const double scale = std::max(1.0, x.norm());
  if ((x - x.transpose()).norm() > 1e-12 * scale)
    throw std::logic_error("assembled matrix is not symmetric");
  return 0.5 * (x + x.transpose());
}

}  // namespace detail

/// Consistent mass matrix: per member the (m/6)[[2,1],[1,2]] (x) I3 block.
inline Mat mass_matrix(const StructureModel& model, const Vec& m_seg) {
  Mat mm = Mat::Zero(model.n_coords(), model.n_coords());
  for (int j = 0; j < model.n_members(); ++j) {
    const int t = 3 * model.members[j].tail;
    const int h = 3 * model.members[j].head;
    const double m6 = m_seg[j] / 6.0;
    for (int d = 0; d < 3; ++d) {
      mm(t + d, t + d) += 2.0 * m6;
      mm(h + d, h + d) += 2.0 * m6;
      mm(t + d, h + d) += m6;
      mm(h + d, t + d) += m6;
    }
  }
  return mm;
}

/// Force-density (geometry) stiffness K = (C^T diag(x) C) (x) I3.
inline Mat stiffness_matrix(const StructureModel& model, const Vec& x_seg) {
  Mat k = Mat::Zero(model.n_coords(), model.n_coords());
  for (int j = 0; j < model.n_members(); ++j) {
    const int t = 3 * model.members[j].tail;
    const int h = 3 * model.members[j].head;
    const double x = x_seg[j];
    for (int d = 0; d < 3; ++d) {
      k(t + d, t + d) += x;
      k(h + d, h + d) += x;
      k(t + d, h + d) -= x;
      k(h + d, t + d) -= x;
    }
  }
  return k;
}

/// Nodal gravity force, half of each member's mass lumped at its two ends.
inline Vec gravity_vector(const StructureModel& model, const Vec& m_seg) {
  Vec g = Vec::Zero(model.n_coords());
  for (int j = 0; j < model.n_members(); ++j) {
    const Vec3 w = 0.5 * m_seg[j] * model.gravity;
    g.segment<3>(3 * model.members[j].tail) += w;
    g.segment<3>(3 * model.members[j].head) += w;
  }
  return g;
}

struct EquilibriumMatrices {
  Mat a2c;  // 3 n_n x n_ec, maps element forces to nodal forces
  Mat a1c;  // 3 n_n x n_ec, maps force densities, a2c * diag(l_c)
};

/// Column e of A_2c scatters +-h/l at the end nodes of every segment of
/// element e. A_1c = A_2c diag(l_c).
inline EquilibriumMatrices equilibrium_matrices(const StructureModel& model,
                                                const MemberGeometry& geo) {
  const Vec l_c = cluster_lengths(model, geo.l);
  EquilibriumMatrices em;
  em.a2c = Mat::Zero(model.n_coords(), model.n_elements());
  for (int e = 0; e < model.n_elements(); ++e)
    for (int m : model.clustering.elements[e]) {
      const Vec3 dir = geo.h.col(m) / geo.l[m];
      em.a2c.col(e).segment<3>(3 * model.members[m].tail) -= dir;
      em.a2c.col(e).segment<3>(3 * model.members[m].head) += dir;
    }
  em.a1c = em.a2c * l_c.asDiagonal();
  return em;
}

/// B_lc = A_2c^T; built from the same construction so the identity is bitwise.
inline Mat compatibility_matrix(const Mat& a2c) { return a2c.transpose(); }

/// D = A_2c diag(d_c) A_2c^T; the global damping ratio scales it at run time.
inline Mat damping_matrix(const StructureModel& model, const Mat& a2c) {
  Vec d(model.n_elements());
  for (int e = 0; e < model.n_elements(); ++e) d[e] = model.props[e].damping;
  return detail::symmetrize(a2c * d.asDiagonal() * a2c.transpose());
}

struct TangentStiffness {
  Mat kt;  // full tangent, d(internal nodal force)/d(n)
  Mat kg;  // force-density part
  Mat ke;  // material part, axial stiffness corrected by the force density
};

/// Tangent stiffness of the clustered structure. The material part couples the
/// segments of one element through A_2c and subtracts the per-segment force
/// density along the member axis, which makes kt the exact derivative of
/// A_2c t_c (slack elements enter with zero force and zero tangent modulus).
inline TangentStiffness tangent_stiffness(const StructureModel& model, const MemberGeometry& geo,
                                          const ElementEval& ev, const Mat& a2c, const Vec& l_0c) {
  TangentStiffness ts;
  ts.kg = detail::symmetrize(stiffness_matrix(model, ev.x_seg));

  Vec axial(model.n_elements());
  for (int e = 0; e < model.n_elements(); ++e)
    axial[e] = ev.tangent[e] * model.props[e].area / l_0c[e];
  Mat ke = a2c * axial.asDiagonal() * a2c.transpose();

  // minus sum_j x_j (h h^T)/l^2 over segments
  for (int j = 0; j < model.n_members(); ++j) {
    const Vec3 dir = geo.h.col(j) / geo.l[j];
    const Eigen::Matrix3d block = ev.x_seg[j] * dir * dir.transpose();
    const int t = 3 * model.members[j].tail;
    const int h = 3 * model.members[j].head;
    ke.block<3, 3>(t, t) -= block;
    ke.block<3, 3>(h, h) -= block;
    ke.block<3, 3>(t, h) += block;
    ke.block<3, 3>(h, t) += block;
  }
  ts.ke = detail::symmetrize(ke);
  ts.kt = ts.kg + ts.ke;
  return ts;
}

/// K_l0c = -A_1c diag(E_t A / l_0c^2): sensitivity of the internal nodal force
/// to the element rest lengths.
inline Mat rest_length_sensitivity(const StructureModel& model, const Mat& a1c,
                                   const ElementEval& ev, const Vec& l_0c) {
  Vec s(model.n_elements());
  for (int e = 0; e < model.n_elements(); ++e)
    s[e] = ev.tangent[e] * model.props[e].area / (l_0c[e] * l_0c[e]);
  return -a1c * s.asDiagonal();
}

/// Every matrix the solvers consume, evaluated at one configuration.
struct AssemblySet {
  MemberGeometry geo;
  Vec l_c;
  ElementEval eval;
  SegmentDistribution seg;

  Mat m;      // mass
  Mat k;      // force-density stiffness (equals kg)
  Mat d;      // damping, unscaled by zeta
  Vec g;      // nodal gravity force
  Mat a2c;
  Mat a1c;
  Mat b_lc;   // = a2c^T
  Mat kt, kg, ke;
  Mat k_l0c;

  std::vector<int> free;   // free coordinate indices
  std::vector<int> fixed;  // constrained coordinate indices

  Mat m_aa, m_ab, d_aa, d_ab, k_aa, k_ab, kt_aa, kt_ab;

  /// Internal nodal force A_2c t_c (= K n).
  Vec internal_force() const { return a2c * eval.t_c; }
};

inline AssemblySet assemble(const StructureModel& model, const Vec& n, const Vec& l_0c,
                            const std::vector<MemberState>& states) {
  AssemblySet as;
  as.geo = member_geometry(model, n);
  as.l_c = cluster_lengths(model, as.geo.l);
  as.eval = evaluate_elements(model, as.geo.l, l_0c, states);
  as.seg = redistribute_segment_rest_lengths(model, as.geo.l, l_0c);

  as.m = detail::symmetrize(mass_matrix(model, as.seg.mass));
  as.k = detail::symmetrize(stiffness_matrix(model, as.eval.x_seg));
  as.g = gravity_vector(model, as.seg.mass);

  const EquilibriumMatrices em = equilibrium_matrices(model, as.geo);
  as.a2c = em.a2c;
  as.a1c = em.a1c;
  as.b_lc = compatibility_matrix(as.a2c);
  as.d = damping_matrix(model, as.a2c);

  const TangentStiffness ts = tangent_stiffness(model, as.geo, as.eval, as.a2c, l_0c);
  as.kt = ts.kt;
  as.kg = ts.kg;
  as.ke = ts.ke;
  as.k_l0c = rest_length_sensitivity(model, as.a1c, as.eval, l_0c);

  as.free = model.free_coords();
  as.fixed = model.fixed_coords();
  as.m_aa = submatrix(as.m, as.free, as.free);
  as.m_ab = submatrix(as.m, as.free, as.fixed);
  as.d_aa = submatrix(as.d, as.free, as.free);
  as.d_ab = submatrix(as.d, as.free, as.fixed);
  as.k_aa = submatrix(as.k, as.free, as.free);
  as.k_ab = submatrix(as.k, as.free, as.fixed);
  as.kt_aa = submatrix(as.kt, as.free, as.free);
  as.kt_ab = submatrix(as.kt, as.free, as.fixed);
  return as;
}

}  // namespace cts
