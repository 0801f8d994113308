// Independent oracles the tests check the library against. Everything here is
// computed from first principles (literal matrix formulas, finite differences,
// quadrature, enumeration) without going through the assembly code paths.
#pragma once

#include "ctsdyn/ctsdyn.hpp"

#include <random>
#include <vector>

namespace oracle {

using cts::Index;
using cts::Mat;
using cts::Vec;

inline Mat kron_i3(const Mat& a) {
  Mat out = Mat::Zero(3 * a.rows(), 3 * a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (int d = 0; d < 3; ++d) out(3 * i + d, 3 * j + d) = a(i, j);
  return out;
}

/// Block diagonal of the member direction columns, 3 n_e x n_e.
inline Mat block_diag_h(const Mat& h) {
  Mat out = Mat::Zero(3 * h.cols(), h.cols());
  for (Index j = 0; j < h.cols(); ++j) out.block(3 * j, j, 3, 1) = h.col(j);
  return out;
}

/// Literal mass matrix (1/6)(|C|^T m |C| + floor(..)) kron I3.
inline Mat mass_literal(const cts::StructureModel& m, const Vec& m_seg) {
  const Mat c_abs = m.connectivity_dense().cwiseAbs();
  const Mat core = c_abs.transpose() * m_seg.asDiagonal() * c_abs;
  Mat sum = core;
  sum.diagonal() += core.diagonal();
  return kron_i3(sum / 6.0);
}

/// Literal force-density stiffness (C^T diag(x) C) kron I3.
inline Mat stiffness_literal(const cts::StructureModel& m, const Vec& x_seg) {
  const Mat c = m.connectivity_dense();
  return kron_i3(c.transpose() * x_seg.asDiagonal() * c);
}

/// Literal equilibrium matrix (C^T kron I3) bd(H) diag(l)^-1 S^T.
inline Mat a2c_literal(const cts::StructureModel& m, const cts::MemberGeometry& geo) {
  const Mat c = m.connectivity_dense();
  const Mat s = m.clustering_dense();
  return kron_i3(c.transpose()) * block_diag_h(geo.h) * geo.l.cwiseInverse().asDiagonal() *
         s.transpose();
}

/// Literal compatibility matrix S diag(l)^-1 bd(H)^T (C kron I3).
inline Mat blc_literal(const cts::StructureModel& m, const cts::MemberGeometry& geo) {
  const Mat c = m.connectivity_dense();
  const Mat s = m.clustering_dense();
  return s * geo.l.cwiseInverse().asDiagonal() * block_diag_h(geo.h).transpose() *
         kron_i3(c);
}

/// Literal gravity vector 0.5 (|C|^T m) kron a.
inline Vec gravity_literal(const cts::StructureModel& m, const Vec& m_seg) {
  const Vec nodal = 0.5 * m.connectivity_dense().cwiseAbs().transpose() * m_seg;
  Vec g(3 * nodal.size());
  for (Index i = 0; i < nodal.size(); ++i) g.segment<3>(3 * i) = nodal[i] * m.gravity;
  return g;
}

/// Per-node sum of member end forces for a given element force vector;
/// accumulated node by node, member by member.
inline Vec nodal_balance(const cts::StructureModel& m, const Vec& n, const Vec& t_c) {
  Vec out = Vec::Zero(m.n_coords());
  for (int e = 0; e < m.n_elements(); ++e)
    for (int mem : m.clustering.elements[e]) {
      const Eigen::Vector3d h =
          n.segment<3>(3 * m.members[mem].head) - n.segment<3>(3 * m.members[mem].tail);
      const Eigen::Vector3d f = t_c[e] * h.normalized();
      out.segment<3>(3 * m.members[mem].tail) += f;
      out.segment<3>(3 * m.members[mem].head) -= f;
    }
  return out;
}

/// Internal nodal force at a configuration, from member forces alone.
inline Vec internal_force_direct(const cts::StructureModel& m, const Vec& n, const Vec& l_0c,
                                 const std::vector<cts::MemberState>& states) {
  const cts::MemberGeometry geo = cts::member_geometry(m, n);
  const cts::ForceVectors fv = cts::member_forces(m, geo.l, l_0c, states);
  return -nodal_balance(m, n, fv.t_c);
}

/// Central finite difference of the internal nodal force w.r.t. coordinates.
inline Mat tangent_fd(const cts::StructureModel& m, const Vec& n, const Vec& l_0c,
                      const std::vector<cts::MemberState>& states, double eps) {
  Mat kt(m.n_coords(), m.n_coords());
  for (int j = 0; j < m.n_coords(); ++j) {
    Vec np = n, nm = n;
    np[j] += eps;
    nm[j] -= eps;
    kt.col(j) = (internal_force_direct(m, np, l_0c, states) -
                 internal_force_direct(m, nm, l_0c, states)) /
                (2.0 * eps);
  }
  return kt;
}

/// Central finite difference of the internal nodal force w.r.t. rest lengths.
inline Mat rest_length_fd(const cts::StructureModel& m, const Vec& n, const Vec& l_0c,
                          const std::vector<cts::MemberState>& states, double eps) {
  Mat k(m.n_coords(), m.n_elements());
  for (int e = 0; e < m.n_elements(); ++e) {
    Vec lp = l_0c, lm = l_0c;
    lp[e] += eps;
    lm[e] -= eps;
    k.col(e) = (internal_force_direct(m, n, lp, states) -
                internal_force_direct(m, n, lm, states)) /
               (2.0 * eps);
  }
  return k;
}

/// Kinetic energy of one member by Simpson quadrature of the interpolated
/// velocity field.
inline double member_kinetic_quadrature(double mass, const Eigen::Vector3d& v_tail,
                                        const Eigen::Vector3d& v_head, int panels = 2000) {
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = static_cast<double>(i) / panels;
    const double b = static_cast<double>(i + 1) / panels;
    const double mid = 0.5 * (a + b);
    auto speed2 = [&](double mu) {
      return ((1.0 - mu) * v_tail + mu * v_head).squaredNorm();
    };
    sum += (b - a) / 6.0 * (speed2(a) + 4.0 * speed2(mid) + speed2(b));
  }
  return 0.5 * mass * sum;
}

/// Exhaustive active-set solve of min |G x - y|, x >= 0: try every support.
inline Vec nnls_enumerate(const Mat& g, const Vec& y) {
  const int n = static_cast<int>(g.cols());
  Vec best = Vec::Zero(n);
  double best_obj = y.squaredNorm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> cols;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) cols.push_back(i);
    Mat gs(g.rows(), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) gs.col(static_cast<Index>(i)) = g.col(cols[i]);
    const Vec xs = gs.completeOrthogonalDecomposition().solve(y);
    if ((xs.array() < 0.0).any()) continue;
    Vec x = Vec::Zero(n);
    for (std::size_t i = 0; i < cols.size(); ++i) x[cols[i]] = xs[static_cast<Index>(i)];
    const double obj = (g * x - y).squaredNorm();
    if (obj < best_obj - 1e-14 * std::max(1.0, best_obj)) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

/// Random prestressed clustered structure: six nodes, the full member graph,
/// kinds assigned from a self-stress sign pattern, two string pairs clustered,
/// rest lengths backed out from a positive tension target.
inline cts::StructureModel random_cts(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 1.0);

  cts::StructureModel m;
  const int n_nodes = 6;
  for (int attempt = 0;; ++attempt) {
    m.nodes.resize(3 * n_nodes);
    for (int i = 0; i < 3 * n_nodes; ++i) m.nodes[i] = coord(rng);
    bool ok = true;
    for (int i = 0; i < n_nodes && ok; ++i)
      for (int j = i + 1; j < n_nodes && ok; ++j)
        ok = (m.nodes.segment<3>(3 * i) - m.nodes.segment<3>(3 * j)).norm() > 0.25;
    if (ok) break;
    if (attempt > 200) throw std::runtime_error("random_cts: node sampling failed");
  }

  m.members.clear();
  for (int i = 0; i < n_nodes; ++i)
    for (int j = i + 1; j < n_nodes; ++j) m.members.push_back({i, j, cts::MemberKind::Bar});
  const int n_e = m.n_members();

  // self-stress of the full graph: null space of the unclustered equilibrium
  // map over all coordinates (free floating)
  m.clustering = cts::Clustering::identity(n_e);
  m.boundary.fixed.clear();
  m.materials = {{"soft", cts::MaterialLaw::linear(1.0e9)}};
  m.props.assign(n_e, cts::ElementProps{1.0e-4, 0, 1000.0, 0.0});
  m.rest_lengths = Vec::Ones(n_e);

  const cts::MemberGeometry geo = cts::member_geometry(m, m.nodes);
  const cts::EquilibriumMatrices em = cts::equilibrium_matrices(m, geo);
  Eigen::JacobiSVD<Mat> svd(em.a1c, Eigen::ComputeFullV);
  Vec x;
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  Vec x_best;
  double margin_best = -1.0;
  for (int tries = 0; tries < 2000; ++tries) {
    Vec c = Vec::Zero(3);
    for (int i = 0; i < 3; ++i) c[i] = w(rng);
    x = svd.matrixV().rightCols(3) * c;
    const double margin = x.cwiseAbs().minCoeff() / x.cwiseAbs().maxCoeff();
    if (margin > margin_best) {
      margin_best = margin;
      x_best = x;
    }
    if (margin_best > 0.05) break;
  }
  x = x_best;  // the sign pattern only picks member kinds; any margin works
  if (x.sum() < 0.0) x = -x;  // fix an overall sign

  std::vector<int> strings;
  for (int j = 0; j < n_e; ++j)
    if (x[j] > 0.0) {
      m.members[j].kind = cts::MemberKind::String;
      strings.push_back(j);
    }

  // cluster two disjoint string pairs
  cts::Clustering cl;
  std::vector<bool> used(n_e, false);
  int made = 0;
  for (std::size_t i = 0; i + 1 < strings.size() && made < 2; i += 2) {
    cl.elements.push_back({strings[i], strings[i + 1]});
    used[strings[i]] = used[strings[i + 1]] = true;
    ++made;
  }
  for (int j = 0; j < n_e; ++j)
    if (!used[j]) cl.elements.push_back({j});
  std::sort(cl.elements.begin(), cl.elements.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  m.clustering = cl;
  const int n_ec = m.n_elements();
  m.props.assign(n_ec, cts::ElementProps{1.0e-4, 0, 1000.0, 0.0});

  // positive tension on strings, compression on bars, rest lengths to match
  const Vec l_c = cts::cluster_lengths(m, geo.l);
  Vec t_c(n_ec);
  std::uniform_real_distribution<double> mag(20.0, 120.0);
  for (int e = 0; e < n_ec; ++e)
    t_c[e] = (m.element_kind(e) == cts::MemberKind::String ? 1.0 : -1.0) * mag(rng);
  m.rest_lengths = cts::rest_lengths_for_forces(m, m.nodes, t_c);
  return m;
}

}  // namespace oracle
