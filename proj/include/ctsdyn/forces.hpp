#pragma once

#include "ctsdyn/model.hpp"

#include <vector>

namespace cts {

/// Material response of every clustered element at a configuration. Slack
/// strings (computed compression) carry zero force and zero tangent modulus;
/// the clamp acts on the whole clustered element since all its segments share
/// one tension.
struct ElementEval {
  Vec strain;        // n_ec, raw (l_c - l_0c)/l_0c
  Vec stress;        // n_ec, Pa, after the slack clamp
  Vec t_c;           // n_ec, N, clamped
  Vec x_c;           // n_ec, N/m, t_c / l_c
  Vec tangent;       // n_ec, Pa, zero for slack strings
  Vec t_seg;         // n_e, N, S^T t_c
  Vec x_seg;         // n_e, N/m, per-segment force density
  std::vector<bool> slack;            // n_ec
  std::vector<MemberState> states;    // advanced plastic history
  bool extrapolated = false;          // any element past its last breakpoint
};

inline ElementEval evaluate_elements(const StructureModel& model, const Vec& l, const Vec& l_0c,
                                     const std::vector<MemberState>& states) {
  const int n_ec = model.n_elements();
  const Vec l_c = cluster_lengths(model, l);

  ElementEval ev;
  ev.strain.resize(n_ec);
  ev.stress.resize(n_ec);
  ev.t_c.resize(n_ec);
  ev.x_c.resize(n_ec);
  ev.tangent.resize(n_ec);
  ev.slack.assign(n_ec, false);
  ev.states = states;

  for (int e = 0; e < n_ec; ++e) {
    const double eps = (l_c[e] - l_0c[e]) / l_0c[e];
    ev.strain[e] = eps;
    StressResult sr = stress_eval(model.law_of(e), eps, states[static_cast<std::size_t>(e)]);
    ev.extrapolated = ev.extrapolated || sr.extrapolated;
    ev.states[static_cast<std::size_t>(e)] = sr.state;
    double force = model.props[e].area * sr.stress;
    double tangent = sr.tangent;
    if (model.element_kind(e) == MemberKind::String && force < 0.0) {
      force = 0.0;
      tangent = 0.0;
      sr.stress = 0.0;
      ev.slack[e] = true;
    }
    ev.stress[e] = sr.stress;
    ev.t_c[e] = force;
    ev.x_c[e] = force / l_c[e];
    ev.tangent[e] = tangent;
  }

  ev.t_seg.resize(model.n_members());
  ev.x_seg.resize(model.n_members());
  for (int e = 0; e < n_ec; ++e)
    for (int m : model.clustering.elements[e]) {
      ev.t_seg[m] = ev.t_c[e];
      ev.x_seg[m] = ev.t_c[e] / l[m];
    }
  return ev;
}

/// Clustered and per-segment force and force-density vectors.
struct ForceVectors {
  Vec t_c;  // n_ec, N
  Vec t;    // n_e,  N, equals S^T t_c
  Vec x_c;  // n_ec, N/m
  Vec x;    // n_e,  N/m
  std::vector<MemberState> states;
};

inline ForceVectors member_forces(const StructureModel& model, const Vec& l, const Vec& l_0c,
                                  const std::vector<MemberState>& states) {
  ElementEval ev = evaluate_elements(model, l, l_0c, states);
  return ForceVectors{ev.t_c, ev.t_seg, ev.x_c, ev.x_seg, ev.states};
}

/// x_c = diag(l_c)^-1 t_c and x = diag(l)^-1 S^T t_c.
inline std::pair<Vec, Vec> force_densities(const StructureModel& model, const Vec& t_c,
                                           const Vec& l, const Vec& l_c) {
  Vec x_c = t_c.array() / l_c.array();
  Vec x(model.n_members());
  for (int e = 0; e < model.n_elements(); ++e)
    for (int m : model.clustering.elements[e]) x[m] = t_c[e] / l[m];
  return {x, x_c};
}

/// Per-segment rest lengths and masses of a clustered configuration. Segments
/// of one clustered string share its tension, hence its strain, so each
/// segment's rest length is its current length divided by (1 + element
/// strain); the per-element sum reproduces l_0c and total mass is conserved
/// while the cable slides.
struct SegmentDistribution {
  Vec rest_length;  // n_e
  Vec mass;         // n_e, kg
};

inline SegmentDistribution redistribute_segment_rest_lengths(const StructureModel& model,
                                                             const Vec& l, const Vec& l_0c) {
  const Vec l_c = cluster_lengths(model, l);
  SegmentDistribution out;
  out.rest_length.resize(model.n_members());
  out.mass.resize(model.n_members());
  for (int e = 0; e < model.n_elements(); ++e) {
    const double scale = l_0c[e] / l_c[e];
    for (int m : model.clustering.elements[e]) {
      out.rest_length[m] = l[m] * scale;
      out.mass[m] = model.props[e].density * model.props[e].area * out.rest_length[m];
    }
  }
  return out;
}

/// Critical damping coefficient per element, (2*sqrt(3)/3) sqrt(rho) A sqrt(E).
inline Vec critical_damping(const StructureModel& model) {
  Vec d(model.n_elements());
  for (int e = 0; e < model.n_elements(); ++e) {
    const ElementProps& p = model.props[e];
    double young = model.law_of(e).E0;
    d[e] = (2.0 * std::sqrt(3.0) / 3.0) * std::sqrt(p.density) * p.area * std::sqrt(young);
  }
  return d;
}

}  // namespace cts
