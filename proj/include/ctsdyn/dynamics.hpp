#pragma once

#include "ctsdyn/assembly.hpp"
#include "ctsdyn/schedule.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace cts {

/// Time-varying state of a structure: full coordinates, free velocities, the
/// element rest lengths being actuated, and plastic history.
struct DynamicState {
  double t = 0.0;
  Vec n;
  Vec v_a;
  Vec l_0c;
  std::vector<MemberState> states;
};

struct EnergyAudit {
  double kinetic = 0.0;
  double strain = 0.0;
  double gravity = 0.0;
  double total() const { return kinetic + strain + gravity; }
};

inline EnergyAudit energy_audit(const StructureModel& model, const Vec& n, const Vec& v,
                                const Vec& l_0c, const std::vector<MemberState>& states) {
  const MemberGeometry geo = member_geometry(model, n);
  const ElementEval ev = evaluate_elements(model, geo.l, l_0c, states);
  const SegmentDistribution seg = redistribute_segment_rest_lengths(model, geo.l, l_0c);

  EnergyAudit audit;
  for (int j = 0; j < model.n_members(); ++j) {
    const Vec3 vt = v.segment<3>(3 * model.members[j].tail);
    const Vec3 vh = v.segment<3>(3 * model.members[j].head);
    audit.kinetic += seg.mass[j] / 6.0 * (vt.squaredNorm() + vh.squaredNorm() + vt.dot(vh));
  }
  for (int e = 0; e < model.n_elements(); ++e) {
    if (ev.slack[e]) continue;
    audit.strain += model.props[e].area * l_0c[e] *
                    strain_energy_density(model.law_of(e), ev.strain[e],
                                          states[static_cast<std::size_t>(e)]);
  }
  audit.gravity = -gravity_vector(model, seg.mass).dot(n);
  return audit;
}

struct Sample {
  double t = 0.0;
  Vec n;
  Vec v;      // full velocity, boundary entries included
  Vec t_c;
  Vec l_0c;
  EnergyAudit energy;
};

struct TimeHistory {
  std::vector<Sample> samples;
  bool diverged = false;
  std::string message;   // set when diverged
  std::string warning;   // e.g. time-step stability advice
};

struct DynamicOptions {
  double zeta = 0.0;           // global damping ratio scaling the damping matrix
  int stride = 1;              // record every stride-th step
  bool stability_check = true; // estimate f_max once and warn on coarse dt
};

namespace detail {

/// One integration step's frozen coefficients plus the stage force evaluation.
/// Masses (hence M_aa and g) are frozen at the step start; geometry, member
/// forces, the slack set, and damping are re-evaluated at every stage.
struct StepContext {
  const StructureModel& model;
  const std::map<int, PiecewiseLinear>& boundary;
  double zeta;
  std::vector<int> free;
  Vec d_c;

  Vec g;
  Eigen::LLT<Mat> m_aa_llt;

  StepContext(const StructureModel& m, const std::map<int, PiecewiseLinear>& b, double z)
      : model(m), boundary(b), zeta(z), free(m.free_coords()), d_c(m.n_elements()) {
    for (int e = 0; e < m.n_elements(); ++e) d_c[e] = m.props[e].damping;
  }

  void freeze(const Vec& n, const Vec& l_0c) {
    const MemberGeometry geo = member_geometry(model, n);
    const SegmentDistribution seg = redistribute_segment_rest_lengths(model, geo.l, l_0c);
    g = gravity_vector(model, seg.mass);
    const Mat m_full = mass_matrix(model, seg.mass);
    m_aa_llt.compute(submatrix(m_full, free, free));
    if (m_aa_llt.info() != Eigen::Success)
      throw std::runtime_error("integrate: singular mass matrix (massless free coordinate)");
  }

  void apply_boundary(double t, Vec& n, Vec& v) const {
    for (const auto& [c, traj] : boundary) {
      n[c] = traj.value(t);
      v[c] = traj.slope(t);
    }
  }

  /// Free accelerations at a stage point.
  Vec accel(const Vec& n, const Vec& v, const Vec& l_0c, const Vec& f_ex,
            const std::vector<MemberState>& states) const {
    const MemberGeometry geo = member_geometry(model, n);
    const ElementEval ev = evaluate_elements(model, geo.l, l_0c, states);

    Vec rhs = f_ex + g;
    for (int e = 0; e < model.n_elements(); ++e) {
      // length rate of the element drives its viscous force
      double lc_rate = 0.0;
      for (int m : model.clustering.elements[e])
        lc_rate += geo.h.col(m).dot(v.segment<3>(3 * model.members[m].head) -
                                    v.segment<3>(3 * model.members[m].tail)) /
                   geo.l[m];
      const double axial = ev.t_c[e] + zeta * d_c[e] * lc_rate;
      for (int m : model.clustering.elements[e]) {
        const Vec3 f = axial / geo.l[m] * geo.h.col(m);
        rhs.segment<3>(3 * model.members[m].tail) += f;
        rhs.segment<3>(3 * model.members[m].head) -= f;
      }
    }
    return m_aa_llt.solve(gather(rhs, free));
  }
};

inline std::string stability_warning(const StructureModel& model, const DynamicState& s,
                                     double dt) {
  const AssemblySet as = assemble(model, s.n, s.l_0c, s.states);
  if (as.free.empty()) return {};
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(as.kt_aa, as.m_aa);
  if (es.info() != Eigen::Success) return {};
  const double lam_max = es.eigenvalues().maxCoeff();
  if (lam_max <= 0.0) return {};
  const double f_max = std::sqrt(lam_max) / (2.0 * M_PI);
  if (dt > 0.1 / f_max) {
    return "time step " + std::to_string(dt) + " s exceeds 0.1/f_max = " +
           std::to_string(0.1 / f_max) + " s (f_max = " + std::to_string(f_max) + " Hz)";
  }
  return {};
}

}  // namespace detail

/// Reduced-order accelerations at a state. Boundary velocities and
/// accelerations default to zero when not supplied.
inline Vec accelerations(const StructureModel& model, const DynamicState& state, const Vec& f_ex,
                         double zeta = 0.0, const Vec& v_b = Vec(), const Vec& a_b = Vec()) {
  const AssemblySet as = assemble(model, state.n, state.l_0c, state.states);
  Vec v = Vec::Zero(model.n_coords());
  for (std::size_t i = 0; i < as.free.size(); ++i) v[as.free[i]] = state.v_a[static_cast<Index>(i)];
  for (std::size_t i = 0; i < as.fixed.size(); ++i)
    if (v_b.size()) v[as.fixed[i]] = v_b[static_cast<Index>(i)];

  Vec rhs = f_ex + as.g - as.internal_force() - zeta * (as.d * v);
  if (a_b.size()) {
    Vec ab_full = Vec::Zero(model.n_coords());
    for (std::size_t i = 0; i < as.fixed.size(); ++i) ab_full[as.fixed[i]] = a_b[static_cast<Index>(i)];
    rhs -= as.m * ab_full;
  }
  Eigen::LLT<Mat> llt(as.m_aa);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("accelerations: singular mass matrix (massless free coordinate)");
  return llt.solve(gather(rhs, as.free));
}

/// Fixed-step 4th-order Runge-Kutta integration of the reduced dynamics.
/// Element rest lengths, external forces, and boundary motion follow the
/// schedule; masses are redistributed at every step.
inline TimeHistory integrate(const StructureModel& model, const DynamicState& s0,
                             const ActuationSchedule& schedule, double t_end, double dt,
                             const DynamicOptions& opt = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  const long n_steps = std::lround((t_end - s0.t) / dt);
  if (n_steps < 0) throw std::invalid_argument("integrate: t_end before start time");

  const auto boundary = schedule.merged_boundary(model);
  detail::StepContext ctx(model, boundary, opt.zeta);

  TimeHistory history;
  if (opt.stability_check) history.warning = detail::stability_warning(model, s0, dt);

  DynamicState state = s0;
  const std::size_t n_free = ctx.free.size();

  auto record = [&](const DynamicState& s) {
    Sample smp;
    smp.t = s.t;
    smp.n = s.n;
    smp.v = Vec::Zero(model.n_coords());
    for (std::size_t i = 0; i < n_free; ++i) smp.v[ctx.free[i]] = s.v_a[static_cast<Index>(i)];
    for (const auto& [c, traj] : boundary) smp.v[c] = traj.slope(s.t);
    const MemberGeometry geo = member_geometry(model, s.n);
    smp.t_c = evaluate_elements(model, geo.l, s.l_0c, s.states).t_c;
    smp.l_0c = s.l_0c;
    smp.energy = energy_audit(model, s.n, smp.v, s.l_0c, s.states);
    history.samples.push_back(std::move(smp));
  };

  Vec n_work = state.n;
  Vec v_work = Vec::Zero(model.n_coords());

  ctx.apply_boundary(state.t, state.n, v_work);
  state.l_0c = schedule.rest_lengths_at(state.t, s0.l_0c);
  record(state);
  n_work = state.n;
  v_work.setZero();

  for (long step = 0; step < n_steps; ++step) {
    const double t = s0.t + static_cast<double>(step) * dt;
    ctx.freeze(state.n, state.l_0c);

    auto stage = [&](double ts, const Vec& na, const Vec& va, Vec& dn, Vec& dv) {
      for (std::size_t i = 0; i < n_free; ++i) n_work[ctx.free[i]] = na[static_cast<Index>(i)];
      for (std::size_t i = 0; i < n_free; ++i) v_work[ctx.free[i]] = va[static_cast<Index>(i)];
      ctx.apply_boundary(ts, n_work, v_work);
      const Vec l0 = schedule.rest_lengths_at(ts, s0.l_0c);
      const Vec f_ex = schedule.external_force_at(ts, model.n_coords());
      dn = va;
      dv = ctx.accel(n_work, v_work, l0, f_ex, state.states);
    };

    Vec na = gather(state.n, ctx.free);
    Vec va = state.v_a;
    const double t_next = s0.t + static_cast<double>(step + 1) * dt;
    try {
      Vec k1n, k1v, k2n, k2v, k3n, k3v, k4n, k4v;
      stage(t, na, va, k1n, k1v);
      stage(t + 0.5 * dt, na + 0.5 * dt * k1n, va + 0.5 * dt * k1v, k2n, k2v);
      stage(t + 0.5 * dt, na + 0.5 * dt * k2n, va + 0.5 * dt * k2v, k3n, k3v);
      stage(t + dt, na + dt * k3n, va + dt * k3v, k4n, k4v);
      na += dt / 6.0 * (k1n + 2.0 * (k2n + k3n) + k4n);
      va += dt / 6.0 * (k1v + 2.0 * (k2v + k3v) + k4v);
      if (!na.allFinite() || !va.allFinite())
        throw std::runtime_error("non-finite state");

      DynamicState next;
      next.t = t_next;
      next.n = state.n;
      for (std::size_t i = 0; i < n_free; ++i) next.n[ctx.free[i]] = na[static_cast<Index>(i)];
      Vec v_dummy = Vec::Zero(model.n_coords());
      ctx.apply_boundary(t_next, next.n, v_dummy);
      next.v_a = va;
      next.l_0c = schedule.rest_lengths_at(t_next, s0.l_0c);
      // commit plastic history once per step
      const MemberGeometry geo = member_geometry(model, next.n);
      next.states = evaluate_elements(model, geo.l, next.l_0c, state.states).states;
      state = std::move(next);
    } catch (const std::runtime_error& err) {
      history.diverged = true;
      history.message = "integrate: " + std::string(err.what()) + " at t = " +
                        std::to_string(t_next) + ", aborting with last valid state";
      if (history.samples.empty() || history.samples.back().t != state.t) record(state);
      return history;
    }

    if ((step + 1) % opt.stride == 0 || step + 1 == n_steps) record(state);
  }
  return history;
}

}  // namespace cts
