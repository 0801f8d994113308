#pragma once

#include "ctsdyn/dynamics.hpp"
#include "ctsdyn/statics.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

namespace cts {

struct NnlsResult {
  Vec x;
  double residual = 0.0;  // |G x - y|
  int iterations = 0;
};

/// Lawson-Hanson active-set solve of min |G x - y| subject to x >= 0.
inline NnlsResult nnls(const Mat& g, const Vec& y, double tol = -1.0) {
  const Index n = g.cols();
  if (tol < 0.0) {
    const double scale = (g.transpose() * y).cwiseAbs().maxCoeff();
    tol = 1e-12 * std::max(scale, 1.0);
  }

  NnlsResult res;
  res.x = Vec::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Vec w = g.transpose() * (y - g * res.x);

  const int cap = 3 * static_cast<int>(n) + 12;
  for (int outer = 0; outer < cap; ++outer) {
    Index best = -1;
    double best_w = tol;
    for (Index i = 0; i < n; ++i)
      if (!passive[static_cast<std::size_t>(i)] && w[i] > best_w) {
        best_w = w[i];
        best = i;
      }
    if (best < 0) break;  // KKT satisfied
    passive[static_cast<std::size_t>(best)] = true;

    for (int inner = 0; inner <= cap; ++inner) {
      if (inner == cap)
        throw std::runtime_error("nnls: inner iteration cap exceeded (degenerate problem)");
      std::vector<Index> p;
      for (Index i = 0; i < n; ++i)
        if (passive[static_cast<std::size_t>(i)]) p.push_back(i);
      Mat gp(g.rows(), static_cast<Index>(p.size()));
      for (std::size_t i = 0; i < p.size(); ++i) gp.col(static_cast<Index>(i)) = g.col(p[i]);
      const Vec z = gp.colPivHouseholderQr().solve(y);

      if ((z.array() > 0.0).all()) {
        res.x.setZero();
        for (std::size_t i = 0; i < p.size(); ++i) res.x[p[i]] = z[static_cast<Index>(i)];
        break;
      }
      // backtrack toward the feasible region and pin the variables that hit zero
      double alpha = 1.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double zi = z[static_cast<Index>(i)];
        const double xi = res.x[p[i]];
        if (zi <= 0.0) alpha = std::min(alpha, xi - zi > 0.0 ? xi / (xi - zi) : 0.0);
      }
      bool dropped_entering = false;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double zi = z[static_cast<Index>(i)];
        double& xi = res.x[p[i]];
        xi += alpha * (zi - xi);
        if (zi <= 0.0 && xi <= 1e-12 * std::max(1.0, res.x.cwiseAbs().maxCoeff())) {
          xi = 0.0;
          passive[static_cast<std::size_t>(p[i])] = false;
          dropped_entering = dropped_entering || p[i] == best;
        }
      }
      if (dropped_entering) break;  // degenerate pivot; outer loop re-examines the gradient
    }
    w = g.transpose() * (y - g * res.x);
    res.iterations = outer + 1;
  }
  res.residual = (g * res.x - y).norm();
  return res;
}

/// Largest KKT violation of an nnls candidate: gradient components must be
/// >= -tol where x = 0 and ~0 where x > 0.
inline double nnls_kkt_violation(const Mat& g, const Vec& y, const Vec& x) {
  const Vec grad = g.transpose() * (g * x - y);
  double v = 0.0;
  for (Index i = 0; i < x.size(); ++i)
    v = std::max(v, x[i] > 0.0 ? std::abs(grad[i]) : std::max(0.0, -grad[i]));
  return v;
}

/// Least squares with nonnegativity on a subset of the variables; free
/// variables are split into positive and negative parts and solved by nnls.
inline Vec solve_allocation(const Mat& g, const Vec& y, const std::vector<bool>& nonneg) {
  std::vector<Index> free_cols;
  for (Index i = 0; i < g.cols(); ++i)
    if (!nonneg[static_cast<std::size_t>(i)]) free_cols.push_back(i);
  if (free_cols.empty()) return nnls(g, y).x;

  Mat ext(g.rows(), g.cols() + static_cast<Index>(free_cols.size()));
  ext.leftCols(g.cols()) = g;
  for (std::size_t i = 0; i < free_cols.size(); ++i)
    ext.col(g.cols() + static_cast<Index>(i)) = -g.col(free_cols[i]);
  const Vec xe = nnls(ext, y).x;
  Vec x = xe.head(g.cols());
  for (std::size_t i = 0; i < free_cols.size(); ++i)
    x[free_cols[i]] -= xe[g.cols() + static_cast<Index>(i)];
  return x;
}

/// Rest lengths of actuated elements realizing prescribed forces at the
/// current element lengths (inverse of the force law).
inline Vec active_rest_lengths(const StructureModel& model, const std::vector<int>& elements,
                               const Vec& t_target, const Vec& l_c_elements) {
  Vec l0(static_cast<Index>(elements.size()));
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const int e = elements[i];
    const MaterialLaw& law = model.law_of(e);
    const double area = model.props[e].area;
    const double lc = l_c_elements[static_cast<Index>(i)];
    const double t = t_target[static_cast<Index>(i)];
    if (law.kind == MaterialKind::Linear) {
      const double ea = law.E0 * area;
      if (t <= -ea)
        throw std::runtime_error("active_rest_lengths: force below -EA on element " +
                                 std::to_string(e + 1));
      l0[static_cast<Index>(i)] = ea * lc / (t + ea);
    } else {
      double lo = lc * 1e-3, hi = lc * 1e3;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double force = area * stress_eval(law, (lc - mid) / mid).stress;
        (force > t ? lo : hi) = mid;
        if (hi - lo < 1e-14 * lc) break;
      }
      l0[static_cast<Index>(i)] = 0.5 * (lo + hi);
    }
  }
  return l0;
}

/// Shape-control task: coordinates of interest, their target trajectories,
/// scalar second-order error-dynamics gains, and the actuated elements.
struct ControlProblem {
  std::vector<int> target_coords;        // indices into the full n, must be free
  std::vector<PiecewiseLinear> targets;  // one trajectory per target coordinate
  double psi = 0.0;                      // velocity-error gain, 1/s
  double phi = 0.0;                      // position-error gain, 1/s^2
  std::vector<int> active_elements;

  std::vector<int> passive_elements(int n_elements) const {
    std::vector<bool> active(static_cast<std::size_t>(n_elements), false);
    for (int e : active_elements) active[static_cast<std::size_t>(e)] = true;
    std::vector<int> passive;
    for (int e = 0; e < n_elements; ++e)
      if (!active[static_cast<std::size_t>(e)]) passive.push_back(e);
    return passive;
  }
};

struct ControlStepResult {
  Vec t_c_act;    // allocated active forces
  Vec l_0c_act;   // rest lengths realizing them
  double residual = 0.0;
  Vec error;      // e
  Vec error_rate; // de/dt
};

/// One allocation of the control law: build the error dynamics, solve the
/// constrained least squares for the active forces, and back out rest lengths.
inline ControlStepResult control_step(const StructureModel& model, const DynamicState& state,
                                      const ControlProblem& problem, const Vec& f_ex,
                                      double zeta = 0.0) {
  const AssemblySet as = assemble(model, state.n, state.l_0c, state.states);
  const int n_t = static_cast<int>(problem.target_coords.size());

  std::vector<int> target_rows(problem.target_coords.size());
  for (std::size_t i = 0; i < problem.target_coords.size(); ++i) {
    const auto it =
        std::lower_bound(as.free.begin(), as.free.end(), problem.target_coords[i]);
    if (it == as.free.end() || *it != problem.target_coords[i])
      throw std::invalid_argument("control_step: target coordinate is not free");
    target_rows[i] = static_cast<int>(it - as.free.begin());
  }

  Vec v = Vec::Zero(model.n_coords());
  for (std::size_t i = 0; i < as.free.size(); ++i) v[as.free[i]] = state.v_a[static_cast<Index>(i)];

  ControlStepResult res;
  res.error.resize(n_t);
  res.error_rate.resize(n_t);
  for (int i = 0; i < n_t; ++i) {
    res.error[i] = state.n[problem.target_coords[static_cast<std::size_t>(i)]] -
                   problem.targets[static_cast<std::size_t>(i)].value(state.t);
    res.error_rate[i] = v[problem.target_coords[static_cast<std::size_t>(i)]] -
                        problem.targets[static_cast<std::size_t>(i)].slope(state.t);
  }

  Eigen::LLT<Mat> llt(as.m_aa);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("control_step: singular mass matrix");

  const Vec base = f_ex + as.g - zeta * (as.d * v);
  const Vec acc_base = llt.solve(gather(base, as.free));

  Vec mu(n_t);
  for (int i = 0; i < n_t; ++i)
    mu[i] = acc_base[target_rows[static_cast<std::size_t>(i)]] + problem.psi * res.error_rate[i] +
            problem.phi * res.error[i];

  // Gamma = T_sel M_aa^-1 E_a^T A_2c, split into active and passive columns
  Mat a2c_free(static_cast<Index>(as.free.size()), model.n_elements());
  for (std::size_t i = 0; i < as.free.size(); ++i)
    a2c_free.row(static_cast<Index>(i)) = as.a2c.row(as.free[i]);
  const Mat gamma_full = llt.solve(a2c_free);

  const std::vector<int> passive = problem.passive_elements(model.n_elements());
  Mat gamma_act(n_t, static_cast<Index>(problem.active_elements.size()));
  Mat gamma_pas(n_t, static_cast<Index>(passive.size()));
  for (int i = 0; i < n_t; ++i) {
    for (std::size_t j = 0; j < problem.active_elements.size(); ++j)
      gamma_act(i, static_cast<Index>(j)) =
          gamma_full(target_rows[static_cast<std::size_t>(i)], problem.active_elements[j]);
    for (std::size_t j = 0; j < passive.size(); ++j)
      gamma_pas(i, static_cast<Index>(j)) =
          gamma_full(target_rows[static_cast<std::size_t>(i)], passive[j]);
  }

  Vec t_pas(static_cast<Index>(passive.size()));
  for (std::size_t j = 0; j < passive.size(); ++j) t_pas[static_cast<Index>(j)] = as.eval.t_c[passive[j]];

  const Vec rhs = mu - gamma_pas * t_pas;
  std::vector<bool> nonneg(problem.active_elements.size());
  for (std::size_t j = 0; j < problem.active_elements.size(); ++j)
    nonneg[j] = model.element_kind(problem.active_elements[j]) == MemberKind::String;
  res.t_c_act = solve_allocation(gamma_act, rhs, nonneg);
  res.residual = (gamma_act * res.t_c_act - rhs).norm();

  Vec l_c_act(static_cast<Index>(problem.active_elements.size()));
  for (std::size_t j = 0; j < problem.active_elements.size(); ++j)
    l_c_act[static_cast<Index>(j)] = as.l_c[problem.active_elements[j]];
  res.l_0c_act = active_rest_lengths(model, problem.active_elements, res.t_c_act, l_c_act);
  return res;
}

struct ClosedLoopSample {
  double t = 0.0;
  Vec n;
  Vec t_c;
  Vec error;
  Vec t_c_act;
  Vec l_0c_act;
};

struct ClosedLoopHistory {
  std::vector<ClosedLoopSample> samples;
  bool diverged = false;
  std::string message;
};

/// Closed-loop simulation: every step re-solves the allocation, applies the
/// resulting active rest lengths, and advances the plant one RK4 step with
/// those rest lengths held.
inline ClosedLoopHistory closed_loop_sim(const StructureModel& model, const DynamicState& s0,
                                         const ControlProblem& problem, double t_end, double dt,
                                         const DynamicOptions& opt = {},
                                         const ActuationSchedule& extern_schedule = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("closed_loop_sim: dt must be positive");
  const long n_steps = std::lround((t_end - s0.t) / dt);

  const auto boundary = extern_schedule.merged_boundary(model);
  detail::StepContext ctx(model, boundary, opt.zeta);
  const std::size_t n_free = ctx.free.size();

  ClosedLoopHistory history;
  DynamicState state = s0;

  auto record = [&](const ControlStepResult& cs) {
    ClosedLoopSample smp;
    smp.t = state.t;
    smp.n = state.n;
    const MemberGeometry geo = member_geometry(model, state.n);
    smp.t_c = evaluate_elements(model, geo.l, state.l_0c, state.states).t_c;
    smp.error = cs.error;
    smp.t_c_act = cs.t_c_act;
    smp.l_0c_act = cs.l_0c_act;
    history.samples.push_back(std::move(smp));
  };

  Vec n_work = state.n;
  Vec v_work = Vec::Zero(model.n_coords());

  for (long step = 0; step <= n_steps; ++step) {
    try {
      const Vec f_ex0 = extern_schedule.external_force_at(state.t, model.n_coords());
      const ControlStepResult cs = control_step(model, state, problem, f_ex0, opt.zeta);
      for (std::size_t j = 0; j < problem.active_elements.size(); ++j)
        state.l_0c[problem.active_elements[j]] = cs.l_0c_act[static_cast<Index>(j)];

      if (step % opt.stride == 0 || step == n_steps) record(cs);
      if (step == n_steps) break;

      ctx.freeze(state.n, state.l_0c);
      auto stage = [&](double ts, const Vec& na, const Vec& va, Vec& dn, Vec& dv) {
        for (std::size_t i = 0; i < n_free; ++i) n_work[ctx.free[i]] = na[static_cast<Index>(i)];
        for (std::size_t i = 0; i < n_free; ++i) v_work[ctx.free[i]] = va[static_cast<Index>(i)];
        ctx.apply_boundary(ts, n_work, v_work);
        const Vec f_ex = extern_schedule.external_force_at(ts, model.n_coords());
        dn = va;
        dv = ctx.accel(n_work, v_work, state.l_0c, f_ex, state.states);
      };

      const double t = state.t;
      Vec na = gather(state.n, ctx.free);
      Vec va = state.v_a;
      Vec k1n, k1v, k2n, k2v, k3n, k3v, k4n, k4v;
      stage(t, na, va, k1n, k1v);
      stage(t + 0.5 * dt, na + 0.5 * dt * k1n, va + 0.5 * dt * k1v, k2n, k2v);
      stage(t + 0.5 * dt, na + 0.5 * dt * k2n, va + 0.5 * dt * k2v, k3n, k3v);
      stage(t + dt, na + dt * k3n, va + dt * k3v, k4n, k4v);
      na += dt / 6.0 * (k1n + 2.0 * (k2n + k3n) + k4n);
      va += dt / 6.0 * (k1v + 2.0 * (k2v + k3v) + k4v);
      if (!na.allFinite() || !va.allFinite()) throw std::runtime_error("non-finite state");

      state.t = s0.t + static_cast<double>(step + 1) * dt;
      for (std::size_t i = 0; i < n_free; ++i) state.n[ctx.free[i]] = na[static_cast<Index>(i)];
      ctx.apply_boundary(state.t, state.n, v_work);
      state.v_a = va;
      const MemberGeometry geo = member_geometry(model, state.n);
      state.states = evaluate_elements(model, geo.l, state.l_0c, state.states).states;
    } catch (const std::runtime_error& err) {
      history.diverged = true;
      history.message = "closed_loop_sim: " + std::string(err.what()) + " at t = " +
                        std::to_string(state.t) + ", aborting with last valid state";
      return history;
    }
  }
  return history;
}

}  // namespace cts
