#pragma once

#include "ctsdyn/assembly.hpp"
#include "ctsdyn/schedule.hpp"

#include <Eigen/SVD>

#include <limits>

#include <string>
#include <utility>
#include <vector>

namespace cts {

/// Orthonormal basis of the self-stress space null(E_a^T A_1c).
struct PrestressBasis {
  Mat basis;  // n_ec x k
  int k = 0;
  Vec singular_values;
};

constexpr double kRankThreshold = 1e-10;  // relative singular-value cutoff

inline PrestressBasis prestress_modes(const StructureModel& model, const Vec& n) {
  const MemberGeometry geo = member_geometry(model, n);
  const EquilibriumMatrices em = equilibrium_matrices(model, geo);
  const std::vector<int> free = model.free_coords();

  PrestressBasis pb;
  const int n_ec = model.n_elements();
  if (free.empty()) {
    // no free coordinates: every force distribution self-equilibrates
    pb.basis = Mat::Identity(n_ec, n_ec);
    pb.k = n_ec;
    return pb;
  }

  Mat a1c_free(static_cast<Index>(free.size()), n_ec);
  for (std::size_t i = 0; i < free.size(); ++i) a1c_free.row(static_cast<Index>(i)) = em.a1c.row(free[i]);

  Eigen::JacobiSVD<Mat> svd(a1c_free, Eigen::ComputeFullV);
  pb.singular_values = svd.singularValues();
  const double cutoff = pb.singular_values.size() == 0
                            ? 0.0
                            : kRankThreshold * pb.singular_values[0];
  int rank = 0;
  for (Index i = 0; i < pb.singular_values.size(); ++i)
    if (pb.singular_values[i] > cutoff) ++rank;
  pb.k = n_ec - rank;
  pb.basis = svd.matrixV().rightCols(pb.k);
  return pb;
}

/// Self-stress force distribution matching one anchor force per prestress
/// mode. The basis spans force-density space; anchor rows are scaled by the
/// element lengths so the anchors pin forces. Throws when the anchor set does
/// not determine the modes or when a string would have to push.
inline Vec design_prestress(const StructureModel& model, const Vec& n, const PrestressBasis& pb,
                            const std::vector<std::pair<int, double>>& anchors) {
  if (static_cast<int>(anchors.size()) != pb.k)
    throw std::invalid_argument("design_prestress: need exactly " + std::to_string(pb.k) +
                                " anchors, got " + std::to_string(anchors.size()));
  const MemberGeometry geo = member_geometry(model, n);
  const Vec l_c = cluster_lengths(model, geo.l);

  Mat sub(pb.k, pb.k);
  Vec rhs(pb.k);
  for (int i = 0; i < pb.k; ++i) {
    const int e = anchors[static_cast<std::size_t>(i)].first;
    sub.row(i) = l_c[e] * pb.basis.row(e);
    rhs[i] = anchors[static_cast<std::size_t>(i)].second;
  }
  Eigen::FullPivLU<Mat> lu(sub);
  if (!lu.isInvertible())
    throw std::runtime_error("design_prestress: anchor set does not determine the prestress");
  const Vec t_c = l_c.asDiagonal() * (pb.basis * lu.solve(rhs));

  const double scale = t_c.cwiseAbs().maxCoeff();
  for (int e = 0; e < model.n_elements(); ++e)
    if (model.element_kind(e) == MemberKind::String && t_c[e] < -1e-9 * scale)
      throw std::runtime_error("design_prestress: infeasible, string element " +
                               std::to_string(e + 1) + " in compression");
  return t_c;
}

/// Rest lengths that realize the force t_c at the current element lengths,
/// inverting the constitutive law element by element.
inline Vec rest_lengths_for_forces(const StructureModel& model, const Vec& n, const Vec& t_c) {
  const MemberGeometry geo = member_geometry(model, n);
  const Vec l_c = cluster_lengths(model, geo.l);
  Vec l0(model.n_elements());
  for (int e = 0; e < model.n_elements(); ++e) {
    const MaterialLaw& law = model.law_of(e);
    const double area = model.props[e].area;
    if (law.kind == MaterialKind::Linear) {
      const double ea = law.E0 * area;
      if (t_c[e] <= -ea)
        throw std::runtime_error("rest_lengths_for_forces: force below -EA on element " +
                                 std::to_string(e + 1));
      l0[e] = ea * l_c[e] / (t_c[e] + ea);
      continue;
    }
    // monotone in l0: bisect t(l0) - t_c = 0
    double lo = l_c[e] * 1e-3, hi = l_c[e] * 1e3;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double eps = (l_c[e] - mid) / mid;
      const double t = area * stress_eval(law, eps).stress;
      (t > t_c[e] ? lo : hi) = mid;
      if ((hi - lo) < 1e-14 * l_c[e]) break;
    }
    l0[e] = 0.5 * (lo + hi);
  }
  return l0;
}

struct EquilibriumSolution {
  Vec n;                            // full coordinates at equilibrium
  Vec t_c;                          // element forces
  std::vector<MemberState> states;  // committed material history
  double residual = 0.0;            // N, free-coordinate force imbalance
  int iterations = 0;
  // A clustered-string segment has contracted onto its pulley node; the
  // returned state is the formulation's limit point and the residual is the
  // force carried across the vanishing segment. Modeling the contact that
  // takes over from here is out of scope.
  bool pulley_clamp = false;
};

struct StaticOptions {
  double tol_rel = 1e-8;        // residual <= tol_rel * max(1, |f_ex|)
  double tol_internal = 1e-10;  // plus tol_internal * |t_c|_inf, the double-precision floor
  int max_iterations = 150;
  int max_halvings = 30;
  bool require_stable = true;   // quasi-static paths jump off unstable branches
};

/// Newton failed to reduce the residual; carries the best iterate found.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, EquilibriumSolution best_iterate)
      : std::runtime_error(what), best(std::move(best_iterate)) {}
  EquilibriumSolution best;
};

/// Singular tangent along a loaded direction; carries the nullspace.
class MechanismError : public std::runtime_error {
 public:
  MechanismError(const std::string& what, Mat nullspace_basis)
      : std::runtime_error(what), nullspace(std::move(nullspace_basis)) {}
  Mat nullspace;
};

namespace detail {

inline Vec static_residual(const StructureModel& model, const AssemblySet& as, const Vec& f_ex) {
  const Vec full = as.internal_force() - f_ex - as.g;
  return gather(full, as.free);
}

}  // namespace detail

/// Newton iteration with step halving on the free coordinates. Constrained
/// coordinates keep the values carried by n0. The slack set is re-evaluated at
/// every residual evaluation, which makes the residual piecewise smooth; the
/// line search absorbs the kinks.
inline EquilibriumSolution solve_equilibrium(const StructureModel& model, const Vec& n0,
                                             const Vec& l_0c,
                                             const std::vector<MemberState>& states,
                                             const Vec& f_ex, const StaticOptions& opt = {}) {
  Vec n = n0;
  const std::vector<int> free = model.free_coords();
  const double tol_load = opt.tol_rel * std::max(1.0, f_ex.norm());

  AssemblySet as = assemble(model, n, l_0c, states);
  Vec r = detail::static_residual(model, as, f_ex);
  double rnorm = r.norm();
  auto tol = [&] {
    return std::max(tol_load, opt.tol_internal * as.eval.t_c.cwiseAbs().maxCoeff());
  };

  auto make_solution = [&](int iters) {
    EquilibriumSolution sol;
    sol.n = n;
    sol.t_c = as.eval.t_c;
    sol.states = as.eval.states;
    sol.residual = rnorm;
    sol.iterations = iters;
    return sol;
  };

  // A stall can mean the iterate reached the formulation's validity boundary:
  // a clustered-string segment contracted onto its pulley node. The residual
  // is then the tension across the vanishing segment, whose direction is
  // indeterminate; the limit state is returned flagged instead of failing.
  auto clamp_check = [&]() -> bool {
    const double span = std::max(1e-12, model.nodes.maxCoeff() - model.nodes.minCoeff());
    for (int e = 0; e < model.n_elements(); ++e) {
      if (model.clustering.elements[e].size() < 2) continue;
      for (int mem : model.clustering.elements[e])
        if (as.geo.l[mem] <= 1e-3 * span && rnorm <= 2.0 * as.eval.t_c[e]) return true;
    }
    return false;
  };

  // Failure diagnosis: a residual component inside the numerical nullspace of
  // the tangent means a mechanism is loaded and no equilibrium correction
  // exists along it; anything else is a plain non-convergence.
  auto fail = [&](const std::string& how, int iters) -> void {
    Eigen::JacobiSVD<Mat> svd(as.kt_aa, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(kRankThreshold);
    const Vec dx = svd.solve(-r);
    if ((as.kt_aa * dx + r).norm() > 1e-6 * rnorm)
      throw MechanismError(
          "solve_equilibrium: singular tangent stiffness (mechanism along a loaded direction), "
          "residual " + std::to_string(rnorm),
          svd.matrixV().rightCols(svd.cols() - svd.rank()));
    throw SolveError("solve_equilibrium: " + how + " at residual " + std::to_string(rnorm),
                     make_solution(iters));
  };

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    if (rnorm <= tol()) return make_solution(iter);

    // Minimum-norm Gauss-Newton step via a truncated SVD: rigid-body and
    // unloaded mechanism directions (numerically null in K_Taa) receive no
    // motion, so free-floating structures do not drift along them. Step
    // halving guards the soft prestress-stabilized modes whose quadratic
    // model is only locally valid.
    Eigen::JacobiSVD<Mat> svd(as.kt_aa, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(kRankThreshold);
    const Vec dx = svd.solve(-r);
    if (!dx.allFinite()) fail("non-finite step", iter);

    bool accepted = false;
    double alpha = 1.0;
    for (int h = 0; h <= opt.max_halvings; ++h) {
      Vec n_try = n;
      for (std::size_t i = 0; i < free.size(); ++i)
        n_try[free[i]] += alpha * dx[static_cast<Index>(i)];
      try {
        AssemblySet as_try = assemble(model, n_try, l_0c, states);
        Vec r_try = detail::static_residual(model, as_try, f_ex);
        if (r_try.allFinite() && r_try.norm() < rnorm) {
          n = std::move(n_try);
          as = std::move(as_try);
          r = std::move(r_try);
          rnorm = r.norm();
          accepted = true;
          break;
        }
      } catch (const std::runtime_error&) {
        // degenerate trial geometry, treat as a rejected step
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (clamp_check()) {
        EquilibriumSolution sol = make_solution(iter + 1);
        sol.pulley_clamp = true;
        return sol;
      }
      fail("step search stalled", iter + 1);
    }
  }
  if (rnorm <= tol()) return make_solution(opt.max_iterations);
  if (clamp_check()) {
    EquilibriumSolution sol = make_solution(opt.max_iterations);
    sol.pulley_clamp = true;
    return sol;
  }
  fail("no convergence after " + std::to_string(opt.max_iterations) + " iterations",
       opt.max_iterations);
  return make_solution(opt.max_iterations);  // unreachable
}

namespace detail {

/// Total potential (strain + gravity - external work) whose free-coordinate
/// gradient is the static residual; slack strings store nothing.
inline double potential(const StructureModel& model, const Vec& n, const Vec& l_0c,
                        const std::vector<MemberState>& states, const Vec& f_ex) {
  const MemberGeometry geo = member_geometry(model, n);
  const ElementEval ev = evaluate_elements(model, geo.l, l_0c, states);
  const SegmentDistribution seg = redistribute_segment_rest_lengths(model, geo.l, l_0c);
  double v = -f_ex.dot(n) - gravity_vector(model, seg.mass).dot(n);
  for (int e = 0; e < model.n_elements(); ++e) {
    if (ev.slack[e]) continue;
    v += model.props[e].area * l_0c[e] *
         strain_energy_density(model.law_of(e), ev.strain[e], states[static_cast<std::size_t>(e)]);
  }
  return v;
}

/// Damped dynamic relaxation. Fictitious per-coordinate masses follow the
/// tangent-stiffness row sums (Gershgorin), which puts every mode near unit
/// frequency, and a per-step velocity bleed keeps the motion close to
/// critically damped: the iterate sinks into the nearest potential basin
/// without flying over barriers. Robust against slack transitions,
/// snap-through, and the nearly-flat sliding valleys of clustered strings.
inline Vec descend_potential(const StructureModel& model, Vec n, const Vec& l_0c,
                             const std::vector<MemberState>& states, const Vec& f_ex,
                             int max_steps = 20000) {
  const std::vector<int> free = model.free_coords();
  const Index dim = static_cast<Index>(free.size());
  if (dim == 0) return n;

  Vec mass = Vec::Ones(dim);
  auto refresh = [&](const Vec& nn) -> Vec {
    const AssemblySet as = assemble(model, nn, l_0c, states);
    for (Index i = 0; i < dim; ++i) mass[i] = as.kt_aa.row(i).cwiseAbs().sum();
    const double floor = std::max(1e-9 * mass.maxCoeff(), 1e-300);
    for (Index i = 0; i < dim; ++i) mass[i] = std::max(mass[i], floor);
    return gather(Vec(f_ex + as.g - as.internal_force()), as.free);
  };

  Vec r = refresh(n);
  const double tol = 1e-9 * std::max(1.0, r.norm());
  double dt = 0.4;
  constexpr double kBleed = 0.92;
  Vec v = Vec::Zero(dim);

  for (int step = 0; step < max_steps; ++step) {
    if (step % 100 == 0) {
      r = refresh(n);  // track the stiffness scaling as geometry moves
      if (r.norm() <= tol) break;
      dt = std::min(0.4, dt * 1.1);
    }
    for (Index i = 0; i < dim; ++i) v[i] = kBleed * v[i] + dt * r[i] / mass[i];
    Vec n_try = n;
    for (Index i = 0; i < dim; ++i)
      n_try[free[static_cast<std::size_t>(i)]] += dt * v[i];
    try {
      const AssemblySet as = assemble(model, n_try, l_0c, states);
      Vec r_try = gather(Vec(f_ex + as.g - as.internal_force()), as.free);
      if (!r_try.allFinite()) throw std::runtime_error("non-finite");
      n = std::move(n_try);
      r = std::move(r_try);
    } catch (const std::runtime_error&) {
      v.setZero();
      dt *= 0.5;  // degenerate or wild trial, retreat
    }
  }
  return n;
}

}  // namespace detail

/// Escape from an unstable equilibrium (negative tangent eigenvalue): nudge
/// the configuration along the unstable direction, descend the potential into
/// the neighboring basin, and re-solve until the converged point is a local
/// minimum, which is where an actual quasi-static process would sit. The
/// motion hint (free-coordinate displacement of the ongoing path) picks the
/// branch the process is already moving toward at a symmetric bifurcation.
inline EquilibriumSolution stabilize_equilibrium(const StructureModel& model,
                                                 EquilibriumSolution sol, const Vec& l_0c,
                                                 const Vec& f_ex, const StaticOptions& opt = {},
                                                 const Vec& motion_hint = Vec()) {
  const std::vector<int> free = model.free_coords();
  const double size = (model.nodes.maxCoeff() - model.nodes.minCoeff());
  for (int attempt = 0; attempt < 8; ++attempt) {
    const AssemblySet as = assemble(model, sol.n, l_0c, sol.states);
    Eigen::SelfAdjointEigenSolver<Mat> es(as.kt_aa);
    const double scale =
        std::max(std::abs(es.eigenvalues()[0]), es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues()[0] >= -1e-8 * scale) return sol;

    Vec dir = es.eigenvectors().col(0);
    const double overlap =
        motion_hint.size() == dir.size() ? motion_hint.normalized().dot(dir) : 0.0;
    if (overlap < 0.0) dir = -dir;
    const double alpha = size * 1e-3 * std::pow(4.0, attempt);

    // with no meaningful hint (symmetry-breaking bifurcation) compare both
    // signs and keep the lower-potential landing, deterministically
    std::vector<double> signs =
        std::abs(overlap) > 0.1 ? std::vector<double>{1.0} : std::vector<double>{1.0, -1.0};
    Vec n_best;
    double phi_best = std::numeric_limits<double>::infinity();
    for (double sign : signs) {
      Vec n_try = sol.n;
      for (std::size_t i = 0; i < free.size(); ++i)
        n_try[free[i]] += sign * alpha * dir[static_cast<Index>(i)];
      n_try = detail::descend_potential(model, n_try, l_0c, sol.states, f_ex);
      const double phi = detail::potential(model, n_try, l_0c, sol.states, f_ex);
      if (phi < phi_best) {
        phi_best = phi;
        n_best = std::move(n_try);
      }
    }
    try {
      sol = solve_equilibrium(model, n_best, l_0c, sol.states, f_ex, opt);
    } catch (const SolveError&) {
      continue;  // escalate the nudge
    } catch (const MechanismError&) {
      continue;
    }
  }
  throw SolveError("stabilize_equilibrium: no stable equilibrium found", std::move(sol));
}

/// Sequence of equilibria under the schedule sampled at substep fractions,
/// each solve warm-started from the previous one. Entry 0 is the equilibrium
/// at the schedule start.
inline std::vector<EquilibriumSolution> quasi_static_path(const StructureModel& model,
                                                          const Vec& n0, const Vec& l_0c0,
                                                          const std::vector<MemberState>& states0,
                                                          const ActuationSchedule& schedule,
                                                          int substeps,
                                                          const StaticOptions& opt = {}) {
  if (substeps < 1) throw std::invalid_argument("quasi_static_path: substeps must be >= 1");
  const double t0 = schedule.t_begin();
  const double t1 = schedule.t_end();
  const auto boundary_motion = schedule.merged_boundary(model);

  std::vector<EquilibriumSolution> path;
  path.reserve(static_cast<std::size_t>(substeps) + 1);
  Vec n = n0;
  Vec n_prev = n0;
  std::vector<MemberState> states = states0;
  const std::vector<int> free = model.free_coords();

  for (int s = 0; s <= substeps; ++s) {
    const double tau = t0 + (t1 - t0) * (static_cast<double>(s) / substeps);
    const Vec l_0c = schedule.rest_lengths_at(tau, l_0c0);
    const Vec f_ex = schedule.external_force_at(tau, model.n_coords());
    for (const auto& [c, traj] : boundary_motion) n[c] = traj.value(tau);
    try {
      EquilibriumSolution sol = [&] {
        try {
          return solve_equilibrium(model, n, l_0c, states, f_ex, opt);
        } catch (const std::runtime_error&) {
          // snap-through inside the substep: descend into the new basin first
          const Vec n_relaxed = detail::descend_potential(model, n, l_0c, states, f_ex);
          return solve_equilibrium(model, n_relaxed, l_0c, states, f_ex, opt);
        }
      }();
      if (opt.require_stable && !sol.pulley_clamp) {
        const Vec hint = gather(Vec(sol.n - n_prev), free);
        sol = stabilize_equilibrium(model, std::move(sol), l_0c, f_ex, opt, hint);
      }
      n_prev = n;
      n = sol.n;
      states = sol.states;
      path.push_back(std::move(sol));
    } catch (SolveError& err) {
      throw SolveError("substep " + std::to_string(s) + ": " + err.what(), std::move(err.best));
    } catch (MechanismError& err) {
      throw MechanismError("substep " + std::to_string(s) + ": " + err.what(),
                           std::move(err.nullspace));
    }
  }
  return path;
}

}  // namespace cts
