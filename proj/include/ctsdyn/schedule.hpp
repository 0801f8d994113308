#pragma once

#include "ctsdyn/model.hpp"
#include "ctsdyn/types.hpp"

#include <algorithm>
#include <map>

namespace cts {

/// Prescribed rest-length, external-force, and boundary-motion trajectories.
/// Anything not listed holds its base value; boundary entries override the
/// model's own prescribed-motion table.
struct ActuationSchedule {
  std::map<int, PiecewiseLinear> rest_length;  // element -> l_0c(t)
  std::map<int, PiecewiseLinear> force;        // coordinate -> f_ex(t), N
  std::map<int, PiecewiseLinear> boundary;     // coordinate -> n_b(t), m

  bool empty() const { return rest_length.empty() && force.empty() && boundary.empty(); }

  double t_begin() const {
    double t = 0.0;
    bool any = false;
    for_each_traj([&](const PiecewiseLinear& p) {
      t = any ? std::min(t, p.t_begin()) : p.t_begin();
      any = true;
    });
    return t;
  }

  double t_end() const {
    double t = 0.0;
    bool any = false;
    for_each_traj([&](const PiecewiseLinear& p) {
      t = any ? std::max(t, p.t_end()) : p.t_end();
      any = true;
    });
    return t;
  }

  Vec rest_lengths_at(double t, const Vec& base) const {
    Vec out = base;
    for (const auto& [e, traj] : rest_length) out[e] = traj.value(t);
    return out;
  }

  Vec external_force_at(double t, int n_coords) const {
    Vec f = Vec::Zero(n_coords);
    for (const auto& [c, traj] : force) f[c] = traj.value(t);
    return f;
  }

  /// Boundary trajectories merged over the model's table (schedule wins).
  std::map<int, PiecewiseLinear> merged_boundary(const StructureModel& model) const {
    std::map<int, PiecewiseLinear> merged = model.boundary.prescribed_motion;
    for (const auto& [c, traj] : boundary) merged[c] = traj;
    return merged;
  }

 private:
  template <class F>
  void for_each_traj(F&& f) const {
    for (const auto& [k, p] : rest_length) f(p);
    for (const auto& [k, p] : force) f(p);
    for (const auto& [k, p] : boundary) f(p);
  }
};

}  // namespace cts
