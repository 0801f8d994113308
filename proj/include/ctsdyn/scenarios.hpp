#pragma once

#include "ctsdyn/control.hpp"
#include "ctsdyn/statics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace cts {

enum class ScenarioKind { TBar, Tower2, Levy };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::TBar;

  double actuation_time = 1.0;  // total T; ramps run over [0, T/2]

  // two-stage tower
  double tower_radius = 1.0;
  double tower_stage_height = 1.0;
  double tower_twist_deg = 45.0;

  // Levy dome
  double levy_radius = 6.0;
  double levy_deploy_ratio = 0.5;  // c in [0, 1], inner hoop radius fraction
  int levy_complexity = 6;         // sectors, multiple of 3
  double levy_z1 = 1.0;            // outer strut top
  double levy_z2 = -1.0;           // outer strut bottom
  double levy_z3 = 2.0;            // inner strut top
  double levy_z4 = 0.0;            // inner strut bottom

  static ScenarioSpec tbar(double t_total = 1.0) {
    ScenarioSpec s;
    s.kind = ScenarioKind::TBar;
    s.actuation_time = t_total;
    return s;
  }
  static ScenarioSpec tower2(double t_total = 1.0) {
    ScenarioSpec s;
    s.kind = ScenarioKind::Tower2;
    s.actuation_time = t_total;
    return s;
  }
  static ScenarioSpec levy(double c = 0.5, int p = 6) {
    ScenarioSpec s;
    s.kind = ScenarioKind::Levy;
    s.levy_deploy_ratio = c;
    s.levy_complexity = p;
    return s;
  }
};

/// Reference quantities the generator can state about its own output.
struct Fixtures {
  std::vector<std::pair<int, double>> prestress_anchors;  // (element, force)
  Vec designed_t_c;             // prestress realized by the generated rest lengths
  int expected_prestress_modes = 0;
  double actuation_time = 0.0;
  ControlProblem control;       // the scenario's stock shape-control task
};

struct ScenarioBundle {
  StructureModel model;
  ActuationSchedule schedule;
  Fixtures fixtures;
};

namespace detail {

inline int material_id(StructureModel& model, const std::string& name) {
  for (std::size_t i = 0; i < model.materials.size(); ++i)
    if (model.materials[i].name == name) return static_cast<int>(i);
  model.materials.push_back({name, *builtin_material(name)});
  return static_cast<int>(model.materials.size() - 1);
}

inline void fill_critical_damping(StructureModel& model) {
  const Vec d = critical_damping(model);
  for (int e = 0; e < model.n_elements(); ++e) model.props[e].damping = d[e];
}

/// Prestress the model in place: design forces from the anchors and back the
/// element rest lengths out of them.
inline Vec apply_prestress(StructureModel& model,
                           const std::vector<std::pair<int, double>>& anchors) {
  const PrestressBasis pb = prestress_modes(model, model.nodes);
  const Vec t_c = design_prestress(model, model.nodes, pb, anchors);
  model.rest_lengths = rest_lengths_for_forces(model, model.nodes, t_c);
  return t_c;
}

inline ScenarioBundle make_tbar(const ScenarioSpec& spec) {
  ScenarioBundle sb;
  StructureModel& m = sb.model;

  m.nodes.resize(12);
  m.nodes << -0.5, 0, 0, /**/ 0, 1, 0, /**/ 0.5, 0, 0, /**/ 0, -1, 0;
  m.members = {
      {0, 2, MemberKind::Bar},     // bar-1, horizontal, 1 m
      {3, 1, MemberKind::Bar},     // bar-2, vertical, 2 m
      {0, 1, MemberKind::String},  // upper left
      {1, 2, MemberKind::String},  // upper right, clustered with the previous
      {2, 3, MemberKind::String},  // lower right
      {3, 0, MemberKind::String},  // lower left
  };
  m.clustering.elements = {{0}, {1}, {2, 3}, {4}, {5}};
  m.boundary.fixed = {2, 5, 8, 11};  // planar: all z pinned

  const int q235 = material_id(m, "steel-Q235");
  const int cable = material_id(m, "steel-cable");
  m.props = {
      {1.57e-4, q235, 7870.0, 0.0},
      {4.447e-4, q235, 7870.0, 0.0},
      {9.138e-7, cable, 7870.0, 0.0},
      {9.138e-7, cable, 7870.0, 0.0},
      {9.138e-7, cable, 7870.0, 0.0},
  };
  m.rest_lengths = Vec::Zero(5);
  fill_critical_damping(m);

  sb.fixtures.prestress_anchors = {{0, -100.0}};
  sb.fixtures.designed_t_c = apply_prestress(m, sb.fixtures.prestress_anchors);
  sb.fixtures.expected_prestress_modes = 1;
  sb.fixtures.actuation_time = spec.actuation_time;

  const double half = spec.actuation_time / 2.0;
  sb.schedule.rest_length[2] =
      PiecewiseLinear({0.0, half}, {m.rest_lengths[2], m.rest_lengths[2] - 2.0});
  sb.schedule.rest_length[3] =
      PiecewiseLinear({0.0, half}, {m.rest_lengths[3], m.rest_lengths[3] + 0.5});
  sb.schedule.rest_length[4] =
      PiecewiseLinear({0.0, half}, {m.rest_lengths[4], m.rest_lengths[4] + 0.5});

  // stock control task: lift the horizontal bar's end nodes to y = 0.4
  sb.fixtures.control.target_coords = {1, 7};
  sb.fixtures.control.targets = {PiecewiseLinear::constant(0.4), PiecewiseLinear::constant(0.4)};
  sb.fixtures.control.psi = 2.0 * std::sqrt(50.0);
  sb.fixtures.control.phi = 50.0;
  sb.fixtures.control.active_elements = {2, 3, 4};
  return sb;
}

inline ScenarioBundle make_tower2(const ScenarioSpec& spec) {
  ScenarioBundle sb;
  StructureModel& m = sb.model;

  const double r = spec.tower_radius;
  const double h = spec.tower_stage_height;
  const double twist = spec.tower_twist_deg * M_PI / 180.0;

  m.nodes.resize(36);
  for (int level = 0; level < 3; ++level)
    for (int i = 0; i < 4; ++i) {
      const double ang = i * M_PI / 2.0 + level * twist;
      m.nodes.segment<3>(3 * (4 * level + i)) =
          Vec3(r * std::cos(ang), r * std::sin(ang), level * h);
    }
  const auto bottom = [](int i) { return i; };
  const auto middle = [](int i) { return 4 + i; };
  const auto top = [](int i) { return 8 + i; };

  // bars spiral one corner per stage, both stages with the same chirality
  for (int i = 0; i < 4; ++i)
    m.members.push_back({bottom(i), middle((i + 1) % 4), MemberKind::Bar});
  for (int i = 0; i < 4; ++i)
    m.members.push_back({middle(i), top((i + 1) % 4), MemberKind::Bar});
  for (int i = 0; i < 4; ++i)
    m.members.push_back({bottom(i), middle(i), MemberKind::String});  // vertical, lower
  for (int i = 0; i < 4; ++i)
    m.members.push_back({middle(i), top(i), MemberKind::String});  // vertical, upper
  for (int i = 0; i < 4; ++i)
    m.members.push_back({bottom(i), bottom((i + 1) % 4), MemberKind::String});
  for (int i = 0; i < 4; ++i)
    m.members.push_back({middle(i), middle((i + 1) % 4), MemberKind::String});
  for (int i = 0; i < 4; ++i)
    m.members.push_back({top(i), top((i + 1) % 4), MemberKind::String});

  m.clustering.elements.clear();
  for (int j = 0; j < 8; ++j) m.clustering.elements.push_back({j});        // bars
  for (int i = 0; i < 4; ++i) m.clustering.elements.push_back({8 + i, 12 + i});
  for (int j = 16; j < 28; ++j) m.clustering.elements.push_back({j});      // squares

  for (int c = 0; c < 12; ++c) m.boundary.fixed.push_back(c);  // bottom nodes pinned

  const int q235 = material_id(m, "steel-Q235");
  const int cable = material_id(m, "steel-cable");
  m.props.assign(24, ElementProps{});
  for (int e = 0; e < 8; ++e) m.props[e] = {2.53e-4, q235, 7870.0, 0.0};     // bars
  for (int e = 8; e < 12; ++e) m.props[e] = {8.17e-7, cable, 7870.0, 0.0};   // verticals
  for (int e = 12; e < 16; ++e) m.props[e] = {8.17e-7, cable, 7870.0, 0.0};  // bottom square
  for (int e = 16; e < 20; ++e) m.props[e] = {1.0e-8, cable, 7870.0, 0.0};   // middle square
  for (int e = 20; e < 24; ++e) m.props[e] = {5.78e-7, cable, 7870.0, 0.0};  // top square
  m.rest_lengths = Vec::Zero(24);
  fill_critical_damping(m);

  sb.fixtures.prestress_anchors = {{12, 100.0}, {13, 100.0}, {14, 100.0}, {15, 100.0},
                                   {8, 100.0}};
  sb.fixtures.designed_t_c = apply_prestress(m, sb.fixtures.prestress_anchors);
  sb.fixtures.expected_prestress_modes = 5;
  sb.fixtures.actuation_time = spec.actuation_time;

  const double half = spec.actuation_time / 2.0;
  for (int e = 8; e < 12; ++e)
    sb.schedule.rest_length[e] =
        PiecewiseLinear({0.0, half}, {m.rest_lengths[e], m.rest_lengths[e] - 0.7});

  // stock control task: fold the tower, top ring from 2h down to h
  for (int i = 0; i < 4; ++i) {
    sb.fixtures.control.target_coords.push_back(3 * top(i) + 2);
    sb.fixtures.control.targets.push_back(PiecewiseLinear::constant(h));
  }
  sb.fixtures.control.psi = 2.0 * std::sqrt(100.0);
  sb.fixtures.control.phi = 100.0;
  sb.fixtures.control.active_elements = {8, 9, 10, 11};
  return sb;
}

inline ScenarioBundle make_levy(const ScenarioSpec& spec) {
  if (spec.levy_complexity < 3 || spec.levy_complexity % 3 != 0)
    throw std::invalid_argument("levy: complexity must be a positive multiple of 3");
  const int p = spec.levy_complexity;
  const double c = spec.levy_deploy_ratio;
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("levy: deploy ratio must be in (0,1)");

  ScenarioBundle sb;
  StructureModel& m = sb.model;

  const double r_outer = spec.levy_radius;
  const double r1 = r_outer * (1.0 + c) / 2.0;  // outer strut ring
  const double r2 = r_outer * c;                // inner strut ring (the hoop the ratio names)

  const auto pn = [&](int i) { return i % p; };
  const auto otn = [&](int i) { return p + i % p; };
  const auto obn = [&](int i) { return 2 * p + i % p; };
  const auto itn = [&](int i) { return 3 * p + i % p; };
  const auto ibn = [&](int i) { return 4 * p + i % p; };

  m.nodes.resize(15 * p);
  for (int i = 0; i < p; ++i) {
    const double ang = 2.0 * M_PI * i / p;
    const double cs = std::cos(ang), sn = std::sin(ang);
    m.nodes.segment<3>(3 * pn(i)) = Vec3(r_outer * cs, r_outer * sn, 0.0);
    m.nodes.segment<3>(3 * otn(i)) = Vec3(r1 * cs, r1 * sn, spec.levy_z1);
    m.nodes.segment<3>(3 * obn(i)) = Vec3(r1 * cs, r1 * sn, spec.levy_z2);
    m.nodes.segment<3>(3 * itn(i)) = Vec3(r2 * cs, r2 * sn, spec.levy_z3);
    m.nodes.segment<3>(3 * ibn(i)) = Vec3(r2 * cs, r2 * sn, spec.levy_z4);
  }

  // group order: OB, IB, ORS, IRS, ODS, IDS, OHS, IHS, THS
  for (int i = 0; i < p; ++i) m.members.push_back({otn(i), obn(i), MemberKind::Bar});
  for (int i = 0; i < p; ++i) m.members.push_back({itn(i), ibn(i), MemberKind::Bar});
  for (int i = 0; i < p; ++i) m.members.push_back({pn(i), otn(i), MemberKind::String});
  for (int i = 0; i < p; ++i) m.members.push_back({otn(i), itn(i), MemberKind::String});
  for (int i = 0; i < p; ++i) m.members.push_back({pn(i), obn(i), MemberKind::String});
  for (int i = 0; i < p; ++i) m.members.push_back({ibn(i), otn(i), MemberKind::String});
  for (int i = 0; i < p; ++i) m.members.push_back({obn(i), obn(i + 1), MemberKind::String});
  for (int i = 0; i < p; ++i) m.members.push_back({ibn(i), ibn(i + 1), MemberKind::String});
  for (int i = 0; i < p; ++i) m.members.push_back({itn(i), itn(i + 1), MemberKind::String});

  // bars individual, every string group clustered into three arcs
  m.clustering.elements.clear();
  for (int j = 0; j < 2 * p; ++j) m.clustering.elements.push_back({j});
  const int arc = p / 3;
  for (int grp = 0; grp < 7; ++grp)
    for (int k = 0; k < 3; ++k) {
      std::vector<int> ids;
      for (int j = 0; j < arc; ++j) ids.push_back((2 + grp) * p + k * arc + j);
      m.clustering.elements.push_back(ids);
    }

  for (int i = 0; i < p; ++i)
    for (int d = 0; d < 3; ++d) m.boundary.fixed.push_back(3 * pn(i) + d);
  std::sort(m.boundary.fixed.begin(), m.boundary.fixed.end());

  const int q235 = material_id(m, "steel-Q235");
  const int cable = material_id(m, "steel-cable");
  const int n_ec = 2 * p + 21;
  m.props.assign(n_ec, ElementProps{});
  for (int e = 0; e < 2 * p; ++e) m.props[e] = {1.0e-4, q235, 7870.0, 0.0};
  for (int e = 2 * p; e < n_ec; ++e) m.props[e] = {5.0e-5, cable, 7870.0, 0.0};
  m.rest_lengths = Vec::Zero(n_ec);
  fill_critical_damping(m);

  sb.fixtures.prestress_anchors = {{p, -5000.0}};  // first inner bar
  sb.fixtures.designed_t_c = apply_prestress(m, sb.fixtures.prestress_anchors);
  sb.fixtures.expected_prestress_modes = 1;
  sb.fixtures.actuation_time = spec.actuation_time;
  return sb;
}

}  // namespace detail

inline ScenarioBundle generate(const ScenarioSpec& spec) {
  switch (spec.kind) {
    case ScenarioKind::TBar:
      return detail::make_tbar(spec);
    case ScenarioKind::Tower2:
      return detail::make_tower2(spec);
    case ScenarioKind::Levy:
      return detail::make_levy(spec);
  }
  throw std::invalid_argument("generate: unknown scenario kind");
}

/// Static redesign of the Levy dome across deployment ratios: designed element
/// forces and the rest lengths realizing them at each c.
struct LevySweepPoint {
  double c = 0.0;
  Vec t_c;
  Vec l_0c;
};

inline std::vector<LevySweepPoint> levy_deployment_sweep(ScenarioSpec spec,
                                                         const std::vector<double>& ratios) {
  std::vector<LevySweepPoint> sweep;
  sweep.reserve(ratios.size());
  for (double c : ratios) {
    spec.levy_deploy_ratio = c;
    const ScenarioBundle sb = generate(spec);
    sweep.push_back({c, sb.fixtures.designed_t_c, sb.model.rest_lengths});
  }
  return sweep;
}

}  // namespace cts
