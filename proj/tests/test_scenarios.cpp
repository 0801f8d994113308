#include "ctsdyn/scenarios.hpp"

#include "oracles.hpp"

#include <catch2/catch.hpp>

using namespace cts;

TEST_CASE("all generated structures validate") {
  for (const ScenarioBundle& sb :
       {generate(ScenarioSpec::tbar()), generate(ScenarioSpec::tower2()),
        generate(ScenarioSpec::levy())}) {
    const ValidationReport report = validate(sb.model);
    CAPTURE(report.violations);
    REQUIRE(report.pass());
  }
}

TEST_CASE("T-bar counts: six segments, five clustered elements") {
  const ScenarioBundle tb = generate(ScenarioSpec::tbar());
  REQUIRE(tb.model.n_nodes() == 4);
  REQUIRE(tb.model.n_members() == 6);
  REQUIRE(tb.model.n_elements() == 5);
  REQUIRE(tb.model.clustering.elements[2].size() == 2);
  REQUIRE(tb.fixtures.expected_prestress_modes == 1);
  // clustered element length is the sum of its two segments
  const MemberGeometry geo = member_geometry(tb.model, tb.model.nodes);
  const Vec lc = cluster_lengths(tb.model, geo.l);
  REQUIRE(lc[2] == Approx(geo.l[2] + geo.l[3]).epsilon(1e-14));
}

TEST_CASE("tower counts and fixture promises") {
  const ScenarioBundle tw = generate(ScenarioSpec::tower2());
  REQUIRE(tw.model.n_nodes() == 12);
  REQUIRE(tw.model.n_members() == 28);
  REQUIRE(tw.model.n_elements() == 24);
  REQUIRE(prestress_modes(tw.model, tw.model.nodes).k == 5);
  // every string of the designed prestress carries tension
  for (int e = 0; e < tw.model.n_elements(); ++e) {
    if (tw.model.element_kind(e) == MemberKind::String)
      REQUIRE(tw.fixtures.designed_t_c[e] > 0.0);
    else
      REQUIRE(tw.fixtures.designed_t_c[e] < 0.0);
  }
}

TEST_CASE("Levy dome counts, feasibility, and the anchored bar force") {
  const ScenarioBundle lv = generate(ScenarioSpec::levy());
  const int p = 6;
  REQUIRE(lv.model.n_nodes() == 5 * p);
  REQUIRE(lv.model.n_members() == 9 * p);
  REQUIRE(lv.model.n_elements() == 2 * p + 21);
  REQUIRE(prestress_modes(lv.model, lv.model.nodes).k == 1);
  REQUIRE(lv.fixtures.designed_t_c[p] == Approx(-5000.0));
  for (int e = 0; e < lv.model.n_elements(); ++e) {
    if (lv.model.element_kind(e) == MemberKind::String)
      REQUIRE(lv.fixtures.designed_t_c[e] > 0.0);
  }
}

TEST_CASE("generated rest lengths realize the designed prestress at the reference shape") {
  for (const ScenarioBundle& sb :
       {generate(ScenarioSpec::tbar()), generate(ScenarioSpec::tower2()),
        generate(ScenarioSpec::levy())}) {
    const MemberGeometry geo = member_geometry(sb.model, sb.model.nodes);
    const ForceVectors fv =
        member_forces(sb.model, geo.l, sb.model.rest_lengths, sb.model.fresh_states());
    REQUIRE((fv.t_c - sb.fixtures.designed_t_c).cwiseAbs().maxCoeff() <
            1e-6 * sb.fixtures.designed_t_c.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("tower and dome node sets respect their rotational symmetry") {
  auto check_symmetry = [](const StructureModel& m, int fold) {
    const double ang = 2.0 * M_PI / fold;
    const double c = std::cos(ang), s = std::sin(ang);
    for (int i = 0; i < m.n_nodes(); ++i) {
      const Vec3 p = m.nodes.segment<3>(3 * i);
      const Vec3 rotated(c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z());
      double best = 1e9;
      for (int j = 0; j < m.n_nodes(); ++j)
        best = std::min(best, (Vec3(m.nodes.segment<3>(3 * j)) - rotated).norm());
      REQUIRE(best < 1e-10);
    }
  };
  check_symmetry(generate(ScenarioSpec::tower2()).model, 4);
  check_symmetry(generate(ScenarioSpec::levy()).model, 6);
}

TEST_CASE("levy deployment sweep is continuous with positive string forces") {
  std::vector<double> ratios;
  for (double c = 0.2; c <= 0.801; c += 0.05) ratios.push_back(c);
  const auto sweep = levy_deployment_sweep(ScenarioSpec::levy(), ratios);
  REQUIRE(sweep.size() == ratios.size());

  const ScenarioBundle ref = generate(ScenarioSpec::levy());
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    for (int e = 0; e < ref.model.n_elements(); ++e)
      if (ref.model.element_kind(e) == MemberKind::String)
        REQUIRE(sweep[k].t_c[e] > 0.0);
    if (k > 0) {
      // continuity: successive samples change by a bounded fraction
      const double dt_rel = (sweep[k].t_c - sweep[k - 1].t_c).cwiseAbs().maxCoeff() /
                            sweep[k - 1].t_c.cwiseAbs().maxCoeff();
      const double dl_rel = (sweep[k].l_0c - sweep[k - 1].l_0c).cwiseAbs().maxCoeff() /
                            sweep[k - 1].l_0c.cwiseAbs().maxCoeff();
      REQUIRE(dt_rel < 0.35);
      REQUIRE(dl_rel < 0.35);
    }
  }
}

TEST_CASE("levy parameter validation") {
  REQUIRE_THROWS_AS(generate(ScenarioSpec::levy(0.5, 7)), std::invalid_argument);
  REQUIRE_THROWS_AS(generate(ScenarioSpec::levy(1.2, 6)), std::invalid_argument);
}

TEST_CASE("scenario schedules ramp over the first half of the actuation window") {
  const ScenarioBundle tb = generate(ScenarioSpec::tbar(2.0));
  const PiecewiseLinear& traj = tb.schedule.rest_length.at(2);
  REQUIRE(traj.t_begin() == 0.0);
  REQUIRE(traj.t_end() == Approx(1.0));
  REQUIRE(traj.value(0.0) == Approx(tb.model.rest_lengths[2]));
  REQUIRE(traj.value(1.0) == Approx(tb.model.rest_lengths[2] - 2.0));
  REQUIRE(traj.value(1.7) == Approx(tb.model.rest_lengths[2] - 2.0));  // hold
}
