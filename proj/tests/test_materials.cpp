#include "ctsdyn/forces.hpp"

#include "oracles.hpp"

#include <catch2/catch.hpp>

using namespace cts;

namespace {

StructureModel string_pair(double l1, double l2) {
  StructureModel m;
  m.nodes.resize(9);
  m.nodes << 0, 0, 0, l1, 0, 0, l1 + l2, 0, 0;
  m.members = {{0, 1, MemberKind::String}, {1, 2, MemberKind::String}};
  m.clustering.elements = {{0, 1}};
  m.materials = {{"steel-cable", MaterialLaw::linear(7.6e10)}};
  m.props = {{9.138e-7, 0, 7870.0, 0.0}};
  m.rest_lengths = Vec::Ones(1);
  return m;
}

}  // namespace

TEST_CASE("linear stress at Q235 modulus") {
  const MaterialLaw law = MaterialLaw::linear(2.06e11);
  const StressResult r = stress_eval(law, 1e-3);
  REQUIRE(r.stress == Approx(2.06e8));
  REQUIRE(r.secant == Approx(2.06e11));
  REQUIRE(r.tangent == Approx(2.06e11));
}

TEST_CASE("zero strain gives zero stress for every kind") {
  for (const MaterialLaw& law :
       {MaterialLaw::linear(1e10), MaterialLaw::multilinear({{0.001, 1e8}, {0.01, 2e8}}),
        MaterialLaw::plastic({{0.001, 1e8}, {0.01, 2e8}})}) {
    REQUIRE(stress_eval(law, 0.0).stress == 0.0);
  }
}

TEST_CASE("plastic bilinear load then unload follows the elastic slope") {
  // envelope: 100 MPa at strain 0.001, then 10 GPa tangent
  const MaterialLaw law = MaterialLaw::plastic({{0.001, 100e6}, {0.1, 100e6 + 10e9 * 0.099}});
  StressResult load = stress_eval(law, 0.002);
  REQUIRE(load.stress == Approx(110e6));
  REQUIRE(load.tangent == Approx(10e9));
  const StressResult unload = stress_eval(law, 0.0015, load.state);
  REQUIRE(unload.stress == Approx(60e6));  // 110 MPa - 100 GPa * 0.0005
  REQUIRE(unload.tangent == Approx(100e9));
  REQUIRE(unload.state.max_strain == Approx(0.002));
}

TEST_CASE("strain past the last breakpoint extrapolates and flags") {
  const MaterialLaw law = MaterialLaw::multilinear({{0.001, 1e8}, {0.01, 2e8}});
  const StressResult r = stress_eval(law, 0.02);
  REQUIRE(r.extrapolated);
  REQUIRE(r.stress == Approx(2e8 + (0.01) * (1e8 / 0.009)).epsilon(1e-9));
}

TEST_CASE("plastic max strain never decreases") {
  const MaterialLaw law = MaterialLaw::plastic({{0.001, 1e8}, {0.05, 3e8}});
  MemberState s;
  double prev_max = 0.0;
  for (double eps : {0.002, 0.004, 0.001, 0.006, 0.003, 0.010}) {
    s = stress_eval(law, eps, s).state;
    REQUIRE(s.max_strain >= prev_max);
    prev_max = s.max_strain;
  }
}

TEST_CASE("linear strain->stress->strain round trip") {
  const MaterialLaw law = MaterialLaw::linear(7.6e10);
  for (double eps : {1e-6, 3.7e-4, 0.12}) {
    const double back = stress_eval(law, eps).stress / law.E0;
    REQUIRE(back == Approx(eps).epsilon(1e-14));
  }
}

TEST_CASE("multilinear elastic recovers along the same curve") {
  const MaterialLaw law = MaterialLaw::multilinear({{0.001, 1e8}, {0.01, 1.5e8}});
  MemberState s;
  const double up = stress_eval(law, 0.005, s).stress;
  s = stress_eval(law, 0.009, s).state;  // go higher, then come back
  REQUIRE(stress_eval(law, 0.005, s).stress == Approx(up));
}

TEST_CASE("string at rest length carries no force, slack clamps to zero") {
  StructureModel m = string_pair(1.0, 1.0);
  m.rest_lengths[0] = 2.0;
  const Vec l = member_geometry(m, m.nodes).l;
  ForceVectors fv = member_forces(m, l, m.rest_lengths, m.fresh_states());
  REQUIRE(fv.t_c[0] == 0.0);

  m.rest_lengths[0] = 2.5;  // slack
  fv = member_forces(m, l, m.rest_lengths, m.fresh_states());
  REQUIRE(fv.t_c[0] == 0.0);
  REQUIRE(fv.x_c[0] == 0.0);
}

TEST_CASE("slack stays slack as the element shortens further") {
  StructureModel m = string_pair(1.0, 1.0);
  m.rest_lengths[0] = 2.5;
  for (double scale : {1.0, 0.9, 0.7, 0.5}) {
    Vec n = m.nodes * scale;
    const Vec l = member_geometry(m, n).l;
    REQUIRE(member_forces(m, l, m.rest_lengths, m.fresh_states()).t_c[0] == 0.0);
  }
}

TEST_CASE("t = S^T t_c exactly") {
  const StructureModel m = oracle::random_cts(21);
  const Vec l = member_geometry(m, m.nodes).l;
  const ForceVectors fv = member_forces(m, l, m.rest_lengths, m.fresh_states());
  const Vec expected = m.clustering_dense().transpose() * fv.t_c;
  for (int j = 0; j < m.n_members(); ++j) REQUIRE(fv.t[j] == expected[j]);
}

TEST_CASE("force densities divide by the right lengths") {
  StructureModel m = string_pair(1.0, 2.0);
  const MemberGeometry geo = member_geometry(m, m.nodes);
  const Vec l_c = cluster_lengths(m, geo.l);

  Vec t_c(1);
  t_c << 6.0;
  const auto [x, x_c] = force_densities(m, t_c, geo.l, l_c);
  REQUIRE(x_c[0] == Approx(2.0));   // 6 N / 3 m
  REQUIRE(x[0] == Approx(6.0));     // segment of 1 m
  REQUIRE(x[1] == Approx(3.0));     // segment of 2 m

  // identity clustering: x equals x_c elementwise
  StructureModel tts = m;
  tts.clustering = Clustering::identity(2);
  tts.props = {m.props[0], m.props[0]};
  tts.rest_lengths = Vec::Ones(2);
  Vec t2(2);
  t2 << 10.0, 10.0;
  const auto [x2, x_c2] = force_densities(tts, t2, geo.l, cluster_lengths(tts, geo.l));
  REQUIRE(x2.isApprox(x_c2));
  REQUIRE(x_c2[0] == Approx(10.0));
}

TEST_CASE("redistribution: unstressed state keeps current lengths and masses") {
  StructureModel m = string_pair(1.0, 1.1);
  const MemberGeometry geo = member_geometry(m, m.nodes);
  m.rest_lengths[0] = 2.1;  // exactly unstressed
  const SegmentDistribution seg = redistribute_segment_rest_lengths(m, geo.l, m.rest_lengths);
  REQUIRE(seg.rest_length.isApprox(geo.l));
  REQUIRE(seg.mass[0] == Approx(7870.0 * 9.138e-7 * 1.0));
}

TEST_CASE("redistribution: identity clustering returns l_0c unchanged") {
  StructureModel m = string_pair(1.0, 1.3);
  m.clustering = Clustering::identity(2);
  m.props = {m.props[0], m.props[0]};
  m.rest_lengths = Vec(2);
  m.rest_lengths << 0.95, 1.21;
  const MemberGeometry geo = member_geometry(m, m.nodes);
  const SegmentDistribution seg = redistribute_segment_rest_lengths(m, geo.l, m.rest_lengths);
  REQUIRE(seg.rest_length[0] == Approx(0.95).epsilon(1e-14));
  REQUIRE(seg.rest_length[1] == Approx(1.21).epsilon(1e-14));
}

TEST_CASE("two-segment cluster splits against the scalar equal-tension solve") {
  StructureModel m = string_pair(1.0, 1.1);
  m.rest_lengths[0] = 2.0;  // taut
  const MemberGeometry geo = member_geometry(m, m.nodes);
  const SegmentDistribution seg = redistribute_segment_rest_lengths(m, geo.l, m.rest_lengths);

  // scalar oracle: equal tension t across both segments, sum of rests = l_0c;
  // bisect t such that l1/(1+eps(t)) + l2/(1+eps(t)) = l_0c with eps = t/EA
  const double ea = 7.6e10 * 9.138e-7;
  double lo = 0.0, hi = 1e9;
  for (int i = 0; i < 200; ++i) {
    const double t = 0.5 * (lo + hi);
    const double sum = (1.0 + 1.1) / (1.0 + t / ea);
    (sum > m.rest_lengths[0] ? lo : hi) = t;
  }
  const double t_star = 0.5 * (lo + hi);
  REQUIRE(seg.rest_length[0] == Approx(1.0 / (1.0 + t_star / ea)).epsilon(1e-10));
  REQUIRE(seg.rest_length[1] == Approx(1.1 / (1.0 + t_star / ea)).epsilon(1e-10));

  // per-segment sums and tensions
  REQUIRE(seg.rest_length.sum() == Approx(m.rest_lengths[0]).epsilon(1e-12));
  const double t1 = ea * (geo.l[0] - seg.rest_length[0]) / seg.rest_length[0];
  const double t2 = ea * (geo.l[1] - seg.rest_length[1]) / seg.rest_length[1];
  REQUIRE(t1 == Approx(t2).epsilon(1e-8));
}

TEST_CASE("redistribution conserves cluster mass even when slack") {
  StructureModel m = string_pair(1.0, 1.1);
  m.rest_lengths[0] = 2.4;  // slack
  const MemberGeometry geo = member_geometry(m, m.nodes);
  const SegmentDistribution seg = redistribute_segment_rest_lengths(m, geo.l, m.rest_lengths);
  REQUIRE(seg.mass.sum() == Approx(7870.0 * 9.138e-7 * 2.4).epsilon(1e-12));
  REQUIRE(seg.rest_length.sum() == Approx(2.4).epsilon(1e-12));
}

TEST_CASE("critical damping matches the scalar formula") {
  StructureModel m = string_pair(1.0, 1.0);
  const Vec d = critical_damping(m);
  const double by_hand =
      (2.0 * std::sqrt(3.0) / 3.0) * std::sqrt(7870.0) * 9.138e-7 * std::sqrt(7.6e10);
  REQUIRE(d[0] == Approx(by_hand).epsilon(1e-12));
  // equivalent closed form (2A/3) sqrt(3 rho E)
  REQUIRE(d[0] == Approx(2.0 * 9.138e-7 / 3.0 * std::sqrt(3.0 * 7870.0 * 7.6e10)).epsilon(1e-12));
}

TEST_CASE("builtin material presets") {
  REQUIRE(builtin_material("steel-Q235")->E0 == Approx(2.06e11));
  REQUIRE(builtin_material("steel-cable")->E0 == Approx(7.6e10));
  REQUIRE_FALSE(builtin_material("unobtainium").has_value());
}
