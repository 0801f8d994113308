#include "ctsdyn/model.hpp"

#include "oracles.hpp"

#include <catch2/catch.hpp>

#include <random>

using namespace cts;

namespace {

StructureModel two_node_bar() {
  StructureModel m;
  m.nodes.resize(6);
  m.nodes << 0, 0, 0, 1, 0, 0;
  m.members = {{0, 1, MemberKind::Bar}};
  m.clustering = Clustering::identity(1);
  m.materials = {{"steel-Q235", MaterialLaw::linear(2.06e11)}};
  m.props = {{1e-4, 0, 7870.0, 0.0}};
  m.rest_lengths = Vec::Ones(1);
  return m;
}

}  // namespace

TEST_CASE("validate accepts a minimal well-formed model") {
  REQUIRE(validate(two_node_bar()).pass());
}

TEST_CASE("validate flags a member unassigned to any cluster") {
  StructureModel m = two_node_bar();
  m.clustering.elements.clear();  // zero column in S
  const auto report = validate(m);
  REQUIRE_FALSE(report.pass());
  bool found = false;
  for (const auto& v : report.violations) found = found || v.find("unassigned") != std::string::npos;
  REQUIRE(found);
}

TEST_CASE("validate flags an index in both free and constrained sets") {
  StructureModel m = two_node_bar();
  m.boundary.fixed = {2, 2};
  const auto report = validate(m);
  REQUIRE_FALSE(report.pass());
  bool found = false;
  for (const auto& v : report.violations)
    found = found || v.find("both free and constrained") != std::string::npos;
  REQUIRE(found);
}

TEST_CASE("validate flags coincident nodes, dangling nodes, bad areas") {
  StructureModel m = two_node_bar();
  m.nodes.segment<3>(3) = m.nodes.segment<3>(0);
  REQUIRE_FALSE(validate(m).pass());

  StructureModel d = two_node_bar();
  d.nodes.conservativeResize(9);
  d.nodes.tail<3>() << 5, 5, 5;
  REQUIRE_FALSE(validate(d).pass());

  StructureModel a = two_node_bar();
  a.props[0].area = 0.0;
  REQUIRE_FALSE(validate(a).pass());
}

TEST_CASE("validate rejects a bar clustered across members") {
  StructureModel m;
  m.nodes.resize(9);
  m.nodes << 0, 0, 0, 1, 0, 0, 2, 0, 0;
  m.members = {{0, 1, MemberKind::Bar}, {1, 2, MemberKind::String}};
  m.clustering.elements = {{0, 1}};
  m.materials = {{"steel-Q235", MaterialLaw::linear(2.06e11)}};
  m.props = {{1e-4, 0, 7870.0, 0.0}};
  m.rest_lengths = Vec::Ones(1);
  REQUIRE_FALSE(validate(m).pass());
}

TEST_CASE("split_coordinates gathers blocks") {
  Vec n(6);
  n << 1, 2, 3, 4, 5, 6;
  BoundarySpec b;
  b.fixed = {3, 4, 5};
  const auto [na, nb] = split_coordinates(n, b);
  REQUIRE(na.isApprox(Vec(Eigen::Vector3d(1, 2, 3))));
  REQUIRE(nb.isApprox(Vec(Eigen::Vector3d(4, 5, 6))));
}

TEST_CASE("split then merge reproduces n bit-exactly") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  Vec n(12);
  for (int i = 0; i < 12; ++i) n[i] = u(rng);
  BoundarySpec b;
  b.fixed = {0, 4, 7, 11};
  const auto [na, nb] = split_coordinates(n, b);
  const Vec back = merge_coordinates(na, nb, b);
  for (int i = 0; i < 12; ++i) REQUIRE(back[i] == n[i]);
}

TEST_CASE("split handles a single free coordinate") {
  Vec n(6);
  n << 1, 2, 3, 4, 5, 6;
  BoundarySpec b;
  b.fixed = {0, 2, 3, 4, 5};
  const auto [na, nb] = split_coordinates(n, b);
  REQUIRE(na.size() == 1);
  REQUIRE(na[0] == 2.0);
}

TEST_CASE("split_coordinates rejects out-of-range indices") {
  Vec n(6);
  n.setZero();
  BoundarySpec b;
  b.fixed = {6};
  REQUIRE_THROWS_AS(split_coordinates(n, b), std::out_of_range);
}

TEST_CASE("member_geometry on a unit axis member") {
  StructureModel m = two_node_bar();
  const MemberGeometry geo = member_geometry(m, m.nodes);
  REQUIRE(geo.h.col(0).isApprox(Eigen::Vector3d(1, 0, 0)));
  REQUIRE(geo.l[0] == Approx(1.0));
}

TEST_CASE("member_geometry 3-4-5 triangle length") {
  StructureModel m = two_node_bar();
  m.nodes << 0, 0, 0, 3, 4, 0;
  REQUIRE(member_geometry(m, m.nodes).l[0] == Approx(5.0));
}

TEST_CASE("member lengths match per-member Euclidean norms on a random frame") {
  const StructureModel m = oracle::random_cts(11);
  const MemberGeometry geo = member_geometry(m, m.nodes);
  for (int j = 0; j < m.n_members(); ++j) {
    const double direct =
        (m.nodes.segment<3>(3 * m.members[j].head) - m.nodes.segment<3>(3 * m.members[j].tail))
            .norm();
    REQUIRE(geo.l[j] == Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("member_geometry reports coincident nodes as degenerate") {
  StructureModel m = two_node_bar();
  Vec n = m.nodes;
  n.segment<3>(3) = n.segment<3>(0);
  REQUIRE_THROWS_WITH(member_geometry(m, n), Catch::Contains("degenerate"));
}

TEST_CASE("cluster_lengths identity and summed clusters") {
  StructureModel m;
  m.nodes.resize(9);
  m.nodes << 0, 0, 0, 1, 0, 0, 3, 0, 0;
  m.members = {{0, 1, MemberKind::String}, {1, 2, MemberKind::String}};
  m.clustering = Clustering::identity(2);
  const Vec l = member_geometry(m, m.nodes).l;
  REQUIRE(cluster_lengths(m, l).isApprox(l));

  m.clustering.elements = {{0, 1}};
  const Vec lc = cluster_lengths(m, l);
  REQUIRE(lc.size() == 1);
  REQUIRE(lc[0] == Approx(3.0));
}

TEST_CASE("connectivity rows sum to zero and absolute rows to two") {
  const StructureModel m = oracle::random_cts(3);
  const Mat c = m.connectivity_dense();
  for (int r = 0; r < c.rows(); ++r) {
    REQUIRE(c.row(r).sum() == 0.0);
    REQUIRE(c.row(r).cwiseAbs().sum() == 2.0);
  }
}

TEST_CASE("clustering matrix is a partition") {
  const StructureModel m = oracle::random_cts(4);
  const Mat s = m.clustering_dense();
  for (int col = 0; col < s.cols(); ++col) REQUIRE(s.col(col).sum() == 1.0);
}

TEST_CASE("lengths are invariant under rigid translation") {
  const StructureModel m = oracle::random_cts(5);
  Vec n = m.nodes;
  for (int i = 0; i < m.n_nodes(); ++i) n.segment<3>(3 * i) += Eigen::Vector3d(1.5, -2.25, 0.75);
  const Vec l0 = member_geometry(m, m.nodes).l;
  const Vec l1 = member_geometry(m, n).l;
  REQUIRE((l0 - l1).cwiseAbs().maxCoeff() < 1e-13 * l0.maxCoeff());
}
