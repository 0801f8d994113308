#include "ctsdyn/io.hpp"

#include "ctsdyn/scenarios.hpp"
#include "oracles.hpp"

#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace cts;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ctsdyn_test_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("structure file round trip preserves the model") {
  TempDir dir;
  for (ScenarioKind kind : {ScenarioKind::TBar, ScenarioKind::Tower2, ScenarioKind::Levy}) {
    ScenarioSpec spec;
    spec.kind = kind;
    const StructureModel original = generate(spec).model;
    write_structure_file(original, dir.file("model.cts"));
    const StructureModel back = read_structure_file(dir.file("model.cts"));

    REQUIRE(back.n_nodes() == original.n_nodes());
    REQUIRE(back.n_members() == original.n_members());
    REQUIRE(back.n_elements() == original.n_elements());
    REQUIRE((back.nodes - original.nodes).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((back.rest_lengths - original.rest_lengths).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(back.boundary.fixed == original.boundary.fixed);
    REQUIRE(back.clustering.elements == original.clustering.elements);
    for (int e = 0; e < back.n_elements(); ++e) {
      REQUIRE(back.props[e].area == original.props[e].area);
      REQUIRE(back.props[e].damping == original.props[e].damping);
      REQUIRE(back.law_of(e).E0 == original.law_of(e).E0);
      REQUIRE(back.element_kind(e) == original.element_kind(e));
    }
    REQUIRE(validate(back).pass());
  }
}

TEST_CASE("parser reports line numbers for malformed input") {
  TempDir dir;
  {
    std::ofstream out(dir.file("bad.cts"));
    out << "format_version 1\nnodes\n1 0 0 0\n2 oops 0 0\nend\n";
  }
  REQUIRE_THROWS_WITH(read_structure_file(dir.file("bad.cts")), Catch::Contains("bad.cts:4"));

  {
    std::ofstream out(dir.file("nover.cts"));
    out << "nodes\n1 0 0 0\nend\n";
  }
  REQUIRE_THROWS_WITH(read_structure_file(dir.file("nover.cts")),
                      Catch::Contains("format_version"));

  {
    std::ofstream out(dir.file("badver.cts"));
    out << "format_version 99\n";
  }
  REQUIRE_THROWS_AS(read_structure_file(dir.file("badver.cts")), ParseError);

  REQUIRE_THROWS_WITH(read_structure_file(dir.file("missing.cts")),
                      Catch::Contains("cannot open"));
}

TEST_CASE("materials section supports breakpoint laws and presets") {
  TempDir dir;
  {
    std::ofstream out(dir.file("mat.cts"));
    out << "format_version 1\n"
           "nodes\n1 0 0 0\n2 1 0 0\n3 2 0 0\nend\n"
           "members\n1 string 1 2\n2 string 2 3\nend\n"
           "clusters\n1 2\nend\n"
           "materials\nsoft multilinear 0.001 1e8 0.01 2e8\nend\n"
           "props\n1 1e-4 soft 1000\nend\n"
           "gravity 0 0 -9.8\n";
  }
  const StructureModel m = read_structure_file(dir.file("mat.cts"));
  REQUIRE(m.n_elements() == 1);
  REQUIRE(m.law_of(0).kind == MaterialKind::MultilinearElastic);
  REQUIRE(m.law_of(0).breakpoints.size() == 2);
  REQUIRE(m.gravity[2] == Approx(-9.8));
  // rest lengths default to reference lengths, damping defaults to critical
  REQUIRE(m.rest_lengths[0] == Approx(2.0));
  REQUIRE(m.props[0].damping == Approx(critical_damping(m)[0]));
}

TEST_CASE("prop lines referencing builtin materials work without a materials section") {
  TempDir dir;
  {
    std::ofstream out(dir.file("builtin.cts"));
    out << "format_version 1\n"
           "nodes\n1 0 0 0\n2 1 0 0\nend\n"
           "members\n1 bar 1 2\nend\n"
           "props\n1 1e-4 steel-Q235 7870\nend\n"
           "gravity 0 0 0\n";
  }
  const StructureModel m = read_structure_file(dir.file("builtin.cts"));
  REQUIRE(m.law_of(0).E0 == Approx(2.06e11));
}

TEST_CASE("schedule file round trip") {
  TempDir dir;
  ActuationSchedule sched;
  sched.rest_length[2] = PiecewiseLinear({0.0, 0.5}, {2.23, 0.23});
  sched.force[7] = PiecewiseLinear({0.0, 1.0}, {0.0, 100.0});
  sched.boundary[0] = PiecewiseLinear({0.0, 2.0}, {0.0, 0.1});
  write_schedule_file(sched, dir.file("s.sched"));
  const ActuationSchedule back = read_schedule_file(dir.file("s.sched"));
  REQUIRE(back.rest_length.at(2).value(0.25) == Approx(sched.rest_length.at(2).value(0.25)));
  REQUIRE(back.force.at(7).value(0.6) == Approx(60.0));
  REQUIRE(back.boundary.at(0).t_end() == Approx(2.0));
  REQUIRE(back.t_begin() == Approx(0.0));
  REQUIRE(back.t_end() == Approx(2.0));
}

TEST_CASE("control file parsing") {
  TempDir dir;
  {
    std::ofstream out(dir.file("c.ctl"));
    out << "format_version 1\n"
           "gains 14.142135 50\n"
           "active 3 4 5\n"
           "target 1 y 0.4\n"
           "target 3 y 0 0 1 0.4\n";
  }
  const ControlProblem cp = read_control_file(dir.file("c.ctl"));
  REQUIRE(cp.psi == Approx(14.142135));
  REQUIRE(cp.phi == Approx(50.0));
  REQUIRE(cp.active_elements == std::vector<int>{2, 3, 4});
  REQUIRE(cp.target_coords == std::vector<int>{1, 7});
  REQUIRE(cp.targets[0].value(5.0) == Approx(0.4));
  REQUIRE(cp.targets[1].value(0.5) == Approx(0.2));
}

TEST_CASE("csv output is deterministic") {
  TempDir dir;
  auto write_once = [&](const std::string& name) {
    CsvWriter csv(dir.file(name));
    csv.header({"t_s", "x_m"});
    csv.row({0.1, 1.0 / 3.0});
    csv.row({0.2, 2.0 / 7.0});
  };
  write_once("a.csv");
  write_once("b.csv");
  std::ifstream a(dir.file("a.csv")), b(dir.file("b.csv"));
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  REQUIRE(sa == sb);
  REQUIRE(sa.find("t_s,x_m\n") == 0);
}

TEST_CASE("matrix dump writes one row per line at full precision") {
  TempDir dir;
  Mat m(2, 2);
  m << 1.0, 1.0 / 3.0, -2.5, 1e-17;
  write_matrix(m, dir.file("m.mat"));
  std::ifstream in(dir.file("m.mat"));
  std::string line1, line2;
  std::getline(in, line1);
  std::getline(in, line2);
  REQUIRE(line1 == "1 0.33333333333333331");
  REQUIRE(line2.find("-2.5") == 0);
}

TEST_CASE("svg plot emits polylines for each series") {
  TempDir dir;
  PlotSeries s;
  s.name = "y";
  s.x = {0.0, 1.0, 2.0};
  s.y = {0.0, 1.0, 0.5};
  write_svg_plot(dir.file("p.svg"), "demo", "t", "y", {s});
  std::ifstream in(dir.file("p.svg"));
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(all.find("<svg") == 0);
  REQUIRE(all.find("polyline") != std::string::npos);
}
