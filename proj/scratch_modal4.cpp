// throwaway: which string pair is clustered?
#include "ctsdyn/linear.hpp"
#include "ctsdyn/scenarios.hpp"

#include <cstdio>

using namespace cts;

static void trial(const char* tag, std::vector<std::vector<int>> clusters, int anchor,
                  double force) {
  StructureModel m;
  m.nodes.resize(12);
  m.nodes << -0.5, 0, 0, /**/ 0, 1, 0, /**/ 0.5, 0, 0, /**/ 0, -1, 0;
  m.members = {{0, 2, MemberKind::Bar},    {3, 1, MemberKind::Bar},
               {0, 1, MemberKind::String}, {1, 2, MemberKind::String},
               {2, 3, MemberKind::String}, {3, 0, MemberKind::String}};
  m.clustering.elements = std::move(clusters);
  m.boundary.fixed = {2, 5, 8, 11};
  m.materials = {{"steel-Q235", MaterialLaw::linear(2.06e11)},
                 {"steel-cable", MaterialLaw::linear(7.6e10)}};
  m.props.assign(m.n_elements(), {9.138e-7, 1, 7870.0, 0.0});
  m.props[0] = {1.57e-4, 0, 7870.0, 0.0};
  m.props[1] = {4.447e-4, 0, 7870.0, 0.0};
  m.rest_lengths = Vec::Zero(m.n_elements());
  PrestressBasis pb = prestress_modes(m, m.nodes);
  Vec t_c = design_prestress(m, m.nodes, pb, {{anchor, force}});
  m.rest_lengths = rest_lengths_for_forces(m, m.nodes, t_c);
  ModalResult mr = modal(m, m.nodes, m.rest_lengths, m.fresh_states());
  std::printf("%-36s rigid=%d f4=%.5f f5=%.4f f6=%.4f f7=%.4f\n", tag, mr.rigid_modes,
              mr.frequency[3], mr.frequency[4], mr.frequency[5],
              mr.frequency.size() > 6 ? mr.frequency[6] : 0.0);
}

int main() {
  trial("adjacent top {s1,s2}", {{0}, {1}, {2, 3}, {4}, {5}}, 0, -100);
  trial("opposite {s1,s3}", {{0}, {1}, {2, 4}, {3}, {5}}, 0, -100);
  trial("opposite {s1,s4}", {{0}, {1}, {2, 5}, {3}, {4}}, 0, -100);
  trial("adjacent left {s4,s1}", {{0}, {1}, {5, 2}, {3}, {4}}, 0, -100);
  trial("both pairs clustered", {{0}, {1}, {2, 3}, {4, 5}}, 0, -100);
  trial("all four one cable", {{0}, {1}, {2, 3, 4, 5}}, 0, -100);
  return 0;
}
