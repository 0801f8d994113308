// throwaway: aspect-ratio variants of the T-bar
#include "ctsdyn/linear.hpp"
#include "ctsdyn/scenarios.hpp"

#include <cstdio>

using namespace cts;

static StructureModel make_variant(double half_w, double half_h, double a_horiz, double a_vert,
                                   int anchor, double force) {
  StructureModel m;
  m.nodes.resize(12);
  m.nodes << -half_w, 0, 0, /**/ 0, half_h, 0, /**/ half_w, 0, 0, /**/ 0, -half_h, 0;
  m.members = {{0, 2, MemberKind::Bar},    {3, 1, MemberKind::Bar},
               {0, 1, MemberKind::String}, {1, 2, MemberKind::String},
               {2, 3, MemberKind::String}, {3, 0, MemberKind::String}};
  m.clustering.elements = {{0}, {1}, {2, 3}, {4}, {5}};
  m.boundary.fixed = {2, 5, 8, 11};
  m.materials = {{"steel-Q235", MaterialLaw::linear(2.06e11)},
                 {"steel-cable", MaterialLaw::linear(7.6e10)}};
  m.props = {{a_horiz, 0, 7870.0, 0.0},
             {a_vert, 0, 7870.0, 0.0},
             {9.138e-7, 1, 7870.0, 0.0},
             {9.138e-7, 1, 7870.0, 0.0},
             {9.138e-7, 1, 7870.0, 0.0}};
  m.rest_lengths = Vec::Zero(5);
  PrestressBasis pb = prestress_modes(m, m.nodes);
  Vec t_c = design_prestress(m, m.nodes, pb, {{anchor, force}});
  m.rest_lengths = rest_lengths_for_forces(m, m.nodes, t_c);
  return m;
}

static void report(const char* tag, const StructureModel& m) {
  ModalResult mr = modal(m, m.nodes, m.rest_lengths, m.fresh_states());
  std::printf("%-44s rigid=%d f4=%.5f f5=%.2f f6=%.2f\n", tag, mr.rigid_modes, mr.frequency[3],
              mr.frequency[4], mr.frequency[5]);
}

int main() {
  report("tall (1m horiz A1, 2m vert A2), anchor horiz",
         make_variant(0.5, 1.0, 1.57e-4, 4.447e-4, 0, -100));
  report("tall, anchor vert", make_variant(0.5, 1.0, 1.57e-4, 4.447e-4, 1, -100));
  report("wide (2m horiz A1, 1m vert A2), anchor horiz",
         make_variant(1.0, 0.5, 1.57e-4, 4.447e-4, 0, -100));
  report("wide, anchor vert", make_variant(1.0, 0.5, 1.57e-4, 4.447e-4, 1, -100));
  report("wide swap areas, anchor horiz", make_variant(1.0, 0.5, 4.447e-4, 1.57e-4, 0, -100));
  report("wide swap areas, anchor vert", make_variant(1.0, 0.5, 4.447e-4, 1.57e-4, 1, -100));
  return 0;
}
