// throwaway: T-bar mode-4 sensitivity study
#include "ctsdyn/linear.hpp"
#include "ctsdyn/scenarios.hpp"

#include <cstdio>

using namespace cts;

static void report(const char* tag, const StructureModel& m, const Vec& t_c) {
  StructureModel mm = m;
  mm.rest_lengths = rest_lengths_for_forces(mm, mm.nodes, t_c);
  ModalResult mr = modal(mm, mm.nodes, mm.rest_lengths, mm.fresh_states());
  std::printf("%-28s rigid=%d f4=%.5f f5=%.5f f6=%.5f\n", tag, mr.rigid_modes, mr.frequency[3],
              mr.frequency[4], mr.frequency[5]);
  // Rayleigh split of mode 4: phi' KG phi vs phi' KE phi
  AssemblySet as = assemble(mm, mm.nodes, mm.rest_lengths, mm.fresh_states());
  Vec phi = mr.shapes.col(3);
  Mat kg_aa = submatrix(as.kg, as.free, as.free);
  Mat ke_aa = submatrix(as.ke, as.free, as.free);
  std::printf("  mode4: phiKGphi=%.4f phiKEphi=%.4f  shape:", phi.dot(kg_aa * phi),
              phi.dot(ke_aa * phi));
  for (int i = 0; i < phi.size(); ++i) std::printf(" %.3f", phi[i] / phi.cwiseAbs().maxCoeff());
  std::printf("\n");
}

int main() {
  ScenarioBundle tb = generate(ScenarioSpec::tbar());
  const StructureModel& m = tb.model;

  report("anchor bar1 -100 (designed)", m, tb.fixtures.designed_t_c);

  Vec half = tb.fixtures.designed_t_c * 0.5;
  report("half prestress", m, half);

  Vec paper(5);
  paper << -100, -111.8, 200, 200, 200;
  report("paper triple (no equil)", m, paper);

  Vec paper2(5);
  paper2 << -111.8, -100, 200, 200, 200;
  report("paper triple swap bars", m, paper2);

  Vec tiny = tb.fixtures.designed_t_c * 1e-6;
  report("near-zero prestress", m, tiny);

  Vec strings200 = tb.fixtures.designed_t_c * (200.0 / 111.8033988749895);
  report("scaled: strings at 200", m, strings200);
  return 0;
}
