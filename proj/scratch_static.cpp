// throwaway: residual floor during the T-bar deployment
#include "ctsdyn/scenarios.hpp"

#include <cstdio>

using namespace cts;

int main() {
  ScenarioBundle tb = generate(ScenarioSpec::tbar());
  const StructureModel& m = tb.model;
  StaticOptions opt;
  opt.tol_rel = 1e-6;  // loose, to see where Newton lands
  Vec n = m.nodes;
  std::vector<MemberState> states = m.fresh_states();
  for (int s = 0; s <= 20; ++s) {
    const double tau = 0.5 * s / 20.0;
    const Vec l0 = tb.schedule.rest_lengths_at(tau, m.rest_lengths);
    try {
      EquilibriumSolution sol = solve_equilibrium(m, n, l0, states, Vec::Zero(12), opt);
      AssemblySet as = assemble(m, sol.n, l0, states);
      std::printf("substep %2d: it=%d res=%.3e tmax=%.1f l_c=%.4f node2y=%.4f\n", s,
                  sol.iterations, sol.residual, as.eval.t_c.cwiseAbs().maxCoeff(), as.l_c[2],
                  sol.n[7]);
      n = sol.n;
      states = sol.states;
    } catch (const SolveError& e) {
      std::printf("substep %2d: STALL %s (best residual %.3e)\n", s, e.what(), e.best.residual);
      n = e.best.n;
    }
  }
  return 0;
}
