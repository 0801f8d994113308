// throwaway: crash-window diagnostics
#include "ctsdyn/linear.hpp"
#include "ctsdyn/scenarios.hpp"

#include <cstdio>

using namespace cts;

int main() {
  ScenarioBundle tb = generate(ScenarioSpec::tbar());
  const StructureModel& m = tb.model;

  for (double dt : {1e-4, 2e-5}) {
    DynamicState s0{0.0, m.nodes, Vec::Zero(8), m.rest_lengths, m.fresh_states()};
    DynamicOptions opt;
    opt.zeta = 0.01;
    opt.stride = static_cast<int>(0.05 / dt);
    opt.stability_check = false;
    TimeHistory th = integrate(m, s0, tb.schedule, 1.0, dt, opt);
    std::printf("dt=%.0e: (t, y3, y_top, tc_cluster, E_kin, E_total)\n", dt);
    for (const auto& s : th.samples)
      if (s.t > 0.39)
        std::printf("  %.3f %8.4f %8.4f %12.1f %10.4f %12.4f\n", s.t, s.n[7], s.n[4], s.t_c[2],
                    s.energy.kinetic, s.energy.total());
  }

  // quasi-static terminus for comparison
  auto path = quasi_static_path(m, m.nodes, m.rest_lengths, m.fresh_states(), tb.schedule, 20);
  const Vec& nf = path.back().n;
  std::printf("qs terminus nodes: (%.4f,%.4f) (%.4f,%.4f) (%.4f,%.4f) (%.4f,%.4f)\n", nf[0],
              nf[1], nf[3], nf[4], nf[6], nf[7], nf[9], nf[10]);
  double com = 0, mass = 0;
  AssemblySet as = assemble(m, nf, path.back().t_c.size() ? tb.schedule.rest_lengths_at(0.5, m.rest_lengths) : m.rest_lengths, m.fresh_states());
  for (int j = 0; j < m.n_members(); ++j) {
    com += as.seg.mass[j] * 0.5 * (nf[3 * m.members[j].tail + 1] + nf[3 * m.members[j].head + 1]);
    mass += as.seg.mass[j];
  }
  std::printf("qs terminus CoM y = %.4f (initial 0)\n", com / mass);
  return 0;
}
