// throwaway: dynamics diagnostics
#include "ctsdyn/linear.hpp"
#include "ctsdyn/scenarios.hpp"

#include <cstdio>

using namespace cts;

int main() {
  ScenarioBundle tb = generate(ScenarioSpec::tbar());
  const StructureModel& m = tb.model;

  // 1. stationarity: zero schedule, equilibrium start
  {
    DynamicState s0{0.0, m.nodes, Vec::Zero(8), m.rest_lengths, m.fresh_states()};
    DynamicOptions opt;
    opt.stride = 1000;
    opt.stability_check = false;
    TimeHistory th = integrate(m, s0, {}, 1.0, 1e-4, opt);
    double drift = 0.0;
    for (const auto& s : th.samples) drift = std::max(drift, (s.n - m.nodes).cwiseAbs().maxCoeff());
    std::printf("stationarity over 1s: max drift %.3e\n", drift);
  }

  // 2. energy conservation in free vibration (perturb mode 4; zeta = 0)
  {
    ModalResult mr = modal(m, m.nodes, m.rest_lengths, m.fresh_states());
    DynamicState s0{0.0, m.nodes, Vec::Zero(8), m.rest_lengths, m.fresh_states()};
    const std::vector<int> free = m.free_coords();
    Vec dn = 1e-3 * mr.shapes.col(3) / mr.shapes.col(3).cwiseAbs().maxCoeff();
    for (size_t i = 0; i < free.size(); ++i) s0.n[free[i]] += dn[i];
    DynamicOptions opt;
    opt.stride = 200;
    opt.stability_check = false;
    const double period = 1.0 / mr.frequency[3];
    TimeHistory th = integrate(m, s0, {}, period, 1e-4, opt);
    const double e0 = th.samples.front().energy.total();
    double emin = e0, emax = e0;
    for (const auto& s : th.samples) {
      emin = std::min(emin, s.energy.total());
      emax = std::max(emax, s.energy.total());
    }
    std::printf("free vib: E0=%.6e rel drift over one period %.3e\n", e0,
                (emax - emin) / std::abs(e0));
  }

  // 3. deployment trace: clustered tension and node3 y
  {
    DynamicState s0{0.0, m.nodes, Vec::Zero(8), m.rest_lengths, m.fresh_states()};
    DynamicOptions opt;
    opt.zeta = 0.01;
    opt.stride = 500;
    opt.stability_check = false;
    TimeHistory th = integrate(m, s0, tb.schedule, 1.0, 1e-4, opt);
    std::printf("deployment trace (t, y3, tc_cluster, tc_s5, l0c_cluster):\n");
    for (const auto& s : th.samples)
      std::printf("  %.3f %8.4f %12.1f %10.3f %8.4f\n", s.t, s.n[7], s.t_c[2], s.t_c[3],
                  s.l_0c[2]);
  }
  return 0;
}
