// throwaway exploration harness, not part of the build
#include "ctsdyn/linear.hpp"
#include "ctsdyn/scenarios.hpp"

#include <cstdio>

using namespace cts;

int main(int argc, char** argv) {
  // --- T-bar ---
  try {
    ScenarioBundle tb = generate(ScenarioSpec::tbar());
    auto rep = validate(tb.model);
    std::printf("tbar validate: %s\n", rep.pass() ? "pass" : "FAIL");
    for (auto& v : rep.violations) std::printf("  %s\n", v.c_str());
    std::printf("tbar t_c:");
    for (int e = 0; e < tb.model.n_elements(); ++e) std::printf(" %.4f", tb.fixtures.designed_t_c[e]);
    std::printf("\ntbar l_0c:");
    for (int e = 0; e < tb.model.n_elements(); ++e) std::printf(" %.6f", tb.model.rest_lengths[e]);
    std::printf("\n");
    PrestressBasis pb = prestress_modes(tb.model, tb.model.nodes);
    std::printf("tbar prestress modes: %d\n", pb.k);
    ModalResult mr = modal(tb.model, tb.model.nodes, tb.model.rest_lengths, tb.model.fresh_states());
    std::printf("tbar modal rigid=%d freqs:", mr.rigid_modes);
    for (int i = 0; i < mr.frequency.size(); ++i) std::printf(" %.5f", mr.frequency[i]);
    std::printf("\n");
    // unclustered comparison
    StructureModel tts = tb.model;
    tts.clustering = Clustering::identity(tts.n_members());
    tts.props = {tb.model.props[0], tb.model.props[1], tb.model.props[2],
                 tb.model.props[2], tb.model.props[3], tb.model.props[4]};
    PrestressBasis pbt = prestress_modes(tts, tts.nodes);
    std::printf("tts prestress modes: %d\n", pbt.k);
    Vec t_tts(6);
    t_tts << tb.fixtures.designed_t_c[0], tb.fixtures.designed_t_c[1], tb.fixtures.designed_t_c[2],
        tb.fixtures.designed_t_c[2], tb.fixtures.designed_t_c[3], tb.fixtures.designed_t_c[4];
    tts.rest_lengths = rest_lengths_for_forces(tts, tts.nodes, t_tts);
    ModalResult mt = modal(tts, tts.nodes, tts.rest_lengths, tts.fresh_states());
    std::printf("tts modal rigid=%d freqs:", mt.rigid_modes);
    for (int i = 0; i < mt.frequency.size(); ++i) std::printf(" %.5f", mt.frequency[i]);
    std::printf("\n");
  } catch (std::exception& e) {
    std::printf("tbar EXC: %s\n", e.what());
  }

  // --- tower twist scan ---
  for (double twist : {30.0, 36.0, 40.0, 45.0, 50.0, 54.0, 60.0, 70.0}) {
    try {
      ScenarioSpec sp = ScenarioSpec::tower2();
      sp.tower_twist_deg = twist;
      ScenarioBundle tw = generate(sp);
      PrestressBasis pb = prestress_modes(tw.model, tw.model.nodes);
      double min_string = 1e30;
      for (int e = 8; e < 24; ++e) min_string = std::min(min_string, tw.fixtures.designed_t_c[e]);
      std::printf("tower twist %.0f: modes=%d min_string=%.3f bars=[%.1f %.1f]\n", twist, pb.k,
                  min_string, tw.fixtures.designed_t_c[0], tw.fixtures.designed_t_c[4]);
    } catch (std::exception& e) {
      std::printf("tower twist %.0f EXC: %s\n", twist, e.what());
    }
  }

  // --- levy ---
  for (double c : {0.2, 0.5, 0.8}) {
    try {
      ScenarioBundle lv = generate(ScenarioSpec::levy(c));
      auto rep = validate(lv.model);
      PrestressBasis pb = prestress_modes(lv.model, lv.model.nodes);
      double min_string = 1e30, max_bar = -1e30;
      for (int e = 0; e < lv.model.n_elements(); ++e) {
        if (lv.model.element_kind(e) == MemberKind::String)
          min_string = std::min(min_string, lv.fixtures.designed_t_c[e]);
        else
          max_bar = std::max(max_bar, lv.fixtures.designed_t_c[e]);
      }
      std::printf("levy c=%.1f: validate=%s modes=%d min_string=%.3f max_bar=%.3f\n", c,
                  rep.pass() ? "ok" : "FAIL", pb.k, min_string, max_bar);
      if (!rep.pass())
        for (auto& v : rep.violations) std::printf("  %s\n", v.c_str());
    } catch (std::exception& e) {
      std::printf("levy c=%.1f EXC: %s\n", c, e.what());
    }
  }
  return 0;
}
