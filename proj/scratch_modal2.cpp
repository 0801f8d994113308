// throwaway: chase the 1.4781 Hz reference value
#include "ctsdyn/linear.hpp"
#include "ctsdyn/scenarios.hpp"

#include <cstdio>

using namespace cts;

int main() {
  ScenarioBundle tb = generate(ScenarioSpec::tbar());
  StructureModel m = tb.model;
  AssemblySet as = assemble(m, m.nodes, m.rest_lengths, m.fresh_states());

  // lumped mass variant
  Mat m_lumped = Mat::Zero(m.n_coords(), m.n_coords());
  for (int i = 0; i < m.n_coords(); ++i) m_lumped(i, i) = as.m.row(i).sum();
  Mat ml_aa = submatrix(m_lumped, as.free, as.free);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(as.kt_aa, ml_aa);
  std::printf("lumped-mass freqs:");
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    std::printf(" %.5f", std::sqrt(std::max(0.0, es.eigenvalues()[i])) / (2 * M_PI));
  std::printf("\n");

  // paper K_T variant: material part without the force-density correction
  Vec axial(m.n_elements());
  for (int e = 0; e < m.n_elements(); ++e)
    axial[e] = as.eval.tangent[e] * m.props[e].area / m.rest_lengths[e];
  Mat ke_paper = as.a2c * axial.asDiagonal() * as.a2c.transpose();
  Mat kt_paper = as.kg + ke_paper;
  Mat ktp_aa = submatrix(kt_paper, as.free, as.free);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es2(ktp_aa, as.m_aa);
  std::printf("paper-KT freqs:  ");
  for (int i = 0; i < es2.eigenvalues().size(); ++i)
    std::printf(" %.5f", std::sqrt(std::max(0.0, es2.eigenvalues()[i])) / (2 * M_PI));
  std::printf("\n");

  // paper K_T with lumped mass
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es3(ktp_aa, ml_aa);
  std::printf("paper-KT lumped: ");
  for (int i = 0; i < es3.eigenvalues().size(); ++i)
    std::printf(" %.5f", std::sqrt(std::max(0.0, es3.eigenvalues()[i])) / (2 * M_PI));
  std::printf("\n");

  // K-only (no tangent at all, the force-density stiffness alone)
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es4(submatrix(as.kg, as.free, as.free), as.m_aa);
  std::printf("KG-only freqs:   ");
  for (int i = 0; i < es4.eigenvalues().size(); ++i)
    std::printf(" %.5f", std::sqrt(std::max(0.0, es4.eigenvalues()[i])) / (2 * M_PI));
  std::printf("\n");

  // unclustered (TTS) same prestress, paper formula equivalence check
  StructureModel tts = m;
  tts.clustering = Clustering::identity(6);
  tts.props = {m.props[0], m.props[1], m.props[2], m.props[2], m.props[3], m.props[4]};
  Vec t6(6);
  t6 << tb.fixtures.designed_t_c[0], tb.fixtures.designed_t_c[1], tb.fixtures.designed_t_c[2],
      tb.fixtures.designed_t_c[2], tb.fixtures.designed_t_c[3], tb.fixtures.designed_t_c[4];
  tts.rest_lengths = rest_lengths_for_forces(tts, tts.nodes, t6);
  ModalResult mt = modal(tts, tts.nodes, tts.rest_lengths, tts.fresh_states());
  std::printf("tts 4th=%.5f\n", mt.frequency[3]);
  return 0;
}
