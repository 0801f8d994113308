#pragma once

#include "ctsdyn/types.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cts {

enum class MaterialKind { Linear, MultilinearElastic, Plastic };

/// Per-element plastic history. Elastic kinds leave it untouched.
struct MemberState {
  double max_strain = 0.0;      // largest strain ever reached (loading envelope)
  double plastic_offset = 0.0;  // permanent strain after full unloading
};

struct StressResult {
  double stress = 0.0;     // Pa
  double secant = 0.0;     // Pa, stress/strain with limit E0 at zero strain
  double tangent = 0.0;    // Pa, local slope of the active branch
  MemberState state;       // updated history
  bool extrapolated = false;  // strain beyond the last breakpoint
};

/// Axial stress-strain law: linear elastic, multilinear elastic, or plastic
/// with elastic unloading at the initial slope. Breakpoints describe the
/// loading envelope for strain >= 0; the first segment passes through the
/// origin. Compression follows the odd mirror of the envelope for the elastic
/// kinds and the unloading line for the plastic kind.
struct MaterialLaw {
  MaterialKind kind = MaterialKind::Linear;
  double E0 = 0.0;                                   // Pa, slope of the first segment
  std::vector<std::pair<double, double>> breakpoints; // (strain, stress), increasing

  static MaterialLaw linear(double young_modulus) {
    MaterialLaw law;
    law.kind = MaterialKind::Linear;
    law.E0 = young_modulus;
    return law;
  }

  static MaterialLaw multilinear(std::vector<std::pair<double, double>> pts) {
    MaterialLaw law;
    law.kind = MaterialKind::MultilinearElastic;
    law.breakpoints = std::move(pts);
    law.E0 = law.breakpoints.empty() ? 0.0 : law.breakpoints[0].second / law.breakpoints[0].first;
    return law;
  }

  static MaterialLaw plastic(std::vector<std::pair<double, double>> pts) {
    MaterialLaw law = multilinear(std::move(pts));
    law.kind = MaterialKind::Plastic;
    return law;
  }

  std::vector<std::string> check() const {
    std::vector<std::string> why;
    if (kind == MaterialKind::Linear) {
      if (!(E0 > 0.0)) why.push_back("nonpositive Young's modulus");
      return why;
    }
    if (breakpoints.empty()) {
      why.push_back("nonlinear law without breakpoints");
      return why;
    }
    double prev_e = 0.0, prev_s = 0.0;
    for (const auto& [e, s] : breakpoints) {
      if (!(e > prev_e)) why.push_back("breakpoint strains must be strictly increasing");
      if (s < prev_s) why.push_back("breakpoint stresses must be nondecreasing");
      prev_e = e;
      prev_s = s;
    }
    if (!(E0 > 0.0)) why.push_back("first segment slope must be positive");
    return why;
  }
};

namespace detail {

/// Loading envelope sigma(eps) for eps >= 0 plus the local slope. Past the
/// last breakpoint the final segment is extrapolated and flagged.
inline void envelope(const MaterialLaw& law, double eps, double& sigma, double& slope,
                     bool& extrapolated) {
  const auto& bp = law.breakpoints;
  double e0 = 0.0, s0 = 0.0;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    const auto [e1, s1] = bp[i];
    if (eps <= e1) {
      slope = (s1 - s0) / (e1 - e0);
      sigma = s0 + slope * (eps - e0);
      return;
    }
    e0 = e1;
    s0 = s1;
  }
  const std::size_t n = bp.size();
  const double el = n >= 2 ? bp[n - 2].first : 0.0;
  const double sl = n >= 2 ? bp[n - 2].second : 0.0;
  slope = (bp[n - 1].second - sl) / (bp[n - 1].first - el);
  sigma = bp[n - 1].second + slope * (eps - bp[n - 1].first);
  extrapolated = true;
}

}  // namespace detail

namespace detail {

/// Integral of the loading envelope from 0 to eps >= 0 (J/m^3).
inline double envelope_energy(const MaterialLaw& law, double eps) {
  const auto& bp = law.breakpoints;
  double area = 0.0, e0 = 0.0, s0 = 0.0;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    const auto [e1, s1] = bp[i];
    if (eps <= e1) {
      const double slope = (s1 - s0) / (e1 - e0);
      const double s = s0 + slope * (eps - e0);
      return area + 0.5 * (s0 + s) * (eps - e0);
    }
    area += 0.5 * (s0 + s1) * (e1 - e0);
    e0 = e1;
    s0 = s1;
  }
  const std::size_t n = bp.size();
  const double el = n >= 2 ? bp[n - 2].first : 0.0;
  const double sl = n >= 2 ? bp[n - 2].second : 0.0;
  const double slope = (bp[n - 1].second - sl) / (bp[n - 1].first - el);
  const double s = bp[n - 1].second + slope * (eps - bp[n - 1].first);
  return area + 0.5 * (bp[n - 1].second + s) * (eps - bp[n - 1].first);
}

}  // namespace detail

/// Stored strain energy per unit volume at a strain (J/m^3). For the plastic
/// kind this is the recoverable elastic part along the unloading line.
inline double strain_energy_density(const MaterialLaw& law, double strain,
                                    const MemberState& state = {});

/// Evaluate stress, secant modulus, and tangent modulus at a strain, advancing
/// the plastic history where applicable.
inline StressResult stress_eval(const MaterialLaw& law, double strain, MemberState state = {}) {
  StressResult r;
  r.state = state;
  switch (law.kind) {
    case MaterialKind::Linear:
      r.stress = law.E0 * strain;
      r.secant = law.E0;
      r.tangent = law.E0;
      return r;
    case MaterialKind::MultilinearElastic: {
      double sigma = 0.0, slope = law.E0;
      if (strain >= 0.0)
        detail::envelope(law, strain, sigma, slope, r.extrapolated);
      else {
        detail::envelope(law, -strain, sigma, slope, r.extrapolated);
        sigma = -sigma;
      }
      r.stress = sigma;
      r.tangent = slope;
      r.secant = strain == 0.0 ? law.E0 : sigma / strain;
      return r;
    }
    case MaterialKind::Plastic: {
      if (strain >= state.max_strain) {
        double sigma = 0.0, slope = law.E0;
        detail::envelope(law, strain, sigma, slope, r.extrapolated);
        r.stress = sigma;
        r.tangent = slope;
        r.state.max_strain = strain;
        r.state.plastic_offset = strain - sigma / law.E0;
      } else {
        r.stress = law.E0 * (strain - state.plastic_offset);
        r.tangent = law.E0;
      }
      r.secant = strain == 0.0 ? law.E0 : r.stress / strain;
      return r;
    }
  }
  return r;
}

/// Stock presets: Q235 rods for bars, steel cable for strings.
inline std::optional<MaterialLaw> builtin_material(const std::string& name) {
  if (name == "steel-Q235") return MaterialLaw::linear(2.06e11);
  if (name == "steel-cable") return MaterialLaw::linear(7.6e10);
  return std::nullopt;
}

inline double strain_energy_density(const MaterialLaw& law, double strain,
                                    const MemberState& state) {
  switch (law.kind) {
    case MaterialKind::Linear:
      return 0.5 * law.E0 * strain * strain;
    case MaterialKind::MultilinearElastic:
      return detail::envelope_energy(law, std::abs(strain));
    case MaterialKind::Plastic: {
      const double sigma = stress_eval(law, strain, state).stress;
      return 0.5 * sigma * sigma / law.E0;
    }
  }
  return 0.0;
}

}  // namespace cts
