#pragma once

#include "ctsdyn/materials.hpp"
#include "ctsdyn/types.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cts {

enum class MemberKind { Bar, String };

/// One signed-incidence row of the connectivity matrix: a member running from
/// tail node j to head node k.
struct Member {
  int tail = 0;
  int head = 0;
  MemberKind kind = MemberKind::Bar;
};

/// Partition of the classic members into clustered elements. Every member
/// belongs to exactly one element; elements with two or more members model a
/// single cable sliding over frictionless pulleys and must be strings.
struct Clustering {
  std::vector<std::vector<int>> elements;  // member indices per clustered element

  int n_elements() const { return static_cast<int>(elements.size()); }

  /// member index -> clustered element index
  std::vector<int> member_to_element(int n_members) const {
    std::vector<int> map(n_members, -1);
    for (int e = 0; e < n_elements(); ++e)
      for (int m : elements[e])
        if (m >= 0 && m < n_members) map[m] = e;
    return map;
  }

  /// Identity clustering: every member its own element (the TTS special case).
  static Clustering identity(int n_members) {
    Clustering c;
    c.elements.resize(n_members);
    for (int m = 0; m < n_members; ++m) c.elements[m] = {m};
    return c;
  }
};

/// Free/constrained split of the 3*n_n coordinates. Indices are 0-based here;
/// file I/O converts from the 1-based external convention.
struct BoundarySpec {
  std::vector<int> fixed;                           // sorted, unique
  std::map<int, PiecewiseLinear> prescribed_motion; // per fixed coordinate, optional

  std::vector<int> free_indices(int n_coords) const {
    std::vector<int> free;
    free.reserve(n_coords - static_cast<int>(fixed.size()));
    std::size_t f = 0;
    for (int i = 0; i < n_coords; ++i) {
      while (f < fixed.size() && fixed[f] < i) ++f;
      if (f < fixed.size() && fixed[f] == i) continue;
      free.push_back(i);
    }
    return free;
  }
};

/// Per-clustered-element section and material data.
struct ElementProps {
  double area = 0.0;      // m^2
  int material = 0;       // index into StructureModel::materials
  double density = 0.0;   // kg/m^3
  double damping = 0.0;   // N*s/m, scaled by the global damping ratio at run time
};

struct NamedMaterial {
  std::string name;
  MaterialLaw law;
};

/// Immutable structure description. All analysis state (coordinates, rest
/// lengths, plastic history) is carried separately so a model can be shared
/// across solves and threads.
struct StructureModel {
  Vec nodes;                           // reference coordinates, length 3*n_n
  std::vector<Member> members;
  Clustering clustering;
  BoundarySpec boundary;
  std::vector<NamedMaterial> materials;
  std::vector<ElementProps> props;     // n_ec entries
  Vec rest_lengths;                    // l_0c, n_ec entries
  Vec3 gravity = Vec3::Zero();         // m/s^2, physical acceleration vector

  int n_nodes() const { return static_cast<int>(nodes.size() / 3); }
  int n_members() const { return static_cast<int>(members.size()); }
  int n_elements() const { return clustering.n_elements(); }
  int n_coords() const { return static_cast<int>(nodes.size()); }

  std::vector<int> free_coords() const { return boundary.free_indices(n_coords()); }
  const std::vector<int>& fixed_coords() const { return boundary.fixed; }

  const MaterialLaw& law_of(int element) const { return materials[props[element].material].law; }

  MemberKind element_kind(int element) const {
    return members[clustering.elements[element].front()].kind;
  }

  std::vector<MemberState> fresh_states() const {
    return std::vector<MemberState>(static_cast<std::size_t>(n_elements()));
  }

  /// Dense signed incidence matrix C (n_e x n_n).
  Mat connectivity_dense() const {
    Mat c = Mat::Zero(n_members(), n_nodes());
    for (int m = 0; m < n_members(); ++m) {
      c(m, members[m].tail) = -1.0;
      c(m, members[m].head) = 1.0;
    }
    return c;
  }

  /// Dense clustering matrix S (n_ec x n_e).
  Mat clustering_dense() const {
    Mat s = Mat::Zero(n_elements(), n_members());
    for (int e = 0; e < n_elements(); ++e)
      for (int m : clustering.elements[e]) s(e, m) = 1.0;
    return s;
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool pass() const { return violations.empty(); }
};

namespace detail {
inline void check(ValidationReport& report, bool ok, const std::string& what) {
  if (!ok) report.violations.push_back(what);
}
}  // namespace detail

/// Structural consistency check. A model is usable by the other modules iff
/// the report passes; violations are collected rather than thrown so a file
/// can be diagnosed in one pass.
inline ValidationReport validate(const StructureModel& model) {
  using detail::check;
  ValidationReport report;

  const int n_n = model.n_nodes();
  const int n_e = model.n_members();
  const int n_ec = model.n_elements();

  check(report, model.nodes.size() % 3 == 0, "node vector length is not a multiple of 3");
  check(report, n_n > 0, "model has no nodes");
  check(report, n_e > 0, "model has no members");
  check(report, model.nodes.allFinite(), "node coordinates contain non-finite entries");

  std::vector<int> degree(std::max(n_n, 1), 0);
  for (int m = 0; m < n_e; ++m) {
    const Member& mem = model.members[m];
    const bool in_range = mem.tail >= 0 && mem.tail < n_n && mem.head >= 0 && mem.head < n_n;
    check(report, in_range, "member " + std::to_string(m + 1) + ": node index out of range");
    if (!in_range) continue;
    check(report, mem.tail != mem.head,
          "member " + std::to_string(m + 1) + ": tail and head coincide");
    ++degree[mem.tail];
    ++degree[mem.head];
    const Vec3 h = model.nodes.segment<3>(3 * mem.head) - model.nodes.segment<3>(3 * mem.tail);
    check(report, h.norm() > 0.0,
          "member " + std::to_string(m + 1) + ": zero length (coincident nodes)");
  }
  for (int i = 0; i < n_n; ++i)
    check(report, degree[i] > 0, "node " + std::to_string(i + 1) + " is dangling (in no member)");

  // Clustering: a partition of the members.
  std::vector<int> owners(n_e, 0);
  for (int e = 0; e < n_ec; ++e) {
    const auto& mids = model.clustering.elements[e];
    check(report, !mids.empty(), "clustered element " + std::to_string(e + 1) + " is empty");
    bool all_strings = true;
    for (int m : mids) {
      if (m < 0 || m >= n_e) {
        check(report, false,
              "clustered element " + std::to_string(e + 1) + ": member index out of range");
        continue;
      }
      ++owners[m];
      if (model.members[m].kind != MemberKind::String) all_strings = false;
    }
    check(report, mids.size() < 2 || all_strings,
          "clustered element " + std::to_string(e + 1) + " groups a bar across members");
  }
  for (int m = 0; m < n_e; ++m) {
    check(report, owners[m] != 0,
          "member " + std::to_string(m + 1) + " unassigned to any cluster");
    check(report, owners[m] <= 1,
          "member " + std::to_string(m + 1) + " assigned to multiple clusters");
  }

  // Boundary: fixed indices sorted, unique, in range; free/fixed disjoint by
  // construction once uniqueness holds.
  for (std::size_t i = 0; i < model.boundary.fixed.size(); ++i) {
    const int c = model.boundary.fixed[i];
    check(report, c >= 0 && c < model.n_coords(),
          "boundary: fixed coordinate id " + std::to_string(c + 1) + " out of range");
    if (i > 0)
      check(report, model.boundary.fixed[i] > model.boundary.fixed[i - 1],
            "boundary: index " + std::to_string(c + 1) +
                " listed twice (index in both free and constrained sets)");
  }

  check(report, static_cast<int>(model.props.size()) == n_ec,
        "props: expected one entry per clustered element");
  for (int e = 0; e < std::min<int>(n_ec, model.props.size()); ++e) {
    const ElementProps& p = model.props[e];
    check(report, p.area > 0.0, "element " + std::to_string(e + 1) + ": nonpositive area");
    check(report, p.density > 0.0, "element " + std::to_string(e + 1) + ": nonpositive density");
    check(report, p.damping >= 0.0, "element " + std::to_string(e + 1) + ": negative damping");
    check(report, p.material >= 0 && p.material < static_cast<int>(model.materials.size()),
          "element " + std::to_string(e + 1) + ": material id out of range");
  }

  check(report, model.rest_lengths.size() == n_ec,
        "rest lengths: expected one entry per clustered element");
  for (Index e = 0; e < model.rest_lengths.size(); ++e)
    check(report, model.rest_lengths[e] > 0.0,
          "element " + std::to_string(e + 1) + ": nonpositive rest length");

  for (const NamedMaterial& mat : model.materials)
    for (const std::string& why : mat.law.check())
      check(report, false, "material " + mat.name + ": " + why);

  check(report, model.gravity.allFinite(), "gravity vector contains non-finite entries");
  return report;
}

/// n_a = E_a^T n, n_b = E_b^T n.
inline std::pair<Vec, Vec> split_coordinates(const Vec& n, const BoundarySpec& boundary) {
  const int total = static_cast<int>(n.size());
  for (int c : boundary.fixed)
    if (c < 0 || c >= total) throw std::out_of_range("split_coordinates: index out of range");
  const std::vector<int> free = boundary.free_indices(total);
  return {gather(n, free), gather(n, boundary.fixed)};
}

/// n = E_a n_a + E_b n_b; exact inverse of split_coordinates.
inline Vec merge_coordinates(const Vec& n_a, const Vec& n_b, const BoundarySpec& boundary) {
  const int total = static_cast<int>(n_a.size() + n_b.size());
  const std::vector<int> free = boundary.free_indices(total);
  if (static_cast<Index>(free.size()) != n_a.size() ||
      static_cast<Index>(boundary.fixed.size()) != n_b.size())
    throw std::invalid_argument("merge_coordinates: size mismatch");
  Vec n(total);
  for (std::size_t i = 0; i < free.size(); ++i) n[free[i]] = n_a[static_cast<Index>(i)];
  for (std::size_t i = 0; i < boundary.fixed.size(); ++i)
    n[boundary.fixed[i]] = n_b[static_cast<Index>(i)];
  return n;
}

/// Member direction matrix H = N C^T (one column per member) and lengths.
struct MemberGeometry {
  Mat h;  // 3 x n_e
  Vec l;  // n_e
};

inline MemberGeometry member_geometry(const StructureModel& model, const Vec& n) {
  MemberGeometry geo;
  geo.h.resize(3, model.n_members());
  geo.l.resize(model.n_members());
  for (int m = 0; m < model.n_members(); ++m) {
    const Vec3 h =
        n.segment<3>(3 * model.members[m].head) - n.segment<3>(3 * model.members[m].tail);
    const double len = h.norm();
    if (!(len > 0.0) || !std::isfinite(len))
      throw std::runtime_error("degenerate geometry: member " + std::to_string(m + 1) +
                               " has zero length");
    geo.h.col(m) = h;
    geo.l[m] = len;
  }
  return geo;
}

/// l_c = S l.
inline Vec cluster_lengths(const StructureModel& model, const Vec& l) {
  if (l.size() != model.n_members()) throw std::invalid_argument("cluster_lengths: size mismatch");
  Vec lc = Vec::Zero(model.n_elements());
  for (int e = 0; e < model.n_elements(); ++e)
    for (int m : model.clustering.elements[e]) lc[e] += l[m];
  return lc;
}

}  // namespace cts
