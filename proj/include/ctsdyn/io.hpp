#pragma once

#include "ctsdyn/control.hpp"
#include "ctsdyn/forces.hpp"
#include "ctsdyn/model.hpp"
#include "ctsdyn/schedule.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cts {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
};

inline constexpr int kFormatVersion = 1;

namespace detail {

struct Lines {
  std::string file;
  std::vector<std::pair<int, std::string>> rows;  // (line number, stripped content)

  static Lines load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Lines ls;
    ls.file = path;
    std::string raw;
    int num = 0;
    while (std::getline(in, raw)) {
      ++num;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      std::istringstream probe(raw);
      std::string first;
      if (probe >> first) ls.rows.emplace_back(num, raw);
    }
    return ls;
  }
};

inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

inline double to_double(const std::string& s, const std::string& file, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, line, "expected a number, got '" + s + "'");
  }
}

inline int to_int(const std::string& s, const std::string& file, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, line, "expected an integer, got '" + s + "'");
  }
}

inline PiecewiseLinear parse_trajectory(const std::vector<std::string>& toks, std::size_t from,
                                        const std::string& file, int line) {
  if ((toks.size() - from) % 2 != 0 || toks.size() == from)
    throw ParseError(file, line, "trajectory needs (time, value) pairs");
  std::vector<double> t, v;
  for (std::size_t i = from; i + 1 < toks.size(); i += 2) {
    t.push_back(to_double(toks[i], file, line));
    v.push_back(to_double(toks[i + 1], file, line));
  }
  try {
    return PiecewiseLinear(t, v);
  } catch (const std::exception& e) {
    throw ParseError(file, line, e.what());
  }
}

}  // namespace detail

/// Read a structure-description file. Node, member, element, and coordinate
/// ids are 1-based in the file and 0-based in memory.
inline StructureModel read_structure_file(const std::string& path) {
  using detail::to_double;
  using detail::to_int;
  const detail::Lines ls = detail::Lines::load(path);
  const std::string& f = ls.file;

  StructureModel model;
  std::vector<Vec3> nodes;
  std::vector<std::vector<int>> clusters;
  std::map<std::string, int> material_ids;
  struct PropLine {
    int elem;
    double area;
    std::string material;
    double density;
    std::optional<double> damping;
    int line;
  };
  std::vector<PropLine> prop_lines;
  std::vector<std::pair<int, double>> rest_lines;
  bool saw_version = false;

  std::string section;
  for (const auto& [num, raw] : ls.rows) {
    const auto toks = detail::tokens(raw);
    const std::string& head = toks[0];

    if (section.empty()) {
      if (head == "format_version") {
        if (toks.size() != 2 || to_int(toks[1], f, num) != kFormatVersion)
          throw ParseError(f, num, "unsupported format_version");
        saw_version = true;
      } else if (head == "gravity") {
        if (toks.size() != 4) throw ParseError(f, num, "gravity needs three components");
        for (int d = 0; d < 3; ++d) model.gravity[d] = to_double(toks[1 + d], f, num);
      } else if (head == "nodes" || head == "members" || head == "clusters" ||
                 head == "boundary" || head == "materials" || head == "props" ||
                 head == "rest_lengths") {
        section = head;
      } else {
        throw ParseError(f, num, "unexpected '" + head + "'");
      }
      continue;
    }

    if (head == "end") {
      section.clear();
      continue;
    }

    if (section == "nodes") {
      if (toks.size() != 4) throw ParseError(f, num, "node line: id x y z");
      if (to_int(head, f, num) != static_cast<int>(nodes.size()) + 1)
        throw ParseError(f, num, "node ids must be sequential from 1");
      nodes.emplace_back(to_double(toks[1], f, num), to_double(toks[2], f, num),
                         to_double(toks[3], f, num));
    } else if (section == "members") {
      if (toks.size() != 4) throw ParseError(f, num, "member line: id kind tail head");
      if (to_int(head, f, num) != static_cast<int>(model.members.size()) + 1)
        throw ParseError(f, num, "member ids must be sequential from 1");
      Member m;
      if (toks[1] == "bar")
        m.kind = MemberKind::Bar;
      else if (toks[1] == "string")
        m.kind = MemberKind::String;
      else
        throw ParseError(f, num, "member kind must be bar or string");
      m.tail = to_int(toks[2], f, num) - 1;
      m.head = to_int(toks[3], f, num) - 1;
      model.members.push_back(m);
    } else if (section == "clusters") {
      std::vector<int> ids;
      for (const auto& t : toks) ids.push_back(to_int(t, f, num) - 1);
      clusters.push_back(std::move(ids));
    } else if (section == "boundary") {
      if (head == "fixed") {
        for (std::size_t i = 1; i < toks.size(); ++i)
          model.boundary.fixed.push_back(to_int(toks[i], f, num) - 1);
      } else if (head == "motion") {
        if (toks.size() < 4) throw ParseError(f, num, "motion line: coord id then (t, v) pairs");
        const int coord = to_int(toks[1], f, num) - 1;
        model.boundary.prescribed_motion[coord] = detail::parse_trajectory(toks, 2, f, num);
      } else {
        throw ParseError(f, num, "boundary lines start with fixed or motion");
      }
    } else if (section == "materials") {
      if (toks.size() < 2) throw ParseError(f, num, "material line: name kind params");
      NamedMaterial nm;
      nm.name = head;
      const std::string& kind = toks[1];
      if (kind == "linear") {
        if (toks.size() != 3) throw ParseError(f, num, "linear material: name linear E");
        nm.law = MaterialLaw::linear(to_double(toks[2], f, num));
      } else if (kind == "multilinear" || kind == "plastic") {
        if (toks.size() < 4 || toks.size() % 2 != 0)
          throw ParseError(f, num, "breakpoint material needs (strain, stress) pairs");
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 2; i + 1 < toks.size(); i += 2)
          pts.emplace_back(to_double(toks[i], f, num), to_double(toks[i + 1], f, num));
        nm.law = kind == "multilinear" ? MaterialLaw::multilinear(pts) : MaterialLaw::plastic(pts);
      } else {
        throw ParseError(f, num, "material kind must be linear, multilinear, or plastic");
      }
      material_ids[nm.name] = static_cast<int>(model.materials.size());
      model.materials.push_back(std::move(nm));
    } else if (section == "props") {
      if (toks.size() != 4 && !(toks.size() == 6 && toks[4] == "damping"))
        throw ParseError(f, num, "props line: elem area material density [damping d]");
      PropLine pl;
      pl.elem = to_int(head, f, num) - 1;
      pl.area = to_double(toks[1], f, num);
      pl.material = toks[2];
      pl.density = to_double(toks[3], f, num);
      if (toks.size() == 6) pl.damping = to_double(toks[5], f, num);
      pl.line = num;
      prop_lines.push_back(std::move(pl));
    } else if (section == "rest_lengths") {
      if (toks.size() != 2) throw ParseError(f, num, "rest_lengths line: elem value");
      rest_lines.emplace_back(to_int(head, f, num) - 1, to_double(toks[1], f, num));
    }
  }
  if (!section.empty()) throw ParseError(f, 0, "unterminated section '" + section + "'");
  if (!saw_version) throw ParseError(f, 0, "missing format_version");
  if (nodes.empty()) throw ParseError(f, 0, "missing nodes section");
  if (model.members.empty()) throw ParseError(f, 0, "missing members section");

  model.nodes.resize(3 * static_cast<Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) model.nodes.segment<3>(3 * static_cast<Index>(i)) = nodes[i];

  // canonical element order: by smallest contained member id
  std::vector<bool> owned(model.members.size(), false);
  for (const auto& c : clusters)
    for (int m : c)
      if (m >= 0 && m < static_cast<int>(owned.size())) owned[static_cast<std::size_t>(m)] = true;
  std::vector<std::vector<int>> elements = clusters;
  for (int m = 0; m < model.n_members(); ++m)
    if (!owned[static_cast<std::size_t>(m)]) elements.push_back({m});
  std::sort(elements.begin(), elements.end(), [](const auto& a, const auto& b) {
    return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
  });
  model.clustering.elements = std::move(elements);

  std::sort(model.boundary.fixed.begin(), model.boundary.fixed.end());

  const int n_ec = model.n_elements();
  model.props.assign(static_cast<std::size_t>(n_ec), ElementProps{});
  std::vector<bool> have_prop(static_cast<std::size_t>(n_ec), false);
  std::vector<bool> need_critical(static_cast<std::size_t>(n_ec), false);
  for (const auto& pl : prop_lines) {
    if (pl.elem < 0 || pl.elem >= n_ec)
      throw ParseError(f, pl.line, "props: element id out of range");
    int mat;
    if (auto it = material_ids.find(pl.material); it != material_ids.end()) {
      mat = it->second;
    } else if (auto builtin = builtin_material(pl.material)) {
      mat = static_cast<int>(model.materials.size());
      material_ids[pl.material] = mat;
      model.materials.push_back({pl.material, *builtin});
    } else {
      throw ParseError(f, pl.line, "props: unknown material '" + pl.material + "'");
    }
    model.props[pl.elem] = {pl.area, mat, pl.density, pl.damping.value_or(0.0)};
    have_prop[static_cast<std::size_t>(pl.elem)] = true;
    need_critical[static_cast<std::size_t>(pl.elem)] = !pl.damping.has_value();
  }
  for (int e = 0; e < n_ec; ++e)
    if (!have_prop[static_cast<std::size_t>(e)])
      throw ParseError(f, 0, "props: missing entry for element " + std::to_string(e + 1));

  // rest lengths default to the reference element lengths
  const MemberGeometry geo = member_geometry(model, model.nodes);
  model.rest_lengths = cluster_lengths(model, geo.l);
  for (const auto& [e, v] : rest_lines) {
    if (e < 0 || e >= n_ec) throw ParseError(f, 0, "rest_lengths: element id out of range");
    model.rest_lengths[e] = v;
  }

  // unspecified damping defaults to the critical value
  const Vec d_crit = critical_damping(model);
  for (int e = 0; e < n_ec; ++e)
    if (need_critical[static_cast<std::size_t>(e)]) model.props[e].damping = d_crit[e];

  return model;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_structure_file(const StructureModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "format_version " << kFormatVersion << "\n\n";

  out << "nodes\n";
  for (int i = 0; i < model.n_nodes(); ++i)
    out << i + 1 << " " << detail::fmt(model.nodes[3 * i]) << " "
        << detail::fmt(model.nodes[3 * i + 1]) << " " << detail::fmt(model.nodes[3 * i + 2])
        << "\n";
  out << "end\n\nmembers\n";
  for (int m = 0; m < model.n_members(); ++m)
    out << m + 1 << " " << (model.members[m].kind == MemberKind::Bar ? "bar" : "string") << " "
        << model.members[m].tail + 1 << " " << model.members[m].head + 1 << "\n";
  out << "end\n";

  bool any_cluster = false;
  for (const auto& e : model.clustering.elements) any_cluster = any_cluster || e.size() > 1;
  if (any_cluster) {
    out << "\nclusters\n";
    for (const auto& e : model.clustering.elements) {
      if (e.size() < 2) continue;
      for (std::size_t i = 0; i < e.size(); ++i) out << (i ? " " : "") << e[i] + 1;
      out << "\n";
    }
    out << "end\n";
  }

  out << "\nboundary\nfixed";
  for (int c : model.boundary.fixed) out << " " << c + 1;
  out << "\n";
  for (const auto& [c, traj] : model.boundary.prescribed_motion) {
    out << "motion " << c + 1;
    for (std::size_t i = 0; i < traj.knot_times().size(); ++i)
      out << " " << detail::fmt(traj.knot_times()[i]) << " " << detail::fmt(traj.knot_values()[i]);
    out << "\n";
  }
  out << "end\n\nmaterials\n";
  for (const auto& nm : model.materials) {
    out << nm.name;
    switch (nm.law.kind) {
      case MaterialKind::Linear:
        out << " linear " << detail::fmt(nm.law.E0);
        break;
      case MaterialKind::MultilinearElastic:
      case MaterialKind::Plastic:
        out << (nm.law.kind == MaterialKind::Plastic ? " plastic" : " multilinear");
        for (const auto& [e, s] : nm.law.breakpoints)
          out << " " << detail::fmt(e) << " " << detail::fmt(s);
        break;
    }
    out << "\n";
  }
  out << "end\n\nprops\n";
  for (int e = 0; e < model.n_elements(); ++e)
    out << e + 1 << " " << detail::fmt(model.props[e].area) << " "
        << model.materials[model.props[e].material].name << " "
        << detail::fmt(model.props[e].density) << " damping "
        << detail::fmt(model.props[e].damping) << "\n";
  out << "end\n\nrest_lengths\n";
  for (int e = 0; e < model.n_elements(); ++e)
    out << e + 1 << " " << detail::fmt(model.rest_lengths[e]) << "\n";
  out << "end\n\ngravity " << detail::fmt(model.gravity[0]) << " "
      << detail::fmt(model.gravity[1]) << " " << detail::fmt(model.gravity[2]) << "\n";
}

/// Schedule file: one trajectory per line,
///   rest_length <element id> t v [t v ...]
///   force <coordinate id> t v [t v ...]
///   boundary <coordinate id> t v [t v ...]
inline ActuationSchedule read_schedule_file(const std::string& path) {
  const detail::Lines ls = detail::Lines::load(path);
  ActuationSchedule sched;
  bool saw_version = false;
  for (const auto& [num, raw] : ls.rows) {
    const auto toks = detail::tokens(raw);
    if (toks[0] == "format_version") {
      if (toks.size() != 2 || detail::to_int(toks[1], ls.file, num) != kFormatVersion)
        throw ParseError(ls.file, num, "unsupported format_version");
      saw_version = true;
      continue;
    }
    if (toks.size() < 4) throw ParseError(ls.file, num, "trajectory line: kind id (t, v) pairs");
    const int id = detail::to_int(toks[1], ls.file, num) - 1;
    const PiecewiseLinear traj = detail::parse_trajectory(toks, 2, ls.file, num);
    if (toks[0] == "rest_length")
      sched.rest_length[id] = traj;
    else if (toks[0] == "force")
      sched.force[id] = traj;
    else if (toks[0] == "boundary")
      sched.boundary[id] = traj;
    else
      throw ParseError(ls.file, num, "unknown trajectory kind '" + toks[0] + "'");
  }
  if (!saw_version) throw ParseError(ls.file, 0, "missing format_version");
  return sched;
}

inline void write_schedule_file(const ActuationSchedule& sched, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "format_version " << kFormatVersion << "\n";
  auto dump = [&](const char* kind, const std::map<int, PiecewiseLinear>& m) {
    for (const auto& [id, traj] : m) {
      out << kind << " " << id + 1;
      for (std::size_t i = 0; i < traj.knot_times().size(); ++i)
        out << " " << detail::fmt(traj.knot_times()[i]) << " "
            << detail::fmt(traj.knot_values()[i]);
      out << "\n";
    }
  };
  dump("rest_length", sched.rest_length);
  dump("force", sched.force);
  dump("boundary", sched.boundary);
}

/// Control file:
///   gains <psi> <phi>
///   active <element ids...>
///   target <node id> <x|y|z> <value>            (constant target)
///   target <node id> <x|y|z> t v [t v ...]      (trajectory)
inline ControlProblem read_control_file(const std::string& path) {
  const detail::Lines ls = detail::Lines::load(path);
  ControlProblem cp;
  bool saw_version = false;
  for (const auto& [num, raw] : ls.rows) {
    const auto toks = detail::tokens(raw);
    if (toks[0] == "format_version") {
      if (toks.size() != 2 || detail::to_int(toks[1], ls.file, num) != kFormatVersion)
        throw ParseError(ls.file, num, "unsupported format_version");
      saw_version = true;
    } else if (toks[0] == "gains") {
      if (toks.size() != 3) throw ParseError(ls.file, num, "gains line: gains psi phi");
      cp.psi = detail::to_double(toks[1], ls.file, num);
      cp.phi = detail::to_double(toks[2], ls.file, num);
    } else if (toks[0] == "active") {
      for (std::size_t i = 1; i < toks.size(); ++i)
        cp.active_elements.push_back(detail::to_int(toks[i], ls.file, num) - 1);
    } else if (toks[0] == "target") {
      if (toks.size() < 4) throw ParseError(ls.file, num, "target line: node axis value(s)");
      const int node = detail::to_int(toks[1], ls.file, num) - 1;
      int axis;
      if (toks[2] == "x")
        axis = 0;
      else if (toks[2] == "y")
        axis = 1;
      else if (toks[2] == "z")
        axis = 2;
      else
        throw ParseError(ls.file, num, "target axis must be x, y, or z");
      cp.target_coords.push_back(3 * node + axis);
      if (toks.size() == 4)
        cp.targets.push_back(
            PiecewiseLinear::constant(detail::to_double(toks[3], ls.file, num)));
      else
        cp.targets.push_back(detail::parse_trajectory(toks, 3, ls.file, num));
    } else {
      throw ParseError(ls.file, num, "unknown directive '" + toks[0] + "'");
    }
  }
  if (!saw_version) throw ParseError(ls.file, 0, "missing format_version");
  if (cp.target_coords.empty()) throw ParseError(ls.file, 0, "control file has no targets");
  if (cp.active_elements.empty()) throw ParseError(ls.file, 0, "control file has no active set");
  return cp;
}

/// Deterministic CSV emitter: %.17g doubles, one header row.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path);
  }

  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << "\n";
  }

  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i)
      out_ << (i ? "," : "") << detail::fmt(vals[i]);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

/// Plain dense matrix dump, one row per line.
inline void write_matrix(const Mat& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << detail::fmt(m(i, j));
    out << "\n";
  }
}

}  // namespace cts
