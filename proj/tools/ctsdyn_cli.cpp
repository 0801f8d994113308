// Command-line front end: validate structures, design prestress, run static
// paths, dynamics, modal analysis, linearization, and closed-loop control.
#include "ctsdyn/ctsdyn.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitSolver = 4;
constexpr int kExitDivergence = 5;

struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

cts::StructureModel load_validated(const std::string& path) {
  cts::StructureModel model = cts::read_structure_file(path);
  const cts::ValidationReport report = cts::validate(model);
  if (!report.pass()) {
    std::string msg = "validation failed:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw CliError(kExitValidation, msg);
  }
  return model;
}

std::vector<std::string> node_headers(const cts::StructureModel& model) {
  std::vector<std::string> cols;
  static const char* axis = "xyz";
  for (int i = 0; i < model.n_nodes(); ++i)
    for (int d = 0; d < 3; ++d)
      cols.push_back("n" + std::to_string(i + 1) + "_" + axis[d] + "_m");
  return cols;
}

void append_vec(std::vector<double>& row, const cts::Vec& v) {
  for (cts::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
}

std::filesystem::path prepare_outdir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

void dump_assembly(const cts::StructureModel& model, const std::filesystem::path& dir) {
  const cts::AssemblySet as =
      cts::assemble(model, model.nodes, model.rest_lengths, model.fresh_states());
  cts::write_matrix(as.m, (dir / "M.mat").string());
  cts::write_matrix(as.k, (dir / "K.mat").string());
  cts::write_matrix(as.d, (dir / "D.mat").string());
  cts::write_matrix(as.kt, (dir / "KT.mat").string());
  cts::write_matrix(as.a2c, (dir / "A2c.mat").string());
  cts::write_matrix(as.a1c, (dir / "A1c.mat").string());
  cts::write_matrix(as.b_lc, (dir / "Blc.mat").string());
  cts::write_matrix(as.k_l0c, (dir / "Kl0c.mat").string());
  cts::write_matrix(as.g, (dir / "g.mat").string());
}

void plot_columns(const std::filesystem::path& dir, const std::string& stem,
                  const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
                  const std::vector<std::string>& tracks, const std::string& x_label) {
  for (const std::string& col : tracks) {
    const auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end())
      throw CliError(kExitParse, "unknown column '" + col + "' requested for plotting");
    const std::size_t idx = static_cast<std::size_t>(it - header.begin());
    cts::PlotSeries series;
    series.name = col;
    for (const auto& r : rows) {
      series.x.push_back(r[0]);
      series.y.push_back(r[idx]);
    }
    cts::write_svg_plot((dir / (stem + "_" + col + ".svg")).string(), col, x_label, col, {series});
  }
}

std::vector<std::pair<int, double>> parse_anchors(const std::vector<std::string>& specs) {
  std::vector<std::pair<int, double>> anchors;
  for (const std::string& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw CliError(kExitParse, "anchor must look like <element>=<force>, got '" + s + "'");
    try {
      anchors.emplace_back(std::stoi(s.substr(0, eq)) - 1, std::stod(s.substr(eq + 1)));
    } catch (const std::exception&) {
      throw CliError(kExitParse, "cannot parse anchor '" + s + "'");
    }
  }
  return anchors;
}

int run_validate(const std::string& input) {
  cts::StructureModel model = cts::read_structure_file(input);
  const cts::ValidationReport report = cts::validate(model);
  if (report.pass()) {
    std::printf("pass: %d nodes, %d members, %d elements, %d free coordinates\n",
                model.n_nodes(), model.n_members(), model.n_elements(),
                static_cast<int>(model.free_coords().size()));
    return kExitOk;
  }
  std::printf("fail: %zu violation(s)\n", report.violations.size());
  for (const auto& v : report.violations) std::printf("  %s\n", v.c_str());
  return kExitValidation;
}

int run_prestress(const std::string& input, const std::vector<std::string>& anchor_specs,
                  const std::string& outdir) {
  const cts::StructureModel model = load_validated(input);
  const cts::PrestressBasis pb = cts::prestress_modes(model, model.nodes);
  std::printf("prestress modes: %d\n", pb.k);
  if (anchor_specs.empty()) return kExitOk;

  const auto anchors = parse_anchors(anchor_specs);
  const cts::Vec t_c = cts::design_prestress(model, model.nodes, pb, anchors);
  const cts::Vec l_0c = cts::rest_lengths_for_forces(model, model.nodes, t_c);

  const auto dir = prepare_outdir(outdir);
  cts::CsvWriter csv((dir / "prestress.csv").string());
  csv.header({"element", "t_c_N", "l0c_m"});
  for (int e = 0; e < model.n_elements(); ++e) {
    csv.row({static_cast<double>(e + 1), t_c[e], l_0c[e]});
    std::printf("element %d: t = %.6f N, l0 = %.9f m\n", e + 1, t_c[e], l_0c[e]);
  }
  return kExitOk;
}

int run_static(const std::string& input, const std::string& schedule_path, int substeps,
               const std::string& outdir, bool dump, const std::vector<std::string>& tracks) {
  const cts::StructureModel model = load_validated(input);
  cts::ActuationSchedule schedule;
  if (!schedule_path.empty()) schedule = cts::read_schedule_file(schedule_path);

  const auto path = cts::quasi_static_path(model, model.nodes, model.rest_lengths,
                                           model.fresh_states(), schedule, substeps);

  const auto dir = prepare_outdir(outdir);
  std::vector<std::string> header{"substep"};
  for (const auto& c : node_headers(model)) header.push_back(c);
  for (int e = 0; e < model.n_elements(); ++e) header.push_back("tc" + std::to_string(e + 1) + "_N");
  for (int e = 0; e < model.n_elements(); ++e) header.push_back("l0c" + std::to_string(e + 1) + "_m");
  header.push_back("residual_N");
  header.push_back("iterations");

  std::vector<std::vector<double>> rows;
  for (std::size_t s = 0; s < path.size(); ++s) {
    std::vector<double> row{static_cast<double>(s)};
    append_vec(row, path[s].n);
    append_vec(row, path[s].t_c);
    const double tau = schedule.empty()
                           ? 0.0
                           : schedule.t_begin() + (schedule.t_end() - schedule.t_begin()) *
                                                      (static_cast<double>(s) / substeps);
    append_vec(row, schedule.rest_lengths_at(tau, model.rest_lengths));
    row.push_back(path[s].residual);
    row.push_back(static_cast<double>(path[s].iterations));
    rows.push_back(std::move(row));
  }
  cts::CsvWriter csv((dir / "static.csv").string());
  csv.header(header);
  for (const auto& r : rows) csv.row(r);
  std::printf("wrote %s (%zu substeps)\n", (dir / "static.csv").c_str(), path.size() - 1);
  if (dump) dump_assembly(model, dir);
  if (!tracks.empty()) plot_columns(dir, "static", header, rows, tracks, "substep");
  return kExitOk;
}

int run_dynamic(const std::string& input, const std::string& schedule_path, double t_end,
                double dt, double zeta, int stride, const std::string& outdir,
                const std::vector<std::string>& tracks) {
  const cts::StructureModel model = load_validated(input);
  cts::ActuationSchedule schedule;
  if (!schedule_path.empty()) schedule = cts::read_schedule_file(schedule_path);

  cts::DynamicState s0;
  s0.t = 0.0;
  s0.n = model.nodes;
  s0.v_a = cts::Vec::Zero(static_cast<cts::Index>(model.free_coords().size()));
  s0.l_0c = model.rest_lengths;
  s0.states = model.fresh_states();

  cts::DynamicOptions opt;
  opt.zeta = zeta;
  opt.stride = stride;
  const cts::TimeHistory history = cts::integrate(model, s0, schedule, t_end, dt, opt);
  if (!history.warning.empty()) std::fprintf(stderr, "warning: %s\n", history.warning.c_str());

  const auto dir = prepare_outdir(outdir);
  std::vector<std::string> header{"t_s"};
  for (const auto& c : node_headers(model)) header.push_back(c);
  for (int e = 0; e < model.n_elements(); ++e) header.push_back("tc" + std::to_string(e + 1) + "_N");
  header.push_back("E_kin_J");
  header.push_back("E_strain_J");
  header.push_back("E_grav_J");

  std::vector<std::vector<double>> rows;
  for (const auto& smp : history.samples) {
    std::vector<double> row{smp.t};
    append_vec(row, smp.n);
    append_vec(row, smp.t_c);
    row.push_back(smp.energy.kinetic);
    row.push_back(smp.energy.strain);
    row.push_back(smp.energy.gravity);
    rows.push_back(std::move(row));
  }
  cts::CsvWriter csv((dir / "dynamic.csv").string());
  csv.header(header);
  for (const auto& r : rows) csv.row(r);
  std::printf("wrote %s (%zu samples)\n", (dir / "dynamic.csv").c_str(), history.samples.size());
  if (!tracks.empty()) plot_columns(dir, "dynamic", header, rows, tracks, "t_s");

  if (history.diverged) throw CliError(kExitDivergence, history.message);
  return kExitOk;
}

int run_modal(const std::string& input, int count, double rigid_tol, const std::string& outdir,
              bool dump) {
  const cts::StructureModel model = load_validated(input);
  cts::ModalOptions mo;
  mo.rigid_tol = rigid_tol;
  const cts::ModalResult mr =
      cts::modal(model, model.nodes, model.rest_lengths, model.fresh_states(), mo);

  const int n = count > 0 ? std::min<int>(count, static_cast<int>(mr.omega.size()))
                          : static_cast<int>(mr.omega.size());
  std::printf("%d modes, %d rigid\n", static_cast<int>(mr.omega.size()), mr.rigid_modes);
  std::printf("%-6s %-14s %-14s %s\n", "mode", "freq_hz", "omega_rad_s", "kind");
  for (int i = 0; i < n; ++i)
    std::printf("%-6d %-14.6f %-14.6f %s\n", i + 1, mr.frequency[i], mr.omega[i],
                i < mr.rigid_modes ? "rigid" : "elastic");

  const auto dir = prepare_outdir(outdir);
  cts::CsvWriter csv((dir / "modal.csv").string());
  csv.header({"mode", "freq_hz", "omega_rad_s", "rigid"});
  for (cts::Index i = 0; i < mr.omega.size(); ++i)
    csv.row({static_cast<double>(i + 1), mr.frequency[i], mr.omega[i],
             i < mr.rigid_modes ? 1.0 : 0.0});
  cts::write_matrix(mr.shapes, (dir / "shapes.mat").string());
  if (dump) dump_assembly(model, dir);
  return kExitOk;
}

int run_linearize(const std::string& input, double zeta, const std::string& outdir) {
  const cts::StructureModel model = load_validated(input);
  const cts::LinearModel lm =
      cts::linearize(model, model.nodes, model.rest_lengths, model.fresh_states(), zeta);
  const auto dir = prepare_outdir(outdir);
  cts::write_matrix(lm.a, (dir / "A.mat").string());
  cts::write_matrix(lm.b, (dir / "B.mat").string());
  cts::write_matrix(lm.m_aa, (dir / "Maa.mat").string());
  cts::write_matrix(lm.d_aa, (dir / "Daa.mat").string());
  cts::write_matrix(lm.kt_aa, (dir / "KTaa.mat").string());
  std::printf("state dimension %d, wrote A.mat (%ldx%ld) and B.mat (%ldx%ld) to %s\n",
              static_cast<int>(lm.free.size()) * 2, lm.a.rows(), lm.a.cols(), lm.b.rows(),
              lm.b.cols(), dir.c_str());
  return kExitOk;
}

int run_control(const std::string& input, const std::string& control_path, double t_end,
                double dt, double zeta, int stride, const std::string& outdir,
                const std::vector<std::string>& tracks) {
  const cts::StructureModel model = load_validated(input);
  const cts::ControlProblem problem = cts::read_control_file(control_path);

  cts::DynamicState s0;
  s0.t = 0.0;
  s0.n = model.nodes;
  s0.v_a = cts::Vec::Zero(static_cast<cts::Index>(model.free_coords().size()));
  s0.l_0c = model.rest_lengths;
  s0.states = model.fresh_states();

  cts::DynamicOptions opt;
  opt.zeta = zeta;
  opt.stride = stride;
  const cts::ClosedLoopHistory history = cts::closed_loop_sim(model, s0, problem, t_end, dt, opt);

  const auto dir = prepare_outdir(outdir);
  std::vector<std::string> header{"t_s"};
  for (std::size_t i = 0; i < problem.target_coords.size(); ++i)
    header.push_back("e" + std::to_string(i + 1) + "_m");
  for (std::size_t i = 0; i < problem.target_coords.size(); ++i)
    header.push_back("nc" + std::to_string(i + 1) + "_m");
  for (int e : problem.active_elements) header.push_back("tc_act" + std::to_string(e + 1) + "_N");
  for (int e : problem.active_elements) header.push_back("l0c_act" + std::to_string(e + 1) + "_m");

  std::vector<std::vector<double>> rows;
  for (const auto& smp : history.samples) {
    std::vector<double> row{smp.t};
    append_vec(row, smp.error);
    for (std::size_t i = 0; i < problem.target_coords.size(); ++i)
      row.push_back(smp.n[problem.target_coords[i]]);
    append_vec(row, smp.t_c_act);
    append_vec(row, smp.l_0c_act);
    rows.push_back(std::move(row));
  }
  cts::CsvWriter csv((dir / "control.csv").string());
  csv.header(header);
  for (const auto& r : rows) csv.row(r);
  std::printf("wrote %s (%zu samples)\n", (dir / "control.csv").c_str(),
              history.samples.size());
  if (!tracks.empty()) plot_columns(dir, "control", header, rows, tracks, "t_s");
  if (history.diverged) throw CliError(kExitDivergence, history.message);
  return kExitOk;
}

int run_scenario_gen(const std::string& kind, const std::string& out,
                     const std::string& schedule_out, const std::string& control_out,
                     const cts::ScenarioSpec& base) {
  cts::ScenarioSpec spec = base;
  if (kind == "tbar")
    spec.kind = cts::ScenarioKind::TBar;
  else if (kind == "tower2")
    spec.kind = cts::ScenarioKind::Tower2;
  else if (kind == "levy")
    spec.kind = cts::ScenarioKind::Levy;
  else
    throw CliError(kExitParse, "scenario kind must be tbar, tower2, or levy");

  const cts::ScenarioBundle sb = cts::generate(spec);
  cts::write_structure_file(sb.model, out);
  std::printf("wrote %s: %d nodes, %d members, %d elements, %d prestress mode(s)\n", out.c_str(),
              sb.model.n_nodes(), sb.model.n_members(), sb.model.n_elements(),
              sb.fixtures.expected_prestress_modes);
  if (!schedule_out.empty()) {
    cts::write_schedule_file(sb.schedule, schedule_out);
    std::printf("wrote %s\n", schedule_out.c_str());
  }
  if (!control_out.empty() && !sb.fixtures.control.target_coords.empty()) {
    std::ofstream cf(control_out);
    cf << "format_version " << cts::kFormatVersion << "\n";
    cf << "gains " << sb.fixtures.control.psi << " " << sb.fixtures.control.phi << "\n";
    cf << "active";
    for (int e : sb.fixtures.control.active_elements) cf << " " << e + 1;
    cf << "\n";
    static const char* axis = "xyz";
    for (std::size_t i = 0; i < sb.fixtures.control.target_coords.size(); ++i) {
      const int c = sb.fixtures.control.target_coords[i];
      cf << "target " << c / 3 + 1 << " " << axis[c % 3] << " "
         << sb.fixtures.control.targets[i].knot_values().back() << "\n";
    }
    std::printf("wrote %s\n", control_out.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clustered tensegrity statics, dynamics, and shape control"};
  app.require_subcommand(1);

  std::string input, outdir = ".", schedule_path, control_path;
  std::vector<std::string> anchors, tracks;
  int substeps = 20, stride = 1, mode_count = 0;
  double t_end = 1.0, dt = 1e-4, zeta = 0.0, rigid_tol = 1e-5;
  bool dump = false;

  auto* v = app.add_subcommand("validate", "check a structure file");
  v->add_option("input", input)->required();

  auto* p = app.add_subcommand("prestress", "prestress modes and force design");
  p->add_option("input", input)->required();
  p->add_option("--anchor", anchors, "element=force, one per prestress mode");
  p->add_option("--out", outdir);

  auto* s = app.add_subcommand("static", "quasi-static actuation path");
  s->add_option("input", input)->required();
  s->add_option("--schedule", schedule_path);
  s->add_option("--substeps", substeps);
  s->add_option("--out", outdir);
  s->add_flag("--dump-matrices", dump);
  s->add_option("--plot", tracks, "CSV columns to plot");

  auto* d = app.add_subcommand("dynamic", "nonlinear time integration");
  d->add_option("input", input)->required();
  d->add_option("--schedule", schedule_path);
  d->add_option("--t-end", t_end);
  d->add_option("--dt", dt);
  d->add_option("--zeta", zeta);
  d->add_option("--stride", stride);
  d->add_option("--out", outdir);
  d->add_option("--plot", tracks, "CSV columns to plot");

  auto* m = app.add_subcommand("modal", "natural frequencies and mode shapes");
  m->add_option("input", input)->required();
  m->add_option("--count", mode_count);
  m->add_option("--rigid-tol", rigid_tol);
  m->add_option("--out", outdir);
  m->add_flag("--dump-matrices", dump);

  auto* l = app.add_subcommand("linearize", "state-space model about the file state");
  l->add_option("input", input)->required();
  l->add_option("--zeta", zeta);
  l->add_option("--out", outdir);

  auto* c = app.add_subcommand("control", "closed-loop shape control");
  c->add_option("input", input)->required();
  c->add_option("--control-file", control_path)->required();
  c->add_option("--t-end", t_end);
  c->add_option("--dt", dt);
  c->add_option("--zeta", zeta);
  c->add_option("--stride", stride);
  c->add_option("--out", outdir);
  c->add_option("--plot", tracks, "CSV columns to plot");

  auto* g = app.add_subcommand("scenario", "benchmark structure generators");
  auto* gen = g->add_subcommand("gen", "generate a benchmark structure");
  std::string kind, gen_out = "structure.cts", gen_schedule, gen_control;
  cts::ScenarioSpec spec;
  gen->add_option("kind", kind, "tbar | tower2 | levy")->required();
  gen->add_option("--out", gen_out);
  gen->add_option("--schedule-out", gen_schedule);
  gen->add_option("--control-out", gen_control);
  gen->add_option("--actuation-time", spec.actuation_time);
  gen->add_option("--tower-twist", spec.tower_twist_deg);
  gen->add_option("--levy-c", spec.levy_deploy_ratio);
  gen->add_option("--levy-p", spec.levy_complexity);
  gen->add_option("--levy-radius", spec.levy_radius);

  CLI11_PARSE(app, argc, argv);

  try {
    if (v->parsed()) return run_validate(input);
    if (p->parsed()) return run_prestress(input, anchors, outdir);
    if (s->parsed()) return run_static(input, schedule_path, substeps, outdir, dump, tracks);
    if (d->parsed()) return run_dynamic(input, schedule_path, t_end, dt, zeta, stride, outdir, tracks);
    if (m->parsed()) return run_modal(input, mode_count, rigid_tol, outdir, dump);
    if (l->parsed()) return run_linearize(input, zeta, outdir);
    if (c->parsed()) return run_control(input, control_path, t_end, dt, zeta, stride, outdir, tracks);
    if (g->parsed()) {
      if (!gen->parsed()) throw CliError(kExitParse, "scenario requires the gen subcommand");
      return run_scenario_gen(kind, gen_out, gen_schedule, gen_control, spec);
    }
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code;
  } catch (const cts::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  } catch (const cts::SolveError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  } catch (const cts::MechanismError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitOk;
}
