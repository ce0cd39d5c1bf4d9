#include "shapelab/cli.hpp"

#include "shapelab/config.hpp"
#include "shapelab/csv.hpp"
#include "shapelab/errors.hpp"
#include "shapelab/optimizer.hpp"
#include "shapelab/parallel.hpp"
#include "shapelab/sampling.hpp"
#include "shapelab/shapegrad.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#ifndef SHAPELAB_VERSION
#define SHAPELAB_VERSION "0.0.0"
#endif

namespace shapelab {

const char* tool_version() { return SHAPELAB_VERSION; }

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::string domain;
  std::string out;
  std::optional<double> h;
  std::optional<int> rings;
  std::optional<double> grid;
  std::optional<int> jobs;
  std::optional<long long> seed;
  bool plot = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "experiment config (INI)");
  cmd->add_option("--domain", c.domain, "domain file with a [domain] section");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--h", c.h, "mesh size");
  cmd->add_option("--rings", c.rings, "pinned ring count");
  cmd->add_option("--grid", c.grid, "background grid spacing");
  cmd->add_option("--jobs", c.jobs, "worker threads");
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_flag("--plot", c.plot, "also write a gnuplot script");
}

// Collected output; nothing touches the file system until flush().
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string name, std::string text) { files.emplace_back(std::move(name), std::move(text)); }

  void flush(const std::string& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
    for (const auto& [name, text] : files) {
      const fs::path path = fs::path(dir) / name;
      std::ofstream f(path, std::ios::binary);
      if (!f) throw ValidationError("cannot write '" + path.string() + "'");
      f << text;
    }
  }
};

class Session {
 public:
  Session(std::string command, const Common& c) : command_(std::move(command)) {
    if (!c.config.empty()) cfg_ = load_config(c.config);
    if (!c.domain.empty()) cfg_.domain = load_domain(c.domain);
    if (c.h) cfg_.mesh.h = *c.h;
    if (c.rings) cfg_.mesh.rings = *c.rings;
    if (c.grid) cfg_.mesh.grid = *c.grid;
    if (c.jobs) cfg_.run.jobs = *c.jobs;
    if (c.seed) {
      if (*c.seed < 0) throw ValidationError("--seed must be nonnegative");
      cfg_.run.seed = static_cast<std::uint64_t>(*c.seed);
    }
    if (!c.out.empty()) cfg_.run.output_dir = c.out;
    if (!(cfg_.mesh.h > 0.0) || cfg_.mesh.rings < 0 || cfg_.mesh.grid < 0.0)
      throw ValidationError("mesh parameters out of range");
    if (cfg_.run.jobs < 1) throw ValidationError("--jobs must be positive");
    cfg_.energy.validate();
    plot_ = c.plot;
  }

  ExperimentConfig& cfg() { return cfg_; }
  const ExperimentConfig& cfg() const { return cfg_; }
  bool plot() const { return plot_; }

  const StarDomain& domain() const {
    if (!cfg_.domain) throw ValidationError(command_ + ": no domain given (--domain or a [domain] section)");
    return *cfg_.domain;
  }

  /// Extra options that change results take part in the config hash.
  void option(const std::string& key, const std::string& value) { extra_ += key + " = " + value + "\n"; }

  std::string hash() const {
    return fmt::format("{:016x}", fnv1a("command = " + command_ + "\n" + canonical_text(cfg_) + extra_));
  }

  CsvTable table(std::vector<std::string> columns, double h) const {
    CsvTable t(std::move(columns));
    const EnergyParams& p = cfg_.energy;
    t.meta("tool", std::string("shapelab ") + tool_version());
    t.meta("command", command_);
    t.meta("config_hash", hash());
    t.meta("seed", std::to_string(cfg_.run.seed));
    t.meta("h", format_double(h));
    t.meta("energy", fmt::format("v={} vmax={} eta={} torsion={} tau={} c_nl={} c0={} h_norm={}", format_double(p.v),
                                 format_double(p.vmax), format_double(p.eta), format_double(p.torsion_coeff),
                                 format_double(p.tau), format_double(p.c_nl), format_double(p.c0),
                                 format_double(p.h_norm)));
    return t;
  }

 private:
  std::string command_;
  ExperimentConfig cfg_;
  std::string extra_;
  bool plot_ = false;
};

std::string gnuplot_header() {
  return "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n";
}

long long as_int(std::size_t n) { return static_cast<long long>(n); }

// --- subcommands ------------------------------------------------------------

void cmd_eig(Session& s, Outputs& o, std::ostream& out) {
  const DomainSolution sol = solve_domain(s.domain(), s.cfg().mesh);
  const SpectralResult& sp = sol.spectrum;
  CsvTable t = s.table({"lambda1", "lambda2", "gap", "gap_ok", "residual1", "residual2", "iterations", "vertices", "h"},
                       sol.h);
  t.row({sp.lambda1, sp.lambda2, sp.lambda2 - sp.lambda1, static_cast<long long>(sp.gap_ok), sp.residual1,
         sp.residual2, static_cast<long long>(sp.iterations), as_int(sol.system.mesh.num_vertices()), sol.h});
  o.add("eig.csv", t.text());
  out << fmt::format("lambda1 = {:.10f}\nlambda2 = {:.10f}\n", sp.lambda1, sp.lambda2);
}

void cmd_torsion(Session& s, Outputs& o, std::ostream& out) {
  const DomainSolution sol = solve_domain(s.domain(), s.cfg().mesh);
  const TorsionResult& tr = sol.torsion;
  const double identity = std::abs(tr.dirichlet - tr.integral) / std::abs(tr.integral);
  CsvTable t = s.table({"tor", "dirichlet", "integral", "identity_rel_err", "vertices", "h"}, sol.h);
  t.row({tr.tor, tr.dirichlet, tr.integral, identity, as_int(sol.system.mesh.num_vertices()), sol.h});
  o.add("torsion.csv", t.text());
  out << fmt::format("tor = {:.10f}\nidentity_rel_err = {:.3e}\n", tr.tor, identity);
}

void cmd_energy(Session& s, Outputs& o, std::ostream& out) {
  const EnergyReport r = evaluate(s.domain(), s.cfg().energy, s.cfg().mesh);
  CsvTable t = s.table({"lambda1", "lambda2", "tor", "vol", "f_pen", "d0", "d1", "asym", "d_star_sq", "h_val", "E_base",
                        "F_total", "gap_ok"},
                       r.mesh_h);
  t.row({r.lambda1, r.lambda2, r.tor, r.vol, r.f_pen, r.d_report.d0, r.d_report.d1, r.d_report.asym,
         r.d_report.d_star_sq, r.h_val, r.E_base, r.F_total, static_cast<long long>(r.gap_ok)});
  o.add("energy.csv", t.text());
  out << fmt::format("E_base = {:.10f}\nF_total = {:.10f}\n", r.E_base, r.F_total);
}

void cmd_distances(Session& s, Outputs& o, std::ostream& out) {
  const DomainSolution sol = solve_domain(s.domain(), s.cfg().mesh);
  const DistanceReport d = distance_report(sol, s.cfg().energy.c0, s.cfg().mesh.grid);
  CsvTable t = s.table({"d0", "d0_std_error", "d1", "asym", "d_star_sq", "ball_x", "ball_y", "ball_radius", "c0"},
                       sol.h);
  t.row({d.d0, d.d0_std_error, d.d1, d.asym, d.d_star_sq, d.matched.center.x(), d.matched.center.y(),
         d.matched.radius, d.c0});
  o.add("distances.csv", t.text());
  out << fmt::format("d0 = {:.8f}\nd1 = {:.8f}\nasym = {:.8f}\nd_star_sq = {:.8e}\n", d.d0, d.d1, d.asym,
                     d.d_star_sq);
}

void cmd_hadamard(Session& s, Outputs& o, std::ostream& out, int n_domains, int n_fields, double step) {
  if (n_domains < 1 || n_fields < 1 || !(step > 0.0)) throw ValidationError("hadamard-check: counts and step must be positive");
  s.option("domains", std::to_string(n_domains));
  s.option("fields", std::to_string(n_fields));
  s.option("step", format_double(step));
  std::mt19937_64 rng(s.cfg().run.seed);
  struct Case {
    StarDomain d;
    BoundaryField f;
    std::string label;
  };
  std::vector<Case> cases;
  for (int i = 0; i < n_domains; ++i) {
    const StarDomain d = random_domain(rng);
    for (int j = 0; j < n_fields; ++j) cases.push_back({d, random_field(rng), fmt::format("d{}f{}", i, j)});
  }
  std::vector<std::vector<GradientCheckRow>> rows(cases.size());
  parallel_for(cases.size(), s.cfg().run.jobs,
               [&](std::size_t i) { rows[i] = check_gradient(cases[i].d, cases[i].f, s.cfg().mesh, step); });

  CsvTable t = s.table({"functional", "field", "analytic", "fd", "rel_err", "fd_order", "fd_exact"}, s.cfg().mesh.h);
  double worst = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i)
    for (const auto& r : rows[i]) {
      t.row({r.functional, cases[i].label, r.analytic, r.fd, r.rel_err, r.fd_order, static_cast<long long>(r.fd_exact)});
      worst = std::max(worst, r.rel_err);
    }
  o.add("hadamard.csv", t.text());
  if (s.plot())
    o.add("hadamard.gp", gnuplot_header() + "set logscale y\nplot 'hadamard.csv' using 0:5 with points title 'rel_err'\n");
  out << fmt::format("cases = {}\nmax_rel_err = {:.3e}\n", cases.size(), worst);
}

void cmd_fb(Session& s, Outputs& o, std::ostream& out) {
  const DomainSolution sol = solve_domain(s.domain(), s.cfg().mesh);
  const FreeBoundaryResidual fb =
      fb_residual(sol.domain, boundary_trace(sol.system, sol.spectrum, sol.torsion), s.cfg().energy.torsion_coeff);
  CsvTable t = s.table({"theta", "q", "residual", "weight"}, sol.h);
  t.meta("a0", format_double(fb.a0));
  t.meta("cv", format_double(fb.cv));
  for (std::size_t i = 0; i < fb.theta.size(); ++i) t.row({fb.theta[i], fb.q[i], fb.residual[i], fb.weight[i]});
  o.add("fb_residual.csv", t.text());
  if (s.plot())
    o.add("fb_residual.gp", gnuplot_header() + "plot 'fb_residual.csv' using 1:3 with lines title 'q - a0'\n");
  out << fmt::format("a0 = {:.8f}\nsup_norm = {:.3e}\ncv = {:.4e}\n", fb.a0, fb.sup_norm, fb.cv);
}

void cmd_sweep(Session& s, Outputs& o, std::ostream& out, const std::string& modes, const std::string& amps) {
  if (!modes.empty()) s.cfg().sweep.modes = parse_int_list(modes);
  if (!amps.empty()) s.cfg().sweep.amplitudes = parse_double_list(amps);
  const SweepConfig& sw = s.cfg().sweep;
  const SweepTable table = stability_sweep(sw.modes, sw.amplitudes, s.cfg().energy, s.cfg().mesh, s.cfg().run.jobs);

  CsvTable t = s.table({"k", "t", "deficit", "d0", "d1", "asym", "d_star_sq", "ratio"}, s.cfg().mesh.h);
  t.meta("energy_ball", format_double(table.energy_ball));
  for (const auto& r : table.rows)
    t.row({static_cast<long long>(r.k), r.t, r.deficit, r.d0, r.d1, r.asym, r.d_star_sq, r.deficit / r.d_star_sq});
  o.add("sweep.csv", t.text());

  CsvTable fit = s.table({"k", "c_k"}, s.cfg().mesh.h);
  fit.meta("min_ratio", format_double(table.min_ratio));
  for (std::size_t i = 0; i < table.ks.size(); ++i) fit.row({static_cast<long long>(table.ks[i]), table.c_k[i]});
  o.add("sweep_fit.csv", fit.text());
  if (s.plot())
    o.add("sweep.gp", gnuplot_header() +
                          "set logscale xy\nplot 'sweep.csv' using 2:3 with points title 'deficit', "
                          "'sweep.csv' using 2:7 with points title 'd_star_sq'\n");
  out << fmt::format("min_ratio = {:.6e}\n", table.min_ratio);
  for (std::size_t i = 0; i < table.ks.size(); ++i) out << fmt::format("c_{} = {:.6e}\n", table.ks[i], table.c_k[i]);
}

void cmd_key(Session& s, Outputs& o, std::ostream& out, const std::string& inner_path, const std::string& outer_path) {
  if (inner_path.empty() || outer_path.empty()) throw ValidationError("key-estimate: --inner and --outer are required");
  const StarDomain inner = load_domain(inner_path);
  const StarDomain outer = load_domain(outer_path);
  s.option("inner", domain_text(inner));
  s.option("outer", domain_text(outer));
  const KeyEstimateReport r = key_estimate_check(inner, outer, s.cfg().mesh);
  CsvTable t = s.table({"lhs_one", "lhs_sign", "d_tor", "d_lambda", "rhs", "c_emp", "monotone"}, s.cfg().mesh.h);
  t.row({r.lhs_one, r.lhs_sign, r.d_tor, r.d_lambda, r.rhs, r.c_emp, static_cast<long long>(r.monotone)});
  o.add("key_estimate.csv", t.text());
  out << fmt::format("rhs = {:.8f}\nc_emp = {:.6f}\n", r.rhs, r.c_emp);
}

CsvTable trace_table(const Session& s, const OptimizeResult& r) {
  CsvTable t = s.table({"iteration", "objective", "grad_norm", "area", "d_star_sq", "h", "step"},
                       s.cfg().optimizer.h_fine);
  t.meta("h_coarse", format_double(s.cfg().optimizer.h_coarse));
  t.meta("converged", r.converged ? "1" : "0");
  t.meta("stalled", r.stalled ? "1" : "0");
  for (const auto& row : r.trace)
    t.row({static_cast<long long>(row.iteration), row.objective, row.grad_norm, row.area, row.d_star_sq, row.h,
           row.step});
  return t;
}

std::string trace_plot(const std::string& csv) {
  return gnuplot_header() + "set logscale y\nplot '" + csv + "' using 1:3 with linespoints title 'grad_norm'\n";
}

void cmd_minimize(Session& s, Outputs& o, std::ostream& out) {
  ExperimentConfig& cfg = s.cfg();
  cfg.optimizer.jobs = cfg.run.jobs;
  StarDomain start = s.domain();
  if (cfg.optimizer.volume == VolumeMode::renormalize) start = start.with_area(cfg.energy.v);
  const OptimizeResult r = minimize(start, cfg.energy, cfg.optimizer);
  o.add("trace.csv", trace_table(s, r).text());
  o.add("minimizer.cfg", domain_text(r.domain));
  if (s.plot()) o.add("trace.gp", trace_plot("trace.csv"));
  out << fmt::format("converged = {}\nstalled = {}\nF_total = {:.10f}\nlambda1 = {:.10f}\narea = {:.10f}\n",
                     r.converged, r.stalled, r.final_report.F_total, r.final_report.lambda1, r.final_report.vol);
}

void cmd_selection(Session& s, Outputs& o, std::ostream& out) {
  ExperimentConfig& cfg = s.cfg();
  cfg.optimizer.jobs = cfg.run.jobs;
  if (!(cfg.energy.tau > 0.0)) throw ValidationError("selection: tau must be positive");
  const SelectionRun run = selection_step(s.domain(), cfg.energy, cfg.optimizer);
  CsvTable t = s.table({"quantity", "value"}, cfg.optimizer.h_fine);
  t.meta("driver", "c_nl = d_star(seed)^2, fixed tau, renormalized volume");
  const std::vector<std::pair<std::string, double>> values = {
      {"d_j", run.d_j},
      {"c_nl", run.c_nl},
      {"tau", run.tau},
      {"energy_ball", run.energy_ball},
      {"deficit_seed", run.deficit_seed},
      {"deficit_minimizer", run.deficit_minimizer},
      {"d_star_minimizer", run.d_star_minimizer},
      {"xi_max_seed", run.xi_max_seed},
      {"xi_max_minimizer", run.xi_max_minimizer},
      {"tolerance_energy", run.tolerance_energy},
      {"tolerance_distance", run.tolerance_distance},
      {"converged", run.converged ? 1.0 : 0.0},
      {"verdict_deficit", run.verdict_deficit ? 1.0 : 0.0},
      {"verdict_distance", run.verdict_distance ? 1.0 : 0.0},
  };
  for (const auto& [k, v] : values) t.row({k, v});
  o.add("selection.csv", t.text());
  o.add("selection_trace.csv", trace_table(s, run.run).text());
  o.add("minimizer.cfg", domain_text(run.minimizer));
  if (s.plot()) o.add("selection_trace.gp", trace_plot("selection_trace.csv"));
  out << fmt::format("d_j = {:.6e}\nd_star_minimizer = {:.6e}\nverdict_deficit = {}\nverdict_distance = {}\n", run.d_j,
                     run.d_star_minimizer, run.verdict_deficit, run.verdict_distance);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"penalized spectral shape functionals on planar star domains", "shapelab"};
  app.set_version_flag("--version", std::string("shapelab ") + tool_version());
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(1);

  Common common;
  int n_domains = 5, n_fields = 10;
  double step = 1e-2;
  std::string modes, amplitudes, inner, outer, volume;
  std::optional<double> tau;
  std::optional<int> max_iter;

  std::vector<std::pair<CLI::App*, std::function<void(Session&, Outputs&)>>> commands;
  auto add = [&](const std::string& name, const std::string& help, auto fn) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, common);
    commands.emplace_back(cmd, fn);
    return cmd;
  };
  add("eig", "first two Dirichlet eigenvalues", [&](Session& s, Outputs& o) { cmd_eig(s, o, out); });
  add("torsion", "torsion function and rigidity", [&](Session& s, Outputs& o) { cmd_torsion(s, o, out); });
  auto* energy = add("energy", "base energy and main functional", [&](Session& s, Outputs& o) { cmd_energy(s, o, out); });
  energy->add_option("--tau", tau, "nonlinearity coefficient");
  add("distances", "distances to the matched ball", [&](Session& s, Outputs& o) { cmd_distances(s, o, out); });
  auto* had = add("hadamard-check", "shape derivatives against finite differences",
                  [&](Session& s, Outputs& o) { cmd_hadamard(s, o, out, n_domains, n_fields, step); });
  had->add_option("--domains", n_domains, "random domains");
  had->add_option("--fields", n_fields, "random fields per domain");
  had->add_option("--step", step, "largest finite-difference displacement");
  add("fb-residual", "free-boundary residual", [&](Session& s, Outputs& o) { cmd_fb(s, o, out); });
  auto* sweep = add("stability-sweep", "deficit against distance for t cos k theta",
                    [&](Session& s, Outputs& o) { cmd_sweep(s, o, out, modes, amplitudes); });
  sweep->add_option("--modes", modes, "comma separated k");
  sweep->add_option("--amplitudes", amplitudes, "comma separated t");
  auto* key = add("key-estimate", "eigenfunction difference on nested domains",
                  [&](Session& s, Outputs& o) { cmd_key(s, o, out, inner, outer); });
  key->add_option("--inner", inner, "inner domain file");
  key->add_option("--outer", outer, "outer domain file");
  auto* mini = add("minimize", "descent on the Fourier coefficients", [&](Session& s, Outputs& o) { cmd_minimize(s, o, out); });
  mini->add_option("--tau", tau, "nonlinearity coefficient");
  mini->add_option("--volume", volume, "renormalize or penalized");
  mini->add_option("--max-iter", max_iter, "iteration cap");
  auto* sel = add("selection", "selection-principle step from a seed", [&](Session& s, Outputs& o) { cmd_selection(s, o, out); });
  sel->add_option("--tau", tau, "nonlinearity coefficient");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    for (auto& [cmd, fn] : commands) {
      if (!cmd->parsed()) continue;
      Session session(cmd->get_name(), common);
      if (tau) {
        session.cfg().energy.tau = *tau;
        session.cfg().energy.validate();
      }
      if (!volume.empty()) {
        if (volume == "renormalize")
          session.cfg().optimizer.volume = VolumeMode::renormalize;
        else if (volume == "penalized")
          session.cfg().optimizer.volume = VolumeMode::penalized;
        else
          throw ValidationError("--volume must be renormalize or penalized");
      }
      if (max_iter) session.cfg().optimizer.max_iter = *max_iter;
      session.cfg().optimizer.validate();
      Outputs outputs;
      fn(session, outputs);
      outputs.flush(session.cfg().run.output_dir);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace shapelab
