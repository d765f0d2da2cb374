// Command line front end: scenario runs, solver comparison, property suite.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nltr/diagnostics.hpp"
#include "nltr/scenario.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitProperty = 3;

nltr::ScenarioConfig load(const std::string& source, int cells, bool paper_resolution,
                          const std::string& solver_override) {
  nltr::ScenarioConfig cfg;
  if (nltr::is_preset(source)) {
    int n = cells > 0 ? cells : (paper_resolution ? 10000 : -1);
    cfg = nltr::preset(source, n);
  } else {
    cfg = nltr::parse_config_file(source);
    if (cells > 0) cfg.n_cells = cells;
  }
  if (!solver_override.empty()) {
    if (solver_override == "fv")
      cfg.solver = nltr::SolverKind::fv_nonlocal;
    else if (solver_override == "lwr")
      cfg.solver = nltr::SolverKind::fv_local_lwr;
    else if (solver_override == "lagrangian")
      cfg.solver = nltr::SolverKind::lagrangian;
    else
      throw nltr::ConfigError({"--solver: expected fv | lwr | lagrangian"});
  }
  return cfg;
}

int cmd_run(const std::string& source, int cells, bool paper_resolution,
            const std::string& solver, const std::string& out_dir) {
  nltr::ScenarioConfig cfg = load(source, cells, paper_resolution, solver);
  nltr::SummaryOptions opts;
  if (source == "bottleneck" || source == "bottleneck-lwr") opts.clearance_marker = 10.0;
  nltr::RunResult run = nltr::run_scenario(cfg, opts);
  nltr::write_run_artifacts(run, out_dir);
  std::cout << "wrote " << run.snapshots.n_slices() << " snapshots to " << out_dir
            << "\n";
  for (int i = 0; i < static_cast<int>(run.summary.per_class.size()); ++i) {
    const auto& last = run.summary.per_class[i].back();
    std::cout << "class " << (i + 1) << " at t=" << last.t << ": mass=" << last.mass
              << " max=" << last.max_density << " centroid=" << last.centroid;
    if (run.summary.clearance_time[i])
      std::cout << " clearance=" << *run.summary.clearance_time[i];
    std::cout << "\n";
  }
  if (run.frozen) std::cout << "note: run froze (zero global speed) before t_final\n";
  return 0;
}

int cmd_compare(const std::string& name, int cells, const std::string& out_dir) {
  nltr::ScenarioConfig base = nltr::preset(name, cells);
  nltr::ScenarioConfig a = base, b = base;
  a.solver = nltr::SolverKind::fv_nonlocal;
  b.solver = nltr::SolverKind::lagrangian;
  nltr::RunResult ra = nltr::run_scenario(a);
  nltr::RunResult rb = nltr::run_scenario(b);
  if (!out_dir.empty()) {
    nltr::write_run_artifacts(ra, out_dir + "/fv");
    nltr::write_run_artifacts(rb, out_dir + "/lagrangian");
  }
  std::cout << "t,l1_distance\n";
  for (int s = 0; s < ra.snapshots.n_slices(); ++s) {
    double d = 0.0;
    for (double v : nltr::l1_distance(ra.snapshots.fields[s], rb.snapshots.fields[s],
                                      base.grid()))
      d += v;
    std::printf("%g,%.6e\n", ra.snapshots.times[s], d);
  }
  return 0;
}

int cmd_property_suite(bool quick, const std::string& out_path) {
  using nltr::PerturbationKind;
  int cells = quick ? 500 : 1000;
  nltr::ScenarioConfig base = nltr::preset("horizon", cells);
  if (quick) {
    base.t_final = 2.0;
    base.snapshots = {0.0, 1.0, 2.0};
  }
  std::vector<double> eps = {1e-2, 1e-3, 1e-4};

  std::ofstream report(out_path);
  report << "experiment,eps,probe_t,distance,ratio,pass\n";
  bool all_pass = true;

  auto emit = [&](const char* name, const nltr::StabilityReport& rep) {
    for (std::size_t e = 0; e < rep.epsilons.size(); ++e)
      for (std::size_t p = 0; p < rep.probe_times.size(); ++p)
        report << name << "," << rep.epsilons[e] << "," << rep.probe_times[p] << ","
               << rep.distances[e][p] << "," << rep.ratios[e][p] << ","
               << (rep.linear_scaling ? 1 : 0) << "\n";
    std::cout << name << ": " << (rep.linear_scaling ? "pass" : "FAIL") << "\n";
    if (!rep.linear_scaling) all_pass = false;
  };

  emit("initial-data", nltr::stability_experiment(PerturbationKind::initial_data, base, eps));
  emit("speed-law", nltr::stability_experiment(PerturbationKind::speed_law, base, eps));
  emit("kernel", nltr::stability_experiment(PerturbationKind::kernel, base, eps));

  // Time regularity on comb transport at unit speed.
  {
    nltr::ScenarioConfig comb;
    comb.x_lo = 0.0;
    comb.x_hi = 4.0;
    comb.n_cells = 256;
    comb.t_final = 2.0;
    comb.snapshots = {0.0, 2.0};
    nltr::ClassSpec c;
    c.law = {nltr::SpeedLawSpec::Type::constant, 1.0};
    c.initial.type = nltr::InitialSpec::Type::comb;
    c.initial.comb_teeth = 4;
    comb.classes.push_back(c);
    nltr::KernelPairSpec kp;
    kp.f = 1.0;
    kp.b = 0.01;
    comb.kernels = {{kp}};
    comb.solver = nltr::SolverKind::lagrangian;
    emit("time", nltr::stability_experiment(PerturbationKind::time, comb, {1.0 / 16.0}));
  }

  // TV bound on the horizon preset trajectory.
  {
    nltr::RunResult run = nltr::run_scenario(base);
    nltr::QEstimate q = nltr::estimate_Q(run.snapshots.fields[0], base.grid(),
                                         nltr::build_kernels(base), nltr::build_laws(base));
    nltr::TvBoundCheck tv = nltr::check_tv_bound(run.snapshots, q);
    report << "tv-bound,0,0,0,0," << (tv.all_pass ? 1 : 0) << "\n";
    std::cout << "tv-bound: " << (tv.all_pass ? "pass" : "FAIL") << "\n";
    if (!tv.all_pass) all_pass = false;
  }

  std::cout << (all_pass ? "property suite passed" : "property suite FAILED")
            << "; report written to " << out_path << "\n";
  return all_pass ? 0 : kExitProperty;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for systems of nonlocal multiclass traffic conservation laws"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list-presets", "List built-in scenario presets");

  std::string source, solver, out_dir = "out";
  int cells = -1;
  bool paper_resolution = false;
  auto* run = app.add_subcommand("run", "Run a scenario from a preset or JSON config");
  run->add_option("config", source, "Preset name or config file path")->required();
  run->add_option("--cells", cells, "Override the cell count");
  run->add_option("--solver", solver, "Override the solver: fv | lwr | lagrangian");
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--paper-resolution", paper_resolution, "Use 10000 cells for presets");

  std::string cmp_name, cmp_out;
  int cmp_cells = -1;
  auto* cmp = app.add_subcommand("compare-solvers",
                                 "Run a preset with both solvers and report L1 gaps");
  cmp->add_option("preset", cmp_name, "Preset name")->required();
  cmp->add_option("--cells", cmp_cells, "Override the cell count");
  cmp->add_option("--out", cmp_out, "Optional output directory");

  bool quick = false;
  std::string prop_out = "property_suite.csv";
  auto* prop = app.add_subcommand("property-suite",
                                  "Stability and TV-bound experiments with pass/fail report");
  prop->add_flag("--quick", quick, "Smaller meshes and shorter horizons");
  prop->add_option("--out", prop_out, "Report CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& n : nltr::preset_names()) std::cout << n << "\n";
      return 0;
    }
    if (run->parsed()) return cmd_run(source, cells, paper_resolution, solver, out_dir);
    if (cmp->parsed()) return cmd_compare(cmp_name, cmp_cells, cmp_out);
    if (prop->parsed()) return cmd_property_suite(quick, prop_out);
  } catch (const nltr::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
