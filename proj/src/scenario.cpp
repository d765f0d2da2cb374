#include "nltr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nltr/diagnostics.hpp"

namespace nltr {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> v)
    : std::runtime_error("invalid scenario config:\n  " + [&v] {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "\n  " : "") + v[i];
        return s;
      }()),
      violations(std::move(v)) {}

namespace {

struct Checker {
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) {
    errors.push_back(path + ": " + msg);
  }

  void known_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> keys) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* k : keys)
        if (it.key() == k) ok = true;
      if (!ok) fail(path, "unknown key '" + it.key() + "'");
    }
  }

  double number(const json& obj, const std::string& path, const char* key,
                double fallback, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path, std::string("missing key '") + key + "'");
      return fallback;
    }
    if (!obj[key].is_number()) {
      fail(path + "." + key, "expected a number");
      return fallback;
    }
    return obj[key].get<double>();
  }
};

SpeedLawSpec parse_law(const json& obj, const std::string& path, Checker& ck) {
  SpeedLawSpec law;
  if (!obj.is_object()) {
    ck.fail(path, "expected an object");
    return law;
  }
  ck.known_keys(obj, path, {"type", "v_max"});
  std::string type = obj.value("type", "");
  if (type == "cubic") {
    law.type = SpeedLawSpec::Type::cubic;
    law.v_max = ck.number(obj, path, "v_max", 1.0, false);
  } else if (type == "bottleneck") {
    law.type = SpeedLawSpec::Type::bottleneck;
    if (obj.contains("v_max")) ck.fail(path, "bottleneck law takes no v_max");
    law.v_max = 1.0;
  } else if (type == "constant") {
    law.type = SpeedLawSpec::Type::constant;
    law.v_max = ck.number(obj, path, "v_max", 1.0, true);
  } else {
    ck.fail(path + ".type", "expected cubic | bottleneck | constant");
  }
  if (law.type != SpeedLawSpec::Type::bottleneck && !(law.v_max > 0.0))
    ck.fail(path + ".v_max", "must be positive");
  return law;
}

InitialSpec parse_initial(const json& obj, const std::string& path, Checker& ck) {
  InitialSpec init;
  if (!obj.is_object()) {
    ck.fail(path, "expected an object");
    return init;
  }
  ck.known_keys(obj, path, {"type", "blocks", "teeth"});
  std::string type = obj.value("type", "");
  if (type == "blocks") {
    init.type = InitialSpec::Type::blocks;
    if (!obj.contains("blocks") || !obj["blocks"].is_array()) {
      ck.fail(path, "blocks initial data needs a 'blocks' array");
      return init;
    }
    int bi = 0;
    for (const auto& b : obj["blocks"]) {
      std::string bp = path + ".blocks[" + std::to_string(bi++) + "]";
      ck.known_keys(b, bp, {"height", "from", "to"});
      BlockSpec blk;
      blk.height = ck.number(b, bp, "height", 0.0, true);
      blk.from = ck.number(b, bp, "from", 0.0, true);
      blk.to = ck.number(b, bp, "to", 0.0, true);
      if (!(blk.to > blk.from)) ck.fail(bp, "'to' must exceed 'from'");
      init.blocks.push_back(blk);
    }
  } else if (type == "comb") {
    init.type = InitialSpec::Type::comb;
    init.comb_teeth = static_cast<int>(ck.number(obj, path, "teeth", 1, true));
    if (init.comb_teeth < 1) ck.fail(path + ".teeth", "must be >= 1");
  } else {
    ck.fail(path + ".type", "expected blocks | comb");
  }
  return init;
}

KernelPairSpec parse_kernel_pair(const json& obj, const std::string& path, Checker& ck) {
  KernelPairSpec kp;
  if (!obj.is_object()) {
    ck.fail(path, "expected an object");
    return kp;
  }
  ck.known_keys(obj, path, {"f", "b", "taps", "p_min", "dx"});
  if (obj.contains("taps")) {
    if (!obj["taps"].is_array()) {
      ck.fail(path + ".taps", "expected an array of numbers");
      return kp;
    }
    for (const auto& t : obj["taps"]) kp.taps.push_back(t.get<double>());
    kp.taps_p_min = static_cast<int>(ck.number(obj, path, "p_min", 0, true));
    kp.taps_dx = ck.number(obj, path, "dx", 0.0, true);
    if (!(kp.taps_dx > 0.0)) ck.fail(path + ".dx", "must be positive");
    if (obj.contains("f") || obj.contains("b"))
      ck.fail(path, "give either {f, b} or {taps, p_min, dx}, not both");
  } else {
    kp.f = ck.number(obj, path, "f", 0.0, true);
    kp.b = ck.number(obj, path, "b", 0.0, true);
    if (!(*kp.f > 0.0)) ck.fail(path + ".f", "must be positive");
    if (!(*kp.b > 0.0)) ck.fail(path + ".b", "must be positive");
  }
  return kp;
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
  Checker ck;
  ScenarioConfig cfg;
  if (!doc.is_object()) throw ConfigError({"top level: expected an object"});

  ck.known_keys(doc, "top level",
                {"domain", "n_cells", "t_o", "t_final", "snapshots", "classes",
                 "kernels", "solver", "cfl_safety"});

  if (doc.contains("domain") && doc["domain"].is_array() && doc["domain"].size() == 2) {
    cfg.x_lo = doc["domain"][0].get<double>();
    cfg.x_hi = doc["domain"][1].get<double>();
    if (!(cfg.x_hi > cfg.x_lo)) ck.fail("domain", "upper bound must exceed lower bound");
  } else {
    ck.fail("domain", "expected [x_lo, x_hi]");
  }

  cfg.n_cells = static_cast<int>(ck.number(doc, "top level", "n_cells", 100, true));
  if (cfg.n_cells < 2) ck.fail("n_cells", "must be >= 2");
  cfg.t_o = ck.number(doc, "top level", "t_o", 0.0, false);
  cfg.t_final = ck.number(doc, "top level", "t_final", 0.0, true);
  if (!(cfg.t_final > cfg.t_o)) ck.fail("t_final", "must exceed t_o");
  cfg.cfl_safety = ck.number(doc, "top level", "cfl_safety", 0.9, false);
  if (!(cfg.cfl_safety > 0.0) || cfg.cfl_safety > 1.0)
    ck.fail("cfl_safety", "must lie in (0, 1]");

  if (doc.contains("snapshots") && doc["snapshots"].is_array()) {
    for (const auto& s : doc["snapshots"]) {
      double t = s.get<double>();
      if (t < cfg.t_o - 1e-12 || t > cfg.t_final + 1e-12)
        ck.fail("snapshots", "time " + std::to_string(t) + " outside [t_o, t_final]");
      cfg.snapshots.push_back(t);
    }
    std::sort(cfg.snapshots.begin(), cfg.snapshots.end());
  } else {
    ck.fail("snapshots", "expected an array of times");
  }

  if (doc.contains("classes") && doc["classes"].is_array() && !doc["classes"].empty()) {
    int ci = 0;
    for (const auto& c : doc["classes"]) {
      std::string cp = "classes[" + std::to_string(ci++) + "]";
      ck.known_keys(c, cp, {"speed_law", "initial"});
      ClassSpec spec;
      spec.law = parse_law(c.value("speed_law", json::object()), cp + ".speed_law", ck);
      spec.initial = parse_initial(c.value("initial", json::object()), cp + ".initial", ck);
      cfg.classes.push_back(spec);
    }
  } else {
    ck.fail("classes", "expected a non-empty array");
  }

  int n = cfg.n_classes();
  if (doc.contains("kernels") && doc["kernels"].is_array()) {
    if (static_cast<int>(doc["kernels"].size()) != n)
      ck.fail("kernels", "matrix side " + std::to_string(doc["kernels"].size()) +
                             " does not match class count " + std::to_string(n));
    int i = 0;
    for (const auto& row : doc["kernels"]) {
      std::vector<KernelPairSpec> r;
      if (!row.is_array() || static_cast<int>(row.size()) != n) {
        ck.fail("kernels[" + std::to_string(i) + "]",
                "expected a row of " + std::to_string(n) + " entries");
      } else {
        int j = 0;
        for (const auto& e : row)
          r.push_back(parse_kernel_pair(
              e, "kernels[" + std::to_string(i) + "][" + std::to_string(j++) + "]", ck));
      }
      cfg.kernels.push_back(std::move(r));
      ++i;
    }
  } else {
    ck.fail("kernels", "expected an n x n array");
  }

  std::string solver = doc.value("solver", "fv-nonlocal");
  if (solver == "fv-nonlocal")
    cfg.solver = SolverKind::fv_nonlocal;
  else if (solver == "fv-local-lwr")
    cfg.solver = SolverKind::fv_local_lwr;
  else if (solver == "lagrangian")
    cfg.solver = SolverKind::lagrangian;
  else
    ck.fail("solver", "expected fv-nonlocal | fv-local-lwr | lagrangian");

  if (!ck.errors.empty()) throw ConfigError(std::move(ck.errors));
  return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path});
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError({std::string("JSON parse error: ") + e.what()});
  }
  return parse_config(doc);
}

json to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["domain"] = {cfg.x_lo, cfg.x_hi};
  doc["n_cells"] = cfg.n_cells;
  doc["t_o"] = cfg.t_o;
  doc["t_final"] = cfg.t_final;
  doc["snapshots"] = cfg.snapshots;
  doc["cfl_safety"] = cfg.cfl_safety;
  switch (cfg.solver) {
    case SolverKind::fv_nonlocal: doc["solver"] = "fv-nonlocal"; break;
    case SolverKind::fv_local_lwr: doc["solver"] = "fv-local-lwr"; break;
    case SolverKind::lagrangian: doc["solver"] = "lagrangian"; break;
  }
  doc["classes"] = json::array();
  for (const auto& c : cfg.classes) {
    json jc;
    switch (c.law.type) {
      case SpeedLawSpec::Type::cubic:
        jc["speed_law"] = {{"type", "cubic"}, {"v_max", c.law.v_max}};
        break;
      case SpeedLawSpec::Type::bottleneck:
        jc["speed_law"] = {{"type", "bottleneck"}};
        break;
      case SpeedLawSpec::Type::constant:
        jc["speed_law"] = {{"type", "constant"}, {"v_max", c.law.v_max}};
        break;
    }
    if (c.initial.type == InitialSpec::Type::blocks) {
      json blocks = json::array();
      for (const auto& b : c.initial.blocks)
        blocks.push_back({{"height", b.height}, {"from", b.from}, {"to", b.to}});
      jc["initial"] = {{"type", "blocks"}, {"blocks", blocks}};
    } else {
      jc["initial"] = {{"type", "comb"}, {"teeth", c.initial.comb_teeth}};
    }
    doc["classes"].push_back(jc);
  }
  doc["kernels"] = json::array();
  for (const auto& row : cfg.kernels) {
    json jr = json::array();
    for (const auto& e : row) {
      if (e.f)
        jr.push_back({{"f", *e.f}, {"b", *e.b}});
      else
        jr.push_back({{"taps", e.taps}, {"p_min", e.taps_p_min}, {"dx", e.taps_dx}});
    }
    doc["kernels"].push_back(jr);
  }
  return doc;
}

std::vector<std::string> preset_names() {
  return {"horizon", "overtake", "bottleneck", "bottleneck-lwr"};
}

bool is_preset(const std::string& name) {
  auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

std::vector<std::vector<KernelPairSpec>> uniform_kernels(int n, double f, double b) {
  KernelPairSpec kp;
  kp.f = f;
  kp.b = b;
  return std::vector<std::vector<KernelPairSpec>>(n,
                                                  std::vector<KernelPairSpec>(n, kp));
}

}  // namespace

ScenarioConfig preset(const std::string& name, int cells) {
  ScenarioConfig cfg;
  cfg.n_cells = cells > 0 ? cells : 2000;
  if (name == "horizon") {
    cfg.x_lo = 0.0;
    cfg.x_hi = 10.0;
    cfg.t_final = 6.4;
    cfg.snapshots = {0.0, 0.9, 3.3, 6.4};
    for (int i = 0; i < 2; ++i) {
      ClassSpec c;
      c.law = {SpeedLawSpec::Type::cubic, 1.0};
      c.initial.blocks = {{0.5, 0.0, 2.0}};
      cfg.classes.push_back(c);
    }
    cfg.kernels = uniform_kernels(2, 1.5, 0.01);
    cfg.kernels[1][0].f = cfg.kernels[1][1].f = 0.3;
  } else if (name == "overtake") {
    cfg.x_lo = 0.0;
    cfg.x_hi = 100.0;
    cfg.t_final = 80.9;
    cfg.snapshots = {0.0, 7.0, 28.7, 80.9};
    double vmax[3] = {1.5, 0.9, 0.5};
    double from[3] = {1.0, 8.0, 15.0};
    for (int i = 0; i < 3; ++i) {
      ClassSpec c;
      c.law = {SpeedLawSpec::Type::cubic, vmax[i]};
      c.initial.blocks = {{0.3, from[i], from[i] + 4.0}};
      cfg.classes.push_back(c);
    }
    cfg.kernels = uniform_kernels(3, 1.0, 0.01);
  } else if (name == "bottleneck" || name == "bottleneck-lwr") {
    cfg.x_lo = 0.0;
    cfg.x_hi = 20.0;
    cfg.t_final = 50.0;
    cfg.snapshots = {0.0, 4.0, 37.5, 43.3};
    // Dense tail so clearance times interpolate accurately.
    for (double t = 30.0; t <= 50.0 + 1e-9; t += 0.25) cfg.snapshots.push_back(t);
    std::sort(cfg.snapshots.begin(), cfg.snapshots.end());
    cfg.snapshots.erase(std::unique(cfg.snapshots.begin(), cfg.snapshots.end(),
                                    [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                        cfg.snapshots.end());
    ClassSpec c;
    c.law = {SpeedLawSpec::Type::bottleneck, 1.0};
    c.initial.blocks = {{0.8, 1.0, 3.0}};
    cfg.classes.push_back(c);
    cfg.kernels = uniform_kernels(1, 1.0, 0.01);
    if (name == "bottleneck-lwr") cfg.solver = SolverKind::fv_local_lwr;
  } else {
    throw ConfigError({"unknown preset '" + name + "'"});
  }
  return cfg;
}

DensityField build_initial(const ScenarioConfig& cfg) {
  Grid1D g = cfg.grid();
  DensityField field(cfg.n_classes(), g.n_cells);
  for (int i = 0; i < cfg.n_classes(); ++i) {
    const InitialSpec& init = cfg.classes[i].initial;
    if (init.type == InitialSpec::Type::comb) {
      field[i] = comb_initial_datum(init.comb_teeth, g)[0];
      continue;
    }
    for (const auto& b : init.blocks) {
      // Exact cell averages of height * chi_[from, to].
      for (int k = 0; k < g.n_cells; ++k) {
        double lo = std::max(g.interface(k), b.from);
        double hi = std::min(g.interface(k + 1), b.to);
        if (hi > lo) field[i][k] += b.height * (hi - lo) / g.dx;
      }
    }
  }
  return field;
}

KernelMatrix build_kernels(const ScenarioConfig& cfg) {
  int n = cfg.n_classes();
  KernelMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const KernelPairSpec& kp = cfg.kernels[i][j];
      if (kp.f)
        m.at(i, j) = KernelSpec(*kp.f, *kp.b);
      else
        m.at(i, j) = TapTable{kp.taps, kp.taps_p_min, kp.taps_dx};
    }
  return m;
}

std::vector<SpeedLawPtr> build_laws(const ScenarioConfig& cfg) {
  std::vector<SpeedLawPtr> laws;
  for (const auto& c : cfg.classes) {
    switch (c.law.type) {
      case SpeedLawSpec::Type::cubic:
        laws.push_back(std::make_shared<CubicLaw>(c.law.v_max));
        break;
      case SpeedLawSpec::Type::bottleneck:
        laws.push_back(std::make_shared<BottleneckLaw>());
        break;
      case SpeedLawSpec::Type::constant:
        laws.push_back(std::make_shared<ConstantLaw>(c.law.v_max));
        break;
    }
  }
  return laws;
}

RunSummary summarize(const DensityTrajectory& traj, const SummaryOptions& opts) {
  if (traj.n_slices() == 0) throw std::invalid_argument("summarize: empty trajectory");
  const Grid1D& g = traj.grid;
  int n = traj.fields[0].n_classes();
  RunSummary out;
  out.per_class.resize(n);
  out.clearance_time.assign(n, std::nullopt);

  std::vector<double> initial_max(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (double v : traj.fields[0][i]) initial_max[i] = std::max(initial_max[i], v);

  std::vector<std::vector<double>> frac_past(n);  // per slice, for clearance
  for (int s = 0; s < traj.n_slices(); ++s) {
    auto tv = tv_discrete(traj.fields[s]);
    for (int i = 0; i < n; ++i) {
      const auto& r = traj.fields[s][i];
      ClassSnapshotSummary cs;
      cs.t = traj.times[s];
      cs.tv = tv[i];
      double mass = 0.0, moment = 0.0, past = 0.0;
      double theta = opts.support_threshold_frac * initial_max[i];
      cs.support_lo = g.x_hi;
      cs.support_hi = g.x_lo;
      for (int k = 0; k < g.n_cells; ++k) {
        double x = g.center(k);
        mass += r[k];
        moment += r[k] * x;
        cs.max_density = std::max(cs.max_density, r[k]);
        if (r[k] > theta) {
          cs.support_lo = std::min(cs.support_lo, x);
          cs.support_hi = std::max(cs.support_hi, x);
        }
        if (opts.clearance_marker && x > *opts.clearance_marker) past += r[k];
      }
      cs.mass = mass * g.dx;
      cs.centroid = mass > 0.0 ? moment / mass : 0.0;
      if (cs.support_lo > cs.support_hi) cs.support_lo = cs.support_hi = cs.centroid;
      out.per_class[i].push_back(cs);
      frac_past[i].push_back(mass > 0.0 ? past / mass : 0.0);
    }
  }

  if (opts.clearance_marker) {
    for (int i = 0; i < n; ++i) {
      for (int s = 0; s < traj.n_slices(); ++s) {
        if (frac_past[i][s] >= opts.clearance_fraction) {
          if (s == 0) {
            out.clearance_time[i] = traj.times[0];
          } else {
            double f0 = frac_past[i][s - 1], f1 = frac_past[i][s];
            double a = f1 > f0 ? (opts.clearance_fraction - f0) / (f1 - f0) : 1.0;
            out.clearance_time[i] =
                traj.times[s - 1] + a * (traj.times[s] - traj.times[s - 1]);
          }
          break;
        }
      }
    }
  }
  return out;
}

RunResult run_scenario(const ScenarioConfig& cfg, const SummaryOptions& opts) {
  RunResult out;
  out.config = cfg;
  Grid1D g = cfg.grid();
  DensityField rho0 = build_initial(cfg);
  std::vector<SpeedLawPtr> laws = build_laws(cfg);
  KernelMatrix kernels = build_kernels(cfg);

  if (cfg.solver == SolverKind::lagrangian) {
    LagrangianConfig lc;
    lc.t_o = cfg.t_o;
    lc.t_final = cfg.t_final;
    lc.snapshot_times = cfg.snapshots;
    LagrangianRunResult r = fixed_point(laws, kernels, g, rho0, lc);
    if (!r.report.converged)
      throw std::runtime_error("run_scenario: fixed-point iteration failed to converge");
    out.snapshots = std::move(r.snapshots);
    out.snapshot_velocities = std::move(r.snapshot_velocities);
    out.fixed_point_report = std::move(r.report);
  } else {
    FvMode mode =
        cfg.solver == SolverKind::fv_local_lwr ? FvMode::local_lwr : FvMode::nonlocal;
    FvSolver solver(g, kernels, laws, mode);
    FvConfig fc;
    fc.cfl_safety = cfg.cfl_safety;
    fc.cfl_speed_floor = cfg.cfl_speed_floor;
    fc.mode = mode;
    fc.t_o = cfg.t_o;
    fc.t_final = cfg.t_final;
    fc.snapshot_times = cfg.snapshots;
    FvRunResult r = solver.run(rho0, fc);
    out.snapshots = std::move(r.snapshots);
    out.snapshot_velocities = std::move(r.snapshot_velocities);
    out.steps = std::move(r.steps);
    out.frozen = r.frozen;
    out.max_kernel_raw_defect = r.max_kernel_raw_defect;
    out.boundary_mass_influx = std::move(r.boundary_mass_influx);
  }
  out.summary = summarize(out.snapshots, opts);
  return out;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_run_artifacts(const RunResult& run, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const Grid1D& g = run.snapshots.grid;
  int n = run.snapshots.fields.empty() ? 0 : run.snapshots.fields[0].n_classes();

  for (int s = 0; s < run.snapshots.n_slices(); ++s) {
    char name[64];
    std::snprintf(name, sizeof(name), "snapshot_%03d.csv", s);
    std::ofstream f(fs::path(out_dir) / name);
    f << "t,x";
    for (int i = 1; i <= n; ++i) f << ",rho_" << i;
    for (int i = 1; i <= n; ++i) f << ",v_" << i;
    f << "\n";
    for (int k = 0; k < g.n_cells; ++k) {
      f << fmt17(run.snapshots.times[s]) << "," << fmt17(g.center(k));
      for (int i = 0; i < n; ++i) f << "," << fmt17(run.snapshots.fields[s][i][k]);
      for (int i = 0; i < n; ++i) f << "," << fmt17(run.snapshot_velocities[s][i][k]);
      f << "\n";
    }
  }

  if (!run.steps.empty()) {
    std::ofstream f(fs::path(out_dir) / "step_log.csv");
    f << "m,t_m,dt_m,vmax_m\n";
    for (const auto& s : run.steps)
      f << s.m << "," << fmt17(s.t) << "," << fmt17(s.dt) << "," << fmt17(s.vmax) << "\n";
  }

  if (!run.fixed_point_report.subintervals.empty()) {
    std::ofstream f(fs::path(out_dir) / "fixed_point.csv");
    f << "t0,t1,iterations,final_residual,accepted\n";
    for (const auto& si : run.fixed_point_report.subintervals)
      f << fmt17(si.t0) << "," << fmt17(si.t1) << "," << si.iterations << ","
        << fmt17(si.residuals.empty() ? 0.0 : si.residuals.back()) << ","
        << (si.accepted ? 1 : 0) << "\n";
  }

  {
    std::ofstream f(fs::path(out_dir) / "summary.csv");
    f << "class,t,mass,tv,max_density,centroid,support_lo,support_hi,clearance_time\n";
    for (int i = 0; i < n; ++i) {
      for (const auto& cs : run.summary.per_class[i]) {
        f << (i + 1) << "," << fmt17(cs.t) << "," << fmt17(cs.mass) << ","
          << fmt17(cs.tv) << "," << fmt17(cs.max_density) << "," << fmt17(cs.centroid)
          << "," << fmt17(cs.support_lo) << "," << fmt17(cs.support_hi) << ",";
        if (run.summary.clearance_time[i]) f << fmt17(*run.summary.clearance_time[i]);
        f << "\n";
      }
    }
  }

  {
    std::ofstream f(fs::path(out_dir) / "config.json");
    json doc = to_json(run.config);
    doc["metadata"] = {{"max_kernel_raw_defect", run.max_kernel_raw_defect},
                       {"frozen", run.frozen},
                       {"boundary", "free-flow ghost cells; zero extension for convolution"}};
    f << doc.dump(2) << "\n";
  }

  // Minimal gnuplot helper for the emitted snapshots.
  {
    std::ofstream f(fs::path(out_dir) / "plot.gp");
    f << "# gnuplot -p plot.gp\n";
    for (int s = 0; s < run.snapshots.n_slices(); ++s) {
      char name[64];
      std::snprintf(name, sizeof(name), "snapshot_%03d.csv", s);
      f << (s == 0 ? "plot " : "replot ") << "'" << name
        << "' using 2:3 with lines title 't=" << run.snapshots.times[s] << "'\n";
    }
  }
}

}  // namespace nltr
