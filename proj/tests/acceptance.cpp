// Acceptance harness: one pass/fail line per criterion, exit code = number
// of failed criteria. Shared preset runs are cached across criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "nltr/diagnostics.hpp"
#include "nltr/scenario.hpp"
#include "nltr/solver_lagrangian.hpp"

using namespace nltr;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %2d %-22s %s  %s\n", idx, name, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct CachedRun {
  std::string preset_name;
  std::string solver_name;
  ScenarioConfig cfg;
  RunResult run;
  double seconds = 0.0;
};

double now_run(const ScenarioConfig& cfg, const SummaryOptions& opts, RunResult& out) {
  auto t0 = std::chrono::steady_clock::now();
  out = run_scenario(cfg, opts);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<CachedRun> run_all_presets(int cells) {
  std::vector<CachedRun> runs;
  for (const auto& name : preset_names()) {
    SummaryOptions opts;
    if (name.rfind("bottleneck", 0) == 0) opts.clearance_marker = 10.0;
    ScenarioConfig cfg = preset(name, cells);
    CachedRun base{name, cfg.solver == SolverKind::fv_local_lwr ? "lwr" : "fv", cfg, {}, 0};
    base.seconds = now_run(cfg, opts, base.run);
    runs.push_back(std::move(base));
    if (cfg.solver == SolverKind::fv_nonlocal) {
      ScenarioConfig lag = cfg;
      lag.solver = SolverKind::lagrangian;
      CachedRun lr{name, "lagrangian", lag, {}, 0};
      lr.seconds = now_run(lag, opts, lr.run);
      runs.push_back(std::move(lr));
    }
  }
  return runs;
}

double class_mass(const RunResult& r, int cls, int slice) {
  return r.summary.per_class[cls][slice].mass;
}

// Snapshot windows whose support sits at least 5% of the span away from both
// domain ends at both endpoints; outside them mass legitimately crosses the
// free-flow boundaries.
bool support_interior(const RunResult& r, int cls, int slice, double margin) {
  const auto& s = r.summary.per_class[cls][slice];
  return s.support_lo >= r.config.x_lo + margin && s.support_hi <= r.config.x_hi - margin;
}

}  // namespace

static void criterion_mass(const std::vector<CachedRun>& runs) {
  bool pass = true;
  std::string detail;
  double worst_fv = 0.0, worst_lag = 0.0;
  for (const auto& cr : runs) {
    int n = cr.run.summary.per_class.size();
    int slices = cr.run.snapshots.n_slices();
    double margin = 0.05 * (cr.cfg.x_hi - cr.cfg.x_lo);
    for (int i = 0; i < n; ++i) {
      double m0 = std::max(class_mass(cr.run, i, 0), 1e-300);
      if (cr.solver_name == "lagrangian") {
        for (int s = 0; s + 1 < slices; ++s) {
          if (!support_interior(cr.run, i, s, margin) ||
              !support_interior(cr.run, i, s + 1, margin))
            continue;
          double drift =
              std::abs(class_mass(cr.run, i, s + 1) - class_mass(cr.run, i, s)) / m0;
          worst_lag = std::max(worst_lag, drift);
          if (drift > 1e-3) pass = false;
        }
      } else {
        // Lax-Friedrichs is conservative up to the recorded boundary flux.
        double audited = std::abs(class_mass(cr.run, i, slices - 1) -
                                  class_mass(cr.run, i, 0) -
                                  cr.run.boundary_mass_influx[i]) /
                         m0;
        worst_fv = std::max(worst_fv, audited);
        if (audited > 1e-10) pass = false;
      }
    }
  }
  double slowest = 0.0;
  for (const auto& n : preset_names()) {
    double s = 0.0;
    for (const auto& cr : runs)
      if (cr.preset_name == n) s += cr.seconds;
    slowest = std::max(slowest, s);
    if (s > 120.0) pass = false;
  }
  detail = fmt("fv audited drift %.2e (<=1e-10), lagrangian windowed drift %.2e "
               "(<=1e-3), slowest preset %.1fs (<=120s)",
               worst_fv, worst_lag, slowest);
  report(1, "mass-conservation", pass, detail);
}

static void criterion_positivity(const std::vector<CachedRun>& runs) {
  double worst = 0.0;
  for (const auto& cr : runs)
    for (const auto& f : cr.run.snapshots.fields)
      for (int i = 0; i < f.n_classes(); ++i)
        for (double v : f[i]) worst = std::min(worst, v);
  report(2, "positivity", worst >= 0.0, fmt("min cell value %.3e (>= 0)", worst));
}

static void criterion_tv_bound(const std::vector<CachedRun>& runs) {
  bool pass = true;
  for (const auto& cr : runs) {
    QEstimate q = estimate_Q(cr.run.snapshots.fields[0], cr.cfg.grid(),
                             build_kernels(cr.cfg), build_laws(cr.cfg));
    TvBoundCheck chk = check_tv_bound(cr.run.snapshots, q);
    if (!chk.all_pass) pass = false;
  }
  report(3, "tv-bound", pass,
         fmt("checked %zu runs at every snapshot", runs.size()));
}

static void criterion_overtake(const std::vector<CachedRun>& runs) {
  const CachedRun* lag = nullptr;
  for (const auto& cr : runs)
    if (cr.preset_name == "overtake" && cr.solver_name == "lagrangian") lag = &cr;
  if (!lag) {
    report(4, "overtake-claims", false, "overtake lagrangian run missing");
    return;
  }
  const auto& sum = lag->run.summary.per_class;
  int last = lag->run.snapshots.n_slices() - 1;
  double c1 = sum[0][last].centroid, c2 = sum[1][last].centroid,
         c3 = sum[2][last].centroid;
  double max1 = sum[0][2].max_density;  // snapshots {0, 7, 28.7, 80.9}
  bool pass = c1 > c2 && c2 > c3 && max1 > 0.3 && lag->seconds <= 300.0;
  report(4, "overtake-claims", pass,
         fmt("centroids %.2f > %.2f > %.2f, max rho1(28.7) %.3f (>0.3), %.0fs",
             c1, c2, c3, max1, lag->seconds));
}

static void criterion_bottleneck(const std::vector<CachedRun>& runs) {
  auto clearance = [&](const std::string& name, const char* solver) -> double {
    for (const auto& cr : runs)
      if (cr.preset_name == name && cr.solver_name == solver)
        if (cr.run.summary.clearance_time[0])
          return *cr.run.summary.clearance_time[0];
    return -1.0;
  };
  double nl = clearance("bottleneck", "fv");
  double lwr = clearance("bottleneck-lwr", "lwr");
  bool pass = nl > 0.0 && lwr > 0.0 && nl < lwr;
  std::string detail = fmt("clearance nonlocal %.2f < lwr %.2f", nl, lwr);

  if (std::getenv("NLTR_PAPER_RESOLUTION")) {
    SummaryOptions opts;
    opts.clearance_marker = 10.0;
    RunResult rn, rl;
    double tn = now_run(preset("bottleneck", 10000), opts, rn);
    double tl = now_run(preset("bottleneck-lwr", 10000), opts, rl);
    double cn = rn.summary.clearance_time[0].value_or(-1.0);
    double cl = rl.summary.clearance_time[0].value_or(-1.0);
    bool hi = cn >= 35.0 && cn <= 40.0 && cl >= 41.0 && cl <= 46.0 && tn + tl <= 3600.0;
    pass = pass && hi;
    detail += fmt("; 10000 cells: %.2f in [35,40], %.2f in [41,46], %.0fs", cn, cl,
                  tn + tl);
  } else {
    detail += " (10000-cell bracket check skipped; set NLTR_PAPER_RESOLUTION=1)";
  }
  report(5, "bottleneck-clearance", pass, detail);
}

static void criterion_comb_time() {
  ScenarioConfig cfg;
  cfg.x_lo = 0.0;
  cfg.x_hi = 4.0;
  cfg.n_cells = 256;
  cfg.t_final = 2.0;
  cfg.snapshots = {0.0, 2.0};
  ClassSpec c;
  c.law = {SpeedLawSpec::Type::constant, 1.0};
  c.initial.type = InitialSpec::Type::comb;
  c.initial.comb_teeth = 4;
  cfg.classes.push_back(c);
  KernelPairSpec kp;
  kp.f = 1.0;
  kp.b = 0.01;
  cfg.kernels = {{kp}};
  cfg.solver = SolverKind::lagrangian;
  auto rep = stability_experiment(PerturbationKind::time, cfg, {1.0 / 16.0});
  double d = rep.distances[0][0];
  bool pass = std::abs(d - 0.5) <= 0.05 * 0.5;
  report(6, "comb-time-lipschitz", pass, fmt("|rho(t+1/16) - rho(t)| = %.4f (0.5 +-5%%)", d));
}

static double cross_solver_gap(int cells) {
  ScenarioConfig cfg = preset("bottleneck", cells);
  cfg.t_final = 4.0;
  cfg.snapshots = {0.0, 4.0};
  auto fv = run_scenario(cfg);
  ScenarioConfig lc = cfg;
  lc.solver = SolverKind::lagrangian;
  auto lag = run_scenario(lc);
  double d = 0.0;
  for (double v : l1_distance(fv.snapshots.fields.back(), lag.snapshots.fields.back(),
                              cfg.grid()))
    d += v;
  return d;
}

static void criterion_cross_solver() {
  double d2000 = cross_solver_gap(2000);
  double d4000 = cross_solver_gap(4000);
  bool pass = d2000 <= 5e-2 && d4000 < d2000;
  report(7, "cross-solver-oracle", pass,
         fmt("L1 gap at t=4: %.4f at 2000 cells (<=0.05), %.4f at 4000 (shrinking: %s)",
             d2000, d4000, d4000 < d2000 ? "yes" : "no"));
}

static void criterion_stability() {
  auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig base = preset("horizon", 1000);
  std::vector<double> eps = {1e-2, 1e-3, 1e-4};
  bool pass = true;
  std::string kinds;
  for (auto [kind, name] : {std::pair{PerturbationKind::initial_data, "initial"},
                            std::pair{PerturbationKind::speed_law, "speed"},
                            std::pair{PerturbationKind::kernel, "kernel"}}) {
    auto rep = stability_experiment(kind, base, eps);
    if (!rep.linear_scaling) pass = false;
    kinds += fmt("%s:%s ", name, rep.linear_scaling ? "ok" : "nonlinear");
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > 600.0) pass = false;
  report(8, "stability-scaling", pass, kinds + fmt("(%.0fs <= 600s)", secs));
}

static void criterion_consistency() {
  // Constant-velocity FV transport error vs the exact translate.
  auto transport_error = [](int cells) {
    ScenarioConfig cfg;
    cfg.x_lo = 0.0;
    cfg.x_hi = 8.0;
    cfg.n_cells = cells;
    cfg.t_final = 2.0;
    cfg.snapshots = {2.0};
    ClassSpec c;
    c.law = {SpeedLawSpec::Type::constant, 1.0};
    c.initial.blocks = {};
    cfg.classes.push_back(c);
    KernelPairSpec kp;
    kp.f = 0.5;
    kp.b = 0.01;
    cfg.kernels = {{kp}};
    Grid1D g = cfg.grid();
    auto bump = [](double x) {
      double s = (x - 2.0) / 0.6;
      return std::abs(s) < 1.0 ? std::pow(1.0 - s * s, 2) : 0.0;
    };
    DensityField rho0(1, g.n_cells);
    for (int k = 0; k < g.n_cells; ++k) rho0[0][k] = bump(g.center(k));
    FvSolver solver(g, build_kernels(cfg), build_laws(cfg));
    FvConfig fc;
    fc.t_final = 2.0;
    fc.snapshot_times = {2.0};
    auto run = solver.run(rho0, fc);
    double err = 0.0;
    for (int k = 0; k < g.n_cells; ++k)
      err += std::abs(run.snapshots.fields[0][0][k] - bump(g.center(k) - 2.0)) * g.dx;
    return err;
  };
  double e1 = transport_error(400), e2 = transport_error(800);
  bool fv_ok = e1 / e2 >= 1.8;

  // Characteristic integrator on the closed-form linear field w(x) = x.
  Grid1D g(0.0, 10.0, 4000);
  VelocityFieldW w;
  w.grid = g;
  w.times = {0.0, 1.0};
  w.w.assign(1, std::vector<std::vector<double>>(2, std::vector<double>(g.n_cells)));
  w.dwdx = w.w;
  for (int n = 0; n < 2; ++n)
    for (int k = 0; k < g.n_cells; ++k) {
      w.w[0][n][k] = g.center(k);
      w.dwdx[0][n][k] = 1.0;
    }
  auto cherr = [&](int sub) {
    auto r = characteristics_backward(w, 0, 1.0, 5.0, sub);
    return std::abs(r.foot - 5.0 * std::exp(-1.0));
  };
  double c1 = cherr(2), c2 = cherr(4), c3 = cherr(8);
  bool ch_ok = c1 / c2 >= 12.0 && c2 / c3 >= 12.0;

  report(9, "numerical-consistency", fv_ok && ch_ok,
         fmt("transport ratio %.2f (>=1.8); characteristic ratios %.1f, %.1f (>=12)",
             e1 / e2, c1 / c2, c2 / c3));
}

static void criterion_convolution() {
  Grid1D g(0.0, 10.0, 10000);
  DiscreteKernel k = discretize(KernelSpec(1.5, 0.01), g);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool agree = true;
  double scale = 1.0;
  std::vector<double> rho(g.n_cells);
  for (int rep = 0; rep < 3; ++rep) {
    for (auto& v : rho) v = u(rng);
    auto qd = convolve(k, rho, ConvEngine::direct);
    auto qf = convolve(k, rho, ConvEngine::fft);
    scale = 0.0;
    for (double v : qd) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < g.n_cells; ++i)
      if (std::abs(qf[i] - qd[i]) > 1e-10 * scale) agree = false;
  }

  // Timing is informative, not blocking.
  FftConvolver conv(k, g.n_cells);
  auto time_many = [&](auto&& f, int n) {
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < n; ++i) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  double td = time_many([&] { convolve(k, rho, ConvEngine::direct); }, 3);
  double tf = time_many([&] { conv.apply(rho); }, 3);
  double speedup = td / tf;

  report(10, "convolution-engines", agree,
         fmt("direct/fft agree to 1e-10; fft speedup %.1fx (>=5x informative %s)",
             speedup, speedup >= 5.0 ? "met" : "NOT met"));
}

int main() {
  std::printf("acceptance suite: presets at 2000 cells\n");
  auto runs = run_all_presets(2000);
  for (const auto& cr : runs)
    std::printf("  ran %s/%s in %.1fs\n", cr.preset_name.c_str(),
                cr.solver_name.c_str(), cr.seconds);

  criterion_mass(runs);
  criterion_positivity(runs);
  criterion_tv_bound(runs);
  criterion_overtake(runs);
  criterion_bottleneck(runs);
  criterion_comb_time();
  criterion_cross_solver();
  criterion_stability();
  criterion_consistency();
  criterion_convolution();

  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures;
}
