#ifndef NLTR_SCENARIO_HPP
#define NLTR_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nltr/grid.hpp"
#include "nltr/kernel.hpp"
#include "nltr/solver_fv.hpp"
#include "nltr/solver_lagrangian.hpp"
#include "nltr/speed_law.hpp"

namespace nltr {

enum class SolverKind { fv_nonlocal, fv_local_lwr, lagrangian };

struct SpeedLawSpec {
  enum class Type { cubic, bottleneck, constant } type = Type::cubic;
  double v_max = 1.0;  // cubic ceiling or constant speed
};

struct BlockSpec {
  double height = 0.0;
  double from = 0.0;
  double to = 0.0;
};

struct InitialSpec {
  enum class Type { blocks, comb } type = Type::blocks;
  std::vector<BlockSpec> blocks;
  int comb_teeth = 1;
};

struct ClassSpec {
  SpeedLawSpec law;
  InitialSpec initial;
};

struct KernelPairSpec {
  // Either analytic horizons or a raw tap table.
  std::optional<double> f;
  std::optional<double> b;
  std::vector<double> taps;
  int taps_p_min = 0;
  double taps_dx = 0.0;
};

struct ScenarioConfig {
  double x_lo = 0.0;
  double x_hi = 1.0;
  int n_cells = 100;
  double t_o = 0.0;
  double t_final = 1.0;
  std::vector<double> snapshots;
  std::vector<ClassSpec> classes;
  std::vector<std::vector<KernelPairSpec>> kernels;  // n x n
  SolverKind solver = SolverKind::fv_nonlocal;
  double cfl_safety = 0.9;
  // Internal knob (not part of the JSON schema): see FvConfig::cfl_speed_floor.
  double cfl_speed_floor = 0.0;

  Grid1D grid() const { return Grid1D(x_lo, x_hi, n_cells); }
  int n_classes() const { return static_cast<int>(classes.size()); }
};

struct ConfigError : std::runtime_error {
  std::vector<std::string> violations;
  explicit ConfigError(std::vector<std::string> v);
};

ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_file(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& config);

std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
/// horizon | overtake | bottleneck | bottleneck-lwr; cells <= 0 keeps the
/// preset default of 2000.
ScenarioConfig preset(const std::string& name, int cells = -1);

DensityField build_initial(const ScenarioConfig& config);
KernelMatrix build_kernels(const ScenarioConfig& config);
std::vector<SpeedLawPtr> build_laws(const ScenarioConfig& config);

struct SummaryOptions {
  double support_threshold_frac = 0.01;  // of the initial max density
  double clearance_fraction = 0.999;
  std::optional<double> clearance_marker;
};

struct ClassSnapshotSummary {
  double t = 0.0;
  double mass = 0.0;
  double tv = 0.0;
  double max_density = 0.0;
  double centroid = 0.0;
  double support_lo = 0.0;
  double support_hi = 0.0;
};

struct RunSummary {
  // summaries[class][snapshot]
  std::vector<std::vector<ClassSnapshotSummary>> per_class;
  // Earliest time at which clearance_fraction of the in-domain mass of the
  // class sits beyond the marker (linear interpolation between snapshots);
  // unset when never reached or no marker configured.
  std::vector<std::optional<double>> clearance_time;
};

RunSummary summarize(const DensityTrajectory& traj, const SummaryOptions& opts = {});

struct RunResult {
  ScenarioConfig config;
  DensityTrajectory snapshots;
  std::vector<DensityField> snapshot_velocities;
  std::vector<StepRecord> steps;        // FV solvers
  FixedPointReport fixed_point_report;  // Lagrangian solver
  RunSummary summary;
  bool frozen = false;
  double max_kernel_raw_defect = 0.0;
  std::vector<double> boundary_mass_influx;  // FV solvers only
};

RunResult run_scenario(const ScenarioConfig& config,
                       const SummaryOptions& opts = {});

/// Writes per-snapshot CSVs (t,x,rho_i,v_i), a step log or fixed-point
/// report, a summary CSV, and the resolved config into out_dir.
void write_run_artifacts(const RunResult& run, const std::string& out_dir);

}  // namespace nltr

#endif
