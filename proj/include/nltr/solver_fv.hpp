#ifndef NLTR_SOLVER_FV_HPP
#define NLTR_SOLVER_FV_HPP

#include <vector>

#include "nltr/grid.hpp"
#include "nltr/kernel.hpp"
#include "nltr/speed_law.hpp"

namespace nltr {

enum class FvMode { nonlocal, local_lwr };

struct FvConfig {
  double cfl_safety = 0.9;
  // When positive, the CFL step uses max(vmax, cfl_speed_floor). Lets
  // perturbation experiments share one time grid across runs.
  double cfl_speed_floor = 0.0;
  FvMode mode = FvMode::nonlocal;
  double t_o = 0.0;
  double t_final = 0.0;
  std::vector<double> snapshot_times;  // sorted, within [t_o, t_final]
  ConvEngine engine = ConvEngine::fft;
};

struct StepRecord {
  long m = 0;
  double t = 0.0;
  double dt = 0.0;
  double vmax = 0.0;
};

struct FvRunResult {
  DensityTrajectory snapshots;
  std::vector<DensityField> snapshot_velocities;  // same layout as densities
  std::vector<StepRecord> steps;
  bool frozen = false;  // global max speed hit zero before t_final
  double max_kernel_raw_defect = 0.0;
  // Net mass admitted through the free-flow boundaries per class,
  // sum over steps of dt * (rho_0 v_0 - rho_{N-1} v_{N-1}). The scheme is
  // conservative up to exactly this amount.
  std::vector<double> boundary_mass_influx;
};

/// Lax-Friedrichs solver for the nonlocal multiclass system, with a
/// local-LWR mode where the perceived density is the cell value itself.
class FvSolver {
 public:
  FvSolver(const Grid1D& grid, const KernelMatrix& kernels,
           std::vector<SpeedLawPtr> laws, FvMode mode = FvMode::nonlocal,
           ConvEngine engine = ConvEngine::fft);

  /// (v_i)_k = law_i(t, x_k, q_1(x_k), ..., q_n(x_k)) with q_j = eta_ij * rho_j
  /// (nonlocal) or q_j = rho_j(x_k) (local LWR).
  DensityField compute_velocities(const DensityField& state, double t) const;

  FvRunResult run(const DensityField& initial, const FvConfig& config) const;

  const Grid1D& grid() const { return grid_; }
  double max_kernel_raw_defect() const { return max_raw_defect_; }

 private:
  Grid1D grid_;
  std::vector<SpeedLawPtr> laws_;
  FvMode mode_;
  ConvEngine engine_;
  std::vector<DiscreteKernel> kernels_;  // row-major n x n
  std::vector<FftConvolver> convolvers_;
  int n_ = 0;
  double max_raw_defect_ = 0.0;
};

/// One Lax-Friedrichs update with free-flow (copy) ghost cells, applied per
/// class. Aborts if dt violates the CFL bound for the supplied velocities.
DensityField step_lf(const DensityField& state, const DensityField& velocities,
                     double dt, double dx);

}  // namespace nltr

#endif
