#ifndef NLTR_SOLVER_LAGRANGIAN_HPP
#define NLTR_SOLVER_LAGRANGIAN_HPP

#include <vector>

#include "nltr/grid.hpp"
#include "nltr/kernel.hpp"
#include "nltr/speed_law.hpp"

namespace nltr {

/// Velocity field w_i(t,x) and its space derivative, tabulated on the
/// nodes of a stored trajectory and evaluated by bilinear interpolation
/// (linear in t between nodes, linear in x between cell centers, clamped
/// at the domain edges).
struct VelocityFieldW {
  Grid1D grid;
  std::vector<double> times;
  std::vector<std::vector<std::vector<double>>> w;     // [class][node][cell]
  std::vector<std::vector<std::vector<double>>> dwdx;  // same layout

  int n_classes() const { return static_cast<int>(w.size()); }

  double eval(int class_i, double t, double x) const;
  double eval_dx(int class_i, double t, double x) const;
};

/// Realizes w_i = v_i(t, x, eta_i1*rho_1, ...) from a trajectory, with
/// d_x w_i = d_x v_i + sum_j d_{q_j} v_i * (d_x eta_ij * rho_j).
VelocityFieldW pi_map(const std::vector<SpeedLawPtr>& laws, const KernelMatrix& kernels,
                      const DensityTrajectory& traj,
                      ConvEngine engine = ConvEngine::fft);

struct CharResult {
  double foot = 0.0;      // X(t_start; t, x)
  double exponent = 0.0;  // integral of d_x w along the characteristic
  bool exited = false;    // left the extended domain at some stage
};

/// Backward RK4 integration of dx/ds = w_i(s,x) from (t,x) down to the
/// field's initial time, accumulating the divergence integral with the
/// same stages. Outside the extended domain the velocity is taken as zero.
CharResult characteristics_backward(const VelocityFieldW& w, int class_i, double t,
                                    double x, int substeps);

/// Lagrangian solve of the linear continuity equations driven by w from the
/// initial datum. Cell averages are reconstructed conservatively from the
/// characteristic feet of the cell interfaces and the exact primitive of
/// the piecewise-constant initial datum.
DensityTrajectory sigma_solve(const VelocityFieldW& w, const DensityField& rho0,
                              const std::vector<double>& out_times,
                              int substeps_per_node = 1);

struct SubintervalRecord {
  double t0 = 0.0;
  double t1 = 0.0;
  int iterations = 0;
  std::vector<double> residuals;  // sup-over-time L1 per iteration
  bool accepted = false;
};

struct FixedPointReport {
  std::vector<SubintervalRecord> subintervals;
  bool converged = true;
};

struct LagrangianConfig {
  double t_o = 0.0;
  double t_final = 0.0;
  std::vector<double> snapshot_times;
  double tol = 1e-8;
  int max_iter = 60;
  double dt_init = 0.25;   // initial subinterval length
  double dt_min = 1e-4;    // give up below this
  double dt_max = 2.0;
  double node_dt = 0.0;    // time-node spacing; 0 picks (t1-t0)/8
  ConvEngine engine = ConvEngine::fft;
};

struct LagrangianRunResult {
  DensityTrajectory snapshots;
  std::vector<DensityField> snapshot_velocities;
  FixedPointReport report;
};

/// Banach iteration of rho -> sigma_solve(pi_map(rho)) on adaptively sized
/// subintervals, chained by their endpoint states.
LagrangianRunResult fixed_point(const std::vector<SpeedLawPtr>& laws,
                                const KernelMatrix& kernels, const Grid1D& grid,
                                const DensityField& rho0,
                                const LagrangianConfig& config);

}  // namespace nltr

#endif
