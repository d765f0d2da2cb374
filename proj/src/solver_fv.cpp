#include "nltr/solver_fv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nltr {

FvSolver::FvSolver(const Grid1D& grid, const KernelMatrix& kernels,
                   std::vector<SpeedLawPtr> laws, FvMode mode, ConvEngine engine)
    : grid_(grid), laws_(std::move(laws)), mode_(mode), engine_(engine) {
  n_ = static_cast<int>(laws_.size());
  if (n_ < 1) throw std::invalid_argument("FvSolver: need at least one class");
  if (mode_ == FvMode::nonlocal) {
    if (kernels.n != n_)
      throw std::invalid_argument("FvSolver: kernel matrix side does not match class count");
    kernels_.reserve(n_ * n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        kernels_.push_back(kernels.discretized(i, j, grid_));
        max_raw_defect_ = std::max(max_raw_defect_, kernels_.back().raw_defect);
        if (engine_ == ConvEngine::fft)
          convolvers_.emplace_back(kernels_.back(), grid_.n_cells);
      }
  }
}

DensityField FvSolver::compute_velocities(const DensityField& state, double t) const {
  if (state.n_classes() != n_ || state.n_cells() != grid_.n_cells)
    throw std::invalid_argument("compute_velocities: state shape mismatch");
  int nc = grid_.n_cells;
  DensityField vel(n_, nc);

  // q[i][j] = perceived density of class j as seen by class i.
  std::vector<std::vector<double>> q(n_ * n_);
  if (mode_ == FvMode::nonlocal) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        int idx = i * n_ + j;
        q[idx] = engine_ == ConvEngine::fft ? convolvers_[idx].apply(state[j])
                                            : convolve(kernels_[idx], state[j]);
      }
  } else {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) q[i * n_ + j] = state[j];
  }

  std::vector<double> qv(n_);
  for (int i = 0; i < n_; ++i) {
    for (int k = 0; k < nc; ++k) {
      for (int j = 0; j < n_; ++j) qv[j] = q[i * n_ + j][k];
      double v = laws_[i]->eval(t, grid_.center(k), qv);
      if (!std::isfinite(v))
        throw std::runtime_error("compute_velocities: non-finite speed at cell " +
                                 std::to_string(k));
      vel[i][k] = v;
    }
  }
  return vel;
}

DensityField step_lf(const DensityField& state, const DensityField& velocities,
                     double dt, double dx) {
  int n = state.n_classes();
  int nc = state.n_cells();
  if (velocities.n_classes() != n || velocities.n_cells() != nc)
    throw std::invalid_argument("step_lf: velocity shape mismatch");
  double lambda = dt / dx;
  DensityField next(n, nc);
  for (int i = 0; i < n; ++i) {
    const auto& r = state[i];
    const auto& v = velocities[i];
    for (int k = 0; k < nc; ++k) {
      if (lambda * std::abs(v[k]) > 1.0 + 1e-12)
        throw std::runtime_error("step_lf: CFL violation, dt*v/dx = " +
                                 std::to_string(lambda * std::abs(v[k])) + " at cell " +
                                 std::to_string(k));
      // Free-flow ghost cells copy the adjacent boundary value.
      int kl = k > 0 ? k - 1 : 0;
      int kr = k < nc - 1 ? k + 1 : nc - 1;
      double fl = r[kl] * v[kl];
      double fr = r[kr] * v[kr];
      next[i][k] = 0.5 * (r[kl] + r[kr]) - 0.5 * lambda * (fr - fl);
    }
  }
  return next;
}

FvRunResult FvSolver::run(const DensityField& initial, const FvConfig& config) const {
  if (!(config.t_final > config.t_o))
    throw std::invalid_argument("FvSolver::run: t_final must exceed t_o");
  if (!(config.cfl_safety > 0.0) || config.cfl_safety > 1.0)
    throw std::invalid_argument("FvSolver::run: cfl_safety must lie in (0,1]");
  check_finite(initial, "FvSolver::run initial state");

  FvRunResult out;
  out.snapshots.grid = grid_;
  out.max_kernel_raw_defect = max_raw_defect_;
  out.boundary_mass_influx.assign(n_, 0.0);

  std::vector<double> snaps = config.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  for (double s : snaps)
    if (s < config.t_o - 1e-12 || s > config.t_final + 1e-12)
      throw std::invalid_argument("FvSolver::run: snapshot time outside [t_o, t_final]");

  DensityField state = initial;
  double t = config.t_o;
  long m = 0;
  std::size_t next_snap = 0;
  const double tiny = 1e-12;

  auto emit = [&](const DensityField& s, const DensityField& vel, double time) {
    out.snapshots.times.push_back(time);
    out.snapshots.fields.push_back(s);
    out.snapshot_velocities.push_back(vel);
  };

  while (true) {
    DensityField vel = compute_velocities(state, t);
    while (next_snap < snaps.size() && snaps[next_snap] <= t + tiny) {
      emit(state, vel, snaps[next_snap]);
      ++next_snap;
    }
    if (t >= config.t_final - tiny) break;

    double vmax = 0.0;
    for (int i = 0; i < n_; ++i)
      for (double v : vel[i]) vmax = std::max(vmax, v);

    if (vmax <= 0.0) {
      // Zero flux everywhere: the state is stationary for all later times.
      out.frozen = true;
      while (next_snap < snaps.size()) {
        emit(state, vel, snaps[next_snap]);
        ++next_snap;
      }
      break;
    }

    double dt = cfl_timestep(std::max(vmax, config.cfl_speed_floor), grid_.dx,
                             config.cfl_safety);
    double t_stop = next_snap < snaps.size() ? std::min(snaps[next_snap], config.t_final)
                                             : config.t_final;
    // Split the remaining window evenly instead of tacking on a short
    // remainder step; a near-zero dt degenerates Lax-Friedrichs into pure
    // neighbor averaging.
    double remaining = t_stop - t;
    long n_sub = static_cast<long>(std::ceil(remaining / dt - 1e-12));
    if (n_sub < 1) n_sub = 1;
    dt = remaining / static_cast<double>(n_sub);

    for (int i = 0; i < n_; ++i) {
      int last = grid_.n_cells - 1;
      out.boundary_mass_influx[i] +=
          dt * (state[i][0] * vel[i][0] - state[i][last] * vel[i][last]);
    }
    state = step_lf(state, vel, dt, grid_.dx);
    check_finite(state, ("FvSolver::run step " + std::to_string(m)).c_str());
    out.steps.push_back({m, t, dt, vmax});
    t = std::abs(t + dt - t_stop) <= tiny ? t_stop : t + dt;
    ++m;
  }
  return out;
}

}  // namespace nltr
