#include "nltr/solver_lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nltr {

namespace {

// Linear interpolation between cell-center samples, clamped at the edges.
double interp_x(const std::vector<double>& row, const Grid1D& g, double x) {
  double u = (x - g.x_lo) / g.dx - 0.5;
  if (u <= 0.0) return row.front();
  double last = g.n_cells - 1.0;
  if (u >= last) return row.back();
  int k = static_cast<int>(u);
  double a = u - k;
  return (1.0 - a) * row[k] + a * row[k + 1];
}

struct TimeBracket {
  int lo;
  double a;  // weight of the upper node
};

TimeBracket bracket(const std::vector<double>& times, double t) {
  const double tol = 1e-9 * std::max(1.0, std::abs(times.back()));
  if (t < times.front() - tol || t > times.back() + tol)
    throw std::domain_error("VelocityFieldW: time " + std::to_string(t) +
                            " outside [" + std::to_string(times.front()) + ", " +
                            std::to_string(times.back()) + "]");
  t = std::clamp(t, times.front(), times.back());
  auto it = std::upper_bound(times.begin(), times.end(), t);
  int hi = std::min<int>(static_cast<int>(it - times.begin()),
                         static_cast<int>(times.size()) - 1);
  int lo = std::max(hi - 1, 0);
  double span = times[hi] - times[lo];
  double a = span > 0.0 ? (t - times[lo]) / span : 0.0;
  return {lo, a};
}

double eval_table(const std::vector<std::vector<double>>& table,
                  const std::vector<double>& times, const Grid1D& g, double t,
                  double x) {
  TimeBracket b = bracket(times, t);
  double lo = interp_x(table[b.lo], g, x);
  if (b.a == 0.0) return lo;
  double hi = interp_x(table[b.lo + 1], g, x);
  return (1.0 - b.a) * lo + b.a * hi;
}

}  // namespace

double VelocityFieldW::eval(int class_i, double t, double x) const {
  return eval_table(w[class_i], times, grid, t, x);
}

double VelocityFieldW::eval_dx(int class_i, double t, double x) const {
  return eval_table(dwdx[class_i], times, grid, t, x);
}

VelocityFieldW pi_map(const std::vector<SpeedLawPtr>& laws, const KernelMatrix& kernels,
                      const DensityTrajectory& traj, ConvEngine engine) {
  if (traj.n_slices() == 0) throw std::invalid_argument("pi_map: empty trajectory");
  int n = static_cast<int>(laws.size());
  if (kernels.n != n) throw std::invalid_argument("pi_map: kernel matrix side mismatch");
  const Grid1D& g = traj.grid;
  int nc = g.n_cells;
  int nt = traj.n_slices();

  std::vector<DiscreteKernel> disc(n * n), disc_dx(n * n);
  std::vector<FftConvolver> conv, conv_dx;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int idx = i * n + j;
      const KernelEntry& e = kernels.at(i, j);
      disc[idx] = kernels.discretized(i, j, g);
      if (const auto* spec = std::get_if<KernelSpec>(&e)) {
        disc_dx[idx] = discretize_derivative(*spec, g);
      } else {
        // Tap tables: central differences of the renormalized taps.
        DiscreteKernel d = disc[idx];
        DiscreteKernel dd = d;
        int m = d.n_taps();
        for (int p = 0; p < m; ++p) {
          double up = p + 1 < m ? d.weights[p + 1] : 0.0;
          double dn = p - 1 >= 0 ? d.weights[p - 1] : 0.0;
          dd.weights[p] = (up - dn) / (2.0 * d.dx);
        }
        disc_dx[idx] = dd;
      }
      if (engine == ConvEngine::fft) {
        conv.emplace_back(disc[idx], nc);
        conv_dx.emplace_back(disc_dx[idx], nc);
      }
    }

  VelocityFieldW out;
  out.grid = g;
  out.times = traj.times;
  out.w.assign(n, std::vector<std::vector<double>>(nt, std::vector<double>(nc)));
  out.dwdx = out.w;

  std::vector<double> qv(n), grad(n);
  for (int s = 0; s < nt; ++s) {
    const DensityField& rho = traj.fields[s];
    double t = traj.times[s];
    for (int i = 0; i < n; ++i) {
      std::vector<std::vector<double>> q(n), qdx(n);
      for (int j = 0; j < n; ++j) {
        int idx = i * n + j;
        if (engine == ConvEngine::fft) {
          q[j] = conv[idx].apply(rho[j]);
          qdx[j] = conv_dx[idx].apply(rho[j]);
        } else {
          q[j] = convolve(disc[idx], rho[j]);
          qdx[j] = convolve(disc_dx[idx], rho[j]);
        }
      }
      for (int k = 0; k < nc; ++k) {
        double x = g.center(k);
        for (int j = 0; j < n; ++j) qv[j] = q[j][k];
        double wv = laws[i]->eval(t, x, qv);
        laws[i]->eval_dq(t, x, qv, grad);
        double d = laws[i]->eval_dx(t, x, qv);
        for (int j = 0; j < n; ++j) d += grad[j] * qdx[j][k];
        if (!std::isfinite(wv) || !std::isfinite(d))
          throw std::runtime_error("pi_map: non-finite velocity field");
        out.w[i][s][k] = wv;
        out.dwdx[i][s][k] = d;
      }
    }
  }
  return out;
}

CharResult characteristics_backward(const VelocityFieldW& w, int class_i, double t,
                                    double x, int substeps) {
  if (substeps < 1) throw std::invalid_argument("characteristics_backward: substeps >= 1");
  double t0 = w.times.front();
  double span = w.grid.x_hi - w.grid.x_lo;
  double lo = w.grid.x_lo - 0.05 * span;
  double hi = w.grid.x_hi + 0.05 * span;

  CharResult res;
  double h = -(t - t0) / substeps;
  double xs = x;
  double acc = 0.0;  // integral accumulated along decreasing s
  auto vel = [&](double s, double y) {
    if (y < lo || y > hi) {
      res.exited = true;
      return 0.0;
    }
    return w.eval(class_i, s, y);
  };
  auto div = [&](double s, double y) {
    if (y < lo || y > hi) return 0.0;
    return w.eval_dx(class_i, s, y);
  };

  double s = t;
  for (int step = 0; step < substeps; ++step) {
    double k1 = vel(s, xs), e1 = div(s, xs);
    double k2 = vel(s + 0.5 * h, xs + 0.5 * h * k1), e2 = div(s + 0.5 * h, xs + 0.5 * h * k1);
    double k3 = vel(s + 0.5 * h, xs + 0.5 * h * k2), e3 = div(s + 0.5 * h, xs + 0.5 * h * k2);
    double k4 = vel(s + h, xs + h * k3), e4 = div(s + h, xs + h * k3);
    xs += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    acc += h / 6.0 * (e1 + 2.0 * e2 + 2.0 * e3 + e4);
    s += h;
  }
  if (xs < w.grid.x_lo || xs > w.grid.x_hi) res.exited = true;
  res.foot = xs;
  res.exponent = -acc;  // backward sweep accumulates the negative of the integral
  if (!std::isfinite(res.exponent) || !std::isfinite(res.foot))
    throw std::runtime_error("characteristics_backward: non-finite result");
  return res;
}

namespace {

// Exact primitive of the piecewise-constant zero-extended datum.
struct Primitive {
  const Grid1D* g;
  std::vector<double> cum;  // cum[k] = integral up to interface k

  Primitive(const std::vector<double>& rho, const Grid1D& grid) : g(&grid) {
    cum.resize(grid.n_cells + 1, 0.0);
    for (int k = 0; k < grid.n_cells; ++k) cum[k + 1] = cum[k] + rho[k] * grid.dx;
  }

  double operator()(double x) const {
    if (x <= g->x_lo) return 0.0;
    if (x >= g->x_hi) return cum.back();
    double u = (x - g->x_lo) / g->dx;
    int k = std::min(static_cast<int>(u), g->n_cells - 1);
    double frac = u - k;
    return cum[k] + frac * (cum[k + 1] - cum[k]);
  }
};

}  // namespace

DensityTrajectory sigma_solve(const VelocityFieldW& w, const DensityField& rho0,
                              const std::vector<double>& out_times,
                              int substeps_per_node) {
  const Grid1D& g = w.grid;
  if (rho0.n_cells() != g.n_cells)
    throw std::invalid_argument("sigma_solve: initial datum does not match grid");
  int n = rho0.n_classes();
  if (w.n_classes() != n)
    throw std::invalid_argument("sigma_solve: class count mismatch");
  double t0 = w.times.front();
  double node_dt = w.times.size() > 1
                       ? (w.times.back() - w.times.front()) / (w.times.size() - 1)
                       : 1.0;

  DensityTrajectory out;
  out.grid = g;
  for (double t : out_times) {
    DensityField field(n, g.n_cells);
    int steps = std::max(1, static_cast<int>(std::ceil((t - t0) / node_dt))) *
                substeps_per_node;
    for (int i = 0; i < n; ++i) {
      Primitive P(rho0[i], g);
      std::vector<double> feet(g.n_cells + 1);
      if (t <= t0) {
        field[i] = rho0[i];
      } else {
        for (int k = 0; k <= g.n_cells; ++k)
          feet[k] = characteristics_backward(w, i, t, g.interface(k), steps).foot;
        for (int k = 0; k < g.n_cells; ++k) {
          double xl = feet[k];
          double xr = std::max(feet[k + 1], xl);  // feet are ordered up to roundoff
          field[i][k] = (P(xr) - P(xl)) / g.dx;
        }
      }
    }
    check_finite(field, "sigma_solve");
    out.times.push_back(t);
    out.fields.push_back(field);
  }
  return out;
}

namespace {

double sup_l1_diff(const DensityTrajectory& a, const DensityTrajectory& b) {
  double worst = 0.0;
  for (int s = 0; s < a.n_slices(); ++s) {
    auto d = l1_distance(a.fields[s], b.fields[s], a.grid);
    double tot = 0.0;
    for (double v : d) tot += v;
    worst = std::max(worst, tot);
  }
  return worst;
}

std::vector<double> subinterval_nodes(double a, double b, double node_dt,
                                      const std::vector<double>& snaps) {
  double span = b - a;
  double dt = node_dt > 0.0 ? node_dt : span / 8.0;
  int m = std::max(4, static_cast<int>(std::ceil(span / dt)));
  std::vector<double> nodes;
  for (int s = 0; s <= m; ++s) nodes.push_back(a + span * s / m);
  for (double t : snaps)
    if (t > a + 1e-12 && t < b - 1e-12) nodes.push_back(t);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](double p, double q) { return std::abs(p - q) < 1e-12; }),
              nodes.end());
  nodes.back() = b;
  return nodes;
}

}  // namespace

LagrangianRunResult fixed_point(const std::vector<SpeedLawPtr>& laws,
                                const KernelMatrix& kernels, const Grid1D& grid,
                                const DensityField& rho0,
                                const LagrangianConfig& config) {
  if (!(config.t_final > config.t_o))
    throw std::invalid_argument("fixed_point: t_final must exceed t_o");
  if (!(config.tol > 0.0)) throw std::invalid_argument("fixed_point: tol must be positive");
  check_finite(rho0, "fixed_point initial state");

  LagrangianRunResult out;
  out.snapshots.grid = grid;

  std::vector<double> snaps = config.snapshot_times;
  std::sort(snaps.begin(), snaps.end());

  DensityField state = rho0;
  double t = config.t_o;
  std::size_t next_snap = 0;

  auto emit = [&](double time, const DensityField& f, const DensityField& v) {
    out.snapshots.times.push_back(time);
    out.snapshots.fields.push_back(f);
    out.snapshot_velocities.push_back(v);
  };

  auto velocities_from = [&](const VelocityFieldW& w, int node) {
    DensityField v(w.n_classes(), grid.n_cells);
    for (int i = 0; i < w.n_classes(); ++i) v[i] = w.w[i][node];
    return v;
  };

  // Snapshot at the initial time only needs w of the initial datum.
  if (next_snap < snaps.size() && snaps[next_snap] <= t + 1e-12) {
    DensityTrajectory single;
    single.grid = grid;
    single.times = {t};
    single.fields = {state};
    VelocityFieldW w0 = pi_map(laws, kernels, single, config.engine);
    emit(t, state, velocities_from(w0, 0));
    ++next_snap;
  }

  double dT = std::min(config.dt_init, config.t_final - t);
  while (t < config.t_final - 1e-12) {
    double t1 = std::min(t + dT, config.t_final);
    std::vector<double> nodes = subinterval_nodes(t, t1, config.node_dt, snaps);

    DensityTrajectory iter;
    iter.grid = grid;
    iter.times = nodes;
    iter.fields.assign(nodes.size(), state);

    SubintervalRecord rec;
    rec.t0 = t;
    rec.t1 = t1;

    VelocityFieldW w;
    int rising = 0;
    bool done = false;
    for (int it = 1; it <= config.max_iter && !done; ++it) {
      w = pi_map(laws, kernels, iter, config.engine);
      DensityTrajectory next = sigma_solve(w, state, nodes);
      double res = sup_l1_diff(next, iter);
      rec.residuals.push_back(res);
      rec.iterations = it;
      iter = std::move(next);
      if (res <= config.tol) {
        done = true;
        break;
      }
      std::size_t nres = rec.residuals.size();
      if (nres >= 2 && rec.residuals[nres - 1] >= rec.residuals[nres - 2])
        ++rising;
      else
        rising = 0;
      if (rising >= 3) break;  // not contracting on this subinterval length
    }

    if (!done) {
      out.report.subintervals.push_back(rec);
      dT *= 0.5;
      if (dT < config.dt_min) {
        out.report.converged = false;
        return out;
      }
      continue;
    }

    rec.accepted = true;
    out.report.subintervals.push_back(rec);

    // Refresh w from the converged iterate so emitted velocities match it.
    w = pi_map(laws, kernels, iter, config.engine);
    while (next_snap < snaps.size() && snaps[next_snap] <= t1 + 1e-12) {
      double ts = snaps[next_snap];
      auto it_node = std::min_element(nodes.begin(), nodes.end(), [&](double p, double q) {
        return std::abs(p - ts) < std::abs(q - ts);
      });
      int node = static_cast<int>(it_node - nodes.begin());
      emit(ts, iter.fields[node], velocities_from(w, node));
      ++next_snap;
    }

    state = iter.fields.back();
    t = t1;
    if (rec.iterations <= 4) dT = std::min(dT * 1.5, config.dt_max);
    dT = std::min(dT, config.t_final - t > 0 ? config.t_final - t : dT);
  }
  return out;
}

}  // namespace nltr
