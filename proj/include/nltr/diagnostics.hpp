#ifndef NLTR_DIAGNOSTICS_HPP
#define NLTR_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include "nltr/grid.hpp"
#include "nltr/kernel.hpp"
#include "nltr/scenario.hpp"
#include "nltr/speed_law.hpp"

namespace nltr {

/// Growth-rate estimate for the total-variation bound:
/// Q = (3 + M|eta| + 3M|eta'| + M^2|eta'|^2 + M|eta''|) * |v|,
/// with M the total initial mass, sup norms over kernel pairs, and the
/// speed-law norm proxied by sampled bounds on the reachable q-range.
struct QEstimate {
  double mass = 0.0;
  double eta_sup = 0.0;
  double eta_dx_sup = 0.0;
  double eta_dxx_sup = 0.0;
  double v_norm = 0.0;
  double q = 0.0;
};

QEstimate estimate_Q(const DensityField& rho0, const Grid1D& grid,
                     const KernelMatrix& kernels,
                     const std::vector<SpeedLawPtr>& laws);

struct TvBoundCheck {
  std::vector<double> times;
  std::vector<double> tv;         // max over classes per slice
  std::vector<double> log_bound;  // log of the admissible value per slice
  std::vector<bool> pass;
  bool all_pass = true;
};

/// Slice-by-slice check of TV(rho(t)) <= (TV(rho_o) + Q t |rho_o|) e^{Qt},
/// compared in log space since Q t easily overflows exp.
TvBoundCheck check_tv_bound(const DensityTrajectory& traj, const QEstimate& q);

/// Boundary-aligned comb of m unit-height teeth [2i/(2m), (2i+1)/(2m)];
/// TV = 2m, mass = 1/2.
DensityField comb_initial_datum(int m, const Grid1D& grid);

enum class PerturbationKind { initial_data, speed_law, kernel, time };

struct StabilityReport {
  PerturbationKind kind;
  std::vector<double> epsilons;
  std::vector<double> probe_times;
  // distances[e][p] = L1 distance (summed over classes) at probe p for eps e.
  std::vector<std::vector<double>> distances;
  std::vector<std::vector<double>> ratios;  // distances / eps
  bool linear_scaling = true;               // ratio spread <= factor 2 per probe
  std::string note;
};

/// Runs the base scenario plus perturbed twins at each epsilon and checks
/// that output distances scale linearly in the perturbation size.
/// Perturbations: initial_data adds eps * chi_block over the middle third of
/// the first class support; speed_law scales V to V(1+eps); kernel scales the
/// forward horizons to f(1+eps); time compares rho(t+eps) to rho(t) for comb
/// transport at unit speed and checks the distance against TV * eps.
StabilityReport stability_experiment(PerturbationKind kind,
                                     const ScenarioConfig& base,
                                     const std::vector<double>& epsilons);

}  // namespace nltr

#endif
