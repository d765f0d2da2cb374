#ifndef NLTR_GRID_HPP
#define NLTR_GRID_HPP

#include <stdexcept>
#include <vector>

namespace nltr {

/// Uniform cell-centered 1-D mesh on [x_lo, x_hi].
struct Grid1D {
  double x_lo = 0.0;
  double x_hi = 1.0;
  int n_cells = 2;
  double dx = 0.5;

  Grid1D() = default;
  Grid1D(double lo, double hi, int n) : x_lo(lo), x_hi(hi), n_cells(n) {
    if (!(hi > lo)) throw std::invalid_argument("Grid1D: x_hi must exceed x_lo");
    if (n < 2) throw std::invalid_argument("Grid1D: need at least 2 cells");
    dx = (hi - lo) / n;
  }

  double center(int k) const { return x_lo + (k + 0.5) * dx; }
  double interface(int k) const { return x_lo + k * dx; }

  bool operator==(const Grid1D&) const = default;
};

/// Per-class cell-average densities on a shared grid.
struct DensityField {
  std::vector<std::vector<double>> classes;

  DensityField() = default;
  DensityField(int n_classes, int n_cells)
      : classes(n_classes, std::vector<double>(n_cells, 0.0)) {}

  int n_classes() const { return static_cast<int>(classes.size()); }
  int n_cells() const { return classes.empty() ? 0 : static_cast<int>(classes[0].size()); }

  std::vector<double>& operator[](int i) { return classes[i]; }
  const std::vector<double>& operator[](int i) const { return classes[i]; }
};

/// Time-ordered sequence of density fields on one grid.
struct DensityTrajectory {
  Grid1D grid;
  std::vector<double> times;
  std::vector<DensityField> fields;

  int n_slices() const { return static_cast<int>(times.size()); }
};

/// CFL-limited explicit time step: safety * dx / max_speed.
double cfl_timestep(double max_speed, double dx, double safety);

/// Per-class discrete L1 norm, dx * sum |rho_k|.
std::vector<double> l1_norm(const DensityField& field, const Grid1D& grid);

/// Per-class discrete total variation, including the jumps to the zero
/// extension at the domain ends.
std::vector<double> tv_discrete(const DensityField& field);

/// Per-class discrete L1 distance between two fields on the same grid.
std::vector<double> l1_distance(const DensityField& a, const DensityField& b,
                                const Grid1D& grid);

void check_finite(const DensityField& field, const char* what);

}  // namespace nltr

#endif
