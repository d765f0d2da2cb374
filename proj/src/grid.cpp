#include "nltr/grid.hpp"

#include <cmath>
#include <string>

namespace nltr {

double cfl_timestep(double max_speed, double dx, double safety) {
  if (!std::isfinite(max_speed) || max_speed <= 0.0)
    throw std::invalid_argument("cfl_timestep: max_speed must be finite and positive");
  if (!(dx > 0.0)) throw std::invalid_argument("cfl_timestep: dx must be positive");
  if (!(safety > 0.0) || safety > 1.0)
    throw std::invalid_argument("cfl_timestep: safety must lie in (0,1]");
  return safety * dx / max_speed;
}

std::vector<double> l1_norm(const DensityField& field, const Grid1D& grid) {
  if (field.n_cells() != grid.n_cells)
    throw std::invalid_argument("l1_norm: field does not match grid");
  std::vector<double> out(field.n_classes(), 0.0);
  for (int i = 0; i < field.n_classes(); ++i) {
    double s = 0.0;
    for (double v : field[i]) s += std::abs(v);
    out[i] = grid.dx * s;
  }
  return out;
}

std::vector<double> tv_discrete(const DensityField& field) {
  if (field.n_cells() < 2)
    throw std::invalid_argument("tv_discrete: need at least 2 cells");
  std::vector<double> out(field.n_classes(), 0.0);
  for (int i = 0; i < field.n_classes(); ++i) {
    const auto& r = field[i];
    double tv = std::abs(r.front()) + std::abs(r.back());
    for (std::size_t k = 0; k + 1 < r.size(); ++k) tv += std::abs(r[k + 1] - r[k]);
    out[i] = tv;
  }
  return out;
}

std::vector<double> l1_distance(const DensityField& a, const DensityField& b,
                                const Grid1D& grid) {
  if (a.n_classes() != b.n_classes() || a.n_cells() != b.n_cells() ||
      a.n_cells() != grid.n_cells)
    throw std::invalid_argument("l1_distance: shape mismatch");
  std::vector<double> out(a.n_classes(), 0.0);
  for (int i = 0; i < a.n_classes(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < a[i].size(); ++k) s += std::abs(a[i][k] - b[i][k]);
    out[i] = grid.dx * s;
  }
  return out;
}

void check_finite(const DensityField& field, const char* what) {
  for (int i = 0; i < field.n_classes(); ++i)
    for (std::size_t k = 0; k < field[i].size(); ++k)
      if (!std::isfinite(field[i][k]))
        throw std::runtime_error(std::string(what) + ": non-finite value, class " +
                                 std::to_string(i + 1) + " cell " + std::to_string(k));
}

}  // namespace nltr
