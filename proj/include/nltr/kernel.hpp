#ifndef NLTR_KERNEL_HPP
#define NLTR_KERNEL_HPP

#include <memory>
#include <variant>
#include <vector>

#include "nltr/grid.hpp"

namespace nltr {

/// Asymmetric quartic bump with forward horizon f (argument in [-f,0])
/// and backward horizon b (argument in [0,b]); unit integral.
struct KernelSpec {
  double forward = 1.0;
  double backward = 1.0;
  double amplitude = 0.0;

  KernelSpec() = default;
  KernelSpec(double f, double b);
};

/// A = 15 / (8 (f + b)), the value making the bump integrate to one.
double normalization_constant(double f, double b);

double eval_kernel(const KernelSpec& spec, double x);
double eval_kernel_dx(const KernelSpec& spec, double x);
double eval_kernel_dxx(const KernelSpec& spec, double x);

/// Kernel sampled on grid offsets p*dx, renormalized so dx * sum = 1.
struct DiscreteKernel {
  std::vector<double> weights;  // index 0 corresponds to offset p_min
  int p_min = 0;
  double dx = 0.0;
  double raw_defect = 0.0;  // |dx * raw sum - 1| before rescaling

  int p_max() const { return p_min + static_cast<int>(weights.size()) - 1; }
  int n_taps() const { return static_cast<int>(weights.size()); }
};

DiscreteKernel discretize(const KernelSpec& spec, const Grid1D& grid);

/// Custom tap table (non-negative), renormalized to unit discrete mass.
/// Tap j sits at offset (p_min + j) * dx.
DiscreteKernel discretize_taps(std::vector<double> taps, int p_min, double dx);

/// Samples of the analytic derivatives on the same offsets, not renormalized.
DiscreteKernel discretize_derivative(const KernelSpec& spec, const Grid1D& grid);

enum class ConvEngine { direct, fft };

/// out_k = dx * sum_p w_p rho_{k-p}, zero extension outside the domain.
std::vector<double> convolve(const DiscreteKernel& kernel,
                             const std::vector<double>& field,
                             ConvEngine engine = ConvEngine::direct);

/// FFT-backed convolver with the kernel transform precomputed for a fixed
/// field length. Repeated applications share plans and buffers.
class FftConvolver {
 public:
  FftConvolver(const DiscreteKernel& kernel, int n_cells);
  ~FftConvolver();
  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;
  FftConvolver(FftConvolver&&) noexcept;
  FftConvolver& operator=(FftConvolver&&) noexcept;

  std::vector<double> apply(const std::vector<double>& field) const;
  int n_cells() const { return n_cells_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_cells_ = 0;
};

/// One entry of the interaction matrix: either the analytic bump or a raw
/// tap table in grid units.
struct TapTable {
  std::vector<double> taps;
  int p_min = 0;
  double dx = 0.0;
};

using KernelEntry = std::variant<KernelSpec, TapTable>;

/// n x n family of interaction kernels, row i = how class i sees class j.
struct KernelMatrix {
  int n = 0;
  std::vector<KernelEntry> entries;  // row-major

  KernelMatrix() = default;
  explicit KernelMatrix(int n_classes);
  /// All pairs share one analytic spec.
  KernelMatrix(int n_classes, const KernelSpec& shared);

  KernelEntry& at(int i, int j) { return entries[i * n + j]; }
  const KernelEntry& at(int i, int j) const { return entries[i * n + j]; }

  DiscreteKernel discretized(int i, int j, const Grid1D& grid) const;

  /// Sup norms over all pairs of eta, d_x eta, d_xx eta (tap tables use
  /// finite differences).
  double sup_eta() const;
  double sup_eta_dx() const;
  double sup_eta_dxx() const;
};

}  // namespace nltr

#endif
