#include "nltr/kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <stdexcept>

namespace nltr {

double normalization_constant(double f, double b) {
  if (!(f > 0.0) || !(b > 0.0))
    throw std::invalid_argument("kernel horizons must be positive");
  // int (1-u^2)^2 du over one piece of width h equals 8h/15.
  return 15.0 / (8.0 * (f + b));
}

KernelSpec::KernelSpec(double f, double b)
    : forward(f), backward(b), amplitude(normalization_constant(f, b)) {}

double eval_kernel(const KernelSpec& spec, double x) {
  double h = x <= 0.0 ? spec.forward : spec.backward;
  if (x < -spec.forward || x > spec.backward) return 0.0;
  double u = x / h;
  double s = 1.0 - u * u;
  return spec.amplitude * s * s;
}

double eval_kernel_dx(const KernelSpec& spec, double x) {
  double h = x <= 0.0 ? spec.forward : spec.backward;
  if (x < -spec.forward || x > spec.backward) return 0.0;
  double u = x / h;
  return spec.amplitude * (-4.0 * u * (1.0 - u * u)) / h;
}

double eval_kernel_dxx(const KernelSpec& spec, double x) {
  double h = x <= 0.0 ? spec.forward : spec.backward;
  if (x < -spec.forward || x > spec.backward) return 0.0;
  double u = x / h;
  return spec.amplitude * (12.0 * u * u - 4.0) / (h * h);
}

DiscreteKernel discretize(const KernelSpec& spec, const Grid1D& grid) {
  double dx = grid.dx;
  int p_min = static_cast<int>(std::ceil(-spec.forward / dx));
  int p_max = static_cast<int>(std::floor(spec.backward / dx));
  while (p_min <= p_max && eval_kernel(spec, p_min * dx) == 0.0) ++p_min;
  while (p_max >= p_min && eval_kernel(spec, p_max * dx) == 0.0) --p_max;
  if (p_min > p_max) throw std::runtime_error("discretize: degenerate kernel, no taps");

  DiscreteKernel k;
  k.p_min = p_min;
  k.dx = dx;
  k.weights.resize(p_max - p_min + 1);
  double s = 0.0;
  for (int p = p_min; p <= p_max; ++p) {
    double w = eval_kernel(spec, p * dx);
    k.weights[p - p_min] = w;
    s += w;
  }
  s *= dx;
  k.raw_defect = std::abs(s - 1.0);
  for (double& w : k.weights) w /= s;
  return k;
}

DiscreteKernel discretize_taps(std::vector<double> taps, int p_min, double dx) {
  if (!(dx > 0.0)) throw std::invalid_argument("discretize_taps: dx must be positive");
  double s = 0.0;
  for (double t : taps) {
    if (t < 0.0 || !std::isfinite(t))
      throw std::invalid_argument("discretize_taps: taps must be finite and non-negative");
    s += t;
  }
  s *= dx;
  if (s <= 0.0) throw std::runtime_error("discretize_taps: degenerate kernel, zero mass");
  DiscreteKernel k;
  k.p_min = p_min;
  k.dx = dx;
  k.raw_defect = std::abs(s - 1.0);
  k.weights = std::move(taps);
  for (double& w : k.weights) w /= s;
  return k;
}

DiscreteKernel discretize_derivative(const KernelSpec& spec, const Grid1D& grid) {
  DiscreteKernel base = discretize(spec, grid);
  DiscreteKernel k;
  k.p_min = base.p_min;
  k.dx = base.dx;
  k.weights.resize(base.weights.size());
  for (int j = 0; j < base.n_taps(); ++j)
    k.weights[j] = eval_kernel_dx(spec, (base.p_min + j) * base.dx);
  return k;
}

std::vector<double> convolve_direct(const DiscreteKernel& kernel,
                                    const std::vector<double>& field) {
  int n = static_cast<int>(field.size());
  std::vector<double> out(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = 0; j < kernel.n_taps(); ++j) {
      int src = k - (kernel.p_min + j);
      if (src >= 0 && src < n) s += kernel.weights[j] * field[src];
    }
    out[k] = kernel.dx * s;
  }
  return out;
}

struct FftConvolver::Impl {
  int n_fft = 0;
  int p_min = 0;
  double dx = 0.0;
  std::vector<std::complex<double>> kernel_hat;
  mutable std::vector<double> real_buf;
  mutable std::vector<std::complex<double>> freq_buf;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

namespace {
int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}
}  // namespace

FftConvolver::FftConvolver(const DiscreteKernel& kernel, int n_cells)
    : impl_(std::make_unique<Impl>()), n_cells_(n_cells) {
  int needed = n_cells + kernel.n_taps() - 1;
  impl_->n_fft = next_pow2(needed);
  impl_->p_min = kernel.p_min;
  impl_->dx = kernel.dx;
  int nf = impl_->n_fft;
  impl_->real_buf.assign(nf, 0.0);
  impl_->freq_buf.assign(nf / 2 + 1, {0.0, 0.0});
  impl_->fwd = fftw_plan_dft_r2c_1d(
      nf, impl_->real_buf.data(),
      reinterpret_cast<fftw_complex*>(impl_->freq_buf.data()), FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_c2r_1d(
      nf, reinterpret_cast<fftw_complex*>(impl_->freq_buf.data()),
      impl_->real_buf.data(), FFTW_ESTIMATE);

  std::copy(kernel.weights.begin(), kernel.weights.end(), impl_->real_buf.begin());
  fftw_execute(impl_->fwd);
  impl_->kernel_hat = impl_->freq_buf;
}

FftConvolver::~FftConvolver() = default;
FftConvolver::FftConvolver(FftConvolver&&) noexcept = default;
FftConvolver& FftConvolver::operator=(FftConvolver&&) noexcept = default;

std::vector<double> FftConvolver::apply(const std::vector<double>& field) const {
  if (static_cast<int>(field.size()) != n_cells_)
    throw std::invalid_argument("FftConvolver: field length mismatch");
  auto& im = *impl_;
  std::fill(im.real_buf.begin(), im.real_buf.end(), 0.0);
  std::copy(field.begin(), field.end(), im.real_buf.begin());
  fftw_execute(im.fwd);
  double scale = im.dx / im.n_fft;
  for (std::size_t m = 0; m < im.freq_buf.size(); ++m)
    im.freq_buf[m] *= im.kernel_hat[m] * scale;
  fftw_execute(im.bwd);

  std::vector<double> out(n_cells_, 0.0);
  // Full linear convolution index: y_m = sum_j h_j rho_{m-j}; out_k = dx*y_{k-p_min}.
  for (int k = 0; k < n_cells_; ++k) {
    int m = k - im.p_min;
    if (m >= 0 && m < im.n_fft) out[k] = im.real_buf[m];
  }
  return out;
}

std::vector<double> convolve(const DiscreteKernel& kernel,
                             const std::vector<double>& field, ConvEngine engine) {
  if (engine == ConvEngine::direct) return convolve_direct(kernel, field);
  FftConvolver conv(kernel, static_cast<int>(field.size()));
  return conv.apply(field);
}

KernelMatrix::KernelMatrix(int n_classes) : n(n_classes), entries(n_classes * n_classes) {
  if (n_classes < 1) throw std::invalid_argument("KernelMatrix: need n >= 1");
}

KernelMatrix::KernelMatrix(int n_classes, const KernelSpec& shared)
    : KernelMatrix(n_classes) {
  for (auto& e : entries) e = shared;
}

DiscreteKernel KernelMatrix::discretized(int i, int j, const Grid1D& grid) const {
  const KernelEntry& e = at(i, j);
  if (const auto* spec = std::get_if<KernelSpec>(&e)) return discretize(*spec, grid);
  const auto& t = std::get<TapTable>(e);
  if (std::abs(t.dx - grid.dx) > 1e-12 * grid.dx)
    throw std::invalid_argument("KernelMatrix: tap table dx does not match grid dx");
  return discretize_taps(t.taps, t.p_min, t.dx);
}

namespace {
template <class FSpec, class FTaps>
double sup_over(const KernelMatrix& m, FSpec fs, FTaps ft) {
  double s = 0.0;
  for (const auto& e : m.entries) {
    if (const auto* spec = std::get_if<KernelSpec>(&e))
      s = std::max(s, fs(*spec));
    else
      s = std::max(s, ft(std::get<TapTable>(e)));
  }
  return s;
}

std::vector<double> unit_taps(const TapTable& t) {
  auto k = discretize_taps(t.taps, t.p_min, t.dx);
  return k.weights;
}
}  // namespace

double KernelMatrix::sup_eta() const {
  return sup_over(
      *this, [](const KernelSpec& s) { return s.amplitude; },
      [](const TapTable& t) {
        auto w = unit_taps(t);
        return *std::max_element(w.begin(), w.end());
      });
}

double KernelMatrix::sup_eta_dx() const {
  // max of |d/dx (1-u^2)^2| is at u = 1/sqrt(3).
  return sup_over(
      *this,
      [](const KernelSpec& s) {
        return 8.0 * s.amplitude / (3.0 * std::sqrt(3.0) * std::min(s.forward, s.backward));
      },
      [](const TapTable& t) {
        auto w = unit_taps(t);
        double m = 0.0;
        for (std::size_t j = 0; j + 1 < w.size(); ++j)
          m = std::max(m, std::abs(w[j + 1] - w[j]) / t.dx);
        return m;
      });
}

double KernelMatrix::sup_eta_dxx() const {
  double s = 0.0;
  for (const auto& e : entries) {
    if (const auto* spec = std::get_if<KernelSpec>(&e)) {
      double h = std::min(spec->forward, spec->backward);
      s = std::max(s, 8.0 * spec->amplitude / (h * h));
    } else {
      const auto& t = std::get<TapTable>(e);
      auto w = unit_taps(t);
      for (std::size_t j = 1; j + 1 < w.size(); ++j)
        s = std::max(s, std::abs(w[j + 1] - 2.0 * w[j] + w[j - 1]) / (t.dx * t.dx));
    }
  }
  return s;
}

}  // namespace nltr
