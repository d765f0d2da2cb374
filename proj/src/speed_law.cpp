#include "nltr/speed_law.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nltr {

double bottleneck_profile(double x) {
  if (x < 5.0 || x > 10.0) return 1.0;
  double a = x - 5.0, c = 10.0 - x;
  return 1.0 - (32.0 / 15625.0) * a * a * a * c * c * c;
}

double bottleneck_profile_dx(double x) {
  if (x < 5.0 || x > 10.0) return 0.0;
  double a = x - 5.0, c = 10.0 - x;
  return -(32.0 / 15625.0) * (3.0 * a * a * c * c * c - 3.0 * a * a * a * c * c);
}

namespace {

double aggregate(std::span<const double> q) {
  double s = std::accumulate(q.begin(), q.end(), 0.0);
  if (!std::isfinite(s)) throw std::runtime_error("speed law: non-finite q");
  return s;
}

double cubic_factor(double s) {
  if (s < 0.0) return 1.0;
  if (s > 1.0) return 0.0;
  double r = 1.0 - s;
  return r * r * r;
}

// Interior branch at s = 0, flat branches outside [0,1].
double cubic_factor_dq(double s) {
  if (s < 0.0 || s > 1.0) return 0.0;
  double r = 1.0 - s;
  return -3.0 * r * r;
}

}  // namespace

CubicLaw::CubicLaw(double v_max) : v_max_(v_max) {
  if (!(v_max > 0.0)) throw std::invalid_argument("CubicLaw: v_max must be positive");
}

double CubicLaw::eval(double, double, std::span<const double> q) const {
  return v_max_ * cubic_factor(aggregate(q));
}

void CubicLaw::eval_dq(double, double, std::span<const double> q,
                       std::span<double> out) const {
  double g = v_max_ * cubic_factor_dq(aggregate(q));
  std::fill(out.begin(), out.end(), g);
}

double CubicLaw::eval_dx(double, double, std::span<const double>) const { return 0.0; }

double BottleneckLaw::eval(double, double x, std::span<const double> q) const {
  return bottleneck_profile(x) * cubic_factor(aggregate(q));
}

void BottleneckLaw::eval_dq(double, double x, std::span<const double> q,
                            std::span<double> out) const {
  double g = bottleneck_profile(x) * cubic_factor_dq(aggregate(q));
  std::fill(out.begin(), out.end(), g);
}

double BottleneckLaw::eval_dx(double, double x, std::span<const double> q) const {
  return bottleneck_profile_dx(x) * cubic_factor(aggregate(q));
}

ConstantLaw::ConstantLaw(double c) : c_(c) {
  if (!(c >= 0.0)) throw std::invalid_argument("ConstantLaw: speed must be non-negative");
}

void ConstantLaw::eval_dq(double, double, std::span<const double> q,
                          std::span<double> out) const {
  aggregate(q);  // still reject non-finite input
  std::fill(out.begin(), out.end(), 0.0);
}

AssumptionVReport validate_assumption_v(const SpeedLaw& law, double q_max,
                                        double x_lo, double x_hi, int samples) {
  AssumptionVReport rep;
  if (samples < 8) throw std::invalid_argument("validate_assumption_v: too few samples");
  double hq = q_max > 0.0 ? q_max / samples : 0.0;
  double hx = (x_hi - x_lo) / samples;
  int nx = 64;  // x resolution; laws vary slowly in x compared to q
  double hx_fine = (x_hi - x_lo) / (nx * 16.0);

  auto v_at = [&](double x, double s) {
    double q[1] = {s};
    return law.eval(0.0, x, q);
  };

  for (int ix = 0; ix <= nx; ++ix) {
    double x = x_lo + ix * (x_hi - x_lo) / nx;
    for (int jq = 0; jq <= samples; ++jq) {
      double s = jq * hq;
      double v = v_at(x, s);
      if (!std::isfinite(v)) {
        rep.ok = false;
        rep.note = "non-finite speed at x=" + std::to_string(x) + " q=" + std::to_string(s);
        return rep;
      }
      rep.sup_v = std::max(rep.sup_v, std::abs(v));
      if (hq > 0.0 && jq >= 1 && jq + 1 <= samples) {
        double d1 = (v_at(x, s + hq) - v_at(x, s - hq)) / (2.0 * hq);
        double d2 = (v_at(x, s + hq) - 2.0 * v + v_at(x, s - hq)) / (hq * hq);
        rep.sup_dq = std::max(rep.sup_dq, std::abs(d1));
        rep.sup_dqq = std::max(rep.sup_dqq, std::abs(d2));
      }
      if (ix >= 1 && ix < nx) {
        double dv1 = (v_at(x + hx_fine, s) - v_at(x - hx_fine, s)) / (2.0 * hx_fine);
        double dv2 =
            (v_at(x + hx_fine, s) - 2.0 * v + v_at(x - hx_fine, s)) / (hx_fine * hx_fine);
        rep.sup_dx = std::max(rep.sup_dx, std::abs(dv1));
        rep.sup_dxx = std::max(rep.sup_dxx, std::abs(dv2));
      }
    }
  }
  (void)hx;
  if (q_max > 0.0 && rep.sup_dq > 0.0 && rep.note.empty())
    rep.note = "gradient kink at q=0 resolved with the interior branch";
  return rep;
}

}  // namespace nltr
