#ifndef NLTR_SPEED_LAW_HPP
#define NLTR_SPEED_LAW_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace nltr {

/// Smooth slowdown profile: 1 outside [5,10], dipping to 0.5 at x = 7.5.
double bottleneck_profile(double x);
double bottleneck_profile_dx(double x);

/// Speed of one class as a function of time, position and the vector of
/// perceived (convolved) densities. Built-ins aggregate q by summation.
class SpeedLaw {
 public:
  virtual ~SpeedLaw() = default;

  virtual double eval(double t, double x, std::span<const double> q) const = 0;
  /// Gradient with respect to each q component. At the kink q = 0 the
  /// interior branch value is used so both solvers agree on the same inputs.
  virtual void eval_dq(double t, double x, std::span<const double> q,
                       std::span<double> out) const = 0;
  virtual double eval_dx(double t, double x, std::span<const double> q) const = 0;
  virtual double max_speed() const = 0;
};

/// v = V (1-q)^3 on q in [0,1], V for q < 0, 0 for q > 1, q = sum_j q_j.
class CubicLaw final : public SpeedLaw {
 public:
  explicit CubicLaw(double v_max);
  double eval(double t, double x, std::span<const double> q) const override;
  void eval_dq(double t, double x, std::span<const double> q,
               std::span<double> out) const override;
  double eval_dx(double t, double x, std::span<const double> q) const override;
  double max_speed() const override { return v_max_; }

 private:
  double v_max_;
};

/// Cubic law with position-dependent ceiling V(x) given by the bottleneck
/// profile.
class BottleneckLaw final : public SpeedLaw {
 public:
  double eval(double t, double x, std::span<const double> q) const override;
  void eval_dq(double t, double x, std::span<const double> q,
               std::span<double> out) const override;
  double eval_dx(double t, double x, std::span<const double> q) const override;
  double max_speed() const override { return 1.0; }
};

/// v identically c, inert coupling.
class ConstantLaw final : public SpeedLaw {
 public:
  explicit ConstantLaw(double c);
  double eval(double, double, std::span<const double>) const override { return c_; }
  void eval_dq(double, double, std::span<const double> q,
               std::span<double> out) const override;
  double eval_dx(double, double, std::span<const double>) const override { return 0.0; }
  double max_speed() const override { return c_; }

 private:
  double c_;
};

using SpeedLawPtr = std::shared_ptr<const SpeedLaw>;

/// Empirical bounds of v and its finite-difference derivatives over a
/// sampled (x, q) lattice; stands in for the analytic norm of the law.
struct AssumptionVReport {
  double sup_v = 0.0;
  double sup_dq = 0.0;
  double sup_dqq = 0.0;
  double sup_dx = 0.0;
  double sup_dxx = 0.0;
  bool ok = true;
  std::string note;

  double norm_proxy() const { return sup_v + sup_dq + sup_dqq + sup_dx + sup_dxx; }
};

/// Samples on q in [0, q_max] (aggregate) and x in [x_lo, x_hi].
AssumptionVReport validate_assumption_v(const SpeedLaw& law, double q_max,
                                        double x_lo, double x_hi,
                                        int samples = 2000);

}  // namespace nltr

#endif
