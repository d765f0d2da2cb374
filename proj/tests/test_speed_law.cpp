#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "nltr/speed_law.hpp"

using namespace nltr;

namespace {

double ev(const SpeedLaw& law, double x, std::initializer_list<double> q) {
  std::vector<double> qv(q);
  return law.eval(0.0, x, qv);
}

}  // namespace

TEST_CASE("bottleneck profile") {
  CHECK(bottleneck_profile(5.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bottleneck_profile(10.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bottleneck_profile(7.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bottleneck_profile(0.0) == 1.0);
  CHECK(bottleneck_profile(15.0) == 1.0);
  for (double x = 5.0; x <= 10.0; x += 0.01) {
    CHECK(bottleneck_profile(x) >= 0.5 - 1e-12);
    CHECK(bottleneck_profile(x) <= 1.0 + 1e-12);
  }
  // Smooth junctions: V'(5) = V'(10) = 0, and V'(7.5) = 0 by symmetry.
  CHECK(std::abs(bottleneck_profile_dx(5.0)) <= 1e-12);
  CHECK(std::abs(bottleneck_profile_dx(10.0)) <= 1e-12);
  double h = 1e-5;
  double fd = (bottleneck_profile(7.5 + h) - bottleneck_profile(7.5 - h)) / (2 * h);
  CHECK(std::abs(fd) <= 1e-6);
  CHECK(std::abs(bottleneck_profile_dx(7.5)) <= 1e-12);
}

TEST_CASE("cubic law piecewise values") {
  CubicLaw law(1.0);
  CHECK(ev(law, 0.0, {0.0}) == 1.0);
  CHECK(ev(law, 0.0, {1.0}) == 0.0);
  CHECK(ev(law, 0.0, {-0.3}) == 1.0);
  CHECK(ev(law, 0.0, {1.7}) == 0.0);
  CHECK(ev(law, 0.0, {0.5}) == doctest::Approx(0.125).epsilon(1e-15));

  CubicLaw fast(1.5);
  CHECK(ev(fast, 0.0, {0.5}) == doctest::Approx(0.1875).epsilon(1e-15));
  // q aggregates by summation.
  CHECK(ev(fast, 0.0, {0.2, 0.3}) == doctest::Approx(0.1875).epsilon(1e-15));
}

TEST_CASE("cubic law gradient, kink convention") {
  CubicLaw law(1.0);
  std::array<double, 2> q{0.25, 0.25};
  std::array<double, 2> out{};
  law.eval_dq(0.0, 0.0, q, out);
  CHECK(out[0] == doctest::Approx(-0.75).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(-0.75).epsilon(1e-14));

  // Flat branches.
  std::array<double, 1> big{1.4}, g1{};
  law.eval_dq(0.0, 0.0, big, g1);
  CHECK(g1[0] == 0.0);
  std::array<double, 1> neg{-0.2};
  law.eval_dq(0.0, 0.0, neg, g1);
  CHECK(g1[0] == 0.0);

  // At q = 0 the interior one-sided value -3V is used.
  std::array<double, 1> zero{0.0};
  CubicLaw v2(2.0);
  v2.eval_dq(0.0, 0.0, zero, g1);
  CHECK(g1[0] == doctest::Approx(-6.0).epsilon(1e-14));
}

TEST_CASE("gradients match central differences at random interior points") {
  CubicLaw cubic(1.3);
  BottleneckLaw bn;
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> uq(0.05, 0.95), ux(0.0, 20.0);
  double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    double x = ux(rng);
    std::array<double, 2> q{0.5 * uq(rng), 0.4 * uq(rng)};
    for (const SpeedLaw* law : {static_cast<const SpeedLaw*>(&cubic),
                                static_cast<const SpeedLaw*>(&bn)}) {
      std::array<double, 2> grad{};
      law->eval_dq(0.0, x, q, grad);
      for (int j = 0; j < 2; ++j) {
        auto qp = q, qm = q;
        qp[j] += h;
        qm[j] -= h;
        double fd = (law->eval(0.0, x, qp) - law->eval(0.0, x, qm)) / (2 * h);
        CHECK(std::abs(grad[j] - fd) <= 1e-6);
      }
      double fdx = (law->eval(0.0, x + h, q) - law->eval(0.0, x - h, q)) / (2 * h);
      CHECK(std::abs(law->eval_dx(0.0, x, q) - fdx) <= 1e-5);
    }
  }
}

TEST_CASE("bottleneck law values") {
  BottleneckLaw law;
  CHECK(ev(law, 7.5, {0.0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ev(law, 0.0, {0.0}) == 1.0);
  std::array<double, 1> q0{0.0};
  CHECK(law.eval_dx(0.0, 7.5, q0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("bounds and monotonicity") {
  CubicLaw cubic(1.5);
  BottleneckLaw bn;
  ConstantLaw cl(0.8);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uq(-0.5, 2.0), ux(0.0, 20.0);
  for (int trial = 0; trial < 500; ++trial) {
    double x = ux(rng);
    std::array<double, 2> q{uq(rng), uq(rng)};
    for (const SpeedLaw* law : {static_cast<const SpeedLaw*>(&cubic),
                                static_cast<const SpeedLaw*>(&bn),
                                static_cast<const SpeedLaw*>(&cl)}) {
      double v = law->eval(0.0, x, q);
      CHECK(v >= 0.0);
      CHECK(v <= law->max_speed() + 1e-15);
      std::array<double, 2> q2{q[0] + 0.1, q[1] + 0.05};
      CHECK(law->eval(0.0, x, q2) <= v + 1e-15);
    }
  }
}

TEST_CASE("validate_assumption_v sampled bounds") {
  CubicLaw law(1.0);
  auto rep = validate_assumption_v(law, 1.0, 0.0, 10.0);
  CHECK(rep.ok);
  // Analytic extrema of (1-q)^3 on [0,1]: |v| <= 1, |v'| <= 3, |v''| <= 6.
  CHECK(rep.sup_v == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.sup_dq == doctest::Approx(3.0).epsilon(1e-2));
  CHECK(rep.sup_dqq == doctest::Approx(6.0).epsilon(1e-2));
  CHECK(rep.sup_dx <= 1e-9);

  ConstantLaw cl(0.7);
  auto repc = validate_assumption_v(cl, 1.0, 0.0, 10.0);
  CHECK(repc.sup_v == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(repc.sup_dq <= 1e-12);
  CHECK(repc.sup_dx <= 1e-12);

  // Bottleneck: sup |d_x v| equals max |V'| on [5,10] (dense sampling).
  BottleneckLaw bn;
  auto repb = validate_assumption_v(bn, 1.0, 0.0, 20.0);
  double vpmax = 0.0;
  for (int i = 0; i <= 200000; ++i)
    vpmax = std::max(vpmax, std::abs(bottleneck_profile_dx(5.0 + i * 5.0 / 200000.0)));
  CHECK(repb.sup_dx == doctest::Approx(vpmax).epsilon(1e-2));
}
