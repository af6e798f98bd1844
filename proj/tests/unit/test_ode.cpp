#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "geoanneal/ode.hpp"

using namespace geoanneal;

TEST(Ode, ExponentialDecay) {
  auto f = [](double, const Eigen::VectorXd& y, Eigen::VectorXd& d) { d = -y; };
  ode::Options opt;
  opt.rtol = opt.atol = 1e-11;
  Eigen::VectorXd y0(1);
  y0 << 1.0;
  const auto y = ode::integrate(f, 0.0, 3.0, y0, opt, [](const auto&) { return true; });
  EXPECT_NEAR(y(0), std::exp(-3.0), 1e-10);
}

TEST(Ode, DenseOutputInterpolatesHarmonicOscillator) {
  auto f = [](double, const Eigen::VectorXd& y, Eigen::VectorXd& d) {
    d.resize(2);
    d << y(1), -y(0);
  };
  ode::Options opt;
  opt.rtol = opt.atol = 1e-10;
  Eigen::VectorXd y0(2);
  y0 << 0.0, 1.0;
  const auto sol = ode::integrate_dense(f, 0.0, 10.0, y0, opt);
  EXPECT_GT(sol.steps(), 5u);
  EXPECT_DOUBLE_EQ(sol.t_begin(), 0.0);
  EXPECT_DOUBLE_EQ(sol.t_end(), 10.0);
  for (double t : {0.0, 0.37, 2.5, 7.123, 10.0}) {
    EXPECT_NEAR(sol(t)(0), std::sin(t), 1e-7) << t;
    EXPECT_NEAR(sol.derivative(t)(0), std::cos(t), 1e-6) << t;
  }
}

TEST(Ode, ComplexRotationOnGrid) {
  using V = Eigen::VectorXcd;
  auto f = [](double, const V& y, V& d) { d = std::complex<double>(0, -2) * y; };
  ode::Options opt;
  opt.rtol = opt.atol = 1e-10;
  V y0(1);
  y0 << 1.0;
  std::vector<double> grid{0.0, 0.5, 1.0, 1.5};
  const auto out = ode::integrate_on_grid(f, std::span<const double>(grid), y0, opt);
  ASSERT_EQ(out.size(), grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    EXPECT_NEAR(std::abs(out[k](0) - std::exp(std::complex<double>(0, -2 * grid[k]))), 0.0,
                1e-8);
}

TEST(Ode, ObserverStopsEarly) {
  auto f = [](double, const Eigen::VectorXd&, Eigen::VectorXd& d) { d = Eigen::VectorXd::Ones(1); };
  ode::Options opt;
  opt.max_step = 0.1;
  int calls = 0;
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(1);
  const auto y = ode::integrate(f, 0.0, 1.0, y0, opt, [&](const auto&) { return ++calls < 3; });
  EXPECT_EQ(calls, 3);
  EXPECT_LT(y(0), 1.0);
}

TEST(Ode, Errors) {
  auto f = [](double, const Eigen::VectorXd& y, Eigen::VectorXd& d) { d = y; };
  Eigen::VectorXd y0 = Eigen::VectorXd::Ones(1);
  ode::Options opt;
  EXPECT_THROW(ode::integrate(f, 1.0, 1.0, y0, opt, [](const auto&) { return true; }),
               InvalidArgument);
  opt.max_steps = 2;
  opt.max_step = 1e-3;
  EXPECT_THROW(ode::integrate(f, 0.0, 1.0, y0, opt, [](const auto&) { return true; }),
               IntegrationError);
}
