#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "geoanneal/schedule.hpp"
#include "oracles.hpp"

using namespace geoanneal;

TEST(Schedule, LinearIsIdentity) {
  const auto lin = linear_schedule();
  for (double u : {0.0, 0.1234, 0.5, 0.999, 1.0}) {
    EXPECT_NEAR(lin(u), u, 1e-15);
    EXPECT_NEAR(lin.slope(u), 1.0, 1e-12);
  }
  EXPECT_EQ(lin.id(), "linear");
  EXPECT_DOUBLE_EQ(lin.driver_weight(32.0, 128.0), 0.75);
  EXPECT_DOUBLE_EQ(lin.problem_weight(32.0, 128.0), 0.25);
}

TEST(Schedule, FromSamplesRejectsBadInput) {
  EXPECT_THROW(ScheduleFunction::from_samples({0.0}), InvalidArgument);
  EXPECT_THROW(ScheduleFunction::from_samples({0.1, 1.0}), InvalidArgument);
  EXPECT_THROW(ScheduleFunction::from_samples({0.0, 0.5, 0.5, 1.0}), InvalidArgument);
  EXPECT_THROW(ScheduleFunction::from_samples({0.0, 0.5, 1.0}, {1.0}), InvalidArgument);
}

TEST(Schedule, InterpolationStaysMonotone) {
  // Sharp step; unlimited cubic slopes would overshoot.
  const auto f = ScheduleFunction::from_samples({0.0, 0.01, 0.02, 0.98, 0.99, 1.0});
  double prev = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double v = f(k / 1000.0);
    EXPECT_GE(v, prev - 1e-15);
    prev = v;
  }
}

TEST(Schedule, GeodesicMatchesQuadrature) {
  GeodesicParams p;
  p.center = 0.4;
  p.gamma0 = 2.0;
  p.sigma = 0.1;
  const auto g = solve_geodesic(p);
  for (double u : {0.1, 0.3, 0.5, 0.7, 0.95})
    EXPECT_NEAR(g(u), oracle::geodesic_s_of_u(u, p.center, p.sigma, p.gamma0), 2e-6) << u;
}

TEST(Schedule, GeodesicDefaultsSlowDownAtCenter) {
  GeodesicParams p;
  p.center = 0.62;
  const auto g = solve_geodesic(p);
  const auto k = g.min_slope_index();
  EXPECT_NEAR(g.samples()[k], p.center, p.sigma);
  auto force = [&](double s) { return bump_force(p, s); };
  EXPECT_LT(geodesic_residual(g, force), 1e-6);
  EXPECT_NE(g.id().find("geodesic"), std::string::npos);
}

TEST(Schedule, ZeroStrengthIsLinear) {
  GeodesicParams p;
  p.gamma0 = 0.0;
  const auto g = solve_geodesic(p);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(g.samples()[k], g.u_at(k), 1e-9);
}

TEST(Schedule, GaussianShapeSharesExtrema) {
  GeodesicParams p;
  p.center = 0.5;
  p.sigma = 0.05;
  p.gamma0 = 3.2;
  const double lor = lorentzian_force(p, p.center - p.sigma);
  p.shape = BumpShape::gaussian;
  EXPECT_NEAR(bump_force(p, p.center - p.sigma), lor, 1e-12);
  EXPECT_NEAR(bump_force(p, p.center - p.sigma), p.gamma0 / (2 * p.sigma), 1e-12);
  const auto g = solve_geodesic(p);
  EXPECT_NEAR(g.samples()[g.min_slope_index()], p.center, p.sigma);
}

TEST(Schedule, ParamValidation) {
  GeodesicParams p;
  p.center = 1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p.center = 0.5;
  p.sigma = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p.sigma = 0.05;
  p.gamma0 = -1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(Schedule, ChristoffelOfSmoothGap) {
  GapProfile gp;
  for (int k = 0; k <= 200; ++k) {
    const double s = k / 200.0;
    gp.s.push_back(s);
    gp.gap.push_back(0.1 + (s - 0.3) * (s - 0.3));
  }
  const auto c = christoffel_from_gap(gp);
  for (std::size_t k = 1; k + 1 < gp.s.size(); ++k) {
    const double s = gp.s[k];
    EXPECT_NEAR(c[k], -2 * (s - 0.3) / gp.gap[k], 1e-3);
  }
  const auto sched = exact_christoffel_schedule(gp);
  EXPECT_NEAR(sched.samples()[sched.min_slope_index()], 0.3, 0.01);
  gp.gap[10] = 0.0;
  EXPECT_THROW(christoffel_from_gap(gp), DegenerateError);
}

TEST(Schedule, QaoaAnglesUseEndpoints) {
  const auto a = qaoa_angles(linear_schedule(), 8.0, 4);
  ASSERT_EQ(a.beta.size(), 4u);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_DOUBLE_EQ(a.gamma[k - 1], 2.0 * k / 4.0);
    EXPECT_DOUBLE_EQ(a.beta[k - 1] + a.gamma[k - 1], 2.0);
  }
  EXPECT_THROW(qaoa_angles(linear_schedule(), 8.0, 0), InvalidArgument);
  const auto j = angles_to_json(a);
  EXPECT_EQ(j["p"], 4);
}

TEST(Schedule, CsvRoundTrip) {
  GeodesicParams p;
  const auto g = solve_geodesic(p);
  std::ostringstream os;
  write_schedule_csv(g, os);
  const auto back = read_schedule_csv(os.str(), "copy");
  EXPECT_EQ(back.samples().size(), g.samples().size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_EQ(back.samples()[k], g.samples()[k]);
    EXPECT_EQ(back.slopes()[k], g.slopes()[k]);
  }
  EXPECT_EQ(back.id(), "copy");
}

TEST(Schedule, CsvTwoColumnsAndErrors) {
  const auto f = read_schedule_csv("u,s\n0,0\n0.5,0.25\n1,1\n");
  EXPECT_EQ(f.size(), 3u);
  EXPECT_DOUBLE_EQ(f(0.5), 0.25);
  EXPECT_THROW(read_schedule_csv("0,0\n0.5,abc\n1,1\n"), ParseError);
  EXPECT_THROW(read_schedule_csv("0,0,1,1\n1,1,1,1\n"), ParseError);
  EXPECT_THROW(read_schedule_csv("0,0\n0.3,0.5\n1,1\n"), InvalidArgument);
  EXPECT_THROW(load_schedule("/nonexistent/schedule.csv"), InvalidArgument);
}

TEST(Schedule, SpecVectors) {
  const auto lin = linear_schedule();
  EXPECT_EQ(lin(0.5), 0.5);
  EXPECT_EQ(lin(0.0), 0.0);
  EXPECT_EQ(lin(1.0), 1.0);
  GeodesicParams p;
  p.center = 0.62;
  EXPECT_EQ(lorentzian_force(p, 0.62), 0.0);

  const auto a = qaoa_angles(lin, 8.0, 64);
  for (int k = 1; k <= 64; ++k) {
    EXPECT_NEAR(a.beta[k - 1], 0.125 * (1.0 - k / 64.0), 1e-15);
    EXPECT_NEAR(a.gamma[k - 1], 0.125 * k / 64.0, 1e-15);
  }
  EXPECT_EQ(a.beta.back(), 0.0);
  EXPECT_EQ(a.gamma.back(), 0.125);
}

TEST(Schedule, ConstantGapGivesLinear) {
  GapProfile gp;
  for (int k = 0; k <= 32; ++k) {
    gp.s.push_back(k / 32.0);
    gp.gap.push_back(0.7);
  }
  for (double c : christoffel_from_gap(gp)) EXPECT_EQ(c, 0.0);
  const auto sched = exact_christoffel_schedule(gp);
  for (std::size_t k = 0; k < sched.size(); ++k) EXPECT_NEAR(sched.samples()[k], sched.u_at(k), 1e-9);
}

TEST(Schedule, SingleSpinGapIsSlowestAtHalf) {
  GapProfile gp;
  for (int k = 0; k <= 256; ++k) {
    const double s = k / 256.0;
    gp.s.push_back(s);
    gp.gap.push_back(oracle::single_spin_gap(1.0, s));
  }
  const auto sched = exact_christoffel_schedule(gp);
  EXPECT_NEAR(sched.samples()[sched.min_slope_index()], 0.5, 1.0 / 256);
}
