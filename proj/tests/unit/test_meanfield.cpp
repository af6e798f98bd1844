#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "geoanneal/meanfield.hpp"
#include "oracles.hpp"

using namespace geoanneal;

TEST(MeanField, FreeSpinsFollowSchrodinger) {
  auto inst = IsingInstance::zeros(3);
  inst.fields << 0.7, -1.3, 0.2;
  MeanFieldOptions opt;
  opt.tol = 1e-10;
  const auto traj = integrate_meanfield(inst, linear_schedule(), 16.0, opt);
  for (std::size_t i = 0; i < 3; ++i) {
    const double want = oracle::two_level_z(inst.fields(Eigen::Index(i)), 16.0, 16 * 256);
    EXPECT_NEAR(traj.final_spins()(2, Eigen::Index(i)), want, 1e-7) << i;
  }
}

TEST(MeanField, NormIsConserved) {
  const auto inst = generate_sk(6, 5);
  const auto traj = integrate_meanfield(inst, linear_schedule(), 32.0);
  EXPECT_LT(traj.max_norm_drift(), 1e-6);
  EXPECT_EQ(traj.times().size(), 513u);
  EXPECT_DOUBLE_EQ(traj.times().back(), 32.0);
  EXPECT_GT(traj.integrator_steps(), 10u);
  // Dense output agrees with the stored grid.
  const auto mid = traj.spins_at(traj.times()[100]);
  EXPECT_LT((mid - traj.spins(100)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MeanField, StartsAlongDriverAndEndsAligned) {
  const auto inst = generate_sk(4, 9);
  MeanFieldOptions opt;
  opt.grid_points = 65;
  const auto traj = integrate_meanfield(inst, linear_schedule(), 64.0, opt);
  EXPECT_DOUBLE_EQ(traj.spins(0)(0, 0), 1.0);
  EXPECT_NEAR(mf_energy(inst, traj, 0.0), -4.0, 1e-12);
  const auto& sig = traj.sigma_star();
  for (std::size_t i = 0; i < 4; ++i) {
    const double z = traj.final_spins()(2, Eigen::Index(i));
    EXPECT_EQ(sig[i], z > 0 ? 1 : -1);
  }
  const auto q = ea_parameter(traj);
  ASSERT_EQ(q.size(), 65u);
  EXPECT_NEAR(q.back()(1), std::pow(traj.final_spins()(2, 1), 2), 1e-15);
}

TEST(MeanField, EnergyAtEndMatchesClassicalFormula) {
  const auto inst = generate_sk(5, 2);
  const auto traj = integrate_meanfield(inst, linear_schedule(), 8.0);
  const auto nz = traj.final_spins().row(2);
  double e = 0.0;
  for (Eigen::Index i = 0; i < 5; ++i) {
    double local = inst.fields(i);
    for (Eigen::Index j = i + 1; j < 5; ++j) local += inst.couplings(i, j) * nz(j);
    e -= local * nz(i);
  }
  EXPECT_NEAR(mf_energy(inst, traj, 8.0), e, 1e-12);
}

TEST(MeanField, FrustrationRanking) {
  auto inst = IsingInstance::zeros(3);
  inst.fields << 2.0, 0.05, -1.0;
  const auto traj = integrate_meanfield(inst, linear_schedule(), 4.0);
  const auto r = frustration_report(traj);
  EXPECT_EQ(r.ranking.front(), 1u);
  for (double s : r.scores) {
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(MeanField, RejectsBadArguments) {
  const auto inst = generate_sk(3, 1);
  EXPECT_THROW(integrate_meanfield(inst, linear_schedule(), 0.0), InvalidArgument);
  MeanFieldOptions opt;
  opt.tol = 0.0;
  EXPECT_THROW(integrate_meanfield(inst, linear_schedule(), 1.0, opt), InvalidArgument);
  opt = {};
  opt.grid_points = 1;
  EXPECT_THROW(integrate_meanfield(inst, linear_schedule(), 1.0, opt), InvalidArgument);
}

TEST(MeanField, TrajectoryCsvHasOneRowPerSpinAndTime) {
  const auto inst = generate_sk(2, 1);
  MeanFieldOptions opt;
  opt.grid_points = 5;
  const auto traj = integrate_meanfield(inst, linear_schedule(), 1.0, opt);
  std::ostringstream os;
  write_trajectory_csv(traj, os);
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("t,spin,nx,ny,nz\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 5 * 2);
}

TEST(MeanField, ZeroInstanceIsFixedPoint) {
  const auto inst = IsingInstance::zeros(3);
  MeanFieldOptions opt;
  opt.grid_points = 17;
  const auto traj = integrate_meanfield(inst, linear_schedule(), 10.0, opt);
  for (std::size_t k = 0; k < traj.times().size(); ++k) {
    EXPECT_LT((traj.spins(k).row(0).array() - 1.0).abs().maxCoeff(), 1e-14);
    EXPECT_LT(traj.spins(k).bottomRows(2).cwiseAbs().maxCoeff(), 1e-14);
  }
  const auto r = frustration_report(traj);
  EXPECT_EQ(r.scores[0], 1.0);
  const auto q = ea_parameter(traj);
  EXPECT_EQ(q.front().maxCoeff(), 0.0);
}

TEST(MeanField, SlowSingleSpinAligns) {
  auto inst = IsingInstance::zeros(1);
  inst.fields << 1.0;
  const auto traj = integrate_meanfield(inst, linear_schedule(), 1024.0);
  EXPECT_GE(traj.final_spins()(2, 0), 0.99);
  EXPECT_NEAR(traj.final_spins()(2, 0), oracle::two_level_z(1.0, 1024.0, 1024 * 64), 1e-6);
}

TEST(MeanField, LocalizedPairMatchesClassicalEnergy) {
  auto inst = generate_sk(2, 4);
  inst.fields *= 3.0;
  const auto traj = integrate_meanfield(inst, linear_schedule(), 512.0);
  const auto nz = traj.final_spins().row(2);
  ASSERT_GT(nz.cwiseAbs().minCoeff(), 0.99);
  const Assignment a({nz(0) > 0 ? 1 : -1, nz(1) > 0 ? 1 : -1});
  EXPECT_NEAR(mf_energy(inst, traj, 512.0), energy(inst, a) - inst.offset, 0.05);
  EXPECT_EQ(frustration_report(traj).scores.size(), 2u);
}
