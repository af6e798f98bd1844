#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <memory>
#include <ostream>
#include <vector>

#include "geoanneal/instance.hpp"
#include "geoanneal/ode.hpp"
#include "geoanneal/schedule.hpp"

namespace geoanneal {

struct MeanFieldOptions {
  double tol = 1e-8;
  std::size_t grid_points = 513;
};

// Classical Bloch-vector trajectory of every spin under a schedule.
// Immutable once built; spins are stored column-wise as 3 x n matrices.
class SpinTrajectory {
 public:
  // Below this |n^z(T)| the sign of a spin is unresolved and set to +1.
  static constexpr double kUnresolvedThreshold = 1e-12;

  std::size_t n_spins() const { return n_; }
  double final_time() const { return T_; }
  double tolerance() const { return tol_; }
  const IsingInstance& instance() const { return inst_; }
  const ScheduleFunction& schedule() const { return sched_; }

  const std::vector<double>& times() const { return times_; }
  const Eigen::Matrix3Xd& spins(std::size_t k) const { return spins_[k]; }
  const Eigen::VectorXd& local_fields(std::size_t k) const { return fields_[k]; }
  const Eigen::Matrix3Xd& final_spins() const { return spins_.back(); }

  // Dense-output evaluation at arbitrary t in [0, T].
  Eigen::Matrix3Xd spins_at(double t) const;
  Eigen::VectorXd local_fields_at(double t) const;

  double driver_weight(double t) const { return sched_.driver_weight(t, T_); }
  double problem_weight(double t) const { return sched_.problem_weight(t, T_); }

  const std::vector<int>& sigma_star() const { return sigma_star_; }
  const std::vector<bool>& unresolved() const { return unresolved_; }

  // max over stored times and spins of | |n_i| - 1 |
  double max_norm_drift() const;
  std::size_t integrator_steps() const { return dense_->steps(); }

 private:
  friend SpinTrajectory integrate_meanfield(const IsingInstance&, const ScheduleFunction&,
                                            double, const MeanFieldOptions&);
  SpinTrajectory() = default;

  std::size_t n_ = 0;
  double T_ = 0.0;
  double tol_ = 0.0;
  IsingInstance inst_;
  ScheduleFunction sched_;
  std::vector<double> times_;
  std::vector<Eigen::Matrix3Xd> spins_;
  std::vector<Eigen::VectorXd> fields_;
  std::vector<int> sigma_star_;
  std::vector<bool> unresolved_;
  std::shared_ptr<const ode::DenseSolution<Eigen::VectorXd>> dense_;
};

// Integrates the classical spin equations of motion from n_i(0) = (1, 0, 0).
SpinTrajectory integrate_meanfield(const IsingInstance& inst, const ScheduleFunction& sched,
                                   double T, const MeanFieldOptions& opt = {});

// Mean-field energy  -sum_i [s^1 n^x_i + s^2 (h_i + sum_{j>i} J_ij n^z_j) n^z_i]
// at time t (no constant offset).
double mf_energy(const IsingInstance& inst, const SpinTrajectory& traj, double t);

// q_i = (n^z_i)^2 per stored time; outer index is time.
std::vector<Eigen::VectorXd> ea_parameter(const SpinTrajectory& traj);

struct FrustrationReport {
  std::vector<double> scores;      // 1 - |n^z_i(T)|, clamped to [0, 1]
  std::vector<std::size_t> ranking;  // spins by descending score, ties by index
};

FrustrationReport frustration_report(const SpinTrajectory& traj);

// CSV with columns t,spin,nx,ny,nz.
void write_trajectory_csv(const SpinTrajectory& traj, std::ostream& out);

}  // namespace geoanneal
