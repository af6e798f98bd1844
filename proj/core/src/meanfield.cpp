#include "geoanneal/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geoanneal/csv.hpp"
#include "geoanneal/error.hpp"

namespace geoanneal {

namespace {

// State vector layout: [n^x_0..n^x_{n-1}, n^y_0.., n^z_0..].
Eigen::Matrix3Xd unpack(const Eigen::VectorXd& y, std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::Matrix3Xd out(3, m);
  out.row(0) = y.segment(0, m).transpose();
  out.row(1) = y.segment(m, m).transpose();
  out.row(2) = y.segment(2 * m, m).transpose();
  return out;
}

}  // namespace

Eigen::Matrix3Xd SpinTrajectory::spins_at(double t) const {
  if (!(t >= 0.0 && t <= T_)) throw InvalidArgument("trajectory: t outside [0, T]");
  if (t == T_) return spins_.back();
  if (t == 0.0) return spins_.front();
  return unpack((*dense_)(t), n_);
}

Eigen::VectorXd SpinTrajectory::local_fields_at(double t) const {
  const Eigen::Matrix3Xd n = spins_at(t);
  return inst_.fields + inst_.couplings * n.row(2).transpose();
}

double SpinTrajectory::max_norm_drift() const {
  double worst = 0.0;
  for (const auto& s : spins_) {
    for (Eigen::Index i = 0; i < s.cols(); ++i)
      worst = std::max(worst, std::abs(s.col(i).norm() - 1.0));
  }
  return worst;
}

SpinTrajectory integrate_meanfield(const IsingInstance& inst, const ScheduleFunction& sched,
                                   double T, const MeanFieldOptions& opt) {
  inst.validate();
  if (!(T > 0.0)) throw InvalidArgument("meanfield: T must be positive");
  if (!(opt.tol > 0.0)) throw InvalidArgument("meanfield: tol must be positive");
  if (opt.grid_points < 2) throw InvalidArgument("meanfield: need at least two output points");

  const std::size_t n = inst.n_spins();
  const auto m = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd& J = inst.couplings;
  const Eigen::VectorXd& h = inst.fields;

  auto rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    const double s2 = sched.problem_weight(t, T);
    const double s1 = 1.0 - s2;
    const auto nx = y.segment(0, m);
    const auto ny = y.segment(m, m);
    const auto nz = y.segment(2 * m, m);
    const Eigen::VectorXd field = h + J * nz;
    dy.segment(0, m) = 2.0 * s2 * field.cwiseProduct(ny);
    dy.segment(m, m) = -2.0 * s2 * field.cwiseProduct(nx) + 2.0 * s1 * nz;
    dy.segment(2 * m, m) = -2.0 * s1 * ny;
  };

  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(3 * m);
  y0.segment(0, m).setOnes();

  ode::Options o;
  o.rtol = opt.tol;
  o.atol = opt.tol;
  auto dense = std::make_shared<const ode::DenseSolution<Eigen::VectorXd>>(
      ode::integrate_dense(rhs, 0.0, T, y0, o));

  SpinTrajectory traj;
  traj.n_ = n;
  traj.T_ = T;
  traj.tol_ = opt.tol;
  traj.inst_ = inst;
  traj.sched_ = sched;
  traj.dense_ = dense;
  const std::size_t g = opt.grid_points;
  traj.times_.resize(g);
  traj.spins_.reserve(g);
  traj.fields_.reserve(g);
  for (std::size_t k = 0; k < g; ++k) {
    const double t = (k + 1 == g) ? T : T * static_cast<double>(k) / static_cast<double>(g - 1);
    traj.times_[k] = t;
    Eigen::VectorXd y;
    if (k == 0) {
      y = y0;
    } else if (k + 1 == g) {
      const auto& last = dense->segments().back();
      y = last.r1 + last.r2;
    } else {
      y = (*dense)(t);
    }
    traj.spins_.push_back(unpack(y, n));
    traj.fields_.push_back(h + J * y.segment(2 * m, m));
  }

  traj.sigma_star_.resize(n);
  traj.unresolved_.resize(n);
  const Eigen::Matrix3Xd& fin = traj.spins_.back();
  for (std::size_t i = 0; i < n; ++i) {
    const double z = fin(2, static_cast<Eigen::Index>(i));
    traj.unresolved_[i] = std::abs(z) < SpinTrajectory::kUnresolvedThreshold;
    traj.sigma_star_[i] = (traj.unresolved_[i] || z > 0.0) ? 1 : -1;
  }
  return traj;
}

double mf_energy(const IsingInstance& inst, const SpinTrajectory& traj, double t) {
  if (inst.n_spins() != traj.n_spins())
    throw InvalidArgument("mf_energy: instance and trajectory sizes differ");
  const Eigen::Matrix3Xd n = traj.spins_at(t);
  const double s1 = traj.driver_weight(t);
  const double s2 = traj.problem_weight(t);
  double e = 0.0;
  const std::size_t N = inst.n_spins();
  for (std::size_t i = 0; i < N; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double local = inst.fields[ii];
    for (std::size_t j = i + 1; j < N; ++j)
      local += inst.couplings(ii, static_cast<Eigen::Index>(j)) * n(2, static_cast<Eigen::Index>(j));
    e += s1 * n(0, ii) + s2 * local * n(2, ii);
  }
  return -e;
}

std::vector<Eigen::VectorXd> ea_parameter(const SpinTrajectory& traj) {
  std::vector<Eigen::VectorXd> q;
  q.reserve(traj.times().size());
  for (std::size_t k = 0; k < traj.times().size(); ++k)
    q.push_back(traj.spins(k).row(2).transpose().array().square().matrix());
  return q;
}

FrustrationReport frustration_report(const SpinTrajectory& traj) {
  FrustrationReport r;
  const auto& fin = traj.final_spins();
  const std::size_t n = traj.n_spins();
  r.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    r.scores[i] = std::clamp(1.0 - std::abs(fin(2, static_cast<Eigen::Index>(i))), 0.0, 1.0);
  r.ranking.resize(n);
  std::iota(r.ranking.begin(), r.ranking.end(), std::size_t{0});
  std::stable_sort(r.ranking.begin(), r.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return r.scores[a] > r.scores[b]; });
  return r;
}

void write_trajectory_csv(const SpinTrajectory& traj, std::ostream& out) {
  CsvWriter csv(out, {"t", "spin", "nx", "ny", "nz"});
  for (std::size_t k = 0; k < traj.times().size(); ++k) {
    const auto& s = traj.spins(k);
    for (Eigen::Index i = 0; i < s.cols(); ++i)
      csv.row(traj.times()[k], static_cast<std::size_t>(i), s(0, i), s(1, i), s(2, i));
  }
}

}  // namespace geoanneal
