#include "geoanneal/fluctuations.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "geoanneal/csv.hpp"
#include "geoanneal/error.hpp"

namespace geoanneal {

using cd = std::complex<double>;

ParamagnonBlocks build_blocks(const IsingInstance& inst, const SpinTrajectory& traj, double t) {
  const std::size_t n = traj.n_spins();
  if (inst.n_spins() != n) throw InvalidArgument("build_blocks: instance and trajectory sizes differ");
  const auto m = static_cast<Eigen::Index>(n);
  const Eigen::Matrix3Xd spins = traj.spins_at(t);
  const Eigen::VectorXd field = inst.fields + inst.couplings * spins.row(2).transpose();
  const double s2 = traj.problem_weight(t);
  const double s1 = 1.0 - s2;
  const auto& sigma = traj.sigma_star();

  ParamagnonBlocks b;
  b.A = Eigen::MatrixXcd::Zero(m, m);
  b.B = Eigen::MatrixXcd::Zero(m, m);
  b.regularized.assign(n, false);
  Eigen::VectorXcd plus(m), minus(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sg = sigma[static_cast<std::size_t>(i)];
    plus[i] = cd(sg * spins(0, i), spins(1, i));
    minus[i] = cd(sg * spins(0, i), -spins(1, i));
    double denom = 1.0 + sg * spins(2, i);
    if (denom < kPoleFloor) {
      denom = kPoleFloor;
      b.regularized[static_cast<std::size_t>(i)] = true;
    }
    b.A(i, i) = 2.0 * s1 * spins(0, i) / denom + 2.0 * s2 * sg * field[i];
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      const double jij = inst.couplings(i, j);
      if (jij == 0.0) continue;
      b.A(i, j) = -s2 * jij * plus[i] * minus[j];
      b.B(i, j) = s2 * jij * plus[i] * plus[j];
    }
  }
  return b;
}

Eigen::MatrixXcd fluctuation_generator(const ParamagnonBlocks& blocks) {
  const auto m = blocks.A.rows();
  Eigen::MatrixXcd g(2 * m, 2 * m);
  g.topLeftCorner(m, m) = blocks.A;
  g.topRightCorner(m, m) = blocks.B;
  g.bottomLeftCorner(m, m) = -blocks.B.adjoint();
  g.bottomRightCorner(m, m) = -blocks.A.conjugate();
  return g;
}

namespace {

double spectrum_deviation(const Eigen::MatrixXcd& F) {
  const Eigen::MatrixXcd iF = cd(0.0, 1.0) * F;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(iF, false);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const cd lam = es.eigenvalues()[k];
    worst = std::max(worst, std::min(std::abs(lam - 1.0), std::abs(lam + 1.0)));
  }
  return worst;
}

}  // namespace

FluctuationRecord evolve_statistical_function(const IsingInstance& inst,
                                              const SpinTrajectory& traj,
                                              const FluctuationOptions& opt) {
  if (!(opt.tol > 0.0)) throw InvalidArgument("fluctuations: tol must be positive");
  const std::size_t n = traj.n_spins();
  if (inst.n_spins() != n) throw InvalidArgument("fluctuations: instance and trajectory sizes differ");
  const auto m = static_cast<Eigen::Index>(n);
  const auto dim = 2 * m;

  // F(t) = U F(0) U^-1 with dU/dt = -i G U. Integrating U instead of F keeps
  // the flow a similarity transform, so the spectrum of iF is exact.
  auto rhs = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    const Eigen::MatrixXcd G = fluctuation_generator(build_blocks(inst, traj, t));
    Eigen::Map<const Eigen::MatrixXcd> U(y.data(), dim, dim);
    Eigen::Map<Eigen::MatrixXcd> dU(dy.data(), dim, dim);
    dU.noalias() = G * U;
    dU *= cd(0.0, -1.0);
  };

  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::VectorXcd y0 = Eigen::Map<const Eigen::VectorXcd>(I.data(), dim * dim);
  Eigen::VectorXd s3(dim);
  for (Eigen::Index i = 0; i < dim; ++i) s3[i] = i < m ? 1.0 : -1.0;

  ode::Options o;
  o.rtol = opt.tol;
  o.atol = opt.tol;
  const auto& times = traj.times();
  const auto states = ode::integrate_on_grid(rhs, std::span<const double>(times), y0, o);

  FluctuationRecord rec;
  rec.tol = opt.tol;
  rec.times = times;
  rec.s.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) rec.s[k] = times[k] / traj.final_time();
  rec.F.reserve(states.size());
  rec.paramagnon.reserve(states.size());
  double defect = 0.0;
  for (const auto& y : states) {
    Eigen::Map<const Eigen::MatrixXcd> U(y.data(), dim, dim);
    // U should satisfy s3 U^+ s3 U = 1. Project with U (1 + E)^-1/2; the
    // truncated series is exact to O(E^4) and E is of order tol.
    const Eigen::MatrixXcd E = s3.asDiagonal() * U.adjoint() * s3.asDiagonal() * U - I;
    defect = std::max(defect, E.cwiseAbs().maxCoeff());
    const Eigen::MatrixXcd E2 = E * E;
    const Eigen::MatrixXcd P = U * (I - 0.5 * E + 0.375 * E2 - 0.3125 * E2 * E);
    // iF = P s3 P^-1 = P P^+ s3
    Eigen::MatrixXcd F = cd(0.0, -1.0) * (P * P.adjoint() * s3.asDiagonal());
    Eigen::VectorXd N(m);
    for (Eigen::Index i = 0; i < m; ++i) N[i] = ((cd(0.0, 1.0) * F(i, i)).real() - 1.0) / 2.0;
    rec.max_spectrum_deviation = std::max(rec.max_spectrum_deviation, spectrum_deviation(F));
    rec.paramagnon.push_back(std::move(N));
    rec.F.push_back(std::move(F));
  }
  rec.propagator_defect = defect;
  rec.spectrum_warning = rec.max_spectrum_deviation > 100.0 * opt.tol;
  rec.chi = localization_susceptibility(rec, traj);
  return rec;
}

std::vector<Eigen::VectorXd> localization_susceptibility(FluctuationRecord& record,
                                                         const SpinTrajectory& traj) {
  const auto& times = traj.times();
  if (record.times.size() != times.size() || record.paramagnon.size() != times.size())
    throw InvalidArgument("localization_susceptibility: record and trajectory grids differ");
  const std::size_t n = traj.n_spins();
  const auto& sigma = traj.sigma_star();
  std::vector<Eigen::VectorXd> chi(times.size(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
  record.z_norm2.assign(times.size(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
  record.regularized.assign(times.size(), std::vector<bool>(n, false));
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto& sp = traj.spins(k);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double sg = sigma[i];
      double denom = 1.0 + sg * sp(2, ii);
      if (denom < kPoleFloor) {
        denom = kPoleFloor;
        record.regularized[k][i] = true;
      }
      const cd z = cd(sp(0, ii), sg * sp(1, ii)) / denom;
      const double z2 = std::norm(z);
      const double q = sp(2, ii) * sp(2, ii);
      record.z_norm2[k][ii] = z2;
      chi[k][ii] = q * (1.0 + z2) * (1.0 + z2) * record.paramagnon[k][ii];
    }
  }
  record.chi = chi;
  return chi;
}

namespace {

struct Peak {
  std::size_t index;
  double height;
  double prominence;
};

// Local maxima of `y` on [lo, hi] with their topographic prominence inside
// that window.
std::vector<Peak> find_peaks(const std::vector<double>& y, std::size_t lo, std::size_t hi) {
  std::vector<Peak> peaks;
  for (std::size_t k = lo; k <= hi; ++k) {
    if (k == 0 || k + 1 >= y.size()) continue;
    if (!(y[k] > y[k - 1])) continue;
    // plateau: first point of a flat top that eventually descends
    std::size_t r = k;
    while (r + 1 < y.size() && y[r + 1] == y[k]) ++r;
    if (r + 1 >= y.size() || !(y[r + 1] < y[k])) continue;
    double left_min = y[k];
    for (std::size_t a = k; a-- > lo;) {
      if (y[a] > y[k]) break;
      left_min = std::min(left_min, y[a]);
    }
    double right_min = y[k];
    for (std::size_t b = k + 1; b <= hi; ++b) {
      if (y[b] > y[k]) break;
      right_min = std::min(right_min, y[b]);
    }
    peaks.push_back({k, y[k], y[k] - std::max(left_min, right_min)});
  }
  return peaks;
}

}  // namespace

std::vector<BottleneckCandidate> detect_bottlenecks(const FluctuationRecord& record,
                                                    const FrustrationReport& frustration,
                                                    const PeakOptions& opt) {
  const std::size_t T = record.s.size();
  if (T == 0) throw InvalidArgument("detect_bottlenecks: empty record");
  const std::size_t n = record.n_spins();
  if (frustration.scores.size() != n)
    throw InvalidArgument("detect_bottlenecks: frustration report size mismatch");

  std::size_t lo = T, hi = 0;
  for (std::size_t k = 0; k < T; ++k) {
    if (record.s[k] >= opt.s_min && record.s[k] <= opt.s_max) {
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  }
  if (lo > hi) throw InvalidArgument("detect_bottlenecks: exclusion margins leave no interior");

  auto usable = [&](std::size_t k, std::size_t i) {
    return record.regularized.empty() || !record.regularized[k][i];
  };

  double global_max = 0.0;
  for (std::size_t k = lo; k <= hi; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (usable(k, i)) global_max = std::max(global_max, record.chi[k][static_cast<Eigen::Index>(i)]);

  std::vector<BottleneckCandidate> found;
  if (global_max > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> series(T, 0.0);
      for (std::size_t k = 0; k < T; ++k)
        series[k] = usable(k, i) ? record.chi[k][static_cast<Eigen::Index>(i)] : 0.0;
      for (const auto& p : find_peaks(series, lo, hi)) {
        if (p.prominence < opt.prominence_fraction * global_max) continue;
        BottleneckCandidate c;
        c.position = record.s[p.index];
        c.peak_chi = p.height;
        c.spin = i;
        c.frustration = frustration.scores[i];
        c.peak_paramagnon = record.paramagnon[p.index][static_cast<Eigen::Index>(i)];
        found.push_back(c);
      }
    }
  }

  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.frustration != b.frustration) return a.frustration > b.frustration;
    if (a.peak_paramagnon != b.peak_paramagnon) return a.peak_paramagnon > b.peak_paramagnon;
    if (a.position != b.position) return a.position < b.position;
    return a.spin < b.spin;
  });

  std::vector<BottleneckCandidate> out;
  for (const auto& c : found) {
    if (out.size() >= opt.max_candidates) break;
    const bool close = std::any_of(out.begin(), out.end(), [&](const auto& o) {
      return std::abs(o.position - c.position) < opt.merge_distance;
    });
    if (close) continue;
    out.push_back(c);
    out.back().rank = out.size();
  }

  if (out.empty()) {
    // Fallback: interior maximum of the summed susceptibility.
    std::size_t best_k = lo;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = lo; k <= hi; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (usable(k, i)) sum += record.chi[k][static_cast<Eigen::Index>(i)];
      if (sum > best) {
        best = sum;
        best_k = k;
      }
    }
    std::size_t spin = 0;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = record.chi[best_k][static_cast<Eigen::Index>(i)];
      if (v > top) {
        top = v;
        spin = i;
      }
    }
    BottleneckCandidate c;
    c.position = record.s[best_k];
    c.peak_chi = best;
    c.spin = spin;
    c.frustration = frustration.scores[spin];
    c.peak_paramagnon = record.paramagnon[best_k][static_cast<Eigen::Index>(spin)];
    c.rank = 1;
    c.low_confidence = true;
    out.push_back(c);
  }
  return out;
}

void write_fluctuation_csv(const FluctuationRecord& record, std::ostream& out) {
  CsvWriter csv(out, {"s", "spin", "N", "chi"});
  for (std::size_t k = 0; k < record.s.size(); ++k) {
    for (Eigen::Index i = 0; i < record.paramagnon[k].size(); ++i)
      csv.row(record.s[k], static_cast<std::size_t>(i), record.paramagnon[k][i], record.chi[k][i]);
  }
}

nlohmann::json candidates_to_json(const std::vector<BottleneckCandidate>& candidates) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : candidates) {
    arr.push_back({{"rank", c.rank},
                   {"position", c.position},
                   {"spin", c.spin},
                   {"peak_chi", c.peak_chi},
                   {"peak_paramagnon", c.peak_paramagnon},
                   {"frustration", c.frustration},
                   {"low_confidence", c.low_confidence}});
  }
  return arr;
}

}  // namespace geoanneal
