#include "geoanneal/exactsim.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <new>
#include <numeric>
#include <utility>

#include "geoanneal/csv.hpp"
#include "geoanneal/error.hpp"

extern "C" void dsyevr_(const char* jobz, const char* range, const char* uplo, const int* n,
                        double* a, const int* lda, const double* vl, const double* vu,
                        const int* il, const int* iu, const double* abstol, int* m, double* w,
                        double* z, const int* ldz, int* isuppz, double* work, const int* lwork,
                        int* iwork, const int* liwork, int* info);

namespace geoanneal {

using cd = std::complex<double>;

namespace {

void check_size(const IsingInstance& inst, std::size_t limit, const char* what) {
  if (inst.n_spins() > limit)
    throw SizeError(std::string(what) + ": n=" + std::to_string(inst.n_spins()) +
                    " exceeds limit " + std::to_string(limit));
}

// H_X v with H_X = -sum_i X_i.
Eigen::VectorXd apply_driver_hamiltonian(const Eigen::VectorXd& v, std::size_t n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (Eigen::Index x = 0; x < v.size(); ++x)
      out[x] -= v[static_cast<Eigen::Index>(static_cast<std::uint64_t>(x) ^ bit)];
  }
  return out;
}

// Two lowest eigenvalues via LAPACK's MRRR driver; the full dense solve is
// several times slower and the gap scans call this thousands of times.
std::pair<double, double> lowest_pair(Eigen::MatrixXd& H) {
  const int n = static_cast<int>(H.rows());
  const char jobz = 'N', range = 'I', uplo = 'L';
  const int il = 1, iu = 2, ldz = 1;
  const double vl = 0.0, vu = 0.0, abstol = 0.0;
  int m = 0, info = 0;
  double w_query = 0.0, z = 0.0;
  int iw_query = 0, isuppz[4];
  std::vector<double> w(static_cast<std::size_t>(n));
  int lwork = -1, liwork = -1;
  dsyevr_(&jobz, &range, &uplo, &n, H.data(), &n, &vl, &vu, &il, &iu, &abstol, &m, w.data(), &z,
          &ldz, isuppz, &w_query, &lwork, &iw_query, &liwork, &info);
  lwork = static_cast<int>(w_query);
  liwork = iw_query;
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  dsyevr_(&jobz, &range, &uplo, &n, H.data(), &n, &vl, &vu, &il, &iu, &abstol, &m, w.data(), &z,
          &ldz, isuppz, work.data(), &lwork, iwork.data(), &liwork, &info);
  if (info != 0 || m != 2) throw Error("spectral_gap: LAPACK dsyevr failed");
  return {w[0], w[1]};
}

}  // namespace

StateVector::StateVector(std::size_t n_spins, Eigen::VectorXcd amplitudes)
    : n_(n_spins), amp_(std::move(amplitudes)) {
  if (amp_.size() != (Eigen::Index{1} << n_))
    throw InvalidArgument("state vector: amplitude count must be 2^n");
}

StateVector StateVector::plus_state(std::size_t n_spins) {
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  return StateVector(n_spins, Eigen::VectorXcd::Constant(dim, cd(1.0 / std::sqrt(double(dim)), 0.0)));
}

StateVector StateVector::basis_state(std::size_t n_spins, std::uint64_t index) {
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(dim);
  a[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(n_spins, std::move(a));
}

void StateVector::apply_problem(const std::vector<double>& diag, double gamma) {
  for (Eigen::Index x = 0; x < amp_.size(); ++x) {
    const double phase = -gamma * diag[static_cast<std::size_t>(x)];
    amp_[x] *= cd(std::cos(phase), std::sin(phase));
  }
}

void StateVector::apply_driver(double beta) {
  // exp(i beta X) on every qubit.
  const double c = std::cos(beta);
  const cd is(0.0, std::sin(beta));
  const auto dim = static_cast<std::uint64_t>(amp_.size());
  cd* a = amp_.data();
  for (std::size_t q = 0; q < n_; ++q) {
    const std::uint64_t stride = std::uint64_t{1} << q;
    for (std::uint64_t base = 0; base < dim; base += 2 * stride) {
      for (std::uint64_t j = base; j < base + stride; ++j) {
        const cd lo = a[j];
        const cd hi = a[j + stride];
        a[j] = c * lo + is * hi;
        a[j + stride] = is * lo + c * hi;
      }
    }
  }
}

Eigen::MatrixXd dense_hamiltonian(const IsingInstance& inst, double s) {
  const std::size_t n = inst.n_spins();
  const auto diag = diagonal_energies(inst);
  const Eigen::Index dim = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    H(x, x) = s * diag[static_cast<std::size_t>(x)];
    for (std::size_t i = 0; i < n; ++i) {
      const auto y = static_cast<Eigen::Index>(static_cast<std::uint64_t>(x) ^ (std::uint64_t{1} << i));
      H(x, y) = -(1.0 - s);
    }
  }
  return H;
}

SpectrumRecord instantaneous_spectrum(const IsingInstance& inst, double s, bool want_vectors,
                                      std::size_t max_spins) {
  check_size(inst, max_spins, "instantaneous_spectrum");
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("instantaneous_spectrum: s outside [0, 1]");
  SpectrumRecord rec;
  rec.s = s;
  try {
    const Eigen::MatrixXd H = dense_hamiltonian(inst, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        H, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("instantaneous_spectrum: eigensolver failed");
    rec.energies = es.eigenvalues();
    if (want_vectors) rec.vectors = es.eigenvectors();
  } catch (const std::bad_alloc&) {
    throw SizeError("instantaneous_spectrum: dense Hamiltonian does not fit in memory");
  }
  return rec;
}

double spectral_gap(const IsingInstance& inst, double s, std::size_t max_spins) {
  check_size(inst, max_spins, "spectral_gap");
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("spectral_gap: s outside [0, 1]");
  try {
    Eigen::MatrixXd H = dense_hamiltonian(inst, s);
    const auto [e0, e1] = lowest_pair(H);
    return e1 - e0;
  } catch (const std::bad_alloc&) {
    throw SizeError("spectral_gap: dense Hamiltonian does not fit in memory");
  }
}

GapProfile gap_profile(const IsingInstance& inst, int resolution_exponent, int refine_exponent,
                       std::size_t max_spins) {
  check_size(inst, max_spins, "gap_profile");
  if (resolution_exponent < 1 || refine_exponent < resolution_exponent || refine_exponent > 40)
    throw InvalidArgument("gap_profile: need 1 <= r <= refine <= 40");
  std::map<double, double> samples;
  auto eval = [&](double s) {
    auto it = samples.find(s);
    if (it != samples.end()) return it->second;
    const double g = spectral_gap(inst, s, max_spins);
    samples.emplace(s, g);
    return g;
  };

  const int coarse = 1 << resolution_exponent;
  for (int k = 0; k <= coarse; ++k) eval(static_cast<double>(k) / coarse);
  auto argmin = [&]() {
    return std::min_element(samples.begin(), samples.end(),
                            [](const auto& a, const auto& b) { return a.second < b.second; })
        ->first;
  };
  const double s_coarse = argmin();
  const double h = 1.0 / coarse;
  const double fine = std::ldexp(1.0, -refine_exponent);

  // Golden-section search on the neighbouring cells of the coarse minimum.
  double a = std::max(0.0, s_coarse - h);
  double b = std::min(1.0, s_coarse + h);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > fine) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
  }
  // Fixed-spacing neighbours of the refined minimum, so finite differences
  // around it use the refinement spacing.
  for (int pass = 0; pass < 4; ++pass) {
    const double centre = argmin();
    const double left = centre - fine;
    const double right = centre + fine;
    const bool new_left = left >= 0.0 && !samples.count(left);
    const bool new_right = right <= 1.0 && !samples.count(right);
    if (left >= 0.0) eval(left);
    if (right <= 1.0) eval(right);
    if (argmin() == centre && !new_left && !new_right) break;
    if (argmin() == centre) break;
  }

  GapProfile gp;
  gp.resolution_exponent = resolution_exponent;
  gp.refine_exponent = refine_exponent;
  for (const auto& [s, g] : samples) {
    gp.s.push_back(s);
    gp.gap.push_back(g);
    if (g < 1e-12) gp.degenerate = true;
  }
  gp.bottleneck = argmin();
  gp.min_gap = samples.at(gp.bottleneck);
  return gp;
}

Eigen::Matrix2d metric_tensor(const IsingInstance& inst, double s, std::size_t max_spins) {
  check_size(inst, max_spins, "metric_tensor");
  const auto rec = instantaneous_spectrum(inst, s, true, max_spins);
  const auto& E = rec.energies;
  if (E[1] - E[0] < 1e-12) throw DegenerateError("metric_tensor: degenerate ground state");
  const Eigen::VectorXd ground = rec.vectors.col(0);
  const auto diag = diagonal_energies(inst);
  Eigen::VectorXd hz_ground(ground.size());
  for (Eigen::Index x = 0; x < ground.size(); ++x) hz_ground[x] = diag[static_cast<std::size_t>(x)] * ground[x];
  const Eigen::VectorXd hx_ground = apply_driver_hamiltonian(ground, inst.n_spins());
  const Eigen::VectorXd ax = rec.vectors.transpose() * hx_ground;
  const Eigen::VectorXd az = rec.vectors.transpose() * hz_ground;
  Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
  for (Eigen::Index l = 1; l < E.size(); ++l) {
    const double d2 = (E[l] - E[0]) * (E[l] - E[0]);
    g(0, 0) += ax[l] * ax[l] / d2;
    g(0, 1) += ax[l] * az[l] / d2;
    g(1, 1) += az[l] * az[l] / d2;
  }
  g(1, 0) = g(0, 1);
  return g;
}

double pullback_metric(const Eigen::Matrix2d& g) {
  return g(0, 0) - g(0, 1) - g(1, 0) + g(1, 1);
}

StateVector trotter_evolve(const IsingInstance& inst, const ScheduleFunction& sched, double T,
                           int p, int order, std::size_t max_spins) {
  check_size(inst, max_spins, "trotter_evolve");
  if (p < 1) throw InvalidArgument("trotter_evolve: p must be at least 1");
  if (!(T >= 0.0)) throw InvalidArgument("trotter_evolve: T must be non-negative");
  if (order != 1 && order != 2) throw InvalidArgument("trotter_evolve: order must be 1 or 2");
  const std::size_t n = inst.n_spins();
  const auto diag = diagonal_energies(inst);
  StateVector psi = StateVector::plus_state(n);
  const double tau = T / p;
  auto weight = [&](double u) { return sched(u); };

  if (order == 1) {
    for (int k = 1; k <= p; ++k) {
      const double s = weight(static_cast<double>(k) / p);
      psi.apply_problem(diag, tau * s);
      psi.apply_driver(tau * (1.0 - s));
    }
    return psi;
  }
  // Symmetric splitting; consecutive half driver steps are merged.
  double pending = 0.0;
  for (int k = 1; k <= p; ++k) {
    const double s = weight((k - 0.5) / p);
    const double beta = tau * (1.0 - s);
    psi.apply_driver(pending + 0.5 * beta);
    psi.apply_problem(diag, tau * s);
    pending = 0.5 * beta;
  }
  psi.apply_driver(pending);
  return psi;
}

double success_probability(const StateVector& state, const IsingInstance& inst) {
  if (state.n_spins() != inst.n_spins())
    throw InvalidArgument("success_probability: state and instance sizes differ");
  const auto diag = diagonal_energies(inst);
  double p = 0.0;
  for (auto x : optimal_basis_states(diag)) p += std::norm(state.amplitudes()[static_cast<Eigen::Index>(x)]);
  return p;
}

LevelDistribution eigenstate_distribution(const StateVector& state, const IsingInstance& inst,
                                          std::size_t max_spins) {
  check_size(inst, max_spins, "eigenstate_distribution");
  if (state.n_spins() != inst.n_spins())
    throw InvalidArgument("eigenstate_distribution: state and instance sizes differ");
  const auto diag = diagonal_energies(inst);
  std::vector<std::uint64_t> order(diag.size());
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return diag[a] < diag[b]; });
  LevelDistribution d;
  for (auto x : order) {
    const double e = diag[x];
    const double w = std::norm(state.amplitudes()[static_cast<Eigen::Index>(x)]);
    if (d.energies.empty() || e - d.energies.back() > 1e-9 * std::max(1.0, std::abs(e))) {
      d.energies.push_back(e);
      d.mass.push_back(w);
      d.degeneracy.push_back(1);
    } else {
      d.mass.back() += w;
      d.degeneracy.back() += 1;
    }
  }
  d.most_likely = static_cast<std::size_t>(std::max_element(d.mass.begin(), d.mass.end()) - d.mass.begin());
  return d;
}

void write_gap_csv(const GapProfile& gap, std::ostream& out) {
  CsvWriter csv(out, {"s", "gap"});
  for (std::size_t k = 0; k < gap.s.size(); ++k) csv.row(gap.s[k], gap.gap[k]);
}

nlohmann::json level_distribution_to_json(const LevelDistribution& d) {
  return {{"energies", d.energies},
          {"mass", d.mass},
          {"degeneracy", d.degeneracy},
          {"most_likely", d.most_likely}};
}

}  // namespace geoanneal
