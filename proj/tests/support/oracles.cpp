#include "oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <complex>
#include <cstdint>

namespace oracle {
namespace {

using cd = std::complex<double>;

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Operator acting as `op` on spin `site` of n, identity elsewhere. Spin 0 is
// the rightmost factor so that it maps to the lowest bit of the index.
Eigen::MatrixXcd embed(const Eigen::Matrix2cd& op, std::size_t site, std::size_t n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (std::size_t k = n; k-- > 0;)
    out = kron(out, k == site ? Eigen::MatrixXcd(op) : Eigen::MatrixXcd::Identity(2, 2));
  return out;
}

}  // namespace

Eigen::MatrixXcd kron_hamiltonian(const geoanneal::IsingInstance& inst, double s) {
  const std::size_t n = inst.n_spins();
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXcd hx = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd hz = inst.offset * Eigen::MatrixXcd::Identity(dim, dim);
  std::vector<Eigen::MatrixXcd> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    hx -= embed(pauli_x(), i, n);
    z[i] = embed(pauli_z(), i, n);
    hz -= inst.fields(Eigen::Index(i)) * z[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      hz -= inst.couplings(Eigen::Index(i), Eigen::Index(j)) * z[i] * z[j];
  return (1.0 - s) * hx + s * hz;
}

std::pair<double, double> lowest_pair(const geoanneal::IsingInstance& inst, double s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(kron_hamiltonian(inst, s),
                                                     Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

Eigen::VectorXcd rk4_schrodinger(const geoanneal::IsingInstance& inst,
                                 const std::function<double(double)>& s_of_u, double T,
                                 std::size_t steps) {
  const std::size_t n = inst.n_spins();
  const Eigen::Index dim = Eigen::Index(1) << n;
  const Eigen::MatrixXcd h0 = kron_hamiltonian(inst, 0.0);
  const Eigen::MatrixXcd h1 = kron_hamiltonian(inst, 1.0);
  auto rhs = [&](double t, const Eigen::VectorXcd& psi) -> Eigen::VectorXcd {
    const double s = s_of_u(t / T);
    return cd(0, -1) * ((1.0 - s) * (h0 * psi) + s * (h1 * psi));
  };
  Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(dim, 1.0 / std::sqrt(double(dim)));
  const double h = T / double(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = h * double(k);
    const Eigen::VectorXcd k1 = rhs(t, psi);
    const Eigen::VectorXcd k2 = rhs(t + h / 2, psi + h / 2 * k1);
    const Eigen::VectorXcd k3 = rhs(t + h / 2, psi + h / 2 * k2);
    const Eigen::VectorXcd k4 = rhs(t + h, psi + h * k3);
    psi += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

double two_level_z(double h, double T, std::size_t steps) {
  using V = Eigen::Vector2cd;
  auto rhs = [&](double t, const V& psi) -> V {
    const double s = t / T;
    Eigen::Matrix2cd H = -(1.0 - s) * pauli_x() - s * h * pauli_z();
    return cd(0, -1) * (H * psi);
  };
  V psi(1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
  const double dt = T / double(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = dt * double(k);
    const V k1 = rhs(t, psi);
    const V k2 = rhs(t + dt / 2, psi + dt / 2 * k1);
    const V k3 = rhs(t + dt / 2, psi + dt / 2 * k2);
    const V k4 = rhs(t + dt, psi + dt * k3);
    psi += dt / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return std::norm(psi(0)) - std::norm(psi(1));
}

std::size_t count_violated(const std::vector<std::vector<int>>& clauses,
                           const std::vector<bool>& truth) {
  std::size_t bad = 0;
  for (const auto& c : clauses) {
    bool sat = false;
    for (int lit : c) {
      const bool v = truth[std::size_t(std::abs(lit) - 1)];
      sat = sat || (lit > 0 ? v : !v);
    }
    if (!sat) ++bad;
  }
  return bad;
}

std::vector<std::vector<int>> random_2sat(std::size_t n_vars, std::size_t n_clauses,
                                          std::mt19937_64& rng) {
  std::uniform_int_distribution<int> var(1, int(n_vars));
  std::bernoulli_distribution neg(0.5);
  std::vector<std::vector<int>> out;
  for (std::size_t k = 0; k < n_clauses; ++k) {
    const int a = var(rng);
    const int b = var(rng);
    out.push_back({neg(rng) ? -a : a, neg(rng) ? -b : b});
  }
  return out;
}

double geodesic_s_of_u(double u, double center, double sigma, double gamma0) {
  using boost::math::quadrature::gauss_kronrod;
  auto density = [&](double s) {
    return std::pow((s - center) * (s - center) + sigma * sigma, -gamma0 / 2);
  };
  // Split at the centre where the integrand peaks.
  auto integral = [&](double a, double b) {
    if (b <= a) return 0.0;
    if (a < center && center < b)
      return gauss_kronrod<double, 61>::integrate(density, a, center, 15, 1e-14) +
             gauss_kronrod<double, 61>::integrate(density, center, b, 15, 1e-14);
    return gauss_kronrod<double, 61>::integrate(density, a, b, 15, 1e-14);
  };
  const double total = integral(0.0, 1.0);
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  auto f = [&](double s) { return integral(0.0, s) / total - u; };
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, 0.0, 1.0, -u, 1.0 - u,
                                             boost::math::tools::eps_tolerance<double>(50),
                                             iters);
  return 0.5 * (r.first + r.second);
}

double single_spin_gap(double h, double s) {
  return 2.0 * std::hypot(1.0 - s, s * h);
}

Eigen::Matrix2d single_spin_metric(double h, double s) {
  const double r = std::hypot(1.0 - s, s * h);
  const double sin_t = (1.0 - s) / r;
  const double cos_t = s * h / r;
  const double d = 4.0 * r * r;
  Eigen::Matrix2d g;
  g(0, 0) = cos_t * cos_t / d;
  g(1, 1) = h * h * sin_t * sin_t / d;
  g(0, 1) = g(1, 0) = -h * sin_t * cos_t / d;
  return g;
}

}  // namespace oracle
