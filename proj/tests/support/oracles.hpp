#pragma once

// Reference implementations used only by tests. Each one is written from
// first principles and shares no code with the library under test.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "geoanneal/instance.hpp"

namespace oracle {

// H(s) = -(1 - s) sum_i X_i + s H_Z assembled from Kronecker products of
// 2x2 Pauli matrices; spin i is tensor factor i counted from the right.
Eigen::MatrixXcd kron_hamiltonian(const geoanneal::IsingInstance& inst, double s);

// Lowest two eigenvalues of kron_hamiltonian.
std::pair<double, double> lowest_pair(const geoanneal::IsingInstance& inst, double s);

// Classical RK4 on i d psi/dt = H(s(t/T)) psi from |+>^n.
Eigen::VectorXcd rk4_schrodinger(const geoanneal::IsingInstance& inst,
                                 const std::function<double(double)>& s_of_u, double T,
                                 std::size_t steps);

// Single qubit H = -(1 - s) X - s h Z from |+>, RK4. Returns <Z>(T).
double two_level_z(double h, double T, std::size_t steps);

// Violated-clause count by direct literal evaluation.
std::size_t count_violated(const std::vector<std::vector<int>>& clauses,
                           const std::vector<bool>& truth);

// Random 2-SAT clauses in DIMACS-like signed form (+v / -v).
std::vector<std::vector<int>> random_2sat(std::size_t n_vars, std::size_t n_clauses,
                                          std::mt19937_64& rng);

// Lorentzian geodesic by quadrature: u(s) = int_0^s w^{-g/2} / int_0^1 w^{-g/2}
// with w = (s - c)^2 + sigma^2, inverted for s(u).
double geodesic_s_of_u(double u, double center, double sigma, double gamma0);

// Single spin: gap and adiabatic metric of -(1 - s) X - s h Z.
double single_spin_gap(double h, double s);
Eigen::Matrix2d single_spin_metric(double h, double s);

}  // namespace oracle
