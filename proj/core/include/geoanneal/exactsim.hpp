#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "geoanneal/gap_profile.hpp"
#include "geoanneal/instance.hpp"
#include "geoanneal/schedule.hpp"

namespace geoanneal {

inline constexpr std::size_t kDefaultDiagonalizationLimit = 16;
inline constexpr std::size_t kDefaultMetricLimit = 12;
inline constexpr std::size_t kDefaultStateVectorLimit = 22;

// Amplitudes over the computational basis; spin i lives on bit i and bit
// value 0 is Z = +1.
class StateVector {
 public:
  StateVector() = default;
  StateVector(std::size_t n_spins, Eigen::VectorXcd amplitudes);

  static StateVector plus_state(std::size_t n_spins);
  static StateVector basis_state(std::size_t n_spins, std::uint64_t index);

  std::size_t n_spins() const { return n_; }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }
  Eigen::VectorXcd& amplitudes() { return amp_; }
  double norm() const { return amp_.norm(); }

  // exp(-i gamma H_Z) given the diagonal energies of H_Z.
  void apply_problem(const std::vector<double>& diag, double gamma);
  // exp(-i beta H_X) with H_X = -sum_i X_i.
  void apply_driver(double beta);

 private:
  std::size_t n_ = 0;
  Eigen::VectorXcd amp_;
};

struct SpectrumRecord {
  double s = 0.0;
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // columns; empty unless requested
};

// Dense real-symmetric H(s) = (1 - s) H_X + s H_Z.
Eigen::MatrixXd dense_hamiltonian(const IsingInstance& inst, double s);

SpectrumRecord instantaneous_spectrum(const IsingInstance& inst, double s, bool want_vectors,
                                      std::size_t max_spins = kDefaultDiagonalizationLimit);

double spectral_gap(const IsingInstance& inst, double s,
                    std::size_t max_spins = kDefaultDiagonalizationLimit);

// Gap on the 2^-r grid, golden-section refinement of the minimum down to
// 2^-refine, plus the two 2^-refine neighbours of the refined minimum.
GapProfile gap_profile(const IsingInstance& inst, int resolution_exponent = 5,
                       int refine_exponent = 10,
                       std::size_t max_spins = kDefaultDiagonalizationLimit);

// Adiabatic metric g_{mu nu}(s) with d/ds^1 H = H_X and d/ds^2 H = H_Z.
Eigen::Matrix2d metric_tensor(const IsingInstance& inst, double s,
                              std::size_t max_spins = kDefaultMetricLimit);

// One-parameter metric along s^1 = 1 - s, s^2 = s.
double pullback_metric(const Eigen::Matrix2d& g);

struct TrotterOptions {
  int order = 2;
  std::size_t max_spins = kDefaultStateVectorLimit;
};

// Order 1: prod_k U_X(beta_k) U_Z(gamma_k) with endpoint sampling t = Tk/p.
// Order 2: prod_k U_X(beta_k/2) U_Z(gamma_k) U_X(beta_k/2) with midpoint
// sampling t = T(k - 1/2)/p. Starts from |+>^n.
StateVector trotter_evolve(const IsingInstance& inst, const ScheduleFunction& sched, double T,
                           int p, int order = 2,
                           std::size_t max_spins = kDefaultStateVectorLimit);

double success_probability(const StateVector& state, const IsingInstance& inst);

struct LevelDistribution {
  std::vector<double> energies;     // distinct classical levels, ascending
  std::vector<double> mass;
  std::vector<std::size_t> degeneracy;
  std::size_t most_likely = 0;
};

// Probability mass per distinct H_Z level (the s = 1 eigenbasis).
LevelDistribution eigenstate_distribution(const StateVector& state, const IsingInstance& inst,
                                          std::size_t max_spins = kDefaultStateVectorLimit);

void write_gap_csv(const GapProfile& gap, std::ostream& out);
nlohmann::json level_distribution_to_json(const LevelDistribution& d);

}  // namespace geoanneal
