#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <ostream>
#include <vector>

#include "geoanneal/instance.hpp"
#include "geoanneal/meanfield.hpp"

namespace geoanneal {

// Floor for the denominators 1 + sigma*_i n^z_i and 1 +- n^z_i.
inline constexpr double kPoleFloor = 1e-9;

// Coefficient blocks of the quadratic paramagnon Hamiltonian at one time.
struct ParamagnonBlocks {
  Eigen::MatrixXcd A;  // Hermitian
  Eigen::MatrixXcd B;  // symmetric, zero diagonal
  std::vector<bool> regularized;  // spin whose A_ii denominator hit the floor
};

ParamagnonBlocks build_blocks(const IsingInstance& inst, const SpinTrajectory& traj, double t);

// 2n x 2n generator  sigma_3 H(t)  with H = [[A, B], [B^dagger, conj(A)]].
Eigen::MatrixXcd fluctuation_generator(const ParamagnonBlocks& blocks);

struct FluctuationOptions {
  double tol = 1e-8;
};

// Equal-time statistical function sampled on the trajectory's output grid.
struct FluctuationRecord {
  std::vector<double> times;
  std::vector<double> s;  // t / T
  std::vector<Eigen::MatrixXcd> F;
  std::vector<Eigen::VectorXd> paramagnon;  // N_i = (i F_ii - 1) / 2
  std::vector<Eigen::VectorXd> chi;
  std::vector<Eigen::VectorXd> z_norm2;
  std::vector<std::vector<bool>> regularized;  // per time, per spin
  double max_spectrum_deviation = 0.0;  // max | |eig(i F)| - 1 |
  double propagator_defect = 0.0;       // max |s3 U^+ s3 U - 1| before projection
  bool spectrum_warning = false;        // spectrum deviation above 100 tol
  double tol = 0.0;

  std::size_t n_spins() const { return paramagnon.empty() ? 0 : paramagnon.front().size(); }
};

// Solves  i dF/dt = [sigma_3 H(t), F]  from F(0) = -i sigma_3 through its
// propagator and fills paramagnon numbers and localization susceptibilities.
FluctuationRecord evolve_statistical_function(const IsingInstance& inst,
                                              const SpinTrajectory& traj,
                                              const FluctuationOptions& opt = {});

// chi_i = q_i (1 + |z_i|^2)^2 N_i with z_i = (n^x_i + i sigma*_i n^y_i) / (1 + sigma*_i n^z_i).
// Also refreshes record.z_norm2 and the regularization flags.
std::vector<Eigen::VectorXd> localization_susceptibility(FluctuationRecord& record,
                                                         const SpinTrajectory& traj);

struct BottleneckCandidate {
  double position = 0.0;  // s~_*
  double peak_chi = 0.0;
  std::size_t spin = 0;
  double frustration = 0.0;
  double peak_paramagnon = 0.0;
  std::size_t rank = 0;
  bool low_confidence = false;
};

struct PeakOptions {
  double prominence_fraction = 0.1;
  double s_min = 0.05;
  double s_max = 0.97;
  std::size_t max_candidates = 3;
  double merge_distance = 0.02;  // peaks closer than this to a better one are dropped
};

std::vector<BottleneckCandidate> detect_bottlenecks(const FluctuationRecord& record,
                                                    const FrustrationReport& frustration,
                                                    const PeakOptions& opt = {});

// CSV with columns s,spin,N,chi.
void write_fluctuation_csv(const FluctuationRecord& record, std::ostream& out);
nlohmann::json candidates_to_json(const std::vector<BottleneckCandidate>& candidates);

}  // namespace geoanneal
