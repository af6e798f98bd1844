#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geoanneal {

// Ising problem  E(a) = offset - sum_i [h_i + sum_{j>i} J_ij a_j] a_i
// in units where the transverse field is 1.
struct IsingInstance {
  Eigen::MatrixXd couplings;  // symmetric, zero diagonal
  Eigen::VectorXd fields;
  double offset = 0.0;
  std::optional<std::string> label;
  std::optional<std::int64_t> seed;

  std::size_t n_spins() const { return static_cast<std::size_t>(fields.size()); }

  // Throws InvalidArgument when the invariants do not hold.
  void validate() const;

  static IsingInstance zeros(std::size_t n);
};

struct Literal {
  std::size_t var = 1;  // 1-based
  bool negated = false;
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct ClauseSet {
  std::size_t n_vars = 0;
  std::vector<std::pair<Literal, Literal>> clauses;

  void validate() const;
  // Number of clauses violated by `truth` (truth[v-1] is the value of x_v).
  std::size_t violated(const std::vector<bool>& truth) const;
};

// Vector of +-1 spins.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::vector<int> spins);

  std::size_t size() const { return spins_.size(); }
  int operator[](std::size_t i) const { return spins_[i]; }
  const std::vector<int>& spins() const { return spins_; }

  // Computational basis index with spin i on bit i, bit value 0 <-> +1.
  std::uint64_t basis_index() const;
  static Assignment from_basis_index(std::uint64_t index, std::size_t n);

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<int> spins_;
};

// SK instance: h_i and J_ij (i<j) i.i.d. standard normal.
IsingInstance generate_sk(std::size_t n, std::uint64_t seed);

ClauseSet parse_max2sat(std::string_view text);
std::string format_max2sat(const ClauseSet& cs);

// Ising instance whose energy counts violated clauses, with the convention
// "x_v true <-> spin v-1 equals -1".
IsingInstance map_clauses_to_ising(const ClauseSet& cs);

// Spin assignment representing a truth assignment under the same convention.
Assignment assignment_from_truth(const std::vector<bool>& truth);

double energy(const IsingInstance& inst, const Assignment& a);

// Energies of every computational basis state, indexed as in
// Assignment::basis_index. Offset included.
std::vector<double> diagonal_energies(const IsingInstance& inst);

struct Optimum {
  Assignment assignment;
  double energy = 0.0;
};

inline constexpr std::size_t kDefaultBruteForceLimit = 24;

// Exhaustive minimum. Ties resolve to the lexicographically smallest spin
// vector with +1 ordered before -1.
Optimum brute_force_optimum(const IsingInstance& inst,
                            std::size_t max_spins = kDefaultBruteForceLimit);

// Basis indices whose energy lies within `tol` of the minimum.
std::vector<std::uint64_t> optimal_basis_states(const std::vector<double>& diag,
                                                double tol = 1e-9);

nlohmann::json to_json(const IsingInstance& inst);
IsingInstance instance_from_json(const nlohmann::json& j);

IsingInstance load_instance(const std::string& path);
void save_instance(const IsingInstance& inst, const std::string& path);

}  // namespace geoanneal
