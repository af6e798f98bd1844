#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "geoanneal/error.hpp"
#include "geoanneal/instance.hpp"
#include "oracles.hpp"

using namespace geoanneal;

namespace {

std::vector<bool> truth_of(std::uint64_t bits, std::size_t n) {
  std::vector<bool> t(n);
  for (std::size_t v = 0; v < n; ++v) t[v] = (bits >> v) & 1u;
  return t;
}

std::string to_text(std::size_t n_vars, const std::vector<std::vector<int>>& clauses) {
  std::string s = "c generated\np max2sat " + std::to_string(n_vars) + " " +
                  std::to_string(clauses.size()) + "\n";
  for (const auto& c : clauses) s += std::to_string(c[0]) + " " + std::to_string(c[1]) + " 0\n";
  return s;
}

}  // namespace

TEST(Instance, SkGeneratorIsSymmetricAndSeeded) {
  const auto a = generate_sk(7, 42);
  const auto b = generate_sk(7, 42);
  const auto c = generate_sk(7, 43);
  EXPECT_NO_THROW(a.validate());
  EXPECT_EQ(a.couplings, b.couplings);
  EXPECT_EQ(a.fields, b.fields);
  EXPECT_NE(a.fields, c.fields);
  EXPECT_EQ(a.couplings, a.couplings.transpose());
  EXPECT_EQ(a.couplings.diagonal().cwiseAbs().sum(), 0.0);
  ASSERT_TRUE(a.seed.has_value());
  EXPECT_EQ(*a.seed, 42);
}

TEST(Instance, EnergyMatchesKroneckerDiagonal) {
  const auto inst = generate_sk(5, 3);
  const auto diag = diagonal_energies(inst);
  const Eigen::MatrixXcd H = oracle::kron_hamiltonian(inst, 1.0);
  for (std::uint64_t k = 0; k < diag.size(); ++k) {
    EXPECT_NEAR(diag[k], H(k, k).real(), 1e-12);
    EXPECT_NEAR(energy(inst, Assignment::from_basis_index(k, 5)), diag[k], 1e-12);
  }
}

TEST(Instance, BasisIndexRoundTrip) {
  for (std::uint64_t k = 0; k < 32; ++k)
    EXPECT_EQ(Assignment::from_basis_index(k, 5).basis_index(), k);
  EXPECT_EQ(Assignment({1, 1, -1}).basis_index(), 4u);
  EXPECT_THROW(Assignment({1, 0}), InvalidArgument);
}

TEST(Instance, BruteForceTiesPreferPlusOne) {
  auto inst = IsingInstance::zeros(3);
  const auto opt = brute_force_optimum(inst);
  EXPECT_EQ(opt.assignment, Assignment({1, 1, 1}));
  EXPECT_EQ(opt.energy, 0.0);
  EXPECT_EQ(optimal_basis_states(diagonal_energies(inst)).size(), 8u);
}

TEST(Instance, BruteForceFindsFieldAlignedState) {
  auto inst = IsingInstance::zeros(3);
  inst.fields << 1.0, -2.0, 0.5;
  const auto opt = brute_force_optimum(inst);
  EXPECT_EQ(opt.assignment, Assignment({1, -1, 1}));
  EXPECT_DOUBLE_EQ(opt.energy, -3.5);
  EXPECT_THROW(brute_force_optimum(inst, 2), SizeError);
}

TEST(Instance, WorkedFormulaHasSatisfyingAssignment) {
  const auto cs = parse_max2sat(
      "p max2sat 4 6\n1 4 0\n-1 4 0\n2 -4 0\n1 -3 0\n1 -2 0\n-2 -3 0\n");
  const auto inst = map_clauses_to_ising(cs);
  const auto opt = brute_force_optimum(inst);
  EXPECT_NEAR(opt.energy, 0.0, 1e-12);
  // x1 = x2 = x4 = true, x3 = false
  EXPECT_EQ(opt.assignment, assignment_from_truth({true, true, false, true}));
  EXPECT_EQ(optimal_basis_states(diagonal_energies(inst)).size(), 1u);
}

TEST(Instance, RandomFormulasMatchViolatedCount) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto clauses = oracle::random_2sat(n, 1 + trial % 13, rng);
    const auto cs = parse_max2sat(to_text(n, clauses));
    const auto inst = map_clauses_to_ising(cs);
    for (std::uint64_t bits = 0; bits < (1u << n); ++bits) {
      const auto truth = truth_of(bits, n);
      const std::size_t want = oracle::count_violated(clauses, truth);
      EXPECT_EQ(cs.violated(truth), want);
      EXPECT_EQ(energy(inst, assignment_from_truth(truth)), double(want));
    }
  }
}

TEST(Instance, Max2SatFormatRoundTrip) {
  const std::string text = "p max2sat 3 2\n1 -2 0\n-3 3 0\n";
  EXPECT_EQ(format_max2sat(parse_max2sat(text)), text);
}

TEST(Instance, Max2SatParseErrors) {
  EXPECT_THROW(parse_max2sat("1 2 0\n"), ParseError);
  EXPECT_THROW(parse_max2sat("p max2sat 2 1\n1 2\n"), ParseError);
  EXPECT_THROW(parse_max2sat("p max2sat 2 1\n1 2 3 0\n"), ParseError);
  EXPECT_THROW(parse_max2sat("p max2sat 2 1\n1 5 0\n"), ParseError);
  EXPECT_THROW(parse_max2sat("p max2sat 2 2\n1 2 0\n"), ParseError);
  EXPECT_THROW(parse_max2sat("p max2sat 2 1\n1 x 0\n"), ParseError);
  try {
    parse_max2sat("p max2sat 2 1\nc ok\n1 9 0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Instance, ValidateRejectsBadCouplings) {
  auto inst = IsingInstance::zeros(3);
  inst.couplings(0, 1) = 1.0;
  EXPECT_THROW(inst.validate(), InvalidArgument);
  inst.couplings(1, 0) = 1.0;
  EXPECT_NO_THROW(inst.validate());
  inst.couplings(2, 2) = 0.5;
  EXPECT_THROW(inst.validate(), InvalidArgument);
}

TEST(Instance, JsonRoundTrip) {
  auto inst = generate_sk(6, 11);
  inst.label = "probe";
  inst.offset = 1.25;
  const auto back = instance_from_json(to_json(inst));
  EXPECT_EQ(back.couplings, inst.couplings);
  EXPECT_EQ(back.fields, inst.fields);
  EXPECT_EQ(back.offset, 1.25);
  EXPECT_EQ(back.label, inst.label);
  EXPECT_EQ(back.seed, inst.seed);

  const auto path = std::filesystem::temp_directory_path() / "geoanneal_probe.json";
  save_instance(inst, path.string());
  EXPECT_EQ(load_instance(path.string()).fields, inst.fields);
  std::filesystem::remove(path);
}

TEST(Instance, JsonRejectsMalformed) {
  EXPECT_THROW(instance_from_json(nlohmann::json{{"n", 2}, {"h", {0.0}}, {"J", nlohmann::json::array()}}),
               InvalidArgument);
  EXPECT_THROW(instance_from_json(nlohmann::json{{"n", 2}, {"h", {0.0, 1.0}}, {"J", {{1, 0, 1.0}}}}),
               InvalidArgument);
  EXPECT_THROW(instance_from_json(nlohmann::json{{"h", {0.0}}}), InvalidArgument);
}

TEST(Instance, SkCountsAndRejectsTinyN) {
  const auto inst = generate_sk(8, 1);
  EXPECT_EQ(inst.fields.size(), 8);
  int upper = 0;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) upper += inst.couplings(i, j) != 0.0;
  EXPECT_EQ(upper, 28);
  EXPECT_THROW(generate_sk(1, 1), InvalidArgument);
}

TEST(Instance, SkEntriesAreStandardNormal) {
  std::vector<double> xs;
  for (std::uint64_t seed = 0; xs.size() < 100000; ++seed) {
    const auto inst = generate_sk(20, seed);
    for (int i = 0; i < 20; ++i) {
      xs.push_back(inst.fields(i));
      for (int j = i + 1; j < 20; ++j) xs.push_back(inst.couplings(i, j));
    }
  }
  double mean = 0.0, var = 0.0;
  for (double x : xs) mean += x;
  mean /= double(xs.size());
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= double(xs.size() - 1);
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Instance, SmallFormulas) {
  const auto worked = parse_max2sat(
      "p max2sat 4 6\n1 4 0\n-1 4 0\n2 -4 0\n1 -3 0\n1 -2 0\n-2 -3 0\n");
  EXPECT_EQ(worked.n_vars, 4u);
  EXPECT_EQ(worked.clauses.size(), 6u);
  EXPECT_EQ(parse_max2sat("p max2sat 4 0\n").clauses.size(), 0u);
  EXPECT_THROW(parse_max2sat("p max2sat 4 1\n1 5 0\n"), ParseError);

  const auto one = map_clauses_to_ising(parse_max2sat("p max2sat 2 1\n1 2 0\n"));
  EXPECT_EQ(energy(one, assignment_from_truth({false, false})), 1.0);
  EXPECT_EQ(energy(one, assignment_from_truth({true, false})), 0.0);
  EXPECT_EQ(energy(one, assignment_from_truth({false, true})), 0.0);
  EXPECT_EQ(energy(one, assignment_from_truth({true, true})), 0.0);

  const auto three = map_clauses_to_ising(parse_max2sat("p max2sat 2 3\n1 2 0\n1 2 0\n1 2 0\n"));
  for (std::uint64_t k = 0; k < 4; ++k) {
    const auto a = Assignment::from_basis_index(k, 2);
    EXPECT_EQ(energy(three, a), 3.0 * energy(one, a));
  }
}

TEST(Instance, EnergyAndOptimumVectors) {
  auto inst = IsingInstance::zeros(2);
  inst.fields << 1.0, 1.0;
  EXPECT_EQ(energy(inst, Assignment({1, 1})), -2.0);
  EXPECT_THROW(energy(inst, Assignment({1})), InvalidArgument);

  auto single = IsingInstance::zeros(1);
  single.fields << 1.0;
  const auto o1 = brute_force_optimum(single);
  EXPECT_EQ(o1.assignment, Assignment({1}));
  EXPECT_EQ(o1.energy, -1.0);

  auto pair = IsingInstance::zeros(2);
  pair.couplings(0, 1) = pair.couplings(1, 0) = 1.0;
  EXPECT_EQ(brute_force_optimum(pair).assignment, Assignment({1, 1}));
}
