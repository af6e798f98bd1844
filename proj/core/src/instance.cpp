#include "geoanneal/instance.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "geoanneal/error.hpp"

namespace geoanneal {

void IsingInstance::validate() const {
  const auto n = fields.size();
  if (n < 1) throw InvalidArgument("instance: n_spins must be at least 1");
  if (couplings.rows() != n || couplings.cols() != n)
    throw InvalidArgument("instance: coupling matrix must be n x n");
  if (!std::isfinite(offset)) throw InvalidArgument("instance: offset not finite");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(fields[i])) throw InvalidArgument("instance: field not finite");
    if (couplings(i, i) != 0.0)
      throw InvalidArgument("instance: coupling diagonal must be zero");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!std::isfinite(couplings(i, j)))
        throw InvalidArgument("instance: coupling not finite");
      if (couplings(i, j) != couplings(j, i))
        throw InvalidArgument("instance: coupling matrix not symmetric");
    }
  }
}

IsingInstance IsingInstance::zeros(std::size_t n) {
  IsingInstance inst;
  const auto m = static_cast<Eigen::Index>(n);
  inst.couplings = Eigen::MatrixXd::Zero(m, m);
  inst.fields = Eigen::VectorXd::Zero(m);
  return inst;
}

void ClauseSet::validate() const {
  for (const auto& [a, b] : clauses) {
    for (const auto& lit : {a, b}) {
      if (lit.var < 1 || lit.var > n_vars)
        throw InvalidArgument("clause set: variable index out of range");
    }
  }
}

std::size_t ClauseSet::violated(const std::vector<bool>& truth) const {
  std::size_t count = 0;
  auto value = [&](const Literal& l) { return truth.at(l.var - 1) != l.negated; };
  for (const auto& [a, b] : clauses) {
    if (!value(a) && !value(b)) ++count;
  }
  return count;
}

Assignment::Assignment(std::vector<int> spins) : spins_(std::move(spins)) {
  for (int s : spins_) {
    if (s != 1 && s != -1) throw InvalidArgument("assignment: spins must be +1 or -1");
  }
}

std::uint64_t Assignment::basis_index() const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    if (spins_[i] == -1) idx |= std::uint64_t{1} << i;
  }
  return idx;
}

Assignment Assignment::from_basis_index(std::uint64_t index, std::size_t n) {
  std::vector<int> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = ((index >> i) & 1U) ? -1 : 1;
  return Assignment(std::move(s));
}

IsingInstance generate_sk(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("generate_sk: n must be at least 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  IsingInstance inst = IsingInstance::zeros(n);
  for (std::size_t i = 0; i < n; ++i) inst.fields[i] = normal(rng);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = normal(rng);
      inst.couplings(i, j) = v;
      inst.couplings(j, i) = v;
    }
  }
  inst.seed = static_cast<std::int64_t>(seed);
  inst.label = "sk_n" + std::to_string(n) + "_seed" + std::to_string(seed);
  return inst;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_int(std::string_view tok, long long& out) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

ClauseSet parse_max2sat(std::string_view text) {
  ClauseSet cs;
  bool have_header = false;
  long long expected = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0] == "c" || toks[0].front() == 'c') {
      if (eol == text.size()) break;
      continue;
    }
    if (toks[0] == "p") {
      if (have_header) throw ParseError(line_no, "duplicate header");
      long long nv = 0;
      if (toks.size() != 4 || toks[1] != "max2sat" || !parse_int(toks[2], nv) ||
          !parse_int(toks[3], expected) || nv < 1 || expected < 0)
        throw ParseError(line_no, "expected 'p max2sat <n_vars> <n_clauses>'");
      cs.n_vars = static_cast<std::size_t>(nv);
      have_header = true;
    } else {
      if (!have_header) throw ParseError(line_no, "clause before header");
      std::vector<long long> lits;
      for (auto tok : toks) {
        long long v = 0;
        if (!parse_int(tok, v)) throw ParseError(line_no, "malformed literal '" + std::string(tok) + "'");
        lits.push_back(v);
      }
      if (lits.empty() || lits.back() != 0)
        throw ParseError(line_no, "clause must be terminated by 0");
      lits.pop_back();
      if (lits.size() != 2)
        throw ParseError(line_no, "clause must contain exactly two literals");
      std::pair<Literal, Literal> clause;
      Literal* slots[2] = {&clause.first, &clause.second};
      for (int k = 0; k < 2; ++k) {
        const long long v = lits[k];
        if (v == 0) throw ParseError(line_no, "literal must be nonzero");
        const auto var = static_cast<std::size_t>(v < 0 ? -v : v);
        if (var > cs.n_vars)
          throw ParseError(line_no, "variable " + std::to_string(var) +
                                        " out of range 1.." + std::to_string(cs.n_vars));
        *slots[k] = Literal{var, v < 0};
      }
      cs.clauses.push_back(clause);
    }
    if (eol == text.size()) break;
  }
  if (!have_header) throw ParseError(line_no, "missing 'p max2sat' header");
  if (static_cast<long long>(cs.clauses.size()) != expected)
    throw ParseError(line_no, "header declares " + std::to_string(expected) +
                                  " clauses, found " + std::to_string(cs.clauses.size()));
  return cs;
}

std::string format_max2sat(const ClauseSet& cs) {
  std::ostringstream os;
  os << "p max2sat " << cs.n_vars << ' ' << cs.clauses.size() << '\n';
  auto lit = [](const Literal& l) {
    return (l.negated ? -1 : 1) * static_cast<long long>(l.var);
  };
  for (const auto& [a, b] : cs.clauses) os << lit(a) << ' ' << lit(b) << " 0\n";
  return os.str();
}

IsingInstance map_clauses_to_ising(const ClauseSet& cs) {
  cs.validate();
  if (cs.n_vars < 1) throw InvalidArgument("clause set: n_vars must be positive");
  IsingInstance inst = IsingInstance::zeros(cs.n_vars);
  // A literal is false when (1 + p Z)/2 = 1, with p = +1 for x_v and -1 for
  // not x_v. A clause is violated when both literals are false:
  //   (1 + p_a Z_a)(1 + p_b Z_b)/4.
  // Z coefficients enter the stored fields/couplings with a flipped sign.
  for (const auto& [a, b] : cs.clauses) {
    const double pa = a.negated ? -1.0 : 1.0;
    const double pb = b.negated ? -1.0 : 1.0;
    const auto i = static_cast<Eigen::Index>(a.var - 1);
    const auto j = static_cast<Eigen::Index>(b.var - 1);
    inst.offset += 0.25;
    inst.fields[i] -= 0.25 * pa;
    inst.fields[j] -= 0.25 * pb;
    if (i == j) {
      inst.offset += 0.25 * pa * pb;  // Z_i^2 = 1
    } else {
      inst.couplings(i, j) -= 0.25 * pa * pb;
      inst.couplings(j, i) = inst.couplings(i, j);
    }
  }
  inst.label = "max2sat_n" + std::to_string(cs.n_vars) + "_m" +
               std::to_string(cs.clauses.size());
  return inst;
}

Assignment assignment_from_truth(const std::vector<bool>& truth) {
  std::vector<int> s(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) s[i] = truth[i] ? -1 : 1;
  return Assignment(std::move(s));
}

double energy(const IsingInstance& inst, const Assignment& a) {
  const std::size_t n = inst.n_spins();
  if (a.size() != n) throw InvalidArgument("energy: assignment length mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double local = inst.fields[i];
    for (std::size_t j = i + 1; j < n; ++j) local += inst.couplings(i, j) * a[j];
    e += local * a[i];
  }
  return inst.offset - e;
}

std::vector<double> diagonal_energies(const IsingInstance& inst) {
  const std::size_t n = inst.n_spins();
  if (n >= 63) throw SizeError("diagonal_energies: too many spins");
  const std::uint64_t dim = std::uint64_t{1} << n;
  std::vector<double> e(dim);
  // Energy of the all-up state, then grow by the highest set bit: flipping
  // spin k from +1 to -1 changes the energy by 2 (h_k + sum_{j<k} J_kj s_j)
  // since spins above k are still +1 in the smaller index.
  double e0 = inst.offset;
  for (std::size_t i = 0; i < n; ++i) {
    e0 -= inst.fields[i];
    for (std::size_t j = i + 1; j < n; ++j) e0 -= inst.couplings(i, j);
  }
  e[0] = e0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t hi = std::uint64_t{1} << k;
    for (std::uint64_t x = 0; x < hi; ++x) {
      double local = inst.fields[k];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        const double sj = (j < k && ((x >> j) & 1U)) ? -1.0 : 1.0;
        local += inst.couplings(k, j) * sj;
      }
      e[x | hi] = e[x] + 2.0 * local;
    }
  }
  return e;
}

namespace {

std::uint64_t reverse_bits(std::uint64_t x, std::size_t n) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < n; ++i) r |= ((x >> i) & 1U) << (n - 1 - i);
  return r;
}

}  // namespace

std::vector<std::uint64_t> optimal_basis_states(const std::vector<double>& diag,
                                                double tol) {
  const double emin = *std::min_element(diag.begin(), diag.end());
  const double cut = emin + tol * std::max(1.0, std::abs(emin));
  std::vector<std::uint64_t> out;
  for (std::uint64_t x = 0; x < diag.size(); ++x) {
    if (diag[x] <= cut) out.push_back(x);
  }
  return out;
}

Optimum brute_force_optimum(const IsingInstance& inst, std::size_t max_spins) {
  const std::size_t n = inst.n_spins();
  if (n > max_spins)
    throw SizeError("brute_force_optimum: n=" + std::to_string(n) +
                    " exceeds limit " + std::to_string(max_spins));
  const auto diag = diagonal_energies(inst);
  const auto optima = optimal_basis_states(diag, 1e-12);
  // Lexicographic order on (s_0, s_1, ...) with +1 < -1 is numeric order of
  // the bit-reversed basis index.
  std::uint64_t best = optima.front();
  for (auto x : optima) {
    if (reverse_bits(x, n) < reverse_bits(best, n)) best = x;
  }
  Assignment a = Assignment::from_basis_index(best, n);
  return {a, energy(inst, a)};
}

nlohmann::json to_json(const IsingInstance& inst) {
  nlohmann::json j;
  const std::size_t n = inst.n_spins();
  j["n"] = n;
  j["h"] = std::vector<double>(inst.fields.data(), inst.fields.data() + n);
  nlohmann::json J = nlohmann::json::array();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double v = inst.couplings(a, b);
      if (v != 0.0) J.push_back({a, b, v});
    }
  }
  j["J"] = std::move(J);
  j["offset"] = inst.offset;
  j["label"] = inst.label ? nlohmann::json(*inst.label) : nlohmann::json(nullptr);
  j["seed"] = inst.seed ? nlohmann::json(*inst.seed) : nlohmann::json(nullptr);
  return j;
}

IsingInstance instance_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    const auto h = j.at("h").get<std::vector<double>>();
    if (h.size() != n) throw InvalidArgument("instance json: length of h differs from n");
    IsingInstance inst = IsingInstance::zeros(n);
    for (std::size_t i = 0; i < n; ++i) inst.fields[i] = h[i];
    for (const auto& e : j.at("J")) {
      const auto a = e.at(0).get<std::size_t>();
      const auto b = e.at(1).get<std::size_t>();
      const auto v = e.at(2).get<double>();
      if (!(a < b) || b >= n)
        throw InvalidArgument("instance json: coupling index must satisfy i < j < n");
      inst.couplings(a, b) = v;
      inst.couplings(b, a) = v;
    }
    inst.offset = j.value("offset", 0.0);
    if (j.contains("label") && !j["label"].is_null()) inst.label = j["label"].get<std::string>();
    if (j.contains("seed") && !j["seed"].is_null()) inst.seed = j["seed"].get<std::int64_t>();
    inst.validate();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("instance json: ") + e.what());
  }
}

IsingInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open instance file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, path + ": " + e.what());
  }
  return instance_from_json(j);
}

void save_instance(const IsingInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write instance file '" + path + "'");
  out << to_json(inst).dump(2) << '\n';
}

}  // namespace geoanneal
