#include "geoanneal/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "geoanneal/csv.hpp"
#include "geoanneal/error.hpp"

namespace geoanneal {

double geometric_mean(const std::vector<double>& values) {
  if (values.empty()) throw InvalidArgument("geometric_mean: empty input");
  double acc = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw InvalidArgument("geometric_mean: values must be positive");
    acc += std::log(v);
  }
  return std::exp(acc / static_cast<double>(values.size()));
}

double effective_probability_bound(double P, int candidates, int runs) {
  if (!(P > 0.0 && P < 1.0)) throw InvalidArgument("effective_probability_bound: P must lie in (0, 1)");
  if (candidates < 1 || runs < 1)
    throw InvalidArgument("effective_probability_bound: candidates and runs must be >= 1");
  const double fail = static_cast<double>(runs) * std::log1p(-P);
  return -std::expm1(fail / (static_cast<double>(candidates) * runs));
}

int trotter_layers(double T, double step) {
  if (!(T > 0.0) || !(step > 0.0)) throw InvalidArgument("trotter step and T must be positive");
  const double ratio = T / step;
  const double p = std::round(ratio);
  if (p < 1.0 || std::abs(ratio - p) > 1e-9 * std::max(1.0, ratio) || p > 1e9)
    throw InvalidArgument("T / trotter step must be a positive integer");
  return static_cast<int>(p);
}

void MiningConfig::validate() const {
  if (n < 2) throw InvalidArgument("mining: n must be at least 2");
  if (n > kDefaultStateVectorLimit) throw SizeError("mining: n exceeds the state-vector limit");
  if (pool_size < 1) throw InvalidArgument("mining: pool size must be at least 1");
  if (!(frustration_threshold >= 0.0 && frustration_threshold <= 1.0))
    throw InvalidArgument("mining: frustration threshold must lie in [0, 1]");
  if (!(cutoff > 0.0 && cutoff <= 1.0)) throw InvalidArgument("mining: cutoff must lie in (0, 1]");
  if (order != 1 && order != 2) throw InvalidArgument("mining: order must be 1 or 2");
  trotter_layers(screening_T, trotter_step);
}

nlohmann::json MiningConfig::to_json() const {
  return {{"n", n},
          {"pool_size", pool_size},
          {"frustration_threshold", frustration_threshold},
          {"screening_T", screening_T},
          {"cutoff", cutoff},
          {"trotter_step", trotter_step},
          {"order", order},
          {"seed", seed},
          {"target_count", target_count}};
}

MiningResult mine_hard_instances(const MiningConfig& cfg) {
  cfg.validate();
  const ScheduleFunction lin = linear_schedule();
  const int p = trotter_layers(cfg.screening_T, cfg.trotter_step);
  MeanFieldOptions mf;
  mf.grid_points = 2;

  MiningResult out;
  for (std::size_t k = 0; k < cfg.pool_size; ++k) {
    if (cfg.target_count > 0 && out.instances.size() >= cfg.target_count) break;
    ++out.stats.pool;
    IsingInstance inst = generate_sk(cfg.n, cfg.seed + k);
    const auto traj = integrate_meanfield(inst, lin, cfg.screening_T, mf);
    const double mag = traj.final_spins().row(2).cwiseAbs().minCoeff();
    if (mag > cfg.frustration_threshold) continue;
    ++out.stats.stage1_passed;
    const auto psi = trotter_evolve(inst, lin, cfg.screening_T, p, cfg.order);
    const double prob = success_probability(psi, inst);
    if (!(prob < cfg.cutoff) && cfg.cutoff < 1.0) continue;
    ++out.stats.stage2_passed;
    out.instances.push_back({std::move(inst), mag, prob});
  }
  return out;
}

std::vector<BottleneckCandidate> semiclassical_candidates(const IsingInstance& inst, double T,
                                                          const PipelineConfig& cfg) {
  const auto traj = integrate_meanfield(inst, linear_schedule(), T, cfg.meanfield);
  const auto record = evolve_statistical_function(inst, traj, cfg.fluctuations);
  return detect_bottlenecks(record, frustration_report(traj), cfg.peaks);
}

void ComparisonConfig::validate() const {
  if (T_list.empty()) throw InvalidArgument("comparison: empty T list");
  for (double T : T_list) trotter_layers(T, trotter_step);
  if (!(cutoff > 0.0 && cutoff <= 1.0)) throw InvalidArgument("comparison: cutoff must lie in (0, 1]");
  for (int o : {linear_order, adaptive_order})
    if (o != 1 && o != 2) throw InvalidArgument("comparison: order must be 1 or 2");
  if (jobs < 1) throw InvalidArgument("comparison: jobs must be at least 1");
  geodesic.validate();
}

nlohmann::json ComparisonConfig::to_json() const {
  nlohmann::json j = {{"T", T_list},
                      {"trotter_step", trotter_step},
                      {"cutoff", cutoff},
                      {"linear_order", linear_order},
                      {"adaptive_order", adaptive_order},
                      {"baseline", baseline.id()},
                      {"adaptive_override", nullptr},
                      {"effective", nullptr},
                      {"ideal", ideal},
                      {"gamma0", geodesic.gamma0},
                      {"sigma", geodesic.sigma},
                      {"shape", geodesic.shape == BumpShape::cauchy ? "cauchy" : "gaussian"},
                      {"geodesic_points", geodesic_options.points},
                      {"meanfield_tol", pipeline.meanfield.tol},
                      {"meanfield_grid", pipeline.meanfield.grid_points},
                      {"fluctuation_tol", pipeline.fluctuations.tol},
                      {"prominence_fraction", pipeline.peaks.prominence_fraction},
                      {"max_candidates", pipeline.peaks.max_candidates}};
  if (adaptive_override) j["adaptive_override"] = adaptive_override->id();
  if (effective) j["effective"] = effective->id();
  return j;
}

namespace {

std::string instance_id(const IsingInstance& inst, std::size_t index) {
  return inst.label ? *inst.label : "instance" + std::to_string(index);
}

double evolve_probability(const IsingInstance& inst, const ScheduleFunction& sched, double T, int p,
                          int order) {
  return success_probability(trotter_evolve(inst, sched, T, p, order), inst);
}

void mark_failed(InstanceRecord& rec, const char* kind, const std::string& what) {
  rec.failed = true;
  rec.failure_kind = kind;
  rec.failure = what;
}

std::vector<InstanceRecord> compare_instance(const IsingInstance& inst, std::size_t index,
                                             const ComparisonConfig& cfg) {
  std::vector<InstanceRecord> rows;
  std::optional<double> s_exact;
  std::optional<ScheduleFunction> ideal;
  std::string ideal_kind, ideal_error;
  if (cfg.ideal) {
    try {
      const auto gp = gap_profile(inst);
      if (gp.degenerate) throw DegenerateError("degenerate gap profile");
      s_exact = gp.bottleneck;
      GeodesicParams gpar = cfg.geodesic;
      gpar.center = gp.bottleneck;
      ideal = solve_geodesic(gpar, cfg.geodesic_options);
      ideal->set_id("ideal(" + ideal->id() + ")");
    } catch (const Error& e) {
      ideal_kind = e.kind();
      ideal_error = e.what();
    }
  }

  std::map<double, ScheduleFunction> cache;
  for (double T : cfg.T_list) {
    InstanceRecord rec;
    rec.id = instance_id(inst, index);
    rec.n_spins = inst.n_spins();
    rec.T = T;
    rec.s_exact = s_exact;
    try {
      rec.p = trotter_layers(T, cfg.trotter_step);
      const auto psi = trotter_evolve(inst, cfg.baseline, T, rec.p, cfg.linear_order);
      rec.p_lin = success_probability(psi, inst);
      rec.most_likely_level = eigenstate_distribution(psi, inst).most_likely;

      if (cfg.adaptive_override) {
        CandidateResult c;
        c.schedule_id = cfg.adaptive_override->id();
        c.probability = evolve_probability(inst, *cfg.adaptive_override, T, rec.p, cfg.adaptive_order);
        rec.candidates.push_back(c);
      } else {
        for (const auto& bc : semiclassical_candidates(inst, T, cfg.pipeline)) {
          CandidateResult c;
          c.position = bc.position;
          c.peak_chi = bc.peak_chi;
          c.spin = bc.spin;
          c.low_confidence = bc.low_confidence;
          try {
            auto it = cache.find(bc.position);
            if (it == cache.end()) {
              GeodesicParams gpar = cfg.geodesic;
              gpar.center = bc.position;
              it = cache.emplace(bc.position, solve_geodesic(gpar, cfg.geodesic_options)).first;
            }
            c.schedule_id = it->second.id();
            c.probability = evolve_probability(inst, it->second, T, rec.p, cfg.adaptive_order);
          } catch (const Error& e) {
            c.error = std::string(e.kind()) + ": " + e.what();
          }
          rec.candidates.push_back(c);
        }
      }
      bool any = false;
      for (const auto& c : rec.candidates) {
        if (c.probability) {
          rec.p_ad = any ? std::max(rec.p_ad, *c.probability) : *c.probability;
          any = true;
        }
      }
      if (!any) throw ConvergenceError("no candidate schedule could be built", 0.0, {});
      const int C = static_cast<int>(rec.candidates.size());
      rec.p_ad_bound = rec.p_ad >= 1.0 ? 1.0 : effective_probability_bound(rec.p_ad, C);

      if (cfg.effective)
        rec.p_eff = evolve_probability(inst, *cfg.effective, T, rec.p, cfg.adaptive_order);
      if (cfg.ideal) {
        if (!ideal) {
          mark_failed(rec, ideal_kind.c_str(), "ideal schedule: " + ideal_error);
        } else {
          rec.p_ideal = evolve_probability(inst, *ideal, T, rec.p, cfg.adaptive_order);
        }
      }
      if (!rec.failed && (rec.p_lin <= 0.0 || rec.p_ad <= 0.0))
        mark_failed(rec, "zero-probability", "success probability underflowed to zero");
    } catch (const Error& e) {
      mark_failed(rec, e.kind(), e.what());
    } catch (const std::exception& e) {
      mark_failed(rec, "error", e.what());
    }
    rows.push_back(std::move(rec));
  }
  return rows;
}

}  // namespace

std::vector<Aggregate> aggregate_rows(const std::vector<InstanceRecord>& rows,
                                      const std::vector<double>& T_list, double cutoff) {
  std::vector<Aggregate> out;
  for (double T : T_list) {
    Aggregate a;
    a.T = T;
    std::vector<double> lin, ad, bound, eff, ideal;
    bool all_eff = true, all_ideal = true;
    for (const auto& r : rows) {
      if (r.T != T) continue;
      ++a.total;
      if (r.failed) {
        ++a.failed;
        continue;
      }
      if (!(r.p_lin < cutoff)) continue;
      ++a.in_cutoff;
      lin.push_back(r.p_lin);
      ad.push_back(r.p_ad);
      bound.push_back(r.p_ad_bound);
      if (r.p_eff && *r.p_eff > 0.0) eff.push_back(*r.p_eff); else all_eff = false;
      if (r.p_ideal && *r.p_ideal > 0.0) ideal.push_back(*r.p_ideal); else all_ideal = false;
    }
    if (a.in_cutoff > 0) {
      a.gm_lin = geometric_mean(lin);
      a.gm_ad = geometric_mean(ad);
      a.gm_ad_bound = geometric_mean(bound);
      a.improvement_ad = *a.gm_ad / *a.gm_lin;
      if (all_eff) {
        a.gm_eff = geometric_mean(eff);
        a.improvement_eff = *a.gm_eff / *a.gm_lin;
      }
      if (all_ideal) {
        a.gm_ideal = geometric_mean(ideal);
        a.improvement_ideal = *a.gm_ideal / *a.gm_lin;
      }
    }
    out.push_back(a);
  }
  return out;
}

EnsembleReport run_comparison(const std::vector<IsingInstance>& instances,
                              const ComparisonConfig& cfg) {
  cfg.validate();
  for (const auto& inst : instances) {
    inst.validate();
    if (inst.n_spins() > kDefaultStateVectorLimit)
      throw SizeError("comparison: instance exceeds the state-vector limit");
  }

  std::vector<std::vector<InstanceRecord>> per(instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < instances.size();)
      per[k] = compare_instance(instances[k], k, cfg);
  };
  const std::size_t workers = std::min(cfg.jobs, std::max<std::size_t>(1, instances.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  EnsembleReport report;
  report.config = cfg.to_json();
  for (auto& v : per)
    for (auto& r : v) report.rows.push_back(std::move(r));
  report.aggregates = aggregate_rows(report.rows, cfg.T_list, cfg.cutoff);
  return report;
}

namespace {

template <class T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json report_to_json(const EnsembleReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : r.candidates) {
      cands.push_back({{"position", c.position},
                       {"peak_chi", c.peak_chi},
                       {"spin", c.spin},
                       {"low_confidence", c.low_confidence},
                       {"probability", opt_json(c.probability)},
                       {"schedule", c.schedule_id},
                       {"error", c.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(c.error)}});
    }
    rows.push_back({{"id", r.id},
                    {"n", r.n_spins},
                    {"T", r.T},
                    {"p", r.p},
                    {"p_lin", r.p_lin},
                    {"candidates", cands},
                    {"p_ad", r.p_ad},
                    {"p_ad_bound", r.p_ad_bound},
                    {"p_eff", opt_json(r.p_eff)},
                    {"p_ideal", opt_json(r.p_ideal)},
                    {"s_exact", opt_json(r.s_exact)},
                    {"most_likely_level", r.most_likely_level},
                    {"failed", r.failed},
                    {"failure_kind", r.failed ? nlohmann::json(r.failure_kind) : nlohmann::json(nullptr)},
                    {"failure", r.failed ? nlohmann::json(r.failure) : nlohmann::json(nullptr)}});
  }
  nlohmann::json aggs = nlohmann::json::array();
  for (const auto& a : report.aggregates) {
    aggs.push_back({{"T", a.T},
                    {"total", a.total},
                    {"failed", a.failed},
                    {"in_cutoff", a.in_cutoff},
                    {"gm_lin", opt_json(a.gm_lin)},
                    {"gm_ad", opt_json(a.gm_ad)},
                    {"gm_ad_bound", opt_json(a.gm_ad_bound)},
                    {"gm_eff", opt_json(a.gm_eff)},
                    {"gm_ideal", opt_json(a.gm_ideal)},
                    {"improvement_ad", opt_json(a.improvement_ad)},
                    {"improvement_eff", opt_json(a.improvement_eff)},
                    {"improvement_ideal", opt_json(a.improvement_ideal)}});
  }
  return {{"config", report.config}, {"rows", rows}, {"aggregates", aggs}};
}

void write_report_csv(const EnsembleReport& report, std::ostream& out) {
  CsvWriter csv(out, {"id", "n", "T", "p", "p_lin", "p_ad", "p_ad_bound", "p_eff", "p_ideal",
                      "s_exact", "s_pred", "level", "failed"});
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : report.rows) {
    const std::string s_pred = r.candidates.empty() || !r.candidates.front().probability
                                   ? std::string()
                                   : format_double(r.candidates.front().position);
    csv.row(r.id, r.n_spins, r.T, r.p, r.p_lin, r.p_ad, r.p_ad_bound, cell(r.p_eff), cell(r.p_ideal),
            cell(r.s_exact), s_pred, r.most_likely_level, r.failed ? "1" : "0");
  }
}

LevelHistogram excited_state_histogram(const std::vector<IsingInstance>& instances, double T,
                                       const ScheduleFunction& sched, double trotter_step,
                                       int order) {
  const int p = trotter_layers(T, trotter_step);
  LevelHistogram h;
  for (const auto& inst : instances) {
    const auto psi = trotter_evolve(inst, sched, T, p, order);
    const std::size_t level = eigenstate_distribution(psi, inst).most_likely;
    h.levels.push_back(level);
    auto& counts = h.counts[inst.n_spins()];
    if (counts.size() <= level) counts.resize(level + 1, 0);
    ++counts[level];
  }
  return h;
}

nlohmann::json histogram_to_json(const LevelHistogram& h) {
  nlohmann::json by_n = nlohmann::json::object();
  for (const auto& [n, counts] : h.counts) by_n[std::to_string(n)] = counts;
  return {{"levels", h.levels}, {"counts", by_n}};
}

}  // namespace geoanneal
