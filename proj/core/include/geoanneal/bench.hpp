#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geoanneal/exactsim.hpp"
#include "geoanneal/fluctuations.hpp"
#include "geoanneal/instance.hpp"
#include "geoanneal/meanfield.hpp"
#include "geoanneal/schedule.hpp"

namespace geoanneal {

double geometric_mean(const std::vector<double>& values);

// 1 - (1 - P)^(1/C): per-run success probability that matches running each
// of C candidate schedules once.
double effective_probability_bound(double P, int candidates, int runs = 1);

// Number of Trotter layers for total time T at step `step`; T/step must be a
// positive integer.
int trotter_layers(double T, double step);

struct MiningConfig {
  std::size_t n = 10;
  std::size_t pool_size = 2000;
  double frustration_threshold = 0.1;  // on min_i |n^z_i(T)|
  double screening_T = 128.0;
  double cutoff = 0.005;  // on P_lin
  double trotter_step = 0.125;
  int order = 2;
  std::uint64_t seed = 1;
  std::size_t target_count = 0;  // stop once this many survive; 0 screens the whole pool

  void validate() const;
  nlohmann::json to_json() const;
};

struct MiningStats {
  std::size_t pool = 0;  // instances actually screened
  std::size_t stage1_passed = 0;
  std::size_t stage2_passed = 0;
};

struct MinedInstance {
  IsingInstance instance;
  double min_magnetization = 0.0;
  double p_lin = 0.0;
};

struct MiningResult {
  std::vector<MinedInstance> instances;  // generation order
  MiningStats stats;
};

// Instance k of the pool is generate_sk(n, seed + k).
MiningResult mine_hard_instances(const MiningConfig& cfg);

struct PipelineConfig {
  MeanFieldOptions meanfield;
  FluctuationOptions fluctuations;
  PeakOptions peaks;
};

// Linear-schedule mean-field run, fluctuation evolution and chi-peak ranking
// at annealing time T.
std::vector<BottleneckCandidate> semiclassical_candidates(const IsingInstance& inst, double T,
                                                          const PipelineConfig& cfg = {});

struct ComparisonConfig {
  std::vector<double> T_list{128.0, 256.0, 512.0, 1024.0};
  double trotter_step = 0.125;
  double cutoff = 0.005;
  int linear_order = 2;
  int adaptive_order = 1;
  ScheduleFunction baseline = linear_schedule();
  // Replaces the semi-classical pipeline with one fixed schedule.
  std::optional<ScheduleFunction> adaptive_override;
  std::optional<ScheduleFunction> effective;
  bool ideal = false;  // geodesic centred on the exact bottleneck
  GeodesicParams geodesic;
  GeodesicOptions geodesic_options;
  PipelineConfig pipeline;
  std::size_t jobs = 1;

  void validate() const;
  nlohmann::json to_json() const;
};

struct CandidateResult {
  double position = 0.0;
  double peak_chi = 0.0;
  std::size_t spin = 0;
  bool low_confidence = false;
  std::optional<double> probability;  // empty when the schedule failed
  std::string schedule_id;
  std::string error;
};

struct InstanceRecord {
  std::string id;
  std::size_t n_spins = 0;
  double T = 0.0;
  int p = 0;
  double p_lin = 0.0;
  std::vector<CandidateResult> candidates;
  double p_ad = 0.0;        // best candidate
  double p_ad_bound = 0.0;  // effective bound with C = number of candidates
  std::optional<double> p_eff;
  std::optional<double> p_ideal;
  std::optional<double> s_exact;
  std::size_t most_likely_level = 0;  // linear schedule
  bool failed = false;
  std::string failure_kind;
  std::string failure;
};

struct Aggregate {
  double T = 0.0;
  std::size_t total = 0;
  std::size_t failed = 0;
  std::size_t in_cutoff = 0;
  std::optional<double> gm_lin;
  std::optional<double> gm_ad;
  std::optional<double> gm_ad_bound;
  std::optional<double> gm_eff;
  std::optional<double> gm_ideal;
  std::optional<double> improvement_ad;
  std::optional<double> improvement_eff;
  std::optional<double> improvement_ideal;
};

struct EnsembleReport {
  nlohmann::json config;
  std::vector<InstanceRecord> rows;  // instance-major, then T
  std::vector<Aggregate> aggregates;
};

EnsembleReport run_comparison(const std::vector<IsingInstance>& instances,
                              const ComparisonConfig& cfg);

// Recomputes the per-T aggregates from rows alone.
std::vector<Aggregate> aggregate_rows(const std::vector<InstanceRecord>& rows,
                                      const std::vector<double>& T_list, double cutoff);

nlohmann::json report_to_json(const EnsembleReport& report);
void write_report_csv(const EnsembleReport& report, std::ostream& out);

struct LevelHistogram {
  std::map<std::size_t, std::vector<std::size_t>> counts;  // n -> count per level index
  std::vector<std::size_t> levels;                          // per instance
};

LevelHistogram excited_state_histogram(const std::vector<IsingInstance>& instances, double T,
                                       const ScheduleFunction& sched, double trotter_step,
                                       int order = 2);

nlohmann::json histogram_to_json(const LevelHistogram& h);

}  // namespace geoanneal
