#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "geoanneal/bench.hpp"
#include "geoanneal/csv.hpp"
#include "geoanneal/error.hpp"
#include "geoanneal/exactsim.hpp"
#include "geoanneal/fluctuations.hpp"
#include "geoanneal/instance.hpp"
#include "geoanneal/meanfield.hpp"
#include "geoanneal/schedule.hpp"

namespace geoanneal::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string out_dir = ".";
  bool manifest = false;
};

struct GeodesicFlags {
  double center = 0.5;
  double gamma0 = 3.20;
  double sigma = 0.05;
  std::string shape = "cauchy";
  std::size_t points = ScheduleFunction::kDefaultPoints;

  GeodesicParams params() const {
    GeodesicParams p;
    p.center = center;
    p.gamma0 = gamma0;
    p.sigma = sigma;
    p.shape = shape == "gaussian" ? BumpShape::gaussian : BumpShape::cauchy;
    p.validate();
    return p;
  }
  GeodesicOptions options() const {
    GeodesicOptions o;
    o.points = points;
    return o;
  }
  json to_json() const {
    return {{"center", center}, {"gamma0", gamma0}, {"sigma", sigma}, {"shape", shape},
            {"points", points}};
  }
};

void add_geodesic_flags(CLI::App* cmd, GeodesicFlags& g, bool with_center) {
  if (with_center)
    cmd->add_option("--center", g.center, "Bottleneck position of the bump")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  cmd->add_option("--gamma0", g.gamma0, "Bump strength")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--sigma", g.sigma, "Bump width")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--shape", g.shape, "Bump shape")
      ->check(CLI::IsMember({"cauchy", "gaussian"}))
      ->capture_default_str();
  cmd->add_option("--points", g.points, "Schedule grid points")
      ->check(CLI::Range(std::size_t{3}, std::size_t{1} << 20))
      ->capture_default_str();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write file: " + path.string());
  f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

template <class Fn>
void write_stream(const fs::path& path, Fn&& fn) {
  std::ostringstream ss;
  fn(ss);
  write_text(path, ss.str());
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

// "linear", a geodesic built from flags, or a schedule CSV path.
ScheduleFunction resolve_schedule(const std::string& spec, const GeodesicFlags& g) {
  if (spec == "linear") return linear_schedule();
  if (spec == "geodesic") return solve_geodesic(g.params(), g.options());
  return load_schedule(spec);
}

json schedule_summary(const ScheduleFunction& sched) {
  const std::size_t k = sched.min_slope_index();
  return {{"id", sched.id()},
          {"points", sched.size()},
          {"min_slope_u", sched.u_at(k)},
          {"min_slope_s", sched.samples()[k]},
          {"min_slope", sched.slopes()[k]}};
}

json cmd_generate(const Globals& g, std::size_t n, std::uint64_t seed, std::size_t count,
                  const std::string& max2sat, std::ostream& out) {
  const fs::path dir(g.out_dir);
  json files = json::array();
  if (!max2sat.empty()) {
    const auto cs = parse_max2sat(read_file(max2sat));
    IsingInstance inst = map_clauses_to_ising(cs);
    const fs::path path = dir / (stem_of(max2sat) + ".json");
    write_json(path, to_json(inst));
    files.push_back(path.string());
  } else {
    if (n < 2) throw InvalidArgument("generate: --n must be at least 2");
    for (std::size_t k = 0; k < count; ++k) {
      const IsingInstance inst = generate_sk(n, seed + k);
      const fs::path path = dir / (*inst.label + ".json");
      write_json(path, to_json(inst));
      files.push_back(path.string());
    }
  }
  for (const auto& f : files) out << f.get<std::string>() << "\n";
  return {{"n", n}, {"seed", seed}, {"count", count}, {"max2sat", max2sat}, {"files", files}};
}

json cmd_mine(const Globals& g, const MiningConfig& cfg, std::ostream& out) {
  const auto result = mine_hard_instances(cfg);
  const fs::path dir(g.out_dir);
  json entries = json::array();
  for (const auto& m : result.instances) {
    const std::string file = *m.instance.label + ".json";
    write_json(dir / file, to_json(m.instance));
    entries.push_back({{"file", file}, {"min_magnetization", m.min_magnetization}, {"p_lin", m.p_lin}});
  }
  const json stats = {{"pool", result.stats.pool},
                      {"stage1_passed", result.stats.stage1_passed},
                      {"stage2_passed", result.stats.stage2_passed},
                      {"stage1_rate", double(result.stats.stage1_passed) / double(result.stats.pool)},
                      {"stage2_rate", result.stats.stage1_passed == 0
                                          ? 0.0
                                          : double(result.stats.stage2_passed) /
                                                double(result.stats.stage1_passed)}};
  write_json(dir / "mining.json", {{"config", cfg.to_json()}, {"stats", stats}, {"instances", entries}});
  out << "mined " << result.instances.size() << " of " << result.stats.pool << " (stage 1: "
      << result.stats.stage1_passed << ")\n";
  return cfg.to_json();
}

struct MeanFieldFlags {
  std::string instance;
  double T = 128.0;
  std::string schedule = "linear";
  double tol = 1e-8;
  std::size_t grid = 513;
};

json cmd_meanfield(const Globals& g, const MeanFieldFlags& f, const GeodesicFlags& geo, std::ostream& out) {
  const IsingInstance inst = load_instance(f.instance);
  const ScheduleFunction sched = resolve_schedule(f.schedule, geo);
  MeanFieldOptions opt;
  opt.tol = f.tol;
  opt.grid_points = f.grid;
  const auto traj = integrate_meanfield(inst, sched, f.T, opt);
  const auto fr = frustration_report(traj);
  const fs::path dir(g.out_dir);
  const std::string stem = stem_of(f.instance);
  write_stream(dir / (stem + "_meanfield.csv"), [&](std::ostream& os) { write_trajectory_csv(traj, os); });
  json unresolved = json::array();
  for (bool u : traj.unresolved()) unresolved.push_back(u);
  write_json(dir / (stem + "_meanfield.json"),
             {{"T", f.T},
              {"schedule", sched.id()},
              {"sigma_star", traj.sigma_star()},
              {"unresolved", unresolved},
              {"frustration", fr.scores},
              {"ranking", fr.ranking},
              {"max_norm_drift", traj.max_norm_drift()},
              {"final_energy", mf_energy(inst, traj, f.T)}});
  out << "most frustrated spin " << fr.ranking.front() << " (score " << fr.scores[fr.ranking.front()] << ")\n";
  return {{"instance", f.instance}, {"T", f.T}, {"schedule", f.schedule}, {"tol", f.tol}, {"grid", f.grid},
          {"geodesic", geo.to_json()}};
}

struct FluctFlags {
  std::string instance;
  double T = 128.0;
  double tol = 1e-8;
  double mf_tol = 1e-8;
  PeakOptions peaks;
};

json cmd_fluct(const Globals& g, const FluctFlags& f, std::ostream& out) {
  const IsingInstance inst = load_instance(f.instance);
  MeanFieldOptions mopt;
  mopt.tol = f.mf_tol;
  const auto traj = integrate_meanfield(inst, linear_schedule(), f.T, mopt);
  FluctuationOptions fopt;
  fopt.tol = f.tol;
  const auto rec = evolve_statistical_function(inst, traj, fopt);
  const auto cands = detect_bottlenecks(rec, frustration_report(traj), f.peaks);
  const fs::path dir(g.out_dir);
  const std::string stem = stem_of(f.instance);
  write_stream(dir / (stem + "_fluct.csv"), [&](std::ostream& os) { write_fluctuation_csv(rec, os); });
  write_json(dir / (stem + "_candidates.json"),
             {{"T", f.T},
              {"candidates", candidates_to_json(cands)},
              {"max_spectrum_deviation", rec.max_spectrum_deviation},
              {"propagator_defect", rec.propagator_defect},
              {"spectrum_warning", rec.spectrum_warning}});
  out << "top candidate s~* = " << cands.front().position << "\n";
  return {{"instance", f.instance},
          {"T", f.T},
          {"tol", f.tol},
          {"mf_tol", f.mf_tol},
          {"prominence_fraction", f.peaks.prominence_fraction},
          {"s_min", f.peaks.s_min},
          {"s_max", f.peaks.s_max},
          {"max_candidates", f.peaks.max_candidates}};
}

struct ScheduleFlags {
  std::string output = "schedule.csv";
  std::string ideal_instance;
  double T = 0.0;
  double step = 0.125;
};

json cmd_schedule(const Globals& g, const ScheduleFlags& f, const GeodesicFlags& geo, std::ostream& out) {
  ScheduleFunction sched;
  json extra = json::object();
  if (!f.ideal_instance.empty()) {
    const auto gp = gap_profile(load_instance(f.ideal_instance));
    if (gp.degenerate) throw DegenerateError("schedule: instance has a degenerate gap");
    sched = exact_christoffel_schedule(gp, geo.options());
    extra["bottleneck"] = gp.bottleneck;
  } else {
    const GeodesicParams p = geo.params();
    sched = solve_geodesic(p, geo.options());
    extra["residual"] = geodesic_residual(sched, [p](double s) { return bump_force(p, s); });
  }
  const fs::path dir(g.out_dir);
  const fs::path csv = dir / f.output;
  write_stream(csv, [&](std::ostream& os) { write_schedule_csv(sched, os); });
  json summary = schedule_summary(sched);
  summary.update(extra);
  fs::path meta = csv;
  meta.replace_extension(".json");
  write_json(meta, summary);
  if (f.T > 0.0) {
    const int p = trotter_layers(f.T, f.step);
    fs::path angles = csv;
    angles.replace_filename(csv.stem().string() + "_angles.json");
    write_json(angles, angles_to_json(qaoa_angles(sched, f.T, p)));
  }
  out << "slope minimum at u = " << summary["min_slope_u"].get<double>()
      << ", s = " << summary["min_slope_s"].get<double>() << "\n";
  return {{"output", f.output}, {"ideal_instance", f.ideal_instance}, {"T", f.T}, {"step", f.step},
          {"geodesic", geo.to_json()}};
}

struct SimulateFlags {
  std::string instance;
  std::string schedule = "linear";
  double T = 128.0;
  double step = 0.125;
  int order = 2;
  std::size_t max_spins = kDefaultStateVectorLimit;
};

json cmd_simulate(const Globals& g, const SimulateFlags& f, const GeodesicFlags& geo, std::ostream& out) {
  const IsingInstance inst = load_instance(f.instance);
  const ScheduleFunction sched = resolve_schedule(f.schedule, geo);
  const int p = trotter_layers(f.T, f.step);
  const auto psi = trotter_evolve(inst, sched, f.T, p, f.order, f.max_spins);
  const double prob = success_probability(psi, inst);
  json result = {{"instance", f.instance},
                 {"schedule", sched.id()},
                 {"T", f.T},
                 {"p", p},
                 {"order", f.order},
                 {"success_probability", prob},
                 {"norm", psi.norm()}};
  if (f.schedule == "linear") result["P_lin"] = prob;
  if (inst.n_spins() <= kDefaultDiagonalizationLimit)
    result["levels"] = level_distribution_to_json(eigenstate_distribution(psi, inst));
  write_json(fs::path(g.out_dir) / (stem_of(f.instance) + "_simulate.json"), result);
  out << "success probability " << prob << "\n";
  return {{"instance", f.instance}, {"schedule", f.schedule}, {"T", f.T}, {"step", f.step},
          {"order", f.order}, {"max_spins", f.max_spins}, {"geodesic", geo.to_json()}};
}

struct SpectrumFlags {
  std::string instance;
  int r = 5;
  int refine = 10;
  std::size_t max_spins = kDefaultDiagonalizationLimit;
  bool metric = false;
};

json cmd_spectrum(const Globals& g, const SpectrumFlags& f, std::ostream& out) {
  const IsingInstance inst = load_instance(f.instance);
  const auto gp = gap_profile(inst, f.r, f.refine, f.max_spins);
  const fs::path dir(g.out_dir);
  const std::string stem = stem_of(f.instance);
  write_stream(dir / (stem + "_gap.csv"), [&](std::ostream& os) { write_gap_csv(gp, os); });
  json summary = {{"bottleneck", gp.bottleneck},
                  {"min_gap", gp.min_gap},
                  {"degenerate", gp.degenerate},
                  {"resolution_exponent", gp.resolution_exponent},
                  {"refine_exponent", gp.refine_exponent}};
  if (f.metric) {
    const Eigen::Matrix2d m = metric_tensor(inst, gp.bottleneck);
    summary["metric"] = {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
    summary["pullback_metric"] = pullback_metric(m);
    summary["inverse_gap_squared"] = 1.0 / (gp.min_gap * gp.min_gap);
  }
  write_json(dir / (stem + "_spectrum.json"), summary);
  out << "s* = " << gp.bottleneck << ", gap = " << gp.min_gap << "\n";
  return {{"instance", f.instance}, {"r", f.r}, {"refine", f.refine}, {"max_spins", f.max_spins},
          {"metric", f.metric}};
}

struct BenchFlags {
  std::string instances;
  std::vector<double> T_list{128.0, 256.0, 512.0, 1024.0};
  double step = 0.125;
  double cutoff = 0.005;
  int linear_order = 2;
  int adaptive_order = 1;
  std::string effective;
  bool ideal = false;
  std::size_t jobs = 1;
  std::string output = "report";
};

std::vector<std::string> instance_files(const std::string& dir) {
  if (!fs::is_directory(dir)) throw InvalidArgument("not a directory: " + dir);
  std::vector<std::string> files;
  const fs::path manifest = fs::path(dir) / "mining.json";
  if (fs::exists(manifest)) {
    const json m = json::parse(read_file(manifest.string()));
    for (const auto& e : m.at("instances")) files.push_back((fs::path(dir) / e.at("file").get<std::string>()).string());
    return files;
  }
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

json cmd_bench(const Globals& g, const BenchFlags& f, const GeodesicFlags& geo, std::ostream& out) {
  std::vector<IsingInstance> instances;
  for (const auto& file : instance_files(f.instances)) {
    IsingInstance inst = load_instance(file);
    if (!inst.label) inst.label = stem_of(file);
    instances.push_back(std::move(inst));
  }
  if (instances.empty()) throw InvalidArgument("bench: no instance files in " + f.instances);
  ComparisonConfig cfg;
  cfg.T_list = f.T_list;
  cfg.trotter_step = f.step;
  cfg.cutoff = f.cutoff;
  cfg.linear_order = f.linear_order;
  cfg.adaptive_order = f.adaptive_order;
  if (!f.effective.empty()) cfg.effective = load_schedule(f.effective);
  cfg.ideal = f.ideal;
  cfg.geodesic = geo.params();
  cfg.geodesic_options = geo.options();
  cfg.jobs = f.jobs;
  const auto report = run_comparison(instances, cfg);
  const fs::path dir(g.out_dir);
  json j = report_to_json(report);
  std::map<std::string, std::vector<std::size_t>> hist;
  for (const auto& r : report.rows) {
    if (r.failed) continue;
    auto& h = hist[format_double(r.T)];
    if (h.size() <= r.most_likely_level) h.resize(r.most_likely_level + 1, 0);
    ++h[r.most_likely_level];
  }
  j["level_histogram"] = hist;
  write_json(dir / (f.output + ".json"), j);
  write_stream(dir / (f.output + ".csv"), [&](std::ostream& os) { write_report_csv(report, os); });
  for (const auto& a : report.aggregates) {
    out << "T=" << a.T << " instances " << a.in_cutoff << "/" << a.total;
    if (a.improvement_ad) out << " improvement " << *a.improvement_ad;
    out << "\n";
  }
  return {{"instances", f.instances}, {"T", f.T_list}, {"step", f.step}, {"cutoff", f.cutoff},
          {"linear_order", f.linear_order}, {"adaptive_order", f.adaptive_order},
          {"effective", f.effective}, {"ideal", f.ideal}, {"jobs", f.jobs}, {"output", f.output},
          {"geodesic", geo.to_json()}};
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geodesic annealing schedules from semi-classical bottleneck prediction", "geoanneal"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--out-dir", g.out_dir, "Output directory")->envname("GEOANNEAL_OUT_DIR")->capture_default_str();
  app.add_flag("--manifest", g.manifest, "Write the resolved configuration next to the outputs");

  std::function<json()> action;
  std::string command;

  // generate
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 1;
  std::size_t gen_count = 1;
  std::string gen_sat;
  auto* gen = app.add_subcommand("generate", "Write random SK instances or map a MAX 2-SAT file");
  gen->add_option("--n", gen_n, "Number of spins")->check(CLI::Range(std::size_t{2}, std::size_t{64}));
  gen->add_option("--seed", gen_seed, "First seed")->capture_default_str();
  gen->add_option("--count", gen_count, "Number of instances (seeds seed, seed+1, ...)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--max2sat", gen_sat, "MAX 2-SAT file to map instead")->check(CLI::ExistingFile);
  gen->callback([&] {
    if (gen_sat.empty() && gen_n == 0) throw CLI::RequiredError("--n or --max2sat");
    action = [&] { return cmd_generate(g, gen_n, gen_seed, gen_count, gen_sat, out); };
  });

  // mine
  MiningConfig mc;
  auto* mine = app.add_subcommand("mine", "Two-stage hard-instance mining");
  mine->add_option("--n", mc.n, "Number of spins")->capture_default_str();
  mine->add_option("--pool", mc.pool_size, "Number of random instances screened")->capture_default_str();
  mine->add_option("--threshold", mc.frustration_threshold, "Stage 1 bound on min |n^z(T)|")
      ->capture_default_str();
  mine->add_option("--T", mc.screening_T, "Screening annealing time")->capture_default_str();
  mine->add_option("--cutoff", mc.cutoff, "Stage 2 bound on P_lin")->capture_default_str();
  mine->add_option("--step", mc.trotter_step, "Trotter step T/p")->capture_default_str();
  mine->add_option("--order", mc.order, "Trotter order")->capture_default_str();
  mine->add_option("--seed", mc.seed, "Seed of the first pool instance")->capture_default_str();
  mine->add_option("--target", mc.target_count, "Stop after this many survivors (0: screen the whole pool)")
      ->capture_default_str();
  mine->callback([&] {
    mc.validate();
    action = [&] { return cmd_mine(g, mc, out); };
  });

  // meanfield
  MeanFieldFlags mf;
  GeodesicFlags mf_geo;
  auto* meanfield = app.add_subcommand("meanfield", "Integrate the classical spin trajectories");
  meanfield->add_option("--instance", mf.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  meanfield->add_option("--T", mf.T, "Annealing time")->check(CLI::PositiveNumber)->capture_default_str();
  meanfield->add_option("--schedule", mf.schedule, "linear, geodesic or a schedule CSV")->capture_default_str();
  meanfield->add_option("--tol", mf.tol, "Integrator tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  meanfield->add_option("--grid", mf.grid, "Output grid points")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20))
      ->capture_default_str();
  add_geodesic_flags(meanfield, mf_geo, true);
  meanfield->callback([&] { action = [&] { return cmd_meanfield(g, mf, mf_geo, out); }; });

  // fluct
  FluctFlags fl;
  auto* fluct = app.add_subcommand("fluct", "Paramagnon fluctuations and bottleneck candidates");
  fluct->add_option("--instance", fl.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  fluct->add_option("--T", fl.T, "Annealing time")->check(CLI::PositiveNumber)->capture_default_str();
  fluct->add_option("--tol", fl.tol, "Fluctuation integrator tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  fluct->add_option("--mf-tol", fl.mf_tol, "Mean-field integrator tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fluct->add_option("--prominence", fl.peaks.prominence_fraction, "Minimum peak prominence (fraction of max)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  fluct->add_option("--s-min", fl.peaks.s_min, "Lower exclusion margin")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  fluct->add_option("--s-max", fl.peaks.s_max, "Upper exclusion margin")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  fluct->add_option("--max-candidates", fl.peaks.max_candidates, "Candidates kept")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fluct->callback([&] { action = [&] { return cmd_fluct(g, fl, out); }; });

  // schedule
  ScheduleFlags sf;
  GeodesicFlags sf_geo;
  auto* schedule = app.add_subcommand("schedule", "Solve the geodesic schedule equation");
  add_geodesic_flags(schedule, sf_geo, true);
  schedule->add_option("--output", sf.output, "Schedule CSV file name")->capture_default_str();
  schedule->add_option("--ideal-instance", sf.ideal_instance,
                       "Use the finite-difference Christoffel symbol of this instance's gap")
      ->check(CLI::ExistingFile);
  schedule->add_option("--T", sf.T, "Also export QAOA angles for this annealing time")->check(CLI::PositiveNumber);
  schedule->add_option("--step", sf.step, "Trotter step for the angle export")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  schedule->callback([&] { action = [&] { return cmd_schedule(g, sf, sf_geo, out); }; });

  // simulate
  SimulateFlags sim;
  GeodesicFlags sim_geo;
  auto* simulate = app.add_subcommand("simulate", "Trotterized state-vector annealing");
  simulate->add_option("--instance", sim.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--schedule", sim.schedule, "linear, geodesic or a schedule CSV")->capture_default_str();
  simulate->add_option("--T", sim.T, "Annealing time")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--step", sim.step, "Trotter step T/p")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--order", sim.order, "Trotter order")->check(CLI::IsMember({1, 2}))->capture_default_str();
  simulate->add_option("--max-spins", sim.max_spins, "State-vector size guard")->capture_default_str();
  add_geodesic_flags(simulate, sim_geo, true);
  simulate->callback([&] { action = [&] { return cmd_simulate(g, sim, sim_geo, out); }; });

  // spectrum
  SpectrumFlags sp;
  auto* spectrum = app.add_subcommand("spectrum", "Exact gap profile and bottleneck");
  spectrum->add_option("--instance", sp.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  spectrum->add_option("--r", sp.r, "Coarse grid exponent (spacing 2^-r)")->check(CLI::Range(1, 20))->capture_default_str();
  spectrum->add_option("--refine", sp.refine, "Refinement exponent")->check(CLI::Range(1, 40))->capture_default_str();
  spectrum->add_option("--max-spins", sp.max_spins, "Diagonalization size guard")->capture_default_str();
  spectrum->add_flag("--metric", sp.metric, "Also evaluate the metric tensor at the bottleneck");
  spectrum->callback([&] { action = [&] { return cmd_spectrum(g, sp, out); }; });

  // bench
  BenchFlags bf;
  GeodesicFlags bf_geo;
  auto* bench = app.add_subcommand("bench", "Linear vs adaptive comparison over an instance directory");
  bench->add_option("--instances", bf.instances, "Directory of instance JSON files")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--T", bf.T_list, "Annealing times")->delimiter(',')->capture_default_str();
  bench->add_option("--step", bf.step, "Trotter step T/p")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--cutoff", bf.cutoff, "Aggregate only instances with P_lin below this")->capture_default_str();
  bench->add_option("--linear-order", bf.linear_order, "Trotter order for the linear schedule")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  bench->add_option("--adaptive-order", bf.adaptive_order, "Trotter order for the other schedules")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  bench->add_option("--effective", bf.effective, "Fixed schedule CSV evaluated on every instance")
      ->check(CLI::ExistingFile);
  bench->add_flag("--ideal", bf.ideal, "Also run the geodesic centred on the exact bottleneck");
  bench->add_option("--jobs", bf.jobs, "Parallel instance workers")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--output", bf.output, "Report file stem")->capture_default_str();
  add_geodesic_flags(bench, bf_geo, false);
  bench->callback([&] { action = [&] { return cmd_bench(g, bf, bf_geo, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return 2;
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what());
    return 2;
  }

  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  try {
    const json config = action();
    if (g.manifest)
      write_json(fs::path(g.out_dir) / (command + ".manifest.json"),
                 {{"command", command}, {"version", "0.1.0"}, {"config", config}});
    return 0;
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what());
  } catch (const nlohmann::json::exception& e) {
    report_error(err, "parse-error", e.what());
  } catch (const std::exception& e) {
    report_error(err, "error", e.what());
  }
  return 1;
}

}  // namespace geoanneal::cli
