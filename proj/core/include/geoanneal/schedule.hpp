#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "geoanneal/error.hpp"
#include "geoanneal/gap_profile.hpp"

namespace geoanneal {

// Monotone map s: [0, 1] -> [0, 1] sampled on a uniform grid in normalized
// time u = t/T, interpolated by monotone cubic Hermite segments.
class ScheduleFunction {
 public:
  inline static constexpr std::size_t kDefaultPoints = 1025;

  ScheduleFunction() = default;

  // `slopes` are ds/du at the samples; when empty they are estimated with the
  // Fritsch-Carlson rule. Slopes are limited so every segment is monotone.
  static ScheduleFunction from_samples(std::vector<double> samples,
                                       std::vector<double> slopes = {},
                                       std::string id = "custom");

  double operator()(double u) const;
  double slope(double u) const;

  // s^1(t) = 1 - s(t/T), the driver weight.
  double driver_weight(double t, double T) const { return 1.0 - (*this)(t / T); }
  // s^2(t) = s(t/T), the problem weight.
  double problem_weight(double t, double T) const { return (*this)(t / T); }

  std::size_t size() const { return samples_.size(); }
  double grid_spacing() const { return 1.0 / static_cast<double>(samples_.size() - 1); }
  double u_at(std::size_t k) const { return static_cast<double>(k) * grid_spacing(); }
  std::span<const double> samples() const { return samples_; }
  std::span<const double> slopes() const { return slopes_; }
  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

  // u at which the sampled slope is smallest, and the schedule value there.
  std::size_t min_slope_index() const;

  friend bool operator==(const ScheduleFunction&, const ScheduleFunction&) = default;

 private:
  std::vector<double> samples_;
  std::vector<double> slopes_;
  std::string id_;
};

ScheduleFunction linear_schedule(std::size_t points = ScheduleFunction::kDefaultPoints);

enum class BumpShape { cauchy, gaussian };

struct GeodesicParams {
  double center = 0.5;  // predicted bottleneck s~_*
  double sigma = 0.05;
  double gamma0 = 3.20;
  BumpShape shape = BumpShape::cauchy;

  void validate() const;
};

// -gamma0 (s - c) / ((s - c)^2 + sigma^2)
double lorentzian_force(const GeodesicParams& p, double s);

// Force for the configured bump shape. The Gaussian variant has the same
// extrema (+-gamma0 / (2 sigma) at c -+ sigma) with thin tails.
double bump_force(const GeodesicParams& p, double s);

struct GeodesicOptions {
  std::size_t points = ScheduleFunction::kDefaultPoints;
  double continuation_start = 1.0;
  double continuation_step = 0.25;
  double ode_tol = 1e-12;
  int max_iterations = 200;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_gamma0,
                   ScheduleFunction last_schedule)
      : Error(what),
        last_gamma0_(last_gamma0),
        last_schedule_(std::move(last_schedule)) {}
  double last_converged_gamma0() const noexcept { return last_gamma0_; }
  const ScheduleFunction& last_converged_schedule() const noexcept {
    return last_schedule_;
  }
  const char* kind() const noexcept override { return "convergence-error"; }

 private:
  double last_gamma0_;
  ScheduleFunction last_schedule_;
};

using Force = std::function<double(double)>;

// Solves s'' = -force(s) s'^2, s(0) = 0, s(1) = 1 by shooting on s'(0).
// `initial_slope` seeds the bracket search.
ScheduleFunction solve_geodesic_bvp(const Force& force, double initial_slope,
                                    const GeodesicOptions& opt,
                                    double* slope_out = nullptr);

// Geodesic schedule for the bump force, reached by continuation in gamma0
// starting at `continuation_start`.
ScheduleFunction solve_geodesic(const GeodesicParams& p,
                                const GeodesicOptions& opt = {});

// Christoffel symbol -(log gap)' from finite differences on the profile's
// sample points; central differences inside, one-sided at the ends.
std::vector<double> christoffel_from_gap(const GapProfile& gap);

// Geodesic schedule driven by the finite-difference Christoffel symbol of a
// gap profile (linearly interpolated between samples).
ScheduleFunction exact_christoffel_schedule(const GapProfile& gap,
                                            const GeodesicOptions& opt = {});

// Drift of the first integral  log s'(u) + int_0^{s(u)} force  over the grid:
// zero for an exact solution of the geodesic equation.
double geodesic_residual(const ScheduleFunction& sched, const Force& force);

struct QaoaAngles {
  std::vector<double> beta;
  std::vector<double> gamma;
  double T = 0.0;
  int p = 0;
};

// beta_k = tau s^1(Tk/p), gamma_k = tau s^2(Tk/p), tau = T/p, k = 1..p.
QaoaAngles qaoa_angles(const ScheduleFunction& sched, double T, int p);
nlohmann::json angles_to_json(const QaoaAngles& a);

// CSV with columns u,s,ds_du. Reading accepts the two-column form u,s as
// well, in which case slopes are re-estimated.
void write_schedule_csv(const ScheduleFunction& sched, std::ostream& out);
ScheduleFunction read_schedule_csv(const std::string& text, std::string id = "file");
ScheduleFunction load_schedule(const std::string& path);

}  // namespace geoanneal
