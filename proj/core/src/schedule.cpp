#include "geoanneal/schedule.hpp"

#include <Eigen/Core>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <fstream>
#include <sstream>

#include "geoanneal/csv.hpp"
#include "geoanneal/ode.hpp"

namespace geoanneal {

namespace {

// Fritsch-Carlson slope estimate for monotone data on a uniform grid.
std::vector<double> pchip_slopes(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> m(n, 0.0);
  if (n == 2) {
    m[0] = m[1] = (y[1] - y[0]) / h;
    return m;
  }
  std::vector<double> d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) d[k] = (y[k + 1] - y[k]) / h;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] * d[k] <= 0.0) {
      m[k] = 0.0;
    } else {
      m[k] = 2.0 / (1.0 / d[k - 1] + 1.0 / d[k]);
    }
  }
  auto end_slope = [](double d0, double d1) {
    double s = (3.0 * d0 - d1) / 2.0;
    if (s * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return s;
  };
  m[0] = end_slope(d[0], d[1]);
  m[n - 1] = end_slope(d[n - 2], d[n - 3]);
  return m;
}

// Restricts Hermite slopes to the Fritsch-Carlson monotonicity region.
void limit_slopes(const std::vector<double>& y, std::vector<double>& m, double h) {
  for (std::size_t k = 0; k + 1 < y.size(); ++k) {
    const double delta = (y[k + 1] - y[k]) / h;
    m[k] = std::max(m[k], 0.0);
    m[k + 1] = std::max(m[k + 1], 0.0);
    const double a = m[k] / delta;
    const double b = m[k + 1] / delta;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      m[k] = tau * a * delta;
      m[k + 1] = tau * b * delta;
    }
  }
}

}  // namespace

ScheduleFunction ScheduleFunction::from_samples(std::vector<double> samples,
                                                std::vector<double> slopes,
                                                std::string id) {
  if (samples.size() < 2) throw InvalidArgument("schedule: need at least two samples");
  if (samples.front() != 0.0 || samples.back() != 1.0)
    throw InvalidArgument("schedule: endpoints must be exactly 0 and 1");
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    if (!(samples[k + 1] > samples[k]))
      throw InvalidArgument("schedule: samples must be strictly increasing");
  }
  const double h = 1.0 / static_cast<double>(samples.size() - 1);
  if (slopes.empty()) {
    slopes = pchip_slopes(samples, h);
  } else if (slopes.size() != samples.size()) {
    throw InvalidArgument("schedule: slope count differs from sample count");
  }
  limit_slopes(samples, slopes, h);
  ScheduleFunction f;
  f.samples_ = std::move(samples);
  f.slopes_ = std::move(slopes);
  f.id_ = std::move(id);
  return f;
}

double ScheduleFunction::operator()(double u) const {
  if (u <= 0.0) return samples_.front();
  if (u >= 1.0) return samples_.back();
  const double h = grid_spacing();
  const double x = u / h;
  auto k = static_cast<std::size_t>(x);
  if (k + 1 >= samples_.size()) k = samples_.size() - 2;
  const double t = x - static_cast<double>(k);
  const double t2 = t * t, t3 = t2 * t;
  const double v = (2 * t3 - 3 * t2 + 1) * samples_[k] + (t3 - 2 * t2 + t) * h * slopes_[k] +
                   (-2 * t3 + 3 * t2) * samples_[k + 1] + (t3 - t2) * h * slopes_[k + 1];
  return std::clamp(v, 0.0, 1.0);
}

double ScheduleFunction::slope(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  const double h = grid_spacing();
  const double x = u / h;
  auto k = static_cast<std::size_t>(x);
  if (k + 1 >= samples_.size()) k = samples_.size() - 2;
  const double t = x - static_cast<double>(k);
  const double t2 = t * t;
  const double dv = (6 * t2 - 6 * t) * samples_[k] / h + (3 * t2 - 4 * t + 1) * slopes_[k] +
                    (-6 * t2 + 6 * t) * samples_[k + 1] / h + (3 * t2 - 2 * t) * slopes_[k + 1];
  return dv;
}

std::size_t ScheduleFunction::min_slope_index() const {
  return static_cast<std::size_t>(
      std::min_element(slopes_.begin(), slopes_.end()) - slopes_.begin());
}

ScheduleFunction linear_schedule(std::size_t points) {
  if (points < 2) throw InvalidArgument("linear_schedule: need at least two points");
  std::vector<double> s(points);
  const double h = 1.0 / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) s[k] = static_cast<double>(k) * h;
  s.back() = 1.0;
  return ScheduleFunction::from_samples(std::move(s), std::vector<double>(points, 1.0),
                                        "linear");
}

void GeodesicParams::validate() const {
  if (!(center > 0.0 && center < 1.0))
    throw InvalidArgument("geodesic: center must lie in (0, 1)");
  if (!(sigma > 0.0)) throw InvalidArgument("geodesic: sigma must be positive");
  if (!(gamma0 >= 0.0) || !std::isfinite(gamma0))
    throw InvalidArgument("geodesic: gamma0 must be non-negative");
}

double lorentzian_force(const GeodesicParams& p, double s) {
  const double d = s - p.center;
  return -p.gamma0 * d / (d * d + p.sigma * p.sigma);
}

double bump_force(const GeodesicParams& p, double s) {
  if (p.shape == BumpShape::cauchy) return lorentzian_force(p, s);
  const double x = (s - p.center) / p.sigma;
  return -(p.gamma0 / (2.0 * p.sigma)) * std::exp(0.5) * x * std::exp(-0.5 * x * x);
}

namespace {

struct ShotResult {
  double end_value;  // s(1), or the value at which a blow-up was cut off
  bool blew_up;
};

ShotResult shoot(const Force& force, double slope0, double tol) {
  ode::Options o;
  o.rtol = tol;
  o.atol = tol;
  using Vec = Eigen::Vector2d;
  auto rhs = [&](double, const Vec& y, Vec& dy) {
    dy[0] = y[1];
    dy[1] = -force(y[0]) * y[1] * y[1];
  };
  bool blew_up = false;
  Vec end = Vec::Zero();
  try {
    end = ode::integrate(rhs, 0.0, 1.0, Vec(0.0, slope0), o, [&](const ode::Segment<Vec>& seg) {
      const Vec y1 = seg.r1 + seg.r2;
      if (y1[0] > 2.0 || !std::isfinite(y1[0])) {
        blew_up = true;
        return false;
      }
      return true;
    });
  } catch (const IntegrationError&) {
    // Finite-time blow-up shows up as step-size collapse; it is an overshoot.
    return {3.0, true};
  }
  if (blew_up) return {std::max(end[0], 2.0), true};
  return {end[0], false};
}

}  // namespace

ScheduleFunction solve_geodesic_bvp(const Force& force, double initial_slope,
                                    const GeodesicOptions& opt, double* slope_out) {
  if (opt.points < 3) throw InvalidArgument("geodesic: need at least three grid points");
  auto miss = [&](double v0) { return shoot(force, v0, opt.ode_tol).end_value - 1.0; };

  double lo = std::max(initial_slope, 1e-12);
  double hi = lo;
  double flo = miss(lo);
  double fhi = flo;
  int expand = 0;
  if (flo < 0.0) {
    while (fhi < 0.0) {
      if (++expand > 200) throw Error("geodesic: no upper bracket for the initial slope");
      lo = hi;
      flo = fhi;
      hi *= 2.0;
      fhi = miss(hi);
    }
  } else {
    while (flo > 0.0) {
      if (++expand > 200) throw Error("geodesic: no lower bracket for the initial slope");
      hi = lo;
      fhi = flo;
      lo *= 0.5;
      flo = miss(lo);
    }
  }

  double v0 = lo;
  if (flo == 0.0) {
    v0 = lo;
  } else if (fhi == 0.0) {
    v0 = hi;
  } else {
    std::uintmax_t iters = static_cast<std::uintmax_t>(opt.max_iterations);
    auto r = boost::math::tools::toms748_solve(
        miss, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iters);
    if (iters >= static_cast<std::uintmax_t>(opt.max_iterations))
      throw Error("geodesic: shooting did not converge");
    const double ma = std::abs(miss(r.first));
    const double mb = std::abs(miss(r.second));
    v0 = ma <= mb ? r.first : r.second;
  }

  // Resample on the output grid, keeping exact slopes for the interpolant.
  std::vector<double> grid(opt.points);
  for (std::size_t k = 0; k < opt.points; ++k)
    grid[k] = static_cast<double>(k) / static_cast<double>(opt.points - 1);
  grid.back() = 1.0;
  ode::Options o;
  o.rtol = opt.ode_tol;
  o.atol = opt.ode_tol;
  using Vec = Eigen::Vector2d;
  auto rhs = [&](double, const Vec& y, Vec& dy) {
    dy[0] = y[1];
    dy[1] = -force(y[0]) * y[1] * y[1];
  };
  const auto states = ode::integrate_on_grid(rhs, grid, Vec(0.0, v0), o);
  if (states.size() != grid.size())
    throw Error("geodesic: solution did not reach u = 1");
  const double end_miss = states.back()[0] - 1.0;
  if (!(std::abs(end_miss) <= 1e-8)) {
    std::ostringstream os;
    os << "geodesic: boundary condition missed by " << end_miss;
    throw Error(os.str());
  }
  std::vector<double> s(grid.size()), m(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    s[k] = states[k][0];
    m[k] = states[k][1];
  }
  s.front() = 0.0;
  s.back() = 1.0;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    if (!(s[k + 1] > s[k])) throw Error("geodesic: solution is not strictly increasing");
  }
  if (slope_out) *slope_out = v0;
  return ScheduleFunction::from_samples(std::move(s), std::move(m), "geodesic");
}

ScheduleFunction solve_geodesic(const GeodesicParams& p, const GeodesicOptions& opt) {
  p.validate();
  if (!(opt.continuation_step > 0.0 && opt.continuation_step <= 0.25))
    throw InvalidArgument("geodesic: continuation step must lie in (0, 0.25]");

  std::vector<double> ladder;
  if (p.gamma0 <= opt.continuation_start) {
    ladder.push_back(p.gamma0);
  } else {
    for (double g = opt.continuation_start; g < p.gamma0 - 1e-12; g += opt.continuation_step)
      ladder.push_back(g);
    ladder.push_back(p.gamma0);
  }

  double slope = 1.0;
  double last_gamma0 = 0.0;
  ScheduleFunction last = linear_schedule(opt.points);
  ScheduleFunction current;
  for (double g : ladder) {
    GeodesicParams step = p;
    step.gamma0 = g;
    try {
      current = solve_geodesic_bvp([step](double s) { return bump_force(step, s); }, slope,
                                   opt, &slope);
    } catch (const ConvergenceError&) {
      throw;
    } catch (const Error& e) {
      std::ostringstream os;
      os << "geodesic: continuation failed at gamma0=" << g << " (" << e.what() << ")";
      throw ConvergenceError(os.str(), last_gamma0, last);
    }
    last = current;
    last_gamma0 = g;
  }
  std::ostringstream id;
  id << "geodesic(center=" << p.center << ",sigma=" << p.sigma << ",gamma0=" << p.gamma0
     << (p.shape == BumpShape::gaussian ? ",gaussian" : "") << ")";
  current.set_id(id.str());
  return current;
}

std::vector<double> christoffel_from_gap(const GapProfile& gap) {
  const std::size_t n = gap.s.size();
  if (n < 2 || gap.gap.size() != n) throw InvalidArgument("gap profile: need matching samples");
  std::vector<double> L(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(gap.gap[i] > 0.0) || !std::isfinite(gap.gap[i]))
      throw DegenerateError("gap profile: nonpositive gap sample at s=" + std::to_string(gap.s[i]));
    L[i] = std::log(gap.gap[i]);
  }
  std::vector<double> christoffel(n);
  christoffel[0] = -(L[1] - L[0]) / (gap.s[1] - gap.s[0]);
  christoffel[n - 1] = -(L[n - 1] - L[n - 2]) / (gap.s[n - 1] - gap.s[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = gap.s[i] - gap.s[i - 1];
    const double h2 = gap.s[i + 1] - gap.s[i];
    const double d = (h1 * h1 * L[i + 1] - h2 * h2 * L[i - 1] + (h2 * h2 - h1 * h1) * L[i]) /
                     (h1 * h2 * (h1 + h2));
    christoffel[i] = -d;
  }
  return christoffel;
}

ScheduleFunction exact_christoffel_schedule(const GapProfile& gap, const GeodesicOptions& opt) {
  const auto christoffel = christoffel_from_gap(gap);
  const auto& xs = gap.s;
  Force force = [xs, christoffel](double s) {
    if (s <= xs.front()) return christoffel.front();
    if (s >= xs.back()) return christoffel.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double w = (s - xs[k]) / (xs[k + 1] - xs[k]);
    return (1.0 - w) * christoffel[k] + w * christoffel[k + 1];
  };
  auto sched = solve_geodesic_bvp(force, 1.0, opt);
  std::ostringstream id;
  id << "ideal-christoffel(s*=" << gap.bottleneck << ")";
  sched.set_id(id.str());
  return sched;
}

double geodesic_residual(const ScheduleFunction& sched, const Force& force) {
  const auto s = sched.samples();
  const auto m = sched.slopes();
  double accumulated = 0.0;  // int_0^{s_k} force
  const double q0 = std::log(m[0]);
  double worst = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    // Grid cells are narrow next to the bump width, so a fixed rule is exact
    // to rounding.
    accumulated += boost::math::quadrature::gauss<double, 20>::integrate(force, s[k - 1], s[k]);
    const double q = std::log(m[k]) + accumulated;
    worst = std::max(worst, std::abs(q - q0));
  }
  return worst;
}

QaoaAngles qaoa_angles(const ScheduleFunction& sched, double T, int p) {
  if (p < 1) throw InvalidArgument("qaoa_angles: p must be at least 1");
  if (!(T > 0.0)) throw InvalidArgument("qaoa_angles: T must be positive");
  QaoaAngles a;
  a.T = T;
  a.p = p;
  const double tau = T / p;
  a.beta.resize(static_cast<std::size_t>(p));
  a.gamma.resize(static_cast<std::size_t>(p));
  for (int k = 1; k <= p; ++k) {
    const double t = T * k / p;
    a.beta[k - 1] = tau * sched.driver_weight(t, T);
    a.gamma[k - 1] = tau * sched.problem_weight(t, T);
  }
  return a;
}

nlohmann::json angles_to_json(const QaoaAngles& a) {
  return {{"T", a.T}, {"p", a.p}, {"beta", a.beta}, {"gamma", a.gamma}};
}

void write_schedule_csv(const ScheduleFunction& sched, std::ostream& out) {
  CsvWriter csv(out, {"u", "s", "ds_du"});
  for (std::size_t k = 0; k < sched.size(); ++k)
    csv.row(sched.u_at(k), sched.samples()[k], sched.slopes()[k]);
}

ScheduleFunction read_schedule_csv(const std::string& text, std::string id) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> u, s, slope;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && (line.rfind("u,", 0) == 0)) continue;
    std::vector<double> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        cells.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(line_no, "schedule CSV: malformed number '" + cell + "'");
      }
    }
    if (columns == 0) columns = cells.size();
    if (cells.size() != columns || (columns != 2 && columns != 3))
      throw ParseError(line_no, "schedule CSV: expected 2 or 3 columns");
    u.push_back(cells[0]);
    s.push_back(cells[1]);
    if (columns == 3) slope.push_back(cells[2]);
  }
  if (u.size() < 2) throw ParseError(line_no, "schedule CSV: need at least two samples");
  const double h = 1.0 / static_cast<double>(u.size() - 1);
  for (std::size_t k = 0; k < u.size(); ++k)
    if (std::abs(u[k] - static_cast<double>(k) * h) > 1e-9)
      throw InvalidArgument("schedule CSV: u must be a uniform grid on [0, 1]");
  return ScheduleFunction::from_samples(std::move(s), std::move(slope), std::move(id));
}

ScheduleFunction load_schedule(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open schedule file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return read_schedule_csv(ss.str(), "file:" + path);
}

}  // namespace geoanneal
