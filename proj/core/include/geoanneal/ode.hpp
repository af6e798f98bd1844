#pragma once

// Adaptive Dormand-Prince 5(4) integrator with the classic fourth-order
// continuous extension. Header-only, generic over Eigen column vectors
// (real or complex). Shared by the mean-field, fluctuation and schedule
// solvers.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "geoanneal/error.hpp"

namespace geoanneal::ode {

struct Options {
  double rtol = 1e-8;
  double atol = 1e-8;
  double initial_step = 0.0;  // 0 selects a step automatically
  double max_step = 0.0;      // 0 means unbounded
  std::size_t max_steps = 50'000'000;
};

namespace detail {
// Butcher tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113,
                        a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                        e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output.
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;
}  // namespace detail

// One accepted step [t0, t0 + h] with its interpolation coefficients.
template <class Vec>
struct Segment {
  double t0 = 0.0;
  double h = 0.0;
  Vec r1, r2, r3, r4, r5;

  double t1() const { return t0 + h; }

  Vec operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }

  // Derivative of the interpolant with respect to t.
  Vec derivative(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    const Vec inner = r4 + th1 * r5;
    const Vec mid = r3 + th * inner;
    const Vec d_mid = inner - th * r5;
    const Vec outer = r2 + th1 * mid;
    const Vec d_outer = -mid + th1 * d_mid;
    return (outer + th * d_outer) / h;
  }
};

// Piecewise dense solution covering [t_begin, t_end].
template <class Vec>
class DenseSolution {
 public:
  DenseSolution() = default;
  explicit DenseSolution(std::vector<Segment<Vec>> segments)
      : segments_(std::move(segments)) {}

  bool empty() const { return segments_.empty(); }
  double t_begin() const { return segments_.front().t0; }
  double t_end() const { return segments_.back().t1(); }
  std::size_t steps() const { return segments_.size(); }
  std::span<const Segment<Vec>> segments() const { return segments_; }

  const Segment<Vec>& segment_at(double t) const {
    auto it = std::upper_bound(
        segments_.begin(), segments_.end(), t,
        [](double v, const Segment<Vec>& s) { return v < s.t1(); });
    if (it == segments_.end()) return segments_.back();
    return *it;
  }

  Vec operator()(double t) const { return segment_at(t)(t); }
  Vec derivative(double t) const { return segment_at(t).derivative(t); }

 private:
  std::vector<Segment<Vec>> segments_;
};

namespace detail {

template <class Vec>
double error_norm(const Vec& err, const Vec& y0, const Vec& y1,
                  const Options& opt) {
  const auto n = err.size();
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale =
        opt.atol + opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = std::abs(err[i]) / scale;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

template <class Vec, class Rhs>
double initial_step(Rhs& f, double t0, const Vec& y0, const Vec& f0,
                    double span, const Options& opt) {
  double d0 = 0.0, d1 = 0.0;
  for (Eigen::Index i = 0; i < y0.size(); ++i) {
    const double sc = opt.atol + opt.rtol * std::abs(y0[i]);
    d0 += std::norm(y0[i] / sc);
    d1 += std::norm(f0[i] / sc);
  }
  const double n = std::max<double>(1.0, static_cast<double>(y0.size()));
  d0 = std::sqrt(d0 / n);
  d1 = std::sqrt(d1 / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  Vec y1 = y0 + h0 * f0;
  Vec f1(y0.size());
  f(t0 + h0, y1, f1);
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < y0.size(); ++i) {
    const double sc = opt.atol + opt.rtol * std::abs(y0[i]);
    d2 += std::norm((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / n) / h0;
  const double dm = std::max(d1, d2);
  const double h1 =
      dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace detail

// Integrates y' = f(t, y) from t0 to t1 (t1 > t0). `f(t, y, dydt)` writes the
// derivative. `on_step(segment)` is called for every accepted step and returns
// false to stop early. Returns the state at the last accepted time.
template <class Vec, class Rhs, class Observer>
Vec integrate(Rhs&& f, double t0, double t1, Vec y, const Options& opt,
              Observer&& on_step) {
  using namespace detail;
  if (!(t1 > t0)) throw InvalidArgument("ode: t1 must exceed t0");
  const auto n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n),
      err(n);
  f(t0, y, k1);
  double t = t0;
  double h = opt.initial_step > 0.0
                 ? opt.initial_step
                 : initial_step(f, t0, y, k1, t1 - t0, opt);
  if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
  double err_prev = 1e-4;
  bool rejected_last = false;

  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    if (t + h > t1 || t1 - (t + h) < 1e-12 * std::abs(t1)) h = t1 - t;
    const double h_floor = 1e-14 * std::max(1.0, std::abs(t));
    if (h < h_floor) throw IntegrationError(t, "ode: step size underflow");

    ytmp = y + h * a21 * k1;
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(t + h, ynew, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double en = error_norm(err, y, ynew, opt);
    if (!std::isfinite(en)) en = 1e10;
    if (en <= 1.0) {
      Segment<Vec> seg;
      seg.t0 = t;
      seg.h = h;
      seg.r1 = y;
      seg.r2 = ynew - y;
      seg.r3 = h * k1 - seg.r2;
      seg.r4 = seg.r2 - h * k7 - seg.r3;
      seg.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      t = (h == t1 - seg.t0) ? t1 : t + h;
      y = ynew;
      k1 = k7;
      const bool keep_going = on_step(static_cast<const Segment<Vec>&>(seg));
      if (t >= t1 || !keep_going) return y;
      // PI step control (Hairer's beta = 0.04)
      double fac = 0.9 * std::pow(en, -0.17) * std::pow(err_prev, 0.04);
      if (en == 0.0) fac = 10.0;
      fac = std::clamp(fac, 0.2, 10.0);
      if (rejected_last) fac = std::min(fac, 1.0);
      h *= fac;
      err_prev = std::max(en, 1e-4);
      rejected_last = false;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      rejected_last = true;
    }
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
  }
  throw IntegrationError(t, "ode: step budget exhausted");
}

// Integrates and keeps every step for dense evaluation.
template <class Vec, class Rhs>
DenseSolution<Vec> integrate_dense(Rhs&& f, double t0, double t1, Vec y0,
                                   const Options& opt) {
  std::vector<Segment<Vec>> segs;
  integrate(std::forward<Rhs>(f), t0, t1, std::move(y0), opt,
            [&](const Segment<Vec>& s) {
              segs.push_back(s);
              return true;
            });
  return DenseSolution<Vec>(std::move(segs));
}

// Integrates and records the interpolated state at each time of `grid`
// (increasing, grid.front() is the initial time).
template <class Vec, class Rhs>
std::vector<Vec> integrate_on_grid(Rhs&& f, std::span<const double> grid,
                                   Vec y0, const Options& opt) {
  std::vector<Vec> out;
  out.reserve(grid.size());
  out.push_back(y0);
  std::size_t next = 1;
  if (grid.size() < 2) return out;
  integrate(std::forward<Rhs>(f), grid.front(), grid.back(), std::move(y0),
            opt, [&](const Segment<Vec>& s) {
              const double edge = s.t1() + 1e-13 * std::max(1.0, std::abs(s.t1()));
              while (next < grid.size() && grid[next] <= edge) {
                out.push_back(next + 1 == grid.size() ? Vec(s.r1 + s.r2)
                                                      : s(grid[next]));
                ++next;
              }
              return true;
            });
  return out;
}

}  // namespace geoanneal::ode
