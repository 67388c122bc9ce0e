// linear_oracle.hpp
// Small-amplitude reference solutions.
//
// Linearising the sound-variable system about the rest state gives the damped
// wave equation v_tt - v_xx + a(t) v_t = 0. On a periodic box each Fourier mode
// obeys the scalar ODE
//
//   vhat'' + a(t) vhat' + xi^2 vhat = 0,
//
// integrated here with an adaptive Runge-Kutta-Fehlberg 7(8) pair. The module
// also builds manufactured-solution forcings for the full nonlinear system.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <fftw3.h>

#include "errors.hpp"
#include "gas_model.hpp"
#include "grid.hpp"
#include "initial_data.hpp"
#include "solver.hpp"

namespace eulerdamp {

struct ModeState {
  double xi = 0.0;
  std::complex<double> vhat{0.0, 0.0};
  std::complex<double> vhat_dot{0.0, 0.0};
  double t = 0.0;
};

inline constexpr double kOracleTol = 1e-10;

/// Integrates one mode from mode.t to `until` to local tolerance tol.
inline ModeState integrate_mode(const ModeState& mode, const DampingProfile& profile, double until,
                                double tol = kOracleTol) {
  if (!(until >= mode.t)) throw ConfigError("integrate_mode: until must be >= mode.t");
  if (!(tol > 0.0)) throw ConfigError("integrate_mode: tol must be > 0");
  ModeState out = mode;
  if (until == mode.t) return out;
  using State = std::array<double, 4>;  // Re v, Im v, Re v', Im v'
  State y{mode.vhat.real(), mode.vhat.imag(), mode.vhat_dot.real(), mode.vhat_dot.imag()};
  const double xi2 = mode.xi * mode.xi;
  auto rhs = [&](const State& s, State& ds, double t) {
    const double a = damping_coefficient(t, profile);
    ds[0] = s[2];
    ds[1] = s[3];
    ds[2] = -a * s[2] - xi2 * s[0];
    ds[3] = -a * s[3] - xi2 * s[1];
  };
  const double scale =
      std::max({std::abs(mode.vhat), std::abs(mode.vhat_dot) / std::max(1.0, std::abs(mode.xi)), 1e-300});
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(tol * scale, tol, ode::runge_kutta_fehlberg78<State>());
  const double period = 2.0 * M_PI / std::max(1.0, std::abs(mode.xi));
  ode::integrate_adaptive(stepper, rhs, y, mode.t, until, std::min(0.01 * period, until - mode.t));
  out.vhat = {y[0], y[1]};
  out.vhat_dot = {y[2], y[3]};
  out.t = until;
  return out;
}

namespace detail {

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

// FFTW's planner is not thread safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::vector<std::complex<double>> forward_dft(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  std::vector<double> in = f;
  std::vector<std::complex<double>> out(f.size() / 2 + 1);
  FftwPlan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
  return out;
}

inline std::vector<double> inverse_dft(std::vector<std::complex<double>> spec, std::size_t n) {
  std::vector<double> out(n);
  FftwPlan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(spec.data()),
                                    out.data(), FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

}  // namespace detail

/// Sound-variable field v = 2/(gamma-1) (c - 1) of a grid field.
inline std::vector<double> sound_variable(const GridField& f, const GasParams& gas) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = primitive_to_soundvars({f.rho[i], 0.0}, gas).v;
  return v;
}

/// Fourier-mode solution of the linearised problem on the periodic extension
/// of `grid`. Modes are advanced incrementally, so evaluating at increasing
/// times costs one integration overall.
class LinearOracle {
 public:
  LinearOracle(const InitialDataSpec& spec, const DampingProfile& profile, const GasParams& gas,
               const UniformGrid& grid, std::size_t n_modes = 0, double tol = kOracleTol)
      : profile_(profile), grid_(grid), tol_(tol) {
    const std::size_t n = grid.n_cells;
    if (n_modes == 0) n_modes = n / 2;
    if (n_modes > n / 2) throw ConfigError("linear oracle: n_modes must be <= n_cells/2");
    const GridField init = sample_initial(spec, grid);
    const std::vector<double> v0 = sound_variable(init, gas);
    std::vector<double> u0(n);
    for (std::size_t i = 0; i < n; ++i) u0[i] = init.velocity(i);
    const auto vh = detail::forward_dft(v0);
    const auto uh = detail::forward_dft(u0);
    double amax = 0.0;
    for (std::size_t k = 0; k < vh.size(); ++k) amax = std::max({amax, std::abs(vh[k]), std::abs(uh[k])});
    modes_.resize(vh.size());
    active_.assign(vh.size(), false);
    for (std::size_t k = 0; k < vh.size(); ++k) {
      ModeState& m = modes_[k];
      m.xi = 2.0 * M_PI * static_cast<double>(k) / grid.length();
      m.vhat = vh[k];
      // linearised mass equation: v_t = -u_x; the Nyquist mode has no
      // well-defined derivative and is left at rest
      const bool nyquist = (n % 2 == 0) && k == n / 2;
      m.vhat_dot = nyquist ? std::complex<double>{} : std::complex<double>(0.0, -m.xi) * uh[k];
      // modes above the cutoff or at roundoff level never contribute
      const double mag = std::abs(m.vhat) + std::abs(uh[k]);
      active_[k] = k <= n_modes && mag > 1e-15 * amax && amax > 0.0;
    }
  }

  double time() const { return t_; }
  const std::vector<ModeState>& modes() const { return modes_; }

  /// v(x_i, t) at the cell centers; t must not decrease between calls.
  std::vector<double> evaluate(double t) {
    if (t < t_) throw ConfigError("LinearOracle::evaluate: time must be non-decreasing");
    if (t > t_) {
      for (std::size_t k = 0; k < modes_.size(); ++k)
        if (active_[k]) modes_[k] = integrate_mode(modes_[k], profile_, t, tol_);
      t_ = t;
    }
    std::vector<std::complex<double>> spec(modes_.size());
    for (std::size_t k = 0; k < modes_.size(); ++k)
      if (active_[k]) spec[k] = modes_[k].vhat;
    return detail::inverse_dft(std::move(spec), grid_.n_cells);
  }

 private:
  DampingProfile profile_;
  UniformGrid grid_;
  double tol_;
  double t_ = 0.0;
  std::vector<ModeState> modes_;
  std::vector<bool> active_;
};

inline std::vector<double> linear_solution(const InitialDataSpec& spec, const DampingProfile& profile,
                                           const GasParams& gas, const UniformGrid& grid, double t,
                                           std::size_t n_modes = 0, double tol = kOracleTol) {
  if (!(t >= 0.0)) throw ConfigError("linear_solution: t must be >= 0");
  LinearOracle oracle(spec, profile, gas, grid, n_modes, tol);
  return oracle.evaluate(t);
}

// ---------------------------------------------------------------------------
// Manufactured solutions

/// Analytic target state and its first partial derivatives at one point.
struct AnalyticState {
  double rho = 1.0, rho_t = 0.0, rho_x = 0.0;
  double u = 0.0, u_t = 0.0, u_x = 0.0;
};

using AnalyticTarget = std::function<AnalyticState(double x, double t)>;

/// Residual of the damped Euler system evaluated on the target; adding it as
/// a source makes the target an exact solution.
inline SourceFn manufactured_forcing(AnalyticTarget target, const GasParams& gas, const DampingProfile& profile) {
  return [target = std::move(target), gas, profile](double x, double t) -> std::array<double, 2> {
    const AnalyticState s = target(x, t);
    const double a = damping_coefficient(t, profile);
    const double dpdrho = std::pow(s.rho, gas.gamma - 1.0);
    const double mass = s.rho_t + s.rho_x * s.u + s.rho * s.u_x;
    const double mom = s.rho_t * s.u + s.rho * s.u_t + s.rho_x * s.u * s.u + 2.0 * s.rho * s.u * s.u_x +
                       dpdrho * s.rho_x + a * s.rho * s.u;
    return {mass, mom};
  };
}

namespace detail {
// bump(s) = exp(-1/(1-s^2)) and its derivative
inline std::pair<double, double> bump_with_slope(double s) {
  if (std::abs(s) >= 1.0) return {0.0, 0.0};
  const double w = 1.0 - s * s;
  const double b = std::exp(-1.0 / w);
  return {b, -2.0 * s / (w * w) * b};
}
}  // namespace detail

/// Named analytic targets: "background"; "breathing" (rho = 1 + A(1 + sin t/2)
/// bump(x/w), u = 0); "traveling" (density and velocity bumps drifting at
/// speed 1/2 with an oscillating velocity amplitude).
inline AnalyticTarget make_target(const std::string& name, double amplitude = 0.1, double width = 1.0) {
  if (name == "background") return [](double, double) { return AnalyticState{}; };
  if (name == "breathing") {
    return [amplitude, width](double x, double t) {
      const auto [b, db] = detail::bump_with_slope(x / width);
      const double a = amplitude * (1.0 + 0.5 * std::sin(t));
      const double a_t = amplitude * 0.5 * std::cos(t);
      AnalyticState s;
      s.rho = 1.0 + a * b;
      s.rho_t = a_t * b;
      s.rho_x = a * db / width;
      return s;
    };
  }
  if (name == "traveling") {
    return [amplitude, width](double x, double t) {
      constexpr double c = 0.5;
      const double xi = (x - c * t) / width;
      const auto [b, db] = detail::bump_with_slope(xi);
      AnalyticState s;
      s.rho = 1.0 + amplitude * b;
      s.rho_x = amplitude * db / width;
      s.rho_t = -c * s.rho_x;
      const double ua = amplitude * std::cos(t);
      const double ua_t = -amplitude * std::sin(t);
      s.u = ua * b;
      s.u_x = ua * db / width;
      s.u_t = ua_t * b - c * s.u_x;
      return s;
    };
  }
  throw ConfigError("unknown manufactured target '" + name + "'");
}

}  // namespace eulerdamp
