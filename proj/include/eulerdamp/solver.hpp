// solver.hpp
// Finite-volume integrator for the isentropic Euler system with time-decayed
// damping:
//
//   rho_t + (rho u)_x = 0
//   (rho u)_t + (rho u^2 + p(rho))_x = -a(t) rho u,   a(t) = mu/(1+t)^lambda
//
// Hyperbolic part: MUSCL-Hancock (minmod slopes on conserved variables,
// half-step predictor) with a Rusanov interface flux and zero-gradient ghosts.
// Damping: exact integrating factor applied in a Strang splitting
//   D(dt/2) H(dt) D(dt/2).
// An optional analytic source (manufactured solutions) is integrated inside
// the D half-steps.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gas_model.hpp"
#include "grid.hpp"

namespace eulerdamp {

struct SolverConfig {
  double cfl = 0.4;
  std::string limiter = "minmod";
  std::string flux = "rusanov";
  double t_end = 10.0;
  double snapshot_dt = 1.0;
  // abort when max|u_x| + max|rho_x| reaches this value
  double gradient_cap = 1e4;
  // abort when (max|u_x| + max|rho_x|) / (sup|u| + sup|rho-1|) reaches this
  // value; the ratio is an inverse length and is unchanged by the damping's
  // uniform amplitude decay. Non-positive disables the check.
  double steepness_cap = 5.0;
  // double the domain (merging cell pairs) when the perturbation approaches
  // the boundary
  bool regrid = false;

  void validate() const {
    if (!(cfl > 0.0 && cfl <= 0.9)) throw ConfigError("solver.cfl must be in (0, 0.9]");
    if (limiter != "minmod") throw ConfigError("unsupported limiter '" + limiter + "'");
    if (flux != "rusanov") throw ConfigError("unsupported flux '" + flux + "'");
    if (!(t_end > 0.0)) throw ConfigError("solver.t_end must be > 0");
    if (!(snapshot_dt >= 0.0)) throw ConfigError("solver.snapshot_dt must be >= 0");
    if (!(gradient_cap > 0.0)) throw ConfigError("solver.gradient_cap must be > 0");
  }
};

enum class StepFlag { ok, vacuum, nonfinite };

inline const char* to_string(StepFlag f) {
  switch (f) {
    case StepFlag::ok: return "ok";
    case StepFlag::vacuum: return "vacuum";
    case StepFlag::nonfinite: return "nonfinite";
  }
  return "?";
}

struct StepOutcome {
  GridField field;
  double dt_used = 0.0;
  double max_wave_speed = 0.0;
  StepFlag flag = StepFlag::ok;
};

/// Analytic source (S_rho, S_m) at (x, t), added to the right-hand side.
using SourceFn = std::function<std::array<double, 2>(double x, double t)>;

namespace detail {

// Pressure and sound speed with fast paths for the common exponents.
struct Eos {
  double gamma;
  double inv_gamma;
  double half_gm1;

  explicit Eos(const GasParams& g) : gamma(g.gamma), inv_gamma(1.0 / g.gamma), half_gm1(0.5 * (g.gamma - 1.0)) {}

  double p(double rho) const {
    if (gamma == 2.0) return 0.5 * rho * rho;
    if (gamma == 3.0) return rho * rho * rho * inv_gamma;
    return std::pow(rho, gamma) * inv_gamma;
  }
  double c(double rho) const {
    if (gamma == 2.0) return std::sqrt(rho);
    if (gamma == 3.0) return rho;
    return std::pow(rho, half_gm1);
  }
};

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace detail

inline double max_wave_speed(const GridField& field, const GasParams& gas) {
  const detail::Eos eos(gas);
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double rho = field.rho[i];
    if (!std::isfinite(rho) || !std::isfinite(field.momentum[i]))
      throw NumericalError("non-finite state in cell " + std::to_string(i));
    if (!(rho > kRhoMin)) throw DomainError("vacuum in cell " + std::to_string(i));
    s = std::max(s, std::abs(field.momentum[i] / rho) + eos.c(rho));
  }
  return s;
}

inline double compute_dt(const GridField& field, double cfl, const GasParams& gas) {
  return cfl * field.dx() / max_wave_speed(field, gas);
}

/// Reusable buffers for the MUSCL-Hancock update.
class HyperbolicStepper {
 public:
  explicit HyperbolicStepper(const GasParams& gas) : eos_(gas) {}

  /// Advances `field` in place by dt. Returns the flag and the largest
  /// interface signal speed used by the Rusanov flux.
  StepFlag step(GridField& field, double dt, double& max_speed) {
    const std::size_t n = field.size();
    const std::size_t ne = n + 4;  // two ghosts per side
    resize(ne);
    for (std::size_t i = 0; i < n; ++i) {
      rho_[i + 2] = field.rho[i];
      mom_[i + 2] = field.momentum[i];
    }
    rho_[0] = rho_[1] = field.rho[0];
    mom_[0] = mom_[1] = field.momentum[0];
    rho_[n + 2] = rho_[n + 3] = field.rho[n - 1];
    mom_[n + 2] = mom_[n + 3] = field.momentum[n - 1];

    const double half_ratio = 0.5 * dt / field.dx();
    // predicted face states for cells 1 .. n+2
    for (std::size_t i = 1; i + 1 < ne; ++i) {
      const double dr = detail::minmod(rho_[i] - rho_[i - 1], rho_[i + 1] - rho_[i]);
      const double dm = detail::minmod(mom_[i] - mom_[i - 1], mom_[i + 1] - mom_[i]);
      const double rl = rho_[i] - 0.5 * dr, rr = rho_[i] + 0.5 * dr;
      const double ml = mom_[i] - 0.5 * dm, mr = mom_[i] + 0.5 * dm;
      if (!(rl > kRhoMin) || !(rr > kRhoMin)) return StepFlag::vacuum;
      const double fl1 = ml, fl2 = ml * ml / rl + eos_.p(rl);
      const double fr1 = mr, fr2 = mr * mr / rr + eos_.p(rr);
      const double dr_t = half_ratio * (fl1 - fr1);
      const double dm_t = half_ratio * (fl2 - fr2);
      left_rho_[i] = rl + dr_t;
      left_mom_[i] = ml + dm_t;
      right_rho_[i] = rr + dr_t;
      right_mom_[i] = mr + dm_t;
      if (!(left_rho_[i] > kRhoMin) || !(right_rho_[i] > kRhoMin)) return StepFlag::vacuum;
    }
    // interface k sits between extended cells k+1 and k+2, k = 0 .. n
    double smax = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      const std::size_t a = k + 1, b = k + 2;
      const double r1 = right_rho_[a], m1 = right_mom_[a];
      const double r2 = left_rho_[b], m2 = left_mom_[b];
      const double u1 = m1 / r1, u2 = m2 / r2;
      const double s = std::max(std::abs(u1) + eos_.c(r1), std::abs(u2) + eos_.c(r2));
      smax = std::max(smax, s);
      const double f1a = m1, f2a = m1 * u1 + eos_.p(r1);
      const double f1b = m2, f2b = m2 * u2 + eos_.p(r2);
      flux_rho_[k] = 0.5 * (f1a + f1b) - 0.5 * s * (r2 - r1);
      flux_mom_[k] = 0.5 * (f2a + f2b) - 0.5 * s * (m2 - m1);
    }
    const double ratio = dt / field.dx();
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      field.rho[i] -= ratio * (flux_rho_[i + 1] - flux_rho_[i]);
      field.momentum[i] -= ratio * (flux_mom_[i + 1] - flux_mom_[i]);
      finite = finite && std::isfinite(field.rho[i]) && std::isfinite(field.momentum[i]);
    }
    max_speed = smax;
    if (!finite) return StepFlag::nonfinite;
    for (std::size_t i = 0; i < n; ++i)
      if (!(field.rho[i] > kRhoMin)) return StepFlag::vacuum;
    return StepFlag::ok;
  }

 private:
  void resize(std::size_t ne) {
    if (rho_.size() == ne) return;
    for (auto* v : {&rho_, &mom_, &left_rho_, &left_mom_, &right_rho_, &right_mom_}) v->assign(ne, 0.0);
    flux_rho_.assign(ne, 0.0);
    flux_mom_.assign(ne, 0.0);
  }

  detail::Eos eos_;
  std::vector<double> rho_, mom_, left_rho_, left_mom_, right_rho_, right_mom_, flux_rho_, flux_mom_;
};

inline StepOutcome hyperbolic_step(const GridField& field, double dt, const SolverConfig& cfg,
                                   const GasParams& gas) {
  cfg.validate();
  StepOutcome out{field, dt, 0.0, StepFlag::ok};
  if (!field.all_finite()) {
    out.flag = StepFlag::nonfinite;
    return out;
  }
  HyperbolicStepper stepper(gas);
  out.flag = stepper.step(out.field, dt, out.max_wave_speed);
  out.field.t = field.t + dt;
  return out;
}

inline void apply_damping(GridField& field, double t, double dt, const DampingProfile& profile) {
  const double f = damping_decay_factor(t, dt, profile);
  if (f == 1.0) return;
  for (double& m : field.momentum) m *= f;
}

/// Exact solution of dm/dt = -a(t) m over [t, t+dt] with rho frozen.
inline GridField damping_step(const GridField& field, double t, double dt, const DampingProfile& profile) {
  GridField out = field;
  apply_damping(out, t, dt, profile);
  return out;
}

// Source half-step over [t, t+h]: damping and forcing composed symmetrically.
inline void source_substep(GridField& field, double t, double h, const DampingProfile& profile,
                           const SourceFn& source) {
  if (!source) {
    apply_damping(field, t, h, profile);
    return;
  }
  apply_damping(field, t, 0.5 * h, profile);
  const double tm = t + 0.5 * h;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const auto s = source(field.x(i), tm);
    field.rho[i] += h * s[0];
    field.momentum[i] += h * s[1];
  }
  apply_damping(field, tm, 0.5 * h, profile);
}

/// Gradient and amplitude monitors used for blow-up detection.
struct GradientMonitor {
  double max_dxu = 0.0;
  double max_dxrho = 0.0;
  double sup_u = 0.0;
  double sup_drho = 0.0;

  double gradient_sum() const { return max_dxu + max_dxrho; }
  double steepness() const {
    const double amp = sup_u + sup_drho;
    return amp > 0.0 ? gradient_sum() / amp : 0.0;
  }
};

inline GradientMonitor measure_gradients(const GridField& f) {
  GradientMonitor g;
  const std::size_t n = f.size();
  const double inv2dx = 0.5 / f.dx();
  double u_prev = f.momentum[0] / f.rho[0];
  double u_cur = n > 1 ? f.momentum[1] / f.rho[1] : u_prev;
  g.sup_u = std::abs(u_prev);
  g.sup_drho = std::abs(f.rho[0] - 1.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double u_next = f.momentum[i + 1] / f.rho[i + 1];
    g.max_dxu = std::max(g.max_dxu, std::abs(u_next - u_prev) * inv2dx);
    g.max_dxrho = std::max(g.max_dxrho, std::abs(f.rho[i + 1] - f.rho[i - 1]) * inv2dx);
    g.sup_u = std::max(g.sup_u, std::abs(u_cur));
    g.sup_drho = std::max(g.sup_drho, std::abs(f.rho[i] - 1.0));
    u_prev = u_cur;
    u_cur = u_next;
  }
  g.sup_u = std::max(g.sup_u, std::abs(u_cur));
  g.sup_drho = std::max(g.sup_drho, std::abs(f.rho[n - 1] - 1.0));
  return g;
}

enum class AdvanceStatus { completed, blowup, vacuum, nonfinite };

inline const char* to_string(AdvanceStatus s) {
  switch (s) {
    case AdvanceStatus::completed: return "completed";
    case AdvanceStatus::blowup: return "blowup";
    case AdvanceStatus::vacuum: return "vacuum";
    case AdvanceStatus::nonfinite: return "nonfinite";
  }
  return "?";
}

struct StepRecord {
  double t = 0.0;  // time after the step
  double dt = 0.0;
  double max_wave_speed = 0.0;
  double max_dxu = 0.0;
  double gradient_sum = 0.0;
  double steepness = 0.0;
  double dx = 0.0;
  StepFlag flag = StepFlag::ok;
};

struct AdvanceResult {
  GridField field;
  AdvanceStatus status = AdvanceStatus::completed;
  std::vector<StepRecord> history;
  std::string message;
  int regrids = 0;
};

using SnapshotFn = std::function<void(const GridField&)>;

// Perturbation threshold and boundary margin (fraction of n_cells per side)
// that trigger domain doubling.
inline constexpr double kSupportTol = 1e-12;
inline constexpr std::size_t kRegridMarginDivisor = 16;

inline bool near_boundary(const GridField& f) {
  const auto [first, last] = f.perturbed_range(kSupportTol);
  if (first > last) return false;
  const auto margin = static_cast<std::ptrdiff_t>(f.size() / kRegridMarginDivisor);
  return first < margin || last >= static_cast<std::ptrdiff_t>(f.size()) - margin;
}

/// Integrates from field.t to `until` with CFL-limited Strang steps,
/// clipping steps to land exactly on multiples of cfg.snapshot_dt (where
/// on_snapshot is invoked) and on `until`. Stops early on vacuum, non-finite
/// state, or when a blow-up cap is reached.
inline AdvanceResult advance(GridField field, const SolverConfig& cfg, const DampingProfile& profile,
                             const GasParams& gas, double until, const SnapshotFn& on_snapshot = {},
                             const SourceFn& source = {}) {
  cfg.validate();
  if (!(until > field.t)) throw ConfigError("advance: target time must exceed current time");
  AdvanceResult res;
  HyperbolicStepper stepper(gas);
  const double snap = cfg.snapshot_dt;
  long long next_snap = 0;
  if (snap > 0.0) next_snap = static_cast<long long>(std::floor(field.t / snap + 1e-9)) + 1;

  double t = field.t;
  while (t < until) {
    if (cfg.regrid) {
      while (near_boundary(field)) {
        field = field.doubled();
        ++res.regrids;
      }
    }
    double speed = 0.0;
    try {
      speed = max_wave_speed(field, gas);
    } catch (const DomainError& e) {
      res.status = AdvanceStatus::vacuum;
      res.message = e.what();
      break;
    } catch (const NumericalError& e) {
      res.status = AdvanceStatus::nonfinite;
      res.message = e.what();
      break;
    }
    double dt = cfg.cfl * field.dx() / speed;
    double stop = until;
    bool at_snapshot = false;
    if (snap > 0.0) {
      const double ts = static_cast<double>(next_snap) * snap;
      if (ts <= stop) {
        stop = ts;
        at_snapshot = true;
      }
    }
    bool lands = false;
    if (t + dt >= stop - 1e-12 * std::max(1.0, std::abs(stop))) {
      dt = stop - t;
      lands = true;
    }
    source_substep(field, t, 0.5 * dt, profile, source);
    double smax = 0.0;
    const StepFlag flag = stepper.step(field, dt, smax);
    if (flag == StepFlag::ok) source_substep(field, t + 0.5 * dt, 0.5 * dt, profile, source);
    t = lands ? stop : t + dt;
    field.t = t;

    StepRecord rec;
    rec.t = t;
    rec.dt = dt;
    rec.max_wave_speed = smax;
    rec.flag = flag;
    rec.dx = field.dx();
    if (flag != StepFlag::ok) {
      res.history.push_back(rec);
      res.status = flag == StepFlag::vacuum ? AdvanceStatus::vacuum : AdvanceStatus::nonfinite;
      res.message = std::string("step flagged ") + to_string(flag) + " at t=" + std::to_string(t);
      break;
    }
    const GradientMonitor g = measure_gradients(field);
    rec.max_dxu = g.max_dxu;
    rec.gradient_sum = g.gradient_sum();
    rec.steepness = g.steepness();
    res.history.push_back(rec);

    if (lands && at_snapshot) {
      if (on_snapshot) on_snapshot(field);
      ++next_snap;
    }
    if (rec.gradient_sum >= cfg.gradient_cap) {
      res.status = AdvanceStatus::blowup;
      res.message = "gradient cap reached at t=" + std::to_string(t);
      break;
    }
    if (cfg.steepness_cap > 0.0 && rec.steepness >= cfg.steepness_cap) {
      res.status = AdvanceStatus::blowup;
      res.message = "steepness cap reached at t=" + std::to_string(t);
      break;
    }
  }
  res.field = std::move(field);
  return res;
}

}  // namespace eulerdamp
