// diagnostics.hpp
// Functionals evaluated on solver snapshots:
//   - discrete Sobolev norms and the time-weighted energy bracket
//       |(1+t) v_x|_{m-1}^2 + |(1+t) u_x|_{m-1}^2 + |v|^2 + |u|^2
//     (square-rooted), with its running maximum over snapshots;
//   - power-law fits of sup-norm decay against (1+t);
//   - the tail moments P(r,t) = int_{x>r} (x-r)^2 (rho-1) dx and
//     dP/dt = int_{x>r} 2 (x-r) rho u dx, W = (1+t) P, and
//       F''(t) = int_{R0+t}^{R+t} W(r,t)/r dr,  F(t) = int_0^t (t-s) F''(s) ds;
//   - the convexity integrand (2/gamma)[(rho^gamma - 1) - gamma (rho - 1)];
//   - two-resolution blow-up time estimates.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gas_model.hpp"
#include "grid.hpp"
#include "initial_data.hpp"
#include "solver.hpp"

namespace eulerdamp {

// ---------------------------------------------------------------------------
// Finite differences

/// Central differences in the interior, one-sided stencils of the same order
/// of accuracy at the boundary cells.
inline std::vector<double> discrete_derivative(std::span<const double> f, double dx, int order = 1,
                                               int accuracy = 2) {
  const std::size_t n = f.size();
  if (order != 1 && order != 2) throw ConfigError("discrete_derivative: order must be 1 or 2");
  if (accuracy != 2 && accuracy != 4) throw ConfigError("discrete_derivative: accuracy must be 2 or 4");
  const std::size_t need = (order == 2 && accuracy == 4) ? 6 : 5;
  if (n < need) throw ConfigError("discrete_derivative: too few cells");
  std::vector<double> d(n);
  const double h = order == 1 ? dx : dx * dx;
  // stencil weights applied to f[i + offset]
  auto apply = [&](std::size_t i, std::span<const double> w, std::ptrdiff_t first, double denom) {
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * f[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + first + static_cast<std::ptrdiff_t>(k))];
    return s / (denom * h);
  };
  // mirrored stencil at the right boundary: odd derivatives flip sign
  auto apply_right = [&](std::size_t i, std::span<const double> w, double denom) {
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * f[i - k];
    return (order == 1 ? -s : s) / (denom * h);
  };

  if (accuracy == 2) {
    static constexpr double c1[] = {-0.5, 0.0, 0.5};
    static constexpr double c2[] = {1.0, -2.0, 1.0};
    static constexpr double b1[] = {-3.0, 4.0, -1.0};       // / 2
    static constexpr double b2[] = {2.0, -5.0, 4.0, -1.0};  // / 1
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = apply(i, order == 1 ? std::span(c1) : std::span(c2), -1, 1.0);
    if (order == 1) {
      d[0] = apply(0, b1, 0, 2.0);
      d[n - 1] = apply_right(n - 1, b1, 2.0);
    } else {
      d[0] = apply(0, b2, 0, 1.0);
      d[n - 1] = apply_right(n - 1, b2, 1.0);
    }
    return d;
  }
  static constexpr double c1[] = {1.0, -8.0, 0.0, 8.0, -1.0};       // / 12
  static constexpr double c2[] = {-1.0, 16.0, -30.0, 16.0, -1.0};   // / 12
  static constexpr double b1_0[] = {-25.0, 48.0, -36.0, 16.0, -3.0};
  static constexpr double b1_1[] = {-3.0, -10.0, 18.0, -6.0, 1.0};  // centred on index 1
  static constexpr double b2_0[] = {45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
  static constexpr double b2_1[] = {10.0, -15.0, -4.0, 14.0, -6.0, 1.0};
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = apply(i, order == 1 ? std::span(c1) : std::span(c2), -2, 12.0);
  if (order == 1) {
    d[0] = apply(0, b1_0, 0, 12.0);
    d[1] = apply(0, b1_1, 0, 12.0);
    d[n - 1] = apply_right(n - 1, b1_0, 12.0);
    d[n - 2] = apply_right(n - 1, b1_1, 12.0);
  } else {
    d[0] = apply(0, b2_0, 0, 12.0);
    d[1] = apply(0, b2_1, 0, 12.0);
    d[n - 1] = apply_right(n - 1, b2_0, 12.0);
    d[n - 2] = apply_right(n - 1, b2_1, 12.0);
  }
  return d;
}

inline double l2_norm_sq(std::span<const double> f, double dx) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return s * dx;
}

inline double sup_norm(std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s = std::max(s, std::abs(v));
  return s;
}

/// |f|_{H^k}^2 = sum_{j<=k} |d^j f|_{L2}^2 with 4th-order differences.
inline double sobolev_norm_sq(std::span<const double> f, double dx, int k) {
  double s = l2_norm_sq(f, dx);
  if (k <= 0) return s;
  s += l2_norm_sq(discrete_derivative(f, dx, 1, 4), dx);
  if (k == 1) return s;
  std::vector<double> dd = discrete_derivative(f, dx, 2, 4);
  s += l2_norm_sq(dd, dx);
  for (int j = 3; j <= k; ++j) {
    dd = discrete_derivative(dd, dx, 1, 4);
    s += l2_norm_sq(dd, dx);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Sound variables and the weighted energy

struct SoundFields {
  std::vector<double> v, u, dxv, dxu, dtv;
};

/// v, u and their first derivatives; dtv from the mass equation in sound
/// variables, v_t = -u_x - u v_x - (gamma-1)/2 v u_x.
inline SoundFields sound_fields(const GridField& f, const GasParams& gas) {
  SoundFields s;
  const std::size_t n = f.size();
  s.v.resize(n);
  s.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SoundVars sv = primitive_to_soundvars({f.rho[i], f.velocity(i)}, gas);
    s.v[i] = sv.v;
    s.u[i] = sv.u;
  }
  s.dxv = discrete_derivative(s.v, f.dx(), 1, 4);
  s.dxu = discrete_derivative(s.u, f.dx(), 1, 4);
  s.dtv.resize(n);
  const double k = 0.5 * (gas.gamma - 1.0);
  for (std::size_t i = 0; i < n; ++i) s.dtv[i] = -s.dxu[i] - s.u[i] * s.dxv[i] - k * s.v[i] * s.dxu[i];
  return s;
}

struct EnergyBracket {
  double bracket = 0.0;   // square root of the weighted sum
  double dtv_norm = 0.0;  // |(1+t) v_t|_{m-1}
};

inline EnergyBracket weighted_energy(const GridField& snapshot, int m, const GasParams& gas) {
  if (m < 1) throw ConfigError("weighted_energy: m must be >= 1");
  const SoundFields s = sound_fields(snapshot, gas);
  const double dx = snapshot.dx();
  const double w = 1.0 + snapshot.t;
  const double sum = w * w * (sobolev_norm_sq(s.dxv, dx, m - 1) + sobolev_norm_sq(s.dxu, dx, m - 1)) +
                     l2_norm_sq(s.v, dx) + l2_norm_sq(s.u, dx);
  return {std::sqrt(sum), w * std::sqrt(sobolev_norm_sq(s.dtv, dx, m - 1))};
}

/// Running supremum of the energy bracket across snapshots.
class EnergyTracker {
 public:
  explicit EnergyTracker(int m = 2) : m_(m) {}
  EnergyBracket update(const GridField& snapshot, const GasParams& gas) {
    const EnergyBracket e = weighted_energy(snapshot, m_, gas);
    running_ = std::max(running_, e.bracket);
    return e;
  }
  double running_max() const { return running_; }
  int m() const { return m_; }

 private:
  int m_;
  double running_ = 0.0;
};

// ---------------------------------------------------------------------------
// Decay-rate fits

struct PowerFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of log residuals
  std::size_t samples = 0;
  double t_lo = 0.0, t_hi = 0.0;
};

/// Least-squares slope of log(value) against log(1+t) over [t_lo, t_hi].
inline PowerFit pointwise_rates(std::span<const double> times, std::span<const double> values, double t_lo,
                                double t_hi) {
  if (times.size() != values.size()) throw ConfigError("pointwise_rates: size mismatch");
  std::vector<double> xs, ys;
  double tmin = std::numeric_limits<double>::infinity(), tmax = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(values[i] > 0.0))
      throw NumericalError("pointwise_rates: non-positive sup-norm at t=" + std::to_string(times[i]));
    xs.push_back(std::log1p(times[i]));
    ys.push_back(std::log(values[i]));
    tmin = std::min(tmin, times[i]);
    tmax = std::max(tmax, times[i]);
  }
  if (xs.size() < 10) throw ConfigError("pointwise_rates: fewer than 10 samples in fit window");
  if (!(tmin > 0.0 && tmax >= 10.0 * tmin * (1.0 - 1e-12)))
    throw ConfigError("pointwise_rates: samples must span at least one decade in t");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  PowerFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  fit.samples = xs.size();
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  return fit;
}

// ---------------------------------------------------------------------------
// Tail moments

namespace detail {
// Trapezoid rule of g(x_i) = w(x_i) * h_i over nodes {r} U {x_i > r}, with the
// weight w vanishing at x = r.
template <class Weight>
double tail_trapezoid(const GridField& f, const std::vector<double>& h, double r, Weight&& w) {
  const std::size_t n = f.size();
  const double dx = f.dx();
  const double x0 = f.grid.x_min + 0.5 * dx;
  std::size_t i0 = 0;
  if (r >= x0) i0 = static_cast<std::size_t>(std::floor((r - x0) / dx)) + 1;
  while (i0 < n && !(f.x(i0) > r)) ++i0;
  while (i0 > 0 && f.x(i0 - 1) > r) --i0;
  if (i0 >= n) return 0.0;
  double prev = w(f.x(i0)) * h[i0];
  double s = 0.5 * (f.x(i0) - r) * prev;
  for (std::size_t i = i0 + 1; i < n; ++i) {
    const double cur = w(f.x(i)) * h[i];
    s += 0.5 * dx * (prev + cur);
    prev = cur;
  }
  return s;
}
}  // namespace detail

inline double sideris_P(const GridField& snapshot, double r) {
  std::vector<double> h(snapshot.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = snapshot.rho[i] - 1.0;
  return detail::tail_trapezoid(snapshot, h, r, [r](double x) { return (x - r) * (x - r); });
}

inline double sideris_dPdt(const GridField& snapshot, double r) {
  return detail::tail_trapezoid(snapshot, snapshot.momentum, r, [r](double x) { return 2.0 * (x - r); });
}

/// Fixed stations on which P and dP/dt are recorded.
struct RLattice {
  std::vector<double> r;

  static RLattice spanning(double lo, double hi, std::size_t n = 129) {
    if (n < 2 || !(hi > lo)) throw ConfigError("r-lattice needs n >= 2 and hi > lo");
    RLattice l;
    l.r.resize(n);
    for (std::size_t k = 0; k < n; ++k) l.r[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return l;
  }
  /// Stations over [R0 - 0.5, R + t_end + 0.5].
  static RLattice for_run(const InitialDataSpec& spec, double t_end, std::size_t n = 129) {
    return spanning(spec.R0 - 0.5, spec.R + t_end + 0.5, n);
  }
};

inline std::vector<double> P_on_lattice(const GridField& f, const RLattice& l) {
  std::vector<double> h(f.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = f.rho[i] - 1.0;
  std::vector<double> out(l.r.size());
  for (std::size_t k = 0; k < l.r.size(); ++k) {
    const double r = l.r[k];
    out[k] = detail::tail_trapezoid(f, h, r, [r](double x) { return (x - r) * (x - r); });
  }
  return out;
}

inline std::vector<double> dPdt_on_lattice(const GridField& f, const RLattice& l) {
  std::vector<double> out(l.r.size());
  for (std::size_t k = 0; k < l.r.size(); ++k) out[k] = sideris_dPdt(f, l.r[k]);
  return out;
}

// Stations per moving window [R0 + t, R + t] used for F''.
inline constexpr std::size_t kWindowStations = 33;

/// F''(t) = int_{R0+t}^{R+t} (1+t) P(r,t) / r dr by composite Simpson on a
/// translating window lattice.
inline double sideris_Fpp(const GridField& snapshot, double R0, double R) {
  const double t = snapshot.t;
  const double lo = R0 + t, hi = R + t;
  if (!(lo > 0.0)) throw NumericalError("F'' window reaches r <= 0");
  if (lo < snapshot.grid.x_min || hi > snapshot.grid.x_max)
    throw NumericalError("F'' window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "] leaves the snapshot grid");
  std::vector<double> h(snapshot.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = snapshot.rho[i] - 1.0;
  const std::size_t m = kWindowStations - 1;  // even number of panels
  const double step = (hi - lo) / static_cast<double>(m);
  double s = 0.0;
  for (std::size_t k = 0; k <= m; ++k) {
    const double r = lo + step * static_cast<double>(k);
    const double P = detail::tail_trapezoid(snapshot, h, r, [r](double x) { return (x - r) * (x - r); });
    const double wk = (k == 0 || k == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    s += wk * (1.0 + t) * P / r;
  }
  return s * step / 3.0;
}

/// Time history of F'' at snapshot times with F and F' accumulated from it:
/// F'(t) = int_0^t F'', F(t) = int_0^t (t - s) F''(s) ds (trapezoid in s).
class SiderisAccumulators {
 public:
  SiderisAccumulators(double R0, double R) : R0_(R0), R_(R) {}

  struct Values {
    double t = 0.0, F = 0.0, Fp = 0.0, Fpp = 0.0;
  };

  Values record(const GridField& snapshot) {
    const double fpp = sideris_Fpp(snapshot, R0_, R_);
    times_.push_back(snapshot.t);
    fpp_.push_back(fpp);
    const std::size_t k = times_.size() - 1;
    Values v{snapshot.t, 0.0, 0.0, fpp};
    if (k > 0) {
      const double h = times_[k] - times_[k - 1];
      fp_.push_back(fp_.back() + 0.5 * h * (fpp_[k - 1] + fpp_[k]));
      // direct quadrature of the convolution, independent of F'
      double F = 0.0;
      for (std::size_t j = 1; j <= k; ++j) {
        const double a = (snapshot.t - times_[j - 1]) * fpp_[j - 1];
        const double b = (snapshot.t - times_[j]) * fpp_[j];
        F += 0.5 * (times_[j] - times_[j - 1]) * (a + b);
      }
      f_.push_back(F);
      v.F = F;
      v.Fp = fp_.back();
    } else {
      fp_.push_back(0.0);
      f_.push_back(0.0);
    }
    return v;
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& F() const { return f_; }
  const std::vector<double>& Fp() const { return fp_; }
  const std::vector<double>& Fpp() const { return fpp_; }

 private:
  double R0_, R_;
  std::vector<double> times_, fpp_, fp_, f_;
};

// ---------------------------------------------------------------------------
// Convexity integrand

/// (2/gamma)[(rho^gamma - 1) - gamma (rho - 1)], evaluated without
/// cancellation near rho = 1 so the result is never negative.
inline double g_pointwise(double rho, const GasParams& gas) {
  const double g = gas.gamma;
  const double d = rho - 1.0;
  if (g == 2.0) return d * d;
  double val;
  if (std::abs(d) < 1e-2) {
    // binomial series sum_{k>=2} C(g,k) d^k
    double coef = g * (g - 1.0) / 2.0;
    double pw = d * d;
    val = 0.0;
    for (int k = 2; k < 12; ++k) {
      val += coef * pw;
      coef *= (g - k) / (k + 1.0);
      pw *= d;
    }
  } else {
    val = std::expm1(g * std::log1p(d)) - g * d;
  }
  return std::max(0.0, 2.0 / g * val);
}

/// Piecewise lower-bound shape: (1-rho)^g below 1/2, (rho-1)^2 on [1/2, 2],
/// (rho-1)^g above 2.
inline double phi_gamma(double rho, const GasParams& gas) {
  if (rho < 0.5) return std::pow(1.0 - rho, gas.gamma);
  if (rho <= 2.0) return (rho - 1.0) * (rho - 1.0);
  return std::pow(rho - 1.0, gas.gamma);
}

struct GIntegrand {
  std::vector<double> pointwise;  // per cell
  std::vector<double> phi;        // per cell
  std::vector<double> tail;       // G(r) on the lattice
  std::vector<double> phi_tail;   // int_{x>r} phi on the lattice
};

inline GIntegrand g_integrand(const GridField& snapshot, const GasParams& gas, const RLattice& lattice) {
  GIntegrand out;
  const std::size_t n = snapshot.size();
  out.pointwise.resize(n);
  out.phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(snapshot.rho[i] > 0.0)) throw DomainError("g_integrand: non-positive density");
    out.pointwise[i] = g_pointwise(snapshot.rho[i], gas);
    out.phi[i] = phi_gamma(snapshot.rho[i], gas);
  }
  out.tail.resize(lattice.r.size());
  out.phi_tail.resize(lattice.r.size());
  auto one = [](double) { return 1.0; };
  for (std::size_t k = 0; k < lattice.r.size(); ++k) {
    out.tail[k] = detail::tail_trapezoid(snapshot, out.pointwise, lattice.r[k], one);
    out.phi_tail[k] = detail::tail_trapezoid(snapshot, out.phi, lattice.r[k], one);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Blow-up estimation

/// What blowup_time needs from one run.
struct RunTrace {
  AdvanceStatus status = AdvanceStatus::completed;
  std::vector<StepRecord> history;
  std::size_t n_cells = 0;
};

enum class BlowupVerdict { converged, unconverged, no_blowup };

inline const char* to_string(BlowupVerdict v) {
  switch (v) {
    case BlowupVerdict::converged: return "converged";
    case BlowupVerdict::unconverged: return "unconverged";
    case BlowupVerdict::no_blowup: return "no_blowup";
  }
  return "?";
}

struct BlowupEstimate {
  std::optional<double> t_blow_coarse;
  std::optional<double> t_blow_fine;
  double t_est = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();  // |tc - tf| / tf
  BlowupVerdict verdict = BlowupVerdict::no_blowup;
  std::string note;
};

inline constexpr double kBlowupAgreement = 0.1;

inline std::optional<double> blowup_instant(const RunTrace& run) {
  if (run.status != AdvanceStatus::blowup || run.history.empty()) return std::nullopt;
  return run.history.back().t;
}

/// Extrapolated blow-up time: linear fit of the reciprocal steepness against
/// t over its final decade (the trailing samples whose steepness is within a
/// factor 10 of the final value), continued to zero.
inline double extrapolate_blowup(const std::vector<StepRecord>& history) {
  if (history.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const double s_final = history.back().steepness;
  if (!(s_final > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  std::size_t first = history.size() - 1;
  while (first > 0 && history[first - 1].steepness > 0.1 * s_final) --first;
  const std::size_t n = history.size() - first;
  if (n < 3) return std::numeric_limits<double>::quiet_NaN();
  double mt = 0.0, my = 0.0;
  for (std::size_t i = first; i < history.size(); ++i) {
    mt += history[i].t;
    my += 1.0 / history[i].steepness;
  }
  mt /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = first; i < history.size(); ++i) {
    const double dt = history[i].t - mt;
    stt += dt * dt;
    sty += dt * (1.0 / history[i].steepness - my);
  }
  const double slope = sty / stt;
  if (!(slope < 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return mt - my / slope;
}

/// Compares a run with its twice-refined counterpart.
inline BlowupEstimate blowup_time(const RunTrace& coarse, const RunTrace& fine) {
  BlowupEstimate e;
  e.t_blow_coarse = blowup_instant(coarse);
  e.t_blow_fine = blowup_instant(fine);
  if (!e.t_blow_coarse && !e.t_blow_fine) {
    e.verdict = BlowupVerdict::no_blowup;
    e.note = "no blow-up observed by t_end";
    return e;
  }
  if (e.t_blow_fine) e.t_est = extrapolate_blowup(fine.history);
  if (!e.t_blow_coarse || !e.t_blow_fine) {
    e.verdict = BlowupVerdict::unconverged;
    e.note = "blow-up seen at one resolution only";
    return e;
  }
  e.ratio = std::abs(*e.t_blow_coarse - *e.t_blow_fine) / *e.t_blow_fine;
  e.verdict = e.ratio <= kBlowupAgreement ? BlowupVerdict::converged : BlowupVerdict::unconverged;
  if (e.verdict == BlowupVerdict::unconverged) e.note = "resolutions disagree by more than 10%";
  return e;
}

template <class Range>
bool is_monotone_nonincreasing(const Range& values) {
  return std::adjacent_find(std::begin(values), std::end(values), [](double a, double b) { return b > a; }) ==
         std::end(values);
}

template <class Range>
bool is_monotone_nondecreasing(const Range& values) {
  return std::adjacent_find(std::begin(values), std::end(values), [](double a, double b) { return b < a; }) ==
         std::end(values);
}

// ---------------------------------------------------------------------------
// Per-snapshot record

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double excess_mass = 0.0;  // int (rho - 1) dx
  double momentum = 0.0;
  double sup_v = 0.0, sup_u = 0.0, sup_dxv = 0.0, sup_dxu = 0.0;
  double hm_v = 0.0, hm_u = 0.0, hm1_dxv = 0.0, hm1_dxu = 0.0;
  double dtv_norm = 0.0;
  double energy_bracket = 0.0;
  double energy_running = 0.0;
  std::vector<double> P;
  std::vector<double> dPdt;
  double F = 0.0, Fp = 0.0, Fpp = 0.0;
  bool sideris_valid = false;
  double min_G = 0.0;
};

/// Stateful per-run consumer of snapshots.
class RunDiagnostics {
 public:
  RunDiagnostics(const GasParams& gas, const InitialDataSpec& spec, const RLattice& lattice, int m = 2,
                 bool sideris = true)
      : gas_(gas), spec_(spec), lattice_(lattice), energy_(m), sideris_(spec.R0, spec.R), sideris_on_(sideris) {}

  const DiagnosticsRecord& consume(const GridField& f) {
    DiagnosticsRecord rec;
    rec.t = f.t;
    rec.mass = f.total_mass();
    double ex = 0.0;
    for (double r : f.rho) ex += r - 1.0;
    rec.excess_mass = ex * f.dx();
    rec.momentum = f.total_momentum();
    const SoundFields s = sound_fields(f, gas_);
    const int m = energy_.m();
    rec.sup_v = sup_norm(s.v);
    rec.sup_u = sup_norm(s.u);
    rec.sup_dxv = sup_norm(s.dxv);
    rec.sup_dxu = sup_norm(s.dxu);
    rec.hm_v = std::sqrt(sobolev_norm_sq(s.v, f.dx(), m));
    rec.hm_u = std::sqrt(sobolev_norm_sq(s.u, f.dx(), m));
    rec.hm1_dxv = std::sqrt(sobolev_norm_sq(s.dxv, f.dx(), m - 1));
    rec.hm1_dxu = std::sqrt(sobolev_norm_sq(s.dxu, f.dx(), m - 1));
    const EnergyBracket e = energy_.update(f, gas_);
    rec.energy_bracket = e.bracket;
    rec.energy_running = energy_.running_max();
    rec.dtv_norm = e.dtv_norm;
    rec.P = P_on_lattice(f, lattice_);
    rec.dPdt = dPdt_on_lattice(f, lattice_);
    double gmin = std::numeric_limits<double>::infinity();
    for (double rho : f.rho) gmin = std::min(gmin, g_pointwise(rho, gas_));
    rec.min_G = gmin;
    if (sideris_on_) {
      try {
        const auto v = sideris_.record(f);
        rec.F = v.F;
        rec.Fp = v.Fp;
        rec.Fpp = v.Fpp;
        rec.sideris_valid = true;
      } catch (const NumericalError&) {
        sideris_on_ = false;
      }
    }
    records_.push_back(std::move(rec));
    return records_.back();
  }

  const std::vector<DiagnosticsRecord>& records() const { return records_; }
  const RLattice& lattice() const { return lattice_; }
  const SiderisAccumulators& sideris() const { return sideris_; }

  std::vector<double> series(double DiagnosticsRecord::*field) const {
    std::vector<double> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.*field);
    return out;
  }

 private:
  GasParams gas_;
  InitialDataSpec spec_;
  RLattice lattice_;
  EnergyTracker energy_;
  SiderisAccumulators sideris_;
  bool sideris_on_;
  std::vector<DiagnosticsRecord> records_;
};

}  // namespace eulerdamp
