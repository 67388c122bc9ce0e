// gas_model.hpp
// Polytropic equation of state p = rho^gamma / gamma, sound-speed variables
// v = 2/(gamma-1) (c - 1), and the time-decayed damping a(t) = mu / (1+t)^lambda.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace eulerdamp {

// Density floor: anything at or below is treated as vacuum.
inline constexpr double kRhoMin = 1e-10;

struct GasParams {
  double gamma = 2.0;

  void validate() const {
    if (!(gamma > 1.0) || !std::isfinite(gamma))
      throw ConfigError("gas.gamma must be > 1, got " + std::to_string(gamma));
  }
};

struct DampingProfile {
  double mu = 0.0;
  double lambda = 1.0;

  void validate() const {
    if (!(mu >= 0.0) || !std::isfinite(mu))
      throw ConfigError("damping.mu must be >= 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw ConfigError("damping.lambda must be >= 0");
  }
};

struct PrimitiveState {
  double rho = 1.0;
  double u = 0.0;
};

struct SoundVars {
  double v = 0.0;
  double u = 0.0;
};

namespace detail {
inline void require_density(double rho, const char* who) {
  if (!(rho > kRhoMin))
    throw DomainError(std::string(who) + ": density " + std::to_string(rho) +
                      " at or below vacuum floor");
}
}  // namespace detail

inline double pressure(double rho, const GasParams& gas) {
  detail::require_density(rho, "pressure");
  return std::pow(rho, gas.gamma) / gas.gamma;
}

inline double sound_speed(double rho, const GasParams& gas) {
  detail::require_density(rho, "sound_speed");
  return std::pow(rho, 0.5 * (gas.gamma - 1.0));
}

inline SoundVars primitive_to_soundvars(const PrimitiveState& s, const GasParams& gas) {
  const double c = sound_speed(s.rho, gas);
  return {2.0 / (gas.gamma - 1.0) * (c - 1.0), s.u};
}

inline PrimitiveState soundvars_to_primitive(const SoundVars& sv, const GasParams& gas) {
  const double c = 1.0 + 0.5 * (gas.gamma - 1.0) * sv.v;
  if (!(c > 0.0))
    throw DomainError("soundvars_to_primitive: v=" + std::to_string(sv.v) +
                      " maps to non-positive sound speed (vacuum)");
  return {std::pow(c, 2.0 / (gas.gamma - 1.0)), sv.u};
}

inline double damping_coefficient(double t, const DampingProfile& d) {
  if (d.mu == 0.0) return 0.0;
  if (d.lambda == 0.0) return d.mu;
  if (d.lambda == 1.0) return d.mu / (1.0 + t);
  return d.mu * std::pow(1.0 + t, -d.lambda);
}

/// Exact integrating factor exp(-int_t^{t+dt} a(s) ds) of dm/dt = -a(t) m.
inline double damping_decay_factor(double t, double dt, const DampingProfile& d) {
  if (d.mu == 0.0) return 1.0;
  const double a = 1.0 + t;
  const double b = 1.0 + t + dt;
  if (d.lambda == 1.0) return std::pow(a / b, d.mu);
  if (d.lambda == 0.0) return std::exp(-d.mu * dt);
  const double k = 1.0 - d.lambda;
  // (b^k - a^k)/k, written to avoid cancellation for small dt
  const double integral = std::pow(a, k) * std::expm1(k * std::log1p(dt / a)) / k;
  return std::exp(-d.mu * integral);
}

}  // namespace eulerdamp
