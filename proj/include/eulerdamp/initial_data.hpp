// initial_data.hpp
// Compactly supported initial perturbations rho = 1 + eps*rho0, u = eps*u0,
// the tail moments q0(r), q1(r), the blow-up screening condition on (R0, R),
// and the constant B0 = 1/2 int_{R0}^{R} q0.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "quadrature.hpp"

namespace eulerdamp {

enum class ProfileKind { zero, bump, poly2, parabola, shifted_bump };

/// A named profile with support in |x| <= R and sup norm <= 1.
///
/// Recognised names: "zero", "bump", "poly2", "parabola", "shifted_bump(s)",
/// each optionally prefixed by '-' for the negated profile. "parabola" is
/// 1 - (x/R)^2, only continuous at the support edge; it exists for the moment
/// oracles.
class Profile {
 public:
  Profile() = default;
  Profile(ProfileKind kind, double sign = 1.0, double shift = 0.0)
      : kind_(kind), sign_(sign), shift_(shift) {}

  static Profile parse(std::string_view name) {
    std::string_view s = name;
    double sign = 1.0;
    if (!s.empty() && s.front() == '-') {
      sign = -1.0;
      s.remove_prefix(1);
    }
    if (s == "zero") return {ProfileKind::zero, sign};
    if (s == "bump") return {ProfileKind::bump, sign};
    if (s == "poly2") return {ProfileKind::poly2, sign};
    if (s == "parabola") return {ProfileKind::parabola, sign};
    constexpr std::string_view kShifted = "shifted_bump(";
    if (s.starts_with(kShifted) && s.ends_with(")")) {
      std::string_view arg = s.substr(kShifted.size(), s.size() - kShifted.size() - 1);
      double shift = 0.0;
      auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), shift);
      if (ec != std::errc() || ptr != arg.data() + arg.size())
        throw ConfigError("bad shift in profile '" + std::string(name) + "'");
      return {ProfileKind::shifted_bump, sign, shift};
    }
    throw ConfigError("unknown profile '" + std::string(name) + "'");
  }

  std::string name() const {
    std::string base;
    switch (kind_) {
      case ProfileKind::zero: base = "zero"; break;
      case ProfileKind::bump: base = "bump"; break;
      case ProfileKind::poly2: base = "poly2"; break;
      case ProfileKind::parabola: base = "parabola"; break;
      case ProfileKind::shifted_bump: {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, shift_);
        base = "shifted_bump(" + std::string(buf, res.ptr) + ")";
        break;
      }
    }
    return sign_ < 0.0 ? "-" + base : base;
  }

  ProfileKind kind() const { return kind_; }
  double sign() const { return sign_; }
  double shift() const { return shift_; }
  bool is_zero() const { return kind_ == ProfileKind::zero; }

  /// Profile value at x for support radius R.
  double operator()(double x, double R) const {
    switch (kind_) {
      case ProfileKind::zero:
        return 0.0;
      case ProfileKind::bump:
        return sign_ * bump(x / R);
      case ProfileKind::poly2: {
        const double s = x / R;
        if (std::abs(s) >= 1.0) return 0.0;
        const double w = 1.0 - s * s;
        return sign_ * w * w;
      }
      case ProfileKind::parabola: {
        const double s = x / R;
        if (std::abs(s) >= 1.0) return 0.0;
        return sign_ * (1.0 - s * s);
      }
      case ProfileKind::shifted_bump: {
        const double half = R - std::abs(shift_);
        return sign_ * bump((x - shift_) / half);
      }
    }
    return 0.0;
  }

  /// Right end of the open interval on which the profile is nonzero.
  double support_end(double R) const {
    switch (kind_) {
      case ProfileKind::zero: return -std::numeric_limits<double>::infinity();
      case ProfileKind::shifted_bump: return shift_ + (R - std::abs(shift_));
      default: return R;
    }
  }

  void validate(double R) const {
    if (kind_ == ProfileKind::shifted_bump && !(std::abs(shift_) < R))
      throw ConfigError("shifted_bump shift must satisfy |s| < R");
  }

  /// Standard mollifier exp(-1/(1-s^2)) on |s| < 1; peak value e^{-1}.
  static double bump(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
  }

 private:
  ProfileKind kind_ = ProfileKind::zero;
  double sign_ = 1.0;
  double shift_ = 0.0;
};

struct InitialDataSpec {
  double epsilon = 0.1;
  double R = 1.0;
  double R0 = 0.5;
  Profile rho_profile{ProfileKind::bump};
  Profile u_profile{ProfileKind::zero};

  double rho0(double x) const { return rho_profile(x, R); }
  double u0(double x) const { return u_profile(x, R); }

  void validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("initial.epsilon must be >= 0");
    if (!(R > 0.0)) throw ConfigError("initial.R must be > 0");
    if (!(R0 > 0.0 && R0 < R)) throw ConfigError("initial.R0 must satisfy 0 < R0 < R");
    rho_profile.validate(R);
    u_profile.validate(R);
    // unsigned profiles are non-negative and bounded by 1
    if (rho_profile.sign() < 0.0 && !(epsilon < 1.0))
      throw ConfigError("1 + eps*rho0 must stay positive");
  }
};

inline constexpr double kQuadTol = 1e-10;
inline constexpr double kHypothesisSlack = 1e-12;

inline GridField sample_initial(const InitialDataSpec& spec, const UniformGrid& grid) {
  grid.validate();
  if (grid.x_min > -spec.R || grid.x_max < spec.R)
    throw ConfigError("grid [" + std::to_string(grid.x_min) + ", " + std::to_string(grid.x_max) +
                      "] does not cover the initial support |x| <= R");
  GridField f(grid, 0.0);
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    const double x = grid.center(i);
    if (std::abs(x) >= spec.R || spec.epsilon == 0.0) continue;
    const double rho = 1.0 + spec.epsilon * spec.rho0(x);
    if (!(rho > 0.0)) throw ConfigError("initial density not positive at x=" + std::to_string(x));
    f.rho[i] = rho;
    f.momentum[i] = rho * spec.epsilon * spec.u0(x);
  }
  return f;
}

inline double q0(double r, const InitialDataSpec& spec, double tol = kQuadTol) {
  if (r >= spec.R || spec.rho_profile.is_zero()) return 0.0;
  const double lo = std::max(r, -spec.R);
  return adaptive_simpson([&](double x) { return (x - r) * (x - r) * spec.rho0(x); }, lo, spec.R, tol);
}

inline double q1(double r, const InitialDataSpec& spec, double tol = kQuadTol) {
  if (r >= spec.R || spec.rho_profile.is_zero() || spec.u_profile.is_zero()) return 0.0;
  const double lo = std::max(r, -spec.R);
  return 2.0 * adaptive_simpson([&](double x) { return (x - r) * spec.rho0(x) * spec.u0(x); }, lo,
                                spec.R, tol);
}

struct HypothesisVerdict {
  bool holds = true;
  std::optional<double> failing_r;
  std::string reason;
};

/// Screens q0 > 0 and q1 >= 0 at n_samples cell midpoints of (R0, R).
inline HypothesisVerdict check_hypothesis(const InitialDataSpec& spec, int n_samples = 257) {
  if (n_samples < 2) throw ConfigError("check_hypothesis needs at least 2 samples");
  const double h = (spec.R - spec.R0) / n_samples;
  for (int k = 0; k < n_samples; ++k) {
    const double r = spec.R0 + (k + 0.5) * h;
    const double a = q0(r, spec);
    // an exact zero left of the support end is underflow of a positive tail
    const bool underflow = a == 0.0 && spec.rho_profile.sign() > 0.0 && r < spec.rho_profile.support_end(spec.R);
    if (!(a > 0.0) && !underflow) return {false, r, "q0(r) = " + std::to_string(a) + " is not positive"};
    const double b = q1(r, spec);
    if (b < -kHypothesisSlack) return {false, r, "q1(r) = " + std::to_string(b) + " is negative"};
  }
  return {true, std::nullopt, {}};
}

inline double b0(const InitialDataSpec& spec, double tol = kQuadTol) {
  if (spec.rho_profile.is_zero()) return 0.0;
  return 0.5 * adaptive_simpson([&](double r) { return q0(r, spec, 0.01 * tol); }, spec.R0, spec.R, tol);
}

}  // namespace eulerdamp
