// grid.hpp
// Uniform cell-centered 1-D grid carrying the conserved state (rho, rho*u).
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace eulerdamp {

struct UniformGrid {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n_cells = 0;

  double dx() const { return (x_max - x_min) / static_cast<double>(n_cells); }
  double center(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
  double length() const { return x_max - x_min; }

  void validate() const {
    if (n_cells < 5) throw ConfigError("grid needs at least 5 cells");
    if (!(x_max > x_min)) throw ConfigError("grid bounds must satisfy x_max > x_min");
  }

  static UniformGrid symmetric(double half_width, std::size_t n) { return {-half_width, half_width, n}; }
};

struct GridField {
  UniformGrid grid;
  std::vector<double> rho;
  std::vector<double> momentum;
  double t = 0.0;

  GridField() = default;
  explicit GridField(const UniformGrid& g, double t0 = 0.0)
      : grid(g), rho(g.n_cells, 1.0), momentum(g.n_cells, 0.0), t(t0) {}

  std::size_t size() const { return rho.size(); }
  double dx() const { return grid.dx(); }
  double x(std::size_t i) const { return grid.center(i); }
  double velocity(std::size_t i) const { return momentum[i] / rho[i]; }

  std::vector<double> velocities() const {
    std::vector<double> u(size());
    for (std::size_t i = 0; i < size(); ++i) u[i] = velocity(i);
    return u;
  }

  // Fixed index order keeps the reductions bit-reproducible.
  double total_mass() const {
    double s = 0.0;
    for (double r : rho) s += r;
    return s * dx();
  }
  double total_momentum() const {
    double s = 0.0;
    for (double m : momentum) s += m;
    return s * dx();
  }

  bool all_finite() const {
    for (std::size_t i = 0; i < size(); ++i)
      if (!std::isfinite(rho[i]) || !std::isfinite(momentum[i])) return false;
    return true;
  }

  /// Index range [first, last] of cells that deviate from the background
  /// (rho = 1, m = 0) by more than tol; first > last when none do.
  std::pair<std::ptrdiff_t, std::ptrdiff_t> perturbed_range(double tol) const {
    std::ptrdiff_t first = static_cast<std::ptrdiff_t>(size());
    std::ptrdiff_t last = -1;
    for (std::size_t i = 0; i < size(); ++i) {
      if (std::abs(rho[i] - 1.0) > tol || std::abs(momentum[i]) > tol) {
        if (first > static_cast<std::ptrdiff_t>(i)) first = static_cast<std::ptrdiff_t>(i);
        last = static_cast<std::ptrdiff_t>(i);
      }
    }
    return {first, last};
  }

  /// Doubles the domain about its midpoint while keeping n_cells: each pair of
  /// old cells is merged into one new cell (exact conservative restriction)
  /// and the new outer quarters are filled with the background state.
  GridField doubled() const {
    const std::size_t n = size();
    if (n % 4 != 0) throw ConfigError("domain doubling needs n_cells divisible by 4");
    const double mid = 0.5 * (grid.x_min + grid.x_max);
    const double half = 0.5 * grid.length();
    GridField out(UniformGrid{mid - 2.0 * half, mid + 2.0 * half, n}, t);
    const std::size_t offset = n / 4;
    for (std::size_t k = 0; k < n / 2; ++k) {
      out.rho[offset + k] = 0.5 * (rho[2 * k] + rho[2 * k + 1]);
      out.momentum[offset + k] = 0.5 * (momentum[2 * k] + momentum[2 * k + 1]);
    }
    return out;
  }
};

}  // namespace eulerdamp
