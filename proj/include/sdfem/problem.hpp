#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "sdfem/mesh.hpp"

namespace sdfem {

/// Coefficients of -eps*Lap(u) + b.grad(u) + c*u = f on the unit square, u = 0 on the boundary.
struct ProblemData {
  double epsilon = 1e-4;
  double b1 = 1.0;
  double b2 = 1.0;
  double c = 1.0;
  std::function<double(Point)> f = [](Point) { return 1.0; };

  double b_norm() const { return std::hypot(b1, b2); }
};

/// Crosswind diffusion: Standard uses eps everywhere; ACD raises it to
/// max(eps, N^{-3/2}) on the coarse region.
enum class CrosswindMode { Standard, ACD };

std::string to_string(CrosswindMode m);
CrosswindMode parse_crosswind_mode(const std::string& s);

/// Per-triangle stabilization constants. delta = c_star / N on the coarse
/// region and zero in the layers.
struct StabilizationConfig {
  double c_star = 0.5;
  CrosswindMode mode = CrosswindMode::Standard;

  double delta(Region r, int N) const { return r == Region::S ? c_star / N : 0.0; }
  double delta_max(int N) const { return c_star / N; }

  double eps_tilde(double epsilon, int N) const {
    return std::max(epsilon, std::pow(static_cast<double>(N), -1.5));
  }
  double eps_hat(Region r, double epsilon, int N) const {
    if (mode == CrosswindMode::ACD && r == Region::S) return eps_tilde(epsilon, N);
    return epsilon;
  }
  double eps_hat_max(double epsilon, int N) const {
    return mode == CrosswindMode::ACD ? eps_tilde(epsilon, N) : epsilon;
  }
};

}  // namespace sdfem
