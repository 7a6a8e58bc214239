#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sdfem/mesh.hpp"
#include "sdfem/problem.hpp"

namespace sdfem {

/// Orthonormal frame aligned with the constant convection field.
struct StreamlineFrame {
  double b = 1.0;
  Point beta{1.0, 0.0};  // (b1, b2) / b
  Point eta{0.0, 1.0};   // (-b2, b1) / b

  static StreamlineFrame from(double b1, double b2);
};

struct WeightSpec {
  Point x_star;
  double sigma_beta = 1.0;
  double sigma_eta = 1.0;
  StreamlineFrame frame;
};

/// Logistic factor 2 / (1 + e^r), evaluated without overflow.
double g(double r);
double g_prime(double r);

double omega(Point x, const WeightSpec& w);
double omega_inv(Point x, const WeightSpec& w);

struct WeightDerivatives {
  double omega;
  double omega_inv;
  double omega_beta;
  double omega_eta;
  double inv_beta;
  double inv_eta;
  double inv_beta_beta;
  double inv_beta_eta;
  double inv_eta_eta;
};

WeightDerivatives omega_derivatives(Point x, const WeightSpec& w);

/// Inverse weight and its first derivatives in terms of the scaled
/// streamline coordinates a = s_beta / sigma_beta, t = s_eta / sigma_eta.
/// This is the inner loop of the weighted integrals.
struct InverseWeight {
  double value;
  double d_beta;
  double d_eta;
};

inline InverseWeight inverse_weight(double a, double t, double sigma_beta, double sigma_eta) {
  // 1/omega = (1 + e^a) / 2 * cosh^2(t / 2).
  const double ea = std::exp(a);
  const double et = std::exp(t);
  const double iet = 1.0 / et;
  const double B = 0.25 * (2.0 + et + iet);
  const double dB = 0.25 * (et - iet);
  const double A = 0.5 * (1.0 + ea);
  return {A * B, 0.5 * ea * B / sigma_beta, A * dB / sigma_eta};
}

struct SigmaConstraint {
  std::string name;
  double lhs;
  double rhs;
  bool satisfied;
};

/// Decay scales of the weight for one crosswind mode together with every
/// admissibility condition evaluated at (k, N, eps, C*).
struct SigmaPolicy {
  CrosswindMode mode;
  double k;
  int N;
  double epsilon;
  double sigma_beta;
  double sigma_eta;
  double sigma_eta_star;
  double delta_max;
  double eps_hat_max;
  double eps_hat_s;
  std::vector<SigmaConstraint> constraints;
  // Warning only: the point-value estimate assumes sigma_beta <= 1.
  bool sigma_beta_exceeds_one;

  bool accepted() const;
  std::vector<std::string> failures() const;
};

/// Throws InvalidArgument if eps > 1/N or N is not a valid mesh size.
/// k <= 1 is reported as a failed constraint, not thrown.
SigmaPolicy sigma_policy(CrosswindMode mode, double k, int N, double epsilon,
                         const StabilizationConfig& stab);

}  // namespace sdfem
