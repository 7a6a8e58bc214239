#include "sdfem/weight.hpp"

#include <cmath>

#include "sdfem/error.hpp"

namespace sdfem {

std::string to_string(CrosswindMode m) {
  return m == CrosswindMode::ACD ? "acd" : "standard";
}

CrosswindMode parse_crosswind_mode(const std::string& s) {
  if (s == "standard" || s == "Standard") return CrosswindMode::Standard;
  if (s == "acd" || s == "ACD") return CrosswindMode::ACD;
  throw InvalidArgument("unknown crosswind mode '" + s + "' (expected standard or acd)");
}

StreamlineFrame StreamlineFrame::from(double b1, double b2) {
  if (!(b1 >= 0.0) || !(b2 >= 0.0)) throw InvalidArgument("b1 and b2 must be nonnegative");
  const double b = std::hypot(b1, b2);
  if (!(b > 0.0)) throw InvalidArgument("convection field must be nonzero");
  return {b, {b1 / b, b2 / b}, {-b2 / b, b1 / b}};
}

double g(double r) {
  if (r > 0.0) {
    const double e = std::exp(-r);
    return 2.0 * e / (1.0 + e);
  }
  return 2.0 / (1.0 + std::exp(r));
}

double g_prime(double r) {
  // -2 e^r / (1 + e^r)^2 is even in r.
  const double e = std::exp(-std::abs(r));
  const double d = 1.0 + e;
  return -2.0 * e / (d * d);
}

namespace {

struct Scaled {
  double a;  // s_beta / sigma_beta
  double t;  // s_eta / sigma_eta
};

Scaled scaled(Point x, const WeightSpec& w) {
  const double dx = x.x - w.x_star.x, dy = x.y - w.x_star.y;
  const auto& f = w.frame;
  return {(dx * f.beta.x + dy * f.beta.y) / w.sigma_beta,
          (dx * f.eta.x + dy * f.eta.y) / w.sigma_eta};
}

// g(t) g(-t) = sech^2(t/2) and its derivative.
double sech2_half(double t) {
  const double e = std::exp(-std::abs(t));
  const double d = 1.0 + e;
  return 4.0 * e / (d * d);
}

double sech2_half_prime(double t) {
  // d/dt sech^2(t/2) = -sech^2(t/2) tanh(t/2)
  return -sech2_half(t) * std::tanh(0.5 * t);
}

}  // namespace

double omega(Point x, const WeightSpec& w) {
  const Scaled s = scaled(x, w);
  return g(s.a) * sech2_half(s.t);
}

double omega_inv(Point x, const WeightSpec& w) {
  const Scaled s = scaled(x, w);
  const double c = std::cosh(0.5 * s.t);
  return 0.5 * (1.0 + std::exp(s.a)) * c * c;
}

WeightDerivatives omega_derivatives(Point x, const WeightSpec& w) {
  const Scaled s = scaled(x, w);
  const double sb = w.sigma_beta, se = w.sigma_eta;

  const double ga = g(s.a);
  const double h = sech2_half(s.t);

  // 1/omega = A(a) B(t) with A = (1 + e^a)/2, B = cosh^2(t/2) = (1 + cosh t)/2.
  const double ea = std::exp(s.a);
  const double A = 0.5 * (1.0 + ea);
  const double dA = 0.5 * ea;
  const double ch = std::cosh(s.t);
  const double B = 0.5 * (1.0 + ch);
  const double dB = 0.5 * std::sinh(s.t);
  const double ddB = 0.5 * ch;

  WeightDerivatives d;
  d.omega = ga * h;
  d.omega_inv = A * B;
  d.omega_beta = g_prime(s.a) * h / sb;
  d.omega_eta = ga * sech2_half_prime(s.t) / se;
  d.inv_beta = dA * B / sb;
  d.inv_eta = A * dB / se;
  d.inv_beta_beta = dA * B / (sb * sb);
  d.inv_beta_eta = dA * dB / (sb * se);
  d.inv_eta_eta = A * ddB / (se * se);
  return d;
}

bool SigmaPolicy::accepted() const {
  for (const auto& c : constraints)
    if (!c.satisfied) return false;
  return true;
}

std::vector<std::string> SigmaPolicy::failures() const {
  std::vector<std::string> out;
  for (const auto& c : constraints)
    if (!c.satisfied) out.push_back(c.name);
  return out;
}

SigmaPolicy sigma_policy(CrosswindMode mode, double k, int N, double epsilon,
                         const StabilizationConfig& stab) {
  if (N < 4 || N % 2 != 0) throw InvalidArgument("N must be even and at least 4");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (epsilon > 1.0 / N) throw InvalidArgument("epsilon must not exceed 1/N");

  const double n = N;
  const double logN = std::log(n);

  SigmaPolicy p;
  p.mode = mode;
  p.k = k;
  p.N = N;
  p.epsilon = epsilon;
  p.delta_max = stab.delta_max(N);
  p.eps_hat_max = mode == CrosswindMode::ACD ? stab.eps_tilde(epsilon, N) : epsilon;
  p.eps_hat_s = p.eps_hat_max;
  p.sigma_beta = k * logN / n;
  if (mode == CrosswindMode::Standard)
    p.sigma_eta = k / std::sqrt(n);
  else
    p.sigma_eta = k * std::sqrt(stab.eps_tilde(epsilon, N) * logN);
  p.sigma_eta_star = p.eps_hat_s <= 1.0 / (n * n) ? k / std::sqrt(n)
                                                   : k / std::sqrt(p.eps_hat_s) * std::pow(n, -1.5);
  p.sigma_beta_exceeds_one = p.sigma_beta > 1.0;

  // Relative slack for conditions that hold with equality by construction.
  constexpr double slack = 1e-12;
  auto ge = [&](std::string name, double lhs, double rhs) {
    p.constraints.push_back({std::move(name), lhs, rhs, lhs >= rhs * (1.0 - slack)});
  };
  p.constraints.push_back({"k > 1", k, 1.0, k > 1.0});
  ge("sigma_beta >= k(eps + delta_M)", p.sigma_beta, k * (epsilon + p.delta_max));
  ge("sigma_eta >= k eps_hat_M^(1/2)", p.sigma_eta, k * std::sqrt(p.eps_hat_max));
  ge("sigma_beta >= k N^-1", p.sigma_beta, k / n);
  ge("sigma_eta >= k N^-3/4", p.sigma_eta, k * std::pow(n, -0.75));
  ge("sigma_eta >= sigma_eta*", p.sigma_eta, p.sigma_eta_star);
  ge("sigma_beta >= k N^-1 ln N", p.sigma_beta, k * logN / n);
  ge("sigma_eta >= k N^-1 ln N", p.sigma_eta, k * logN / n);
  ge("sigma_eta >= k eps^1/4 N^-1/2 ln^1/2 N", p.sigma_eta,
     k * std::pow(epsilon, 0.25) / std::sqrt(n) * std::sqrt(logN));
  return p;
}

}  // namespace sdfem
